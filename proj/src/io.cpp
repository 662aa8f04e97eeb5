#include "otge/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace otge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require(bool cond, const std::string& message) {
  if (!cond) throw std::invalid_argument(message);
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const json& rows) {
  require(rows.is_array() && !rows.empty(), "checkpoint: malformed matrix");
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.front().size());
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    require(static_cast<Eigen::Index>(row.size()) == c, "checkpoint: ragged matrix");
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row[static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

json config_to_json(const TrainConfig& c) {
  return json{{"n", c.n},
              {"s", c.s},
              {"tau", c.tau},
              {"epsilon", c.epsilon},
              {"rho", c.rho},
              {"sinkhorn_iterations", c.sinkhorn_iterations},
              {"learning_rate", c.learning_rate},
              {"batch_size", c.batch_size},
              {"epochs", c.epochs},
              {"seed", c.seed},
              {"early_stop_improvement", c.early_stop_improvement},
              {"early_stop_patience", c.early_stop_patience}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  c.n = j.at("n").get<int>();
  c.s = j.at("s").get<int>();
  c.tau = j.at("tau").get<int>();
  c.epsilon = j.at("epsilon").get<double>();
  c.rho = j.at("rho").get<double>();
  c.sinkhorn_iterations = j.at("sinkhorn_iterations").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("early_stop_improvement")) {
    c.early_stop_improvement = j.at("early_stop_improvement").get<double>();
  }
  if (j.contains("early_stop_patience")) {
    c.early_stop_patience = j.at("early_stop_patience").get<int>();
  }
  return c;
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("input not found: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write: " + path.string());
  out << content;
}

Graph load_graph(const fs::path& edge_list_path) {
  return Graph::from_edge_list(read_text_file(edge_list_path));
}

void load_labels(Graph& g, const fs::path& labels_path) {
  const std::string text = read_text_file(labels_path);
  std::vector<int> labels(static_cast<std::size_t>(g.n()), -1);
  std::unordered_map<std::int64_t, int> index;
  for (std::size_t i = 0; i < g.original_ids().size(); ++i) {
    index.emplace(g.original_ids()[i], static_cast<int>(i));
  }

  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream tokens(line);
    std::int64_t id;
    int cls;
    std::string extra;
    if (!(tokens >> id >> cls) || (tokens >> extra)) {
      throw std::invalid_argument("label parse error on line " + std::to_string(line_no) +
                                  ": '" + line + "'");
    }
    auto it = index.find(id);
    require(it != index.end(),
            "label file references unknown node id " + std::to_string(id));
    labels[static_cast<std::size_t>(it->second)] = cls;
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0, "label file does not cover node id " +
                                std::to_string(g.original_ids()[i]));
  }
  g.set_labels(std::move(labels));
}

std::vector<std::string> parse_config_text(const std::string& text, TrainConfig& cfg) {
  std::vector<std::string> seen;
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos,
            "config parse error on line " + std::to_string(line_no) + ": missing '='");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(!key.empty() && !value.empty(),
            "config parse error on line " + std::to_string(line_no));

    try {
      if (key == "n") cfg.n = std::stoi(value);
      else if (key == "s") cfg.s = std::stoi(value);
      else if (key == "tau") cfg.tau = std::stoi(value);
      else if (key == "epsilon") cfg.epsilon = std::stod(value);
      else if (key == "rho") cfg.rho = std::stod(value);
      else if (key == "sinkhorn_iterations") cfg.sinkhorn_iterations = std::stoi(value);
      else if (key == "learning_rate") cfg.learning_rate = std::stod(value);
      else if (key == "batch_size") cfg.batch_size = std::stoi(value);
      else if (key == "epochs") cfg.epochs = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "early_stop_improvement") cfg.early_stop_improvement = std::stod(value);
      else if (key == "early_stop_patience") cfg.early_stop_patience = std::stoi(value);
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad value for '" + key + "' on line " +
                                  std::to_string(line_no));
    }
    seen.push_back(key);
  }
  return seen;
}

TrainConfig load_config(const fs::path& path) {
  TrainConfig cfg;
  parse_config_text(read_text_file(path), cfg);
  return cfg;
}

std::string config_to_text(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "n = " << cfg.n << '\n'
      << "s = " << cfg.s << '\n'
      << "tau = " << cfg.tau << '\n'
      << "epsilon = " << format_double(cfg.epsilon) << '\n'
      << "rho = " << format_double(cfg.rho) << '\n'
      << "sinkhorn_iterations = " << cfg.sinkhorn_iterations << '\n'
      << "learning_rate = " << format_double(cfg.learning_rate) << '\n'
      << "batch_size = " << cfg.batch_size << '\n'
      << "epochs = " << cfg.epochs << '\n'
      << "seed = " << cfg.seed << '\n'
      << "early_stop_improvement = " << format_double(cfg.early_stop_improvement) << '\n'
      << "early_stop_patience = " << cfg.early_stop_patience << '\n';
  return out.str();
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

void write_matrix_csv(const fs::path& path, const Mat& m,
                      const std::string& index_header, const std::string& value_prefix) {
  std::ostringstream out;
  out << index_header;
  for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << value_prefix << j;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(i, j));
    out << '\n';
  }
  write_text_file(path, out.str());
}

Mat read_matrix_csv(const fs::path& path) {
  const std::string text = read_text_file(path);
  std::istringstream lines(text);
  std::string line;
  require(static_cast<bool>(std::getline(lines, line)), "csv: empty file " + path.string());

  std::vector<std::vector<double>> rows;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    bool skip_index = true;
    while (std::getline(cells, cell, ',')) {
      if (skip_index) {
        skip_index = false;
        continue;
      }
      row.push_back(std::stod(cell));
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), "csv: no data rows in " + path.string());
  Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == rows[0].size(), "csv: ragged rows in " + path.string());
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void write_loss_csv(const fs::path& path, const std::vector<double>& trace) {
  std::ostringstream out;
  out << "epoch,loss\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << i << ',' << format_double(trace[i]) << '\n';
  }
  write_text_file(path, out.str());
}

void write_metrics_csv(const fs::path& path, const std::vector<MetricRow>& rows) {
  std::ostringstream out;
  out << "config_hash,metric,value\n";
  for (const MetricRow& row : rows) {
    out << row.config_hash << ',' << row.metric << ',' << format_double(row.value) << '\n';
  }
  write_text_file(path, out.str());
}

void save_checkpoint(const fs::path& path, const Checkpoint& ckpt) {
  json j;
  j["format"] = "otge-checkpoint";
  j["version"] = kLibraryVersion;
  j["n_nodes"] = ckpt.encoder_weights.rows();
  j["config"] = config_to_json(ckpt.config);
  j["encoder_weights"] = matrix_to_json(ckpt.encoder_weights);
  j["decoder_logits"] = matrix_to_json(ckpt.decoder_logits);
  j["patterns"] = matrix_to_json(ckpt.patterns);
  j["coordinates"] = matrix_to_json(ckpt.coordinates);
  j["original_ids"] = ckpt.original_ids;
  write_text_file(path, j.dump(2) + "\n");
}

Checkpoint load_checkpoint(const fs::path& path) {
  const json j = json::parse(read_text_file(path));
  require(j.value("format", "") == "otge-checkpoint",
          "not a checkpoint file: " + path.string());
  Checkpoint ckpt;
  ckpt.config = config_from_json(j.at("config"));
  ckpt.encoder_weights = matrix_from_json(j.at("encoder_weights"));
  ckpt.decoder_logits = matrix_from_json(j.at("decoder_logits"));
  ckpt.patterns = matrix_from_json(j.at("patterns"));
  ckpt.coordinates = matrix_from_json(j.at("coordinates"));
  ckpt.original_ids = j.at("original_ids").get<std::vector<std::int64_t>>();
  return ckpt;
}

std::string digest_bytes(const std::string& bytes) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::string digest_file(const fs::path& path) { return digest_bytes(read_text_file(path)); }

void write_manifest(const fs::path& out_dir, const Manifest& manifest) {
  json j;
  j["command"] = manifest.command;
  j["library_version"] = kLibraryVersion;
  j["config"] = config_to_json(manifest.config);
  j["seed"] = manifest.seed;
  json inputs = json::array();
  for (const auto& [path, digest] : manifest.input_digests) {
    inputs.push_back(json{{"path", path}, {"digest", digest}});
  }
  j["inputs"] = std::move(inputs);
  j["outputs"] = manifest.outputs;
  write_text_file(out_dir / "manifest.json", j.dump(2) + "\n");
}

std::string config_hash(const TrainConfig& cfg) {
  return digest_bytes(config_to_text(cfg));
}

std::vector<double> inclusive_range(double lo, double hi, double step) {
  require(step > 0.0, "range: step must be positive");
  std::vector<double> values;
  for (double v = lo; v <= hi + step / 2.0; v += step) {
    // round to the step grid to keep 0.15 + k*0.05 exact-looking
    values.push_back(std::round(v / step) * step);
  }
  return values;
}

}  // namespace otge
