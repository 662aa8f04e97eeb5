// otge: optimal-transport graph embeddings.
//
// Subcommands: train, transfer, eval, generate, sweep-epsilon,
// sweep-perturb. Every command writes into a fresh output directory:
// plot-ready CSV files plus a manifest.json recording the resolved
// configuration and input digests. Reruns with identical inputs
// reproduce byte-identical CSVs.

#include "otge/eval.hpp"
#include "otge/io.hpp"
#include "otge/threads.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace otge;

namespace {

struct ConfigFlags {
  std::string config_path;
  std::optional<int> n, s, tau, sinkhorn_iters, batch, epochs, patience;
  std::optional<double> epsilon, rho, lr, min_improve;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run config file (key = value lines)");
    cmd->add_option("--n", n, "descriptor hop count");
    cmd->add_option("--s", s, "latent dimension");
    cmd->add_option("--tau", tau, "diffusion steps");
    cmd->add_option("--epsilon", epsilon, "entropy regularization");
    cmd->add_option("--rho", rho, "mass relaxation");
    cmd->add_option("--sinkhorn-iters", sinkhorn_iters, "scaling iterations per decode");
    cmd->add_option("--lr", lr, "SGD learning rate");
    cmd->add_option("--batch", batch, "SGD batch size");
    cmd->add_option("--epochs", epochs, "training epochs");
    cmd->add_option("--seed", seed, "run seed");
    cmd->add_option("--patience", patience, "early-stop patience in epochs (0 disables)");
    cmd->add_option("--min-improve", min_improve, "early-stop improvement threshold");
  }

  TrainConfig resolve() const {
    TrainConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (n) cfg.n = *n;
    if (s) cfg.s = *s;
    if (tau) cfg.tau = *tau;
    if (epsilon) cfg.epsilon = *epsilon;
    if (rho) cfg.rho = *rho;
    if (sinkhorn_iters) cfg.sinkhorn_iterations = *sinkhorn_iters;
    if (lr) cfg.learning_rate = *lr;
    if (batch) cfg.batch_size = *batch;
    if (epochs) cfg.epochs = *epochs;
    if (seed) cfg.seed = *seed;
    if (patience) cfg.early_stop_patience = *patience;
    if (min_improve) cfg.early_stop_improvement = *min_improve;
    return cfg;
  }
};

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::istringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) out.push_back(std::stoi(item));
  return out;
}

// "lo:step:hi" or a comma list.
std::vector<double> parse_double_range(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    double lo, step, hi;
    char c1, c2;
    std::istringstream stream(text);
    if (!(stream >> lo >> c1 >> step >> c2 >> hi) || c1 != ':' || c2 != ':') {
      throw std::invalid_argument("bad range '" + text + "', expected lo:step:hi");
    }
    return inclusive_range(lo, hi, step);
  }
  std::vector<double> out;
  std::istringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::string param_tag(double value) {
  std::ostringstream out;
  out << value;
  std::string s = out.str();
  for (char& c : s) {
    if (c == '.') c = 'p';
  }
  return s;
}

Graph graph_with_seed_retry(const SbmParams& params, double p_prime, std::uint64_t seed,
                            std::uint64_t* used_seed) {
  for (std::uint64_t attempt = 0; attempt < 50; ++attempt) {
    Graph g = perturb_intra_probability(params, p_prime, seed + attempt);
    if (g.is_connected()) {
      if (used_seed) *used_seed = seed + attempt;
      return g;
    }
  }
  throw std::runtime_error("could not draw a connected graph at p'=" +
                           std::to_string(p_prime));
}

int cmd_train(const ConfigFlags& flags, const std::string& edges,
              const std::string& labels, const std::string& out) {
  TrainConfig cfg = flags.resolve();
  Graph g = load_graph(edges);
  if (!labels.empty()) load_labels(g, labels);

  FitResult run = fit(g, cfg);

  fs::create_directories(out);
  const fs::path dir(out);
  Checkpoint ckpt{cfg, run.params.encoder_weights, run.params.decoder_logits,
                  run.embedding.patterns, run.embedding.coordinates, g.original_ids()};
  save_checkpoint(dir / "checkpoint.json", ckpt);
  write_matrix_csv(dir / "patterns.csv", run.embedding.patterns, "node", "pattern_");
  write_matrix_csv(dir / "coordinates.csv", run.embedding.coordinates, "node", "lambda_");
  write_loss_csv(dir / "loss.csv", run.embedding.loss_trace);

  Manifest manifest;
  manifest.command = "train";
  manifest.config = cfg;
  manifest.seed = cfg.seed;
  manifest.input_digests.emplace_back(edges, digest_file(edges));
  if (!labels.empty()) manifest.input_digests.emplace_back(labels, digest_file(labels));
  manifest.outputs = {"checkpoint.json", "patterns.csv", "coordinates.csv", "loss.csv"};
  write_manifest(dir, manifest);

  std::cout << "trained " << g.n() << " nodes, " << run.embedding.loss_trace.size()
            << " epochs, final loss " << run.embedding.final_loss << "\n";
  return 0;
}

int cmd_transfer(const std::string& checkpoint_path, const std::string& edges,
                 const std::string& pad_index, const std::string& out) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  Graph g_new = load_graph(edges);

  Mat patterns = ckpt.patterns;
  if (g_new.n() != patterns.rows()) {
    if (pad_index.empty()) {
      throw std::invalid_argument(
          "transfer: checkpoint has " + std::to_string(patterns.rows()) +
          " nodes but the graph has " + std::to_string(g_new.n()) +
          "; pass --pad-index to upsample the patterns");
    }
    std::vector<int> kept;
    std::istringstream stream(read_text_file(pad_index));
    int idx;
    while (stream >> idx) kept.push_back(idx);
    patterns = upsample_patterns(ckpt.patterns, kept, g_new.n());
  }

  Mat coords = fit_coordinates(g_new, patterns, ckpt.config);

  fs::create_directories(out);
  const fs::path dir(out);
  write_matrix_csv(dir / "coordinates_transfer.csv", coords, "node", "lambda_");

  std::vector<MetricRow> rows;
  const std::string hash = config_hash(ckpt.config);
  if (coords.rows() == ckpt.coordinates.rows()) {
    rows.push_back({hash, "stability_relative_change",
                    stability_relative_change(ckpt.coordinates, coords)});
    write_metrics_csv(dir / "stability.csv", rows);
  }

  Manifest manifest;
  manifest.command = "transfer";
  manifest.config = ckpt.config;
  manifest.seed = ckpt.config.seed;
  manifest.input_digests.emplace_back(checkpoint_path, digest_file(checkpoint_path));
  manifest.input_digests.emplace_back(edges, digest_file(edges));
  manifest.outputs = {"coordinates_transfer.csv"};
  if (!rows.empty()) manifest.outputs.push_back("stability.csv");
  write_manifest(dir, manifest);

  if (!rows.empty()) {
    std::cout << "stability " << rows[0].value << "\n";
  }
  return 0;
}

int cmd_eval(const std::vector<std::string>& coordinate_files, const std::string& labels_path,
             const std::string& mode, int k, const std::string& ratios_text, int splits,
             std::uint64_t seed, double l2, const std::string& out) {
  // Label ids refer to coordinate row indices.
  std::vector<int> labels;
  {
    std::istringstream stream(read_text_file(labels_path));
    std::string line;
    std::vector<std::pair<int, int>> pairs;
    int max_id = -1;
    while (std::getline(stream, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      std::istringstream tokens(line);
      int id, cls;
      if (!(tokens >> id >> cls)) throw std::invalid_argument("bad label line: " + line);
      pairs.emplace_back(id, cls);
      max_id = std::max(max_id, id);
    }
    labels.assign(static_cast<std::size_t>(max_id + 1), -1);
    for (auto [id, cls] : pairs) labels[static_cast<std::size_t>(id)] = cls;
  }

  fs::create_directories(out);
  std::vector<MetricRow> rows;
  nlohmann::json summary = nlohmann::json::array();

  for (const std::string& file : coordinate_files) {
    const Mat coords = read_matrix_csv(file);
    if (coords.rows() != static_cast<Eigen::Index>(labels.size())) {
      throw std::invalid_argument("labels cover " + std::to_string(labels.size()) +
                                  " nodes but " + file + " has " +
                                  std::to_string(coords.rows()) + " rows");
    }
    const std::string tag = fs::path(file).stem().string();
    if (mode == "cluster") {
      ClusteringReport rep = cluster_and_score(coords, k, labels, seed);
      rows.push_back({tag, "ami", rep.ami});
      rows.push_back({tag, "nmi", rep.nmi});
      summary.push_back({{"file", file}, {"ami", rep.ami}, {"nmi", rep.nmi}});
    } else if (mode == "classify") {
      for (double ratio : parse_double_range(ratios_text)) {
        SplitAverage avg = averaged_classification(coords, labels, ratio, splits, seed, l2);
        rows.push_back({tag, "macro_f1_at_" + param_tag(ratio), avg.macro_f1});
        rows.push_back({tag, "accuracy_at_" + param_tag(ratio), avg.accuracy});
        summary.push_back({{"file", file},
                           {"train_ratio", ratio},
                           {"macro_f1", avg.macro_f1},
                           {"accuracy", avg.accuracy}});
      }
    } else {
      throw std::invalid_argument("eval: mode must be cluster or classify");
    }
  }

  const fs::path dir(out);
  write_metrics_csv(dir / "report.csv", rows);
  write_text_file(dir / "summary.json", summary.dump(2) + "\n");
  for (const MetricRow& row : rows) {
    std::cout << row.config_hash << ' ' << row.metric << ' ' << row.value << "\n";
  }
  return 0;
}

int cmd_generate(const std::string& kind, int nodes, int blocks,
                 const std::string& block_sizes, double p, double q, double p_prime,
                 double add_ratio, double keep, const std::string& edges,
                 const std::string& labels_path, std::uint64_t seed,
                 const std::string& out) {
  fs::create_directories(out);
  const fs::path dir(out);

  auto write_graph = [&](const Graph& g, const std::string& stem) {
    write_text_file(dir / (stem + ".edges"), g.to_edge_list());
    if (g.labels()) {
      std::ostringstream text;
      for (std::size_t i = 0; i < g.labels()->size(); ++i) {
        text << g.original_ids()[i] << ' ' << (*g.labels())[i] << '\n';
      }
      write_text_file(dir / (stem + ".labels"), text.str());
    }
  };

  if (kind == "sbm") {
    SbmParams params;
    if (!block_sizes.empty()) {
      params.block_sizes = parse_int_list(block_sizes);
    } else {
      if (blocks <= 0) throw std::invalid_argument("generate sbm: need --blocks or --block-sizes");
      if (nodes % blocks != 0) {
        throw std::invalid_argument("generate sbm: " + std::to_string(nodes) +
                                    " nodes not divisible by " + std::to_string(blocks) +
                                    " blocks; use --block-sizes");
      }
      params.block_sizes.assign(static_cast<std::size_t>(blocks), nodes / blocks);
    }
    params.p_in = p;
    params.q_out = q;
    Graph g = p_prime > 0.0 ? perturb_intra_probability(params, p_prime, seed)
                            : generate_sbm(params, seed);
    write_graph(g, "graph");
    std::cout << "sbm: " << g.n() << " nodes, " << g.edge_count() << " edges\n";
  } else if (kind == "perturb") {
    Graph g = load_graph(edges);
    if (!labels_path.empty()) load_labels(g, labels_path);
    Graph perturbed = perturb_add_edges(g, add_ratio, seed);
    write_graph(perturbed, "graph");
    std::cout << "perturb: " << perturbed.edge_count() - g.edge_count()
              << " edges added (capacity " << max_addable_edges(g) << ")\n";
  } else if (kind == "downsample") {
    Graph g = load_graph(edges);
    if (!labels_path.empty()) load_labels(g, labels_path);
    DownsampleResult result = downsample(g, keep, seed);
    write_graph(result.subgraph, "train");
    std::ostringstream kept;
    for (int idx : result.kept) kept << idx << '\n';
    write_text_file(dir / "kept_index.txt", kept.str());
    std::cout << "downsample: kept " << result.kept.size() << " of " << g.n() << " nodes\n";
  } else {
    throw std::invalid_argument("generate: kind must be sbm, perturb, or downsample");
  }
  return 0;
}

int cmd_sweep_epsilon(const ConfigFlags& flags, const std::string& edges,
                      const std::string& labels_path, const std::string& eps_text,
                      double ratio, int splits, const std::string& out) {
  TrainConfig cfg = flags.resolve();
  Graph g = load_graph(edges);
  load_labels(g, labels_path);

  const std::vector<double> epsilons = parse_double_range(eps_text);
  const std::vector<SweepPoint> table =
      epsilon_sensitivity_sweep(g, cfg, epsilons, ratio, splits);

  fs::create_directories(out);
  const fs::path dir(out);
  std::ostringstream csv;
  csv << "epsilon,accuracy,macro_f1\n";
  for (const SweepPoint& point : table) {
    csv << format_double(point.epsilon) << ',' << format_double(point.accuracy) << ','
        << format_double(point.macro_f1) << '\n';
    std::cout << "epsilon " << point.epsilon << ": accuracy " << point.accuracy << "\n";
  }
  write_text_file(dir / "epsilon_accuracy.csv", csv.str());

  Manifest manifest;
  manifest.command = "sweep-epsilon";
  manifest.config = cfg;
  manifest.seed = cfg.seed;
  manifest.input_digests.emplace_back(edges, digest_file(edges));
  manifest.input_digests.emplace_back(labels_path, digest_file(labels_path));
  manifest.outputs = {"epsilon_accuracy.csv"};
  write_manifest(dir, manifest);
  return 0;
}

int cmd_sweep_perturb(const std::string& mode, const std::string& checkpoint_path,
                      const std::string& block_sizes, double p, double q,
                      const std::string& p_prime_text, const std::string& edges,
                      const std::string& ratio_text, std::uint64_t seed, int k,
                      const std::string& out) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  fs::create_directories(out);
  const fs::path dir(out);

  struct Cell {
    double param = 0.0;
    double rel_change = 0.0;
    double ami = 0.0, nmi = 0.0;
    bool scored = false;
    std::string file;
  };
  std::vector<Cell> cells;

  if (mode == "intra") {
    SbmParams params;
    params.block_sizes = parse_int_list(block_sizes);
    params.p_in = p;
    params.q_out = q;
    const std::vector<double> p_primes = parse_double_range(p_prime_text);
    cells.resize(p_primes.size());
    parallel_for(static_cast<int>(p_primes.size()), [&](int i) {
      const double pp = p_primes[static_cast<std::size_t>(i)];
      std::uint64_t used = seed;
      Graph g_prime = graph_with_seed_retry(params, pp, seed + 100 * static_cast<std::uint64_t>(i), &used);
      Mat coords = fit_coordinates(g_prime, ckpt.patterns, ckpt.config);
      Cell cell;
      cell.param = pp;
      cell.rel_change = stability_relative_change(ckpt.coordinates, coords);
      if (g_prime.labels()) {
        ClusteringReport rep = cluster_and_score(coords, k, *g_prime.labels(), used);
        cell.ami = rep.ami;
        cell.nmi = rep.nmi;
        cell.scored = true;
      }
      cell.file = "coordinates_p" + param_tag(pp) + ".csv";
      write_matrix_csv(dir / cell.file, coords, "node", "lambda_");
      cells[static_cast<std::size_t>(i)] = std::move(cell);
    });
  } else if (mode == "add-edges") {
    Graph base = load_graph(edges);
    const std::vector<double> ratios = parse_double_range(ratio_text);
    cells.resize(ratios.size());
    parallel_for(static_cast<int>(ratios.size()), [&](int i) {
      const double r = ratios[static_cast<std::size_t>(i)];
      Graph g_prime = perturb_add_edges(base, r, seed + static_cast<std::uint64_t>(i));
      Mat coords = fit_coordinates(g_prime, ckpt.patterns, ckpt.config);
      Cell cell;
      cell.param = r;
      cell.rel_change = stability_relative_change(ckpt.coordinates, coords);
      cell.file = "coordinates_r" + param_tag(r) + ".csv";
      write_matrix_csv(dir / cell.file, coords, "node", "lambda_");
      cells[static_cast<std::size_t>(i)] = std::move(cell);
    });
  } else {
    throw std::invalid_argument("sweep-perturb: mode must be intra or add-edges");
  }

  std::ostringstream csv;
  csv << "param,relative_change,ami,nmi\n";
  for (const Cell& cell : cells) {
    csv << format_double(cell.param) << ',' << format_double(cell.rel_change);
    if (cell.scored) {
      csv << ',' << format_double(cell.ami) << ',' << format_double(cell.nmi);
    } else {
      csv << ",,";
    }
    csv << '\n';
    std::cout << "param " << cell.param << ": relative change " << cell.rel_change << "\n";
  }
  write_text_file(dir / "stability.csv", csv.str());

  Manifest manifest;
  manifest.command = "sweep-perturb";
  manifest.config = ckpt.config;
  manifest.seed = seed;
  manifest.input_digests.emplace_back(checkpoint_path, digest_file(checkpoint_path));
  if (!edges.empty()) manifest.input_digests.emplace_back(edges, digest_file(edges));
  manifest.outputs.push_back("stability.csv");
  for (const Cell& cell : cells) manifest.outputs.push_back(cell.file);
  write_manifest(dir, manifest);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal-transport graph embeddings"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "learn patterns and coordinates");
  ConfigFlags train_flags;
  std::string train_edges, train_labels, train_out;
  train_flags.attach(train_cmd);
  train_cmd->add_option("--edges", train_edges, "edge list")->required();
  train_cmd->add_option("--labels", train_labels, "node labels");
  train_cmd->add_option("--out", train_out, "output directory")->required();

  // transfer
  auto* transfer_cmd = app.add_subcommand("transfer", "coordinates for a new graph in a frozen pattern space");
  std::string tr_ckpt, tr_edges, tr_pad, tr_out;
  transfer_cmd->add_option("--checkpoint", tr_ckpt)->required();
  transfer_cmd->add_option("--edges", tr_edges)->required();
  transfer_cmd->add_option("--pad-index", tr_pad, "kept-index file for zero-pad upsampling");
  transfer_cmd->add_option("--out", tr_out)->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "cluster or classify coordinates");
  std::vector<std::string> ev_coords;
  std::string ev_labels, ev_mode = "cluster", ev_ratios = "0.8", ev_out;
  int ev_k = 2, ev_splits = 10;
  std::uint64_t ev_seed = 7;
  double ev_l2 = 1.0;
  eval_cmd->add_option("--coordinates", ev_coords, "coordinates csv (repeatable)")->required();
  eval_cmd->add_option("--labels", ev_labels)->required();
  eval_cmd->add_option("--mode", ev_mode, "cluster | classify");
  eval_cmd->add_option("--k", ev_k, "cluster count");
  eval_cmd->add_option("--ratios", ev_ratios, "train ratios, list or lo:step:hi");
  eval_cmd->add_option("--splits", ev_splits, "splits per ratio");
  eval_cmd->add_option("--seed", ev_seed);
  eval_cmd->add_option("--l2", ev_l2, "logistic regression penalty");
  eval_cmd->add_option("--out", ev_out)->required();

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "synthetic and perturbed graphs");
  std::string g_kind, g_blocks_text, g_edges, g_labels, g_out;
  int g_nodes = 0, g_blocks = 0;
  double g_p = 0.0, g_q = 0.0, g_pprime = 0.0, g_ratio = 0.0, g_keep = 0.0;
  std::uint64_t g_seed = 0;
  gen_cmd->add_option("kind", g_kind, "sbm | perturb | downsample")->required();
  gen_cmd->add_option("--nodes", g_nodes);
  gen_cmd->add_option("--blocks", g_blocks);
  gen_cmd->add_option("--block-sizes", g_blocks_text, "comma list, e.g. 34,33,33");
  gen_cmd->add_option("--p", g_p, "intra-community probability");
  gen_cmd->add_option("--q", g_q, "inter-community probability");
  gen_cmd->add_option("--p-prime", g_pprime, "perturbed intra probability (fresh draw)");
  gen_cmd->add_option("--add-ratio", g_ratio, "ratio of absent edges to add");
  gen_cmd->add_option("--keep", g_keep, "downsample keep ratio");
  gen_cmd->add_option("--edges", g_edges, "base graph for perturb/downsample");
  gen_cmd->add_option("--labels", g_labels);
  gen_cmd->add_option("--seed", g_seed);
  gen_cmd->add_option("--out", g_out)->required();

  // sweep-epsilon
  auto* se_cmd = app.add_subcommand("sweep-epsilon", "train per epsilon, classify each");
  ConfigFlags se_flags;
  std::string se_edges, se_labels, se_eps = "0.01:0.01:0.09", se_out;
  double se_ratio = 0.8;
  int se_splits = 10;
  se_flags.attach(se_cmd);
  se_cmd->add_option("--edges", se_edges)->required();
  se_cmd->add_option("--labels", se_labels)->required();
  se_cmd->add_option("--eps", se_eps, "epsilon list or lo:step:hi");
  se_cmd->add_option("--ratio", se_ratio, "train ratio");
  se_cmd->add_option("--splits", se_splits);
  se_cmd->add_option("--out", se_out)->required();

  // sweep-perturb
  auto* sp_cmd = app.add_subcommand("sweep-perturb", "transfer to perturbed graphs");
  std::string sp_mode, sp_ckpt, sp_blocks, sp_pprimes = "0.15:0.05:0.40";
  std::string sp_edges, sp_ratios = "0.01:0.01:0.05", sp_out;
  double sp_p = 0.4, sp_q = 0.01;
  std::uint64_t sp_seed = 0;
  int sp_k = 3;
  sp_cmd->add_option("--mode", sp_mode, "intra | add-edges")->required();
  sp_cmd->add_option("--checkpoint", sp_ckpt)->required();
  sp_cmd->add_option("--block-sizes", sp_blocks);
  sp_cmd->add_option("--p", sp_p);
  sp_cmd->add_option("--q", sp_q);
  sp_cmd->add_option("--p-prime", sp_pprimes, "p' list or lo:step:hi");
  sp_cmd->add_option("--edges", sp_edges, "base graph for add-edges mode");
  sp_cmd->add_option("--ratios", sp_ratios, "add ratios, list or lo:step:hi");
  sp_cmd->add_option("--seed", sp_seed);
  sp_cmd->add_option("--k", sp_k, "clusters for AMI/NMI when labels exist");
  sp_cmd->add_option("--out", sp_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      return cmd_train(train_flags, train_edges, train_labels, train_out);
    }
    if (transfer_cmd->parsed()) {
      return cmd_transfer(tr_ckpt, tr_edges, tr_pad, tr_out);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(ev_coords, ev_labels, ev_mode, ev_k, ev_ratios, ev_splits, ev_seed,
                      ev_l2, ev_out);
    }
    if (gen_cmd->parsed()) {
      return cmd_generate(g_kind, g_nodes, g_blocks, g_blocks_text, g_p, g_q, g_pprime,
                          g_ratio, g_keep, g_edges, g_labels, g_seed, g_out);
    }
    if (se_cmd->parsed()) {
      return cmd_sweep_epsilon(se_flags, se_edges, se_labels, se_eps, se_ratio, se_splits,
                               se_out);
    }
    if (sp_cmd->parsed()) {
      return cmd_sweep_perturb(sp_mode, sp_ckpt, sp_blocks, sp_p, sp_q, sp_pprimes,
                               sp_edges, sp_ratios, sp_seed, sp_k, sp_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::string(e.what()).find("input not found") != std::string::npos ? 2 : 1;
  }
  return 1;
}
