#pragma once

#include "otge/train.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace otge {

inline constexpr const char* kLibraryVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Plain-text inputs

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

Graph load_graph(const std::filesystem::path& edge_list_path);

/// "node_id class_id" pairs in the edge list's id space; every node
/// must be covered. Attaches the labels to the graph.
void load_labels(Graph& g, const std::filesystem::path& labels_path);

/// Run-config files: one "key = value" per line, '#' comments allowed.
/// Unknown keys are an error. Returns the keys actually present.
std::vector<std::string> parse_config_text(const std::string& text, TrainConfig& cfg);
TrainConfig load_config(const std::filesystem::path& path);
std::string config_to_text(const TrainConfig& cfg);

// ---------------------------------------------------------------------------
// CSV emission: one header line, 17-significant-digit floats.

std::string format_double(double value);

void write_matrix_csv(const std::filesystem::path& path, const Mat& m,
                      const std::string& index_header,
                      const std::string& value_prefix);
Mat read_matrix_csv(const std::filesystem::path& path);

void write_loss_csv(const std::filesystem::path& path, const std::vector<double>& trace);

struct MetricRow {
  std::string config_hash;
  std::string metric;
  double value = 0.0;
};
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricRow>& rows);

// ---------------------------------------------------------------------------
// Checkpoints: JSON container with the run config, both parameter
// matrices, the learned patterns/coordinates, and the node-id remap.
// Doubles round-trip exactly.

struct Checkpoint {
  TrainConfig config;
  Mat encoder_weights;
  Mat decoder_logits;
  Mat patterns;
  Mat coordinates;
  std::vector<std::int64_t> original_ids;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Run manifests

/// FNV-1a of the raw bytes, as 16 hex digits.
std::string digest_bytes(const std::string& bytes);
std::string digest_file(const std::filesystem::path& path);

struct Manifest {
  std::string command;
  TrainConfig config;
  std::vector<std::pair<std::string, std::string>> input_digests;  // path, digest
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
};

void write_manifest(const std::filesystem::path& out_dir, const Manifest& manifest);

/// Short hash of the resolved config, used to key metric rows.
std::string config_hash(const TrainConfig& cfg);

/// {lo, lo+step, ..., hi} inclusive within half-step tolerance.
std::vector<double> inclusive_range(double lo, double hi, double step);

}  // namespace otge
