#pragma once

// End-to-end subcommands shared by the command-line tool and the tests.
//
// Every subcommand reads its inputs from the paths in PipelineConfig, writes
// CSV outputs under `out`, and echoes the effective configuration into
// out/config.txt.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "guiltnet/evaluation.hpp"
#include "guiltnet/inference.hpp"
#include "guiltnet/labeling.hpp"
#include "guiltnet/synthgen.hpp"

namespace guiltnet {

struct PipelineConfig {
  LabelingConfig labeling;
  BpConfig bp;
  EvalConfig eval{.epsilons = {0.51, 0.6, 0.7, 0.8, 0.9}};
  SynthConfig synth;

  std::filesystem::path traffic;
  std::filesystem::path verdicts;
  std::filesystem::path enrich_dns;
  std::filesystem::path enrich_asn;
  std::filesystem::path catalog;       // empty: built-in keyword list
  std::filesystem::path edges;
  std::filesystem::path ground_truth;
  std::filesystem::path scores;
  std::filesystem::path out = "out";
  std::vector<std::filesystem::path> inputs;  // report: directories to aggregate

  unsigned threads = 0;          // 0: all cores
  double threshold = 0.5;        // infer: p_bad > threshold is bad
  std::uint32_t top_n = 100;     // postanalyze: devices per extreme group
  std::uint32_t sample = 1000;   // topology: devices per class for distance stats
  std::int64_t window_days = 90;

  // Without explicit lists, label/sweep grids use the single vt / n_p.
  bool vts_explicit = false;
  bool nps_explicit = false;

  /// Sets one key (the names in to_kv(); "synth.<key>" reaches SynthConfig).
  /// Throws ConfigError for an unknown key or a malformed value.
  void set(std::string_view key, std::string_view value);
  void load(const std::filesystem::path& path);
  std::string to_kv() const;
  // Resolves threads and validates the module configs.
  void finalize();
};

/// Writes out/config.txt with the subcommand name and effective config.
void write_effective_config(const PipelineConfig& cfg, std::string_view subcommand);

struct IngestSummary {
  std::size_t records = 0;
  std::size_t devices = 0;
  std::size_t apps = 0;
  std::size_t edges = 0;
};
// out/edges.tsv, out/app_degree.csv
IngestSummary run_ingest(const PipelineConfig& cfg);

// out/ground_truth.csv, out/app_labels.csv, out/edges_filtered.tsv, out/label_counts.csv
GroundTruth run_label(const PipelineConfig& cfg);

// out/beliefs.csv, out/classes.csv
InferenceResult run_infer(const PipelineConfig& cfg);

// out/results.csv, out/roc.csv, out/scores.csv
std::vector<SweepRow> run_eval(const PipelineConfig& cfg);

// out/results.csv, out/auc_vs_epsilon.csv, out/sweep_table.txt
std::vector<SweepRow> run_sweep(const PipelineConfig& cfg);

// out/topology_summary.csv, out/path_cdf.csv, out/centrality.csv,
// out/centrality_summary.csv, out/heatmap.csv
void run_topology(const PipelineConfig& cfg);

// out/leak_report.csv, out/leak_summary.csv, out/leak_types.csv,
// out/infra.csv, out/asn_cdf.csv, out/short_lived_cdf.csv
void run_postanalyze(const PipelineConfig& cfg);

// Corpus files under out/ (see write_corpus).
SynthCorpus run_synth(const PipelineConfig& cfg);

/// Concatenates the summary CSVs found in the input directories into
/// out/report.txt and returns its text.
std::string run_report(const PipelineConfig& cfg);

}  // namespace guiltnet
