#pragma once

// Synthetic device-app graphs and traffic corpora with planted classes.
//
// Two shapes are supported. MobileLike: bad devices use bad apps and, with
// probability p_cross, good apps too, so the clusters overlap. DnsLike: each
// (bad app, good app) pair is joined with probability p_cross by a chain of
// bridge devices and bridge entities, so the clusters are far apart. Good
// devices never touch bad apps. App popularity is heavy-tailed: edge
// probabilities are p * w_a with Pareto weights of mean 1.
//
// Config file format (key = value, '#' comments):
//   topology             mobile-like | dns-like
//   seed                 64-bit integer
//   n_bad_devices, n_good_devices, n_bad_apps, n_good_apps
//   p_homophile          bad device - bad app edge probability
//   p_good               good device - good app edge probability (negative: p_homophile)
//   p_cross              see above
//   bridge_hops          bridge devices per chain (dns-like)
//   weight_alpha         Pareto tail index of app weights (> 1)
//   weight_cap           upper bound on a single app weight
//   min_bad_apps         bad apps guaranteed per bad device
//   max_records_per_edge records emitted per edge, uniform in [1, max]
//   vt                   bad entities get positives in [vt, vt + 20]
//   total_engines        engines per verdict
//   no_verdict_fraction  fraction of good apps with no verdict
//   leak_fraction        fraction of bad-device packets given planted leaks
//   decoy_fraction       fraction of packets given non-leaking decoy pairs
//   infra                true to plant AS / short-lived-domain traffic (mobile-like only)

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "guiltnet/graph.hpp"
#include "guiltnet/labeling.hpp"
#include "guiltnet/postanalysis.hpp"

namespace guiltnet {

enum class TopologyMode { MobileLike, DnsLike };

std::string_view to_string(TopologyMode mode);
// Accepts "mobile-like" / "dns-like".
TopologyMode parse_topology_mode(std::string_view s);

struct SynthConfig {
  TopologyMode topology = TopologyMode::MobileLike;
  std::uint64_t seed = 1;
  std::uint32_t n_bad_devices = 1000;
  std::uint32_t n_good_devices = 1000;
  std::uint32_t n_bad_apps = 100;
  std::uint32_t n_good_apps = 400;
  double p_homophile = 0.02;
  double p_good = 0.004;  // < 0: same as p_homophile
  double p_cross = 0.004;
  std::uint32_t bridge_hops = 4;
  double weight_alpha = 2.2;
  double weight_cap = 20.0;
  std::uint32_t min_bad_apps = 2;
  std::uint32_t max_records_per_edge = 3;
  std::uint32_t vt = 5;
  std::uint32_t total_engines = 60;
  double no_verdict_fraction = 0.1;
  double leak_fraction = 0.0;
  double decoy_fraction = 0.0;
  bool infra = false;

  double good_probability() const { return p_good < 0.0 ? p_homophile : p_good; }
  // Entity mode of the emitted traffic: app strings for mobile-like, destination IPs for dns-like.
  EntityMode entity_mode() const;

  /// Throws ConfigError for an unknown key or a malformed value.
  void set(std::string_view key, std::string_view value);
  static SynthConfig load(const std::filesystem::path& path);
  // The effective config in the file format, every key listed.
  std::string to_kv() const;
  // Throws ConfigError for infeasible or inconsistent settings.
  void validate() const;
};

/// Pre-top-up edge counts and planted-structure bookkeeping.
struct SynthManifest {
  std::uint64_t bad_bad_edges = 0;    // sampled bad device - bad app edges
  std::uint64_t good_good_edges = 0;  // sampled good device - good app edges
  std::uint64_t cross_edges = 0;      // sampled bad device - good app edges (mobile-like)
  std::uint64_t bridges = 0;          // sampled bridge chains (dns-like)
  std::uint64_t topped_up_edges = 0;  // added afterwards to satisfy min_bad_apps / one good app

  std::vector<LeakEvent> leaks;                       // planted, sorted
  std::map<DeviceId, std::size_t> expected_asns;      // per labeled device, when infra is on
  std::map<DeviceId, std::size_t> expected_short_lived;
};

struct SynthCorpus {
  SynthConfig config;
  BipartiteGraph graph;
  GroundTruth truth;
  std::vector<TrafficRecord> traffic;
  StaticVerdicts verdicts;
  DnsEnrichment enrichment;
  SynthManifest manifest;

  // Generation-order ids and weights of the class apps (for expectation oracles).
  std::vector<AppId> bad_apps;
  std::vector<AppId> good_apps;
  std::vector<double> bad_app_weights;
  std::vector<double> good_app_weights;
  std::vector<DeviceId> bridge_devices;
  std::vector<AppId> bridge_apps;
};

/// Deterministic in the config (including the seed).
SynthCorpus generate(const SynthConfig& cfg);

struct LeakPlantConfig {
  double fraction = 0.0;        // of the target devices' packets
  double decoy_fraction = 0.0;  // of all packets: empty-valued keys, keywords as values
  std::set<DeviceId> devices;   // targets; empty means every device
  std::uint32_t max_types_per_packet = 2;
  std::uint64_t seed = 1;
};

/// Adds catalog key-value pairs (header or query string, random key case)
/// to a sample of packets. Returns the planted leaks, sorted. With both
/// fractions at 0 the traffic is left untouched.
std::vector<LeakEvent> plant_leaks(std::vector<TrafficRecord>& traffic, const LeakPlantConfig& cfg,
                                   const LeakCatalog& catalog);

/// Uniform-ish random bipartite graph with heavy-tailed app popularity, for
/// benchmarks. Roughly n_edges distinct edges.
BipartiteGraph random_bipartite(std::uint32_t n_devices, std::uint32_t n_apps, std::uint64_t n_edges,
                                std::uint64_t seed);

/// Writes traffic.tsv, verdicts.csv, dns.csv, asn.csv, ground_truth.csv,
/// edges.tsv, synth.conf, leaks.csv, infra.csv and manifest.csv into dir.
void write_corpus(const std::filesystem::path& dir, const SynthCorpus& corpus);

}  // namespace guiltnet
