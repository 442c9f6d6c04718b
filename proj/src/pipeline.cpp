#include "guiltnet/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "guiltnet/postanalysis.hpp"
#include "guiltnet/topology.hpp"
#include "guiltnet/util.hpp"

namespace guiltnet {

namespace fs = std::filesystem;

namespace {

template <typename T>
std::vector<T> parse_list(std::string_view s, T (*conv)(std::string_view)) {
  std::vector<T> out;
  for (auto part : split(s, ','))
    if (!trim(part).empty()) out.push_back(conv(trim(part)));
  if (out.empty()) throw ParseError("empty list");
  return out;
}

std::uint32_t to_u32(std::string_view s) {
  auto v = parse_int(s);
  if (v < 0 || v > UINT32_MAX) throw ParseError("value out of range: " + std::string(s));
  return static_cast<std::uint32_t>(v);
}

double to_double(std::string_view s) { return parse_double(s); }

template <typename T>
std::string join(const std::vector<T>& v, std::string (*fmt)(T)) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

std::string u32_str(std::uint32_t v) { return std::to_string(v); }
std::string dbl_str(double v) { return format_double(v); }

// Prefixes parse errors with the file they came from.
template <typename Fn>
auto from_file(const fs::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

BipartiteGraph load_raw_graph(const PipelineConfig& cfg) {
  if (!cfg.edges.empty())
    return build_graph(from_file(cfg.edges, [&] { return read_edge_file(cfg.edges); }));
  if (!cfg.traffic.empty()) {
    auto records = from_file(cfg.traffic, [&] { return read_traffic_file(cfg.traffic, cfg.threads); });
    return build_graph(build_edge_stream(records, cfg.labeling.mode, cfg.threads));
  }
  throw ConfigError("an edge file (--edges) or traffic file (--traffic) is required");
}

StaticVerdicts load_verdicts(const PipelineConfig& cfg) {
  return from_file(cfg.verdicts, [&] { return StaticVerdicts::load(cfg.verdicts); });
}

// Popularity-filtered graph and its ground truth, from a ground-truth file
// when given, otherwise from verdicts.
std::pair<BipartiteGraph, GroundTruth> load_labeled_graph(const PipelineConfig& cfg) {
  auto raw = load_raw_graph(cfg);
  if (!cfg.ground_truth.empty()) {
    auto gt = from_file(cfg.ground_truth, [&] { return read_ground_truth(cfg.ground_truth); });
    auto g = remove_popular_apps(raw, cfg.labeling.n_p);
    try {
      check_ground_truth(gt, g);
    } catch (const std::logic_error& e) {
      throw ConfigError(cfg.ground_truth.string() + ": " + e.what());
    }
    return {std::move(g), std::move(gt)};
  }
  if (!cfg.verdicts.empty()) {
    auto verdicts = load_verdicts(cfg);
    BipartiteGraph g;
    auto gt = build_ground_truth(raw, verdicts, cfg.labeling, &g);
    return {std::move(g), std::move(gt)};
  }
  throw ConfigError("ground truth (--ground-truth) or verdicts (--verdicts) are required");
}

std::vector<DeviceId> sample_sorted(const std::set<DeviceId>& s, std::size_t n, Rng& rng) {
  std::vector<DeviceId> v(s.begin(), s.end());
  if (v.size() > n) {
    rng.shuffle(v);
    v.resize(n);
    std::sort(v.begin(), v.end());
  }
  return v;
}

std::string cdf_rows(std::string_view group, const std::map<DeviceId, std::size_t>& counts) {
  std::vector<double> values;
  for (const auto& [d, c] : counts) values.push_back(static_cast<double>(c));
  std::string buf;
  for (auto [v, f] : empirical_cdf(values))
    buf += std::string(group) + "," + format_double(v) + "," + format_double(f) + "\n";
  return buf;
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  try {
    if (key.starts_with("synth.")) synth.set(key.substr(6), value);
    else if (key == "synth_config") {
      for (const auto& e : read_kv_config(fs::path(value))) synth.set(e.key, e.value);
    }
    else if (key == "traffic") traffic = value;
    else if (key == "verdicts") verdicts = value;
    else if (key == "enrich_dns") enrich_dns = value;
    else if (key == "enrich_asn") enrich_asn = value;
    else if (key == "catalog") catalog = value;
    else if (key == "edges") edges = value;
    else if (key == "ground_truth") ground_truth = value;
    else if (key == "scores") scores = value;
    else if (key == "out") out = value;
    else if (key == "inputs") {
      inputs.clear();
      for (auto p : split(value, ','))
        if (!trim(p).empty()) inputs.emplace_back(trim(p));
    }
    else if (key == "mode") labeling.mode = parse_entity_mode(value);
    else if (key == "vt") labeling.vt = to_u32(value);
    else if (key == "np") labeling.n_p = to_u32(value);
    else if (key == "nab") labeling.n_ab = to_u32(value);
    else if (key == "delta") bp.delta = parse_double(value);
    else if (key == "epsilon") bp.epsilon = parse_double(value);
    else if (key == "max_iterations") bp.max_iterations = to_u32(value);
    else if (key == "tol") bp.convergence_tol = parse_double(value);
    else if (key == "k") eval.k = to_u32(value);
    else if (key == "seed") {
      auto v = parse_int(value);
      if (v < 0) throw ParseError("seed must be non-negative");
      eval.seed = synth.seed = static_cast<std::uint64_t>(v);
    }
    else if (key == "epsilons") eval.epsilons = parse_list<double>(value, to_double);
    else if (key == "vts") {
      eval.vts = parse_list<std::uint32_t>(value, to_u32);
      vts_explicit = true;
    }
    else if (key == "nps") {
      eval.nps = parse_list<std::uint32_t>(value, to_u32);
      nps_explicit = true;
    }
    else if (key == "threads") threads = to_u32(value);
    else if (key == "threshold") threshold = parse_double(value);
    else if (key == "top_n") top_n = to_u32(value);
    else if (key == "sample") sample = to_u32(value);
    else if (key == "window_days") window_days = parse_int(value);
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
  } catch (const ParseError& e) {
    throw ConfigError("config key '" + std::string(key) + "': " + e.detail());
  } catch (const IoError& e) {
    throw ConfigError("config key '" + std::string(key) + "': " + e.what());
  }
}

void PipelineConfig::load(const fs::path& path) {
  std::vector<KvEntry> entries;
  try {
    entries = read_kv_config(path);
  } catch (const ParseError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  for (const auto& e : entries) {
    try {
      set(e.key, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(path.string() + ":" + std::to_string(e.line) + ": " + err.what());
    }
  }
}

std::string PipelineConfig::to_kv() const {
  std::string s;
  auto put = [&s](std::string_view k, const std::string& v) { s += std::string(k) + " = " + v + "\n"; };
  put("traffic", traffic.string());
  put("verdicts", verdicts.string());
  put("enrich_dns", enrich_dns.string());
  put("enrich_asn", enrich_asn.string());
  put("catalog", catalog.string());
  put("edges", edges.string());
  put("ground_truth", ground_truth.string());
  put("scores", scores.string());
  put("out", out.string());
  std::string in;
  for (std::size_t i = 0; i < inputs.size(); ++i) in += (i ? "," : "") + inputs[i].string();
  put("inputs", in);
  put("mode", std::string(to_string(labeling.mode)));
  put("vt", std::to_string(labeling.vt));
  put("np", std::to_string(labeling.n_p));
  put("nab", std::to_string(labeling.n_ab));
  put("delta", format_double(bp.delta));
  put("epsilon", format_double(bp.epsilon));
  put("max_iterations", std::to_string(bp.max_iterations));
  put("tol", format_double(bp.convergence_tol));
  put("k", std::to_string(eval.k));
  put("seed", std::to_string(eval.seed));
  put("epsilons", join(eval.epsilons, dbl_str));
  put("vts", join(eval.vts, u32_str));
  put("nps", join(eval.nps, u32_str));
  put("threads", std::to_string(threads));
  put("threshold", format_double(threshold));
  put("top_n", std::to_string(top_n));
  put("sample", std::to_string(sample));
  put("window_days", std::to_string(window_days));
  std::istringstream synth_kv(synth.to_kv());
  for (std::string line; std::getline(synth_kv, line);) s += "synth." + line + "\n";
  return s;
}

void PipelineConfig::finalize() {
  if (threads == 0) threads = default_thread_count();
  bp.threads = threads;
  eval.mode = labeling.mode;
  if (!vts_explicit) eval.vts = {labeling.vt};
  if (!nps_explicit) eval.nps = {labeling.n_p};
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must be in [0, 1]");
  if (top_n == 0) throw ConfigError("top_n must be >= 1");
  if (sample < 2) throw ConfigError("sample must be >= 2");
  if (window_days <= 0) throw ConfigError("window_days must be positive");
  labeling.validate();
  bp.validate();
  eval.validate();
}

void write_effective_config(const PipelineConfig& cfg, std::string_view subcommand) {
  write_file(cfg.out / "config.txt",
             "# guiltnet " + std::string(subcommand) + "\nsubcommand = " + std::string(subcommand) +
                 "\n" + cfg.to_kv());
}

IngestSummary run_ingest(const PipelineConfig& cfg) {
  write_effective_config(cfg, "ingest");
  if (cfg.traffic.empty()) throw ConfigError("ingest needs a traffic file (--traffic)");
  auto records = from_file(cfg.traffic, [&] { return read_traffic_file(cfg.traffic, cfg.threads); });
  auto edges = build_edge_stream(records, cfg.labeling.mode, cfg.threads);
  write_edge_file(cfg.out / "edges.tsv", edges);
  auto g = build_graph(edges);

  std::map<std::size_t, std::size_t> by_degree;
  for (std::uint32_t a = 0; a < g.app_count(); ++a) ++by_degree[g.devices_of(a).size()];
  std::string buf = "degree,apps,cum_fraction\n";
  std::size_t seen = 0;
  for (auto [deg, n] : by_degree) {
    seen += n;
    buf += std::to_string(deg) + "," + std::to_string(n) + "," +
           format_double(static_cast<double>(seen) / static_cast<double>(g.app_count())) + "\n";
  }
  write_file(cfg.out / "app_degree.csv", buf);
  return {records.size(), g.device_count(), g.app_count(), g.edge_count()};
}

GroundTruth run_label(const PipelineConfig& cfg) {
  write_effective_config(cfg, "label");
  if (cfg.verdicts.empty()) throw ConfigError("label needs a verdict file (--verdicts)");
  auto raw = load_raw_graph(cfg);
  auto verdicts = load_verdicts(cfg);

  BipartiteGraph g;
  auto gt = build_ground_truth(raw, verdicts, cfg.labeling, &g);
  write_ground_truth(cfg.out / "ground_truth.csv", gt);
  write_app_labels(cfg.out / "app_labels.csv", gt.app_labels);
  write_edge_file(cfg.out / "edges_filtered.tsv", g.edges());

  std::string buf = "vt,n_p,bad_apps,suspicious_apps,good_apps,noinfo_apps,filtered_apps,bad_devices,good_devices\n";
  for (auto vt : cfg.eval.vts)
    for (auto np : cfg.eval.nps) {
      LabelingConfig lc = cfg.labeling;
      lc.vt = vt;
      lc.n_p = np;
      BipartiteGraph fg;
      auto t = build_ground_truth(raw, verdicts, lc, &fg);
      std::map<AppLabel, std::size_t> count;
      for (const auto& [a, l] : t.app_labels) ++count[l];
      buf += std::to_string(vt) + "," + std::to_string(np) + "," +
             std::to_string(count[AppLabel::Bad]) + "," + std::to_string(count[AppLabel::Suspicious]) +
             "," + std::to_string(count[AppLabel::Good]) + "," + std::to_string(count[AppLabel::NoInfo]) +
             "," + std::to_string(raw.app_count() - fg.app_count()) + "," +
             std::to_string(t.bad_devices.size()) + "," + std::to_string(t.good_devices.size()) + "\n";
    }
  write_file(cfg.out / "label_counts.csv", buf);
  return gt;
}

InferenceResult run_infer(const PipelineConfig& cfg) {
  write_effective_config(cfg, "infer");
  auto [g, gt] = load_labeled_graph(cfg);
  std::set<DeviceId> training = gt.bad_devices;
  training.insert(gt.good_devices.begin(), gt.good_devices.end());
  auto priors = init_beliefs(g, gt, training, cfg.bp);
  auto result = run_bp(g, priors, cfg.bp);
  write_beliefs(cfg.out / "beliefs.csv", g, result);
  std::string buf = "device_id,class\n";
  for (const auto& [d, c] : classify(g, result, cfg.threshold))
    buf += d + "," + (c == DeviceClass::Bad ? "bad" : "good") + "\n";
  write_file(cfg.out / "classes.csv", buf);
  return result;
}

std::vector<SweepRow> run_eval(const PipelineConfig& cfg) {
  write_effective_config(cfg, "eval");
  auto [g, gt] = load_labeled_graph(cfg);
  auto cv = run_cv(g, gt, cfg.bp, cfg.eval);
  auto rows = cv_rows(cv, gt, cfg.labeling, cfg.bp, cfg.eval);
  write_results(cfg.out / "results.csv", rows);
  write_roc(cfg.out / "roc.csv", roc(cv.scores, gt));
  write_scores(cfg.out / "scores.csv", cv, gt);

  std::string buf = "fold,threshold,fpr,tpr\n";
  for (std::uint32_t f = 0; f < cv.iterations.size(); ++f) {
    std::map<DeviceId, double> fold_scores;
    for (const auto& [d, s] : cv.scores)
      if (cv.fold_of.at(d) == f) fold_scores.emplace(d, s);
    for (const auto& p : roc(fold_scores, gt).points)
      buf += std::to_string(f) + "," + format_double(p.threshold) + "," + format_double(p.fpr) + "," +
             format_double(p.tpr) + "\n";
  }
  write_file(cfg.out / "roc_folds.csv", buf);
  return rows;
}

std::vector<SweepRow> run_sweep(const PipelineConfig& cfg) {
  write_effective_config(cfg, "sweep");
  std::vector<SweepRow> rows;
  if (!cfg.verdicts.empty() && cfg.ground_truth.empty()) {
    auto raw = load_raw_graph(cfg);
    rows = parameter_sweep(raw, load_verdicts(cfg), cfg.labeling, cfg.bp, cfg.eval);
  } else {
    // Fixed ground truth: only epsilon can vary.
    auto [g, gt] = load_labeled_graph(cfg);
    for (double eps : cfg.eval.epsilons) {
      BpConfig bp = cfg.bp;
      bp.epsilon = eps;
      auto part = cv_rows(run_cv(g, gt, bp, cfg.eval), gt, cfg.labeling, bp, cfg.eval);
      rows.insert(rows.end(), part.begin(), part.end());
    }
  }
  if (rows.empty()) throw InfeasibleError("no sweep point could be evaluated");
  write_results(cfg.out / "results.csv", rows);
  std::string buf = "epsilon,vt,n_p,mode,auc\n";
  for (const auto& r : rows)
    if (!r.fold)
      buf += format_double(r.epsilon) + "," + std::to_string(r.vt) + "," + std::to_string(r.n_p) +
             "," + std::string(to_string(r.mode)) + "," + format_double(r.auc) + "\n";
  write_file(cfg.out / "auc_vs_epsilon.csv", buf);
  write_file(cfg.out / "sweep_table.txt", format_sweep_table(rows));
  return rows;
}

void run_topology(const PipelineConfig& cfg) {
  write_effective_config(cfg, "topology");
  auto [g, gt] = load_labeled_graph(cfg);
  Rng rng(cfg.eval.seed);
  std::set<DeviceId> unknown;
  for (const auto& d : g.device_ids())
    if (!gt.is_bad(d) && !gt.is_good(d)) unknown.insert(d);

  auto refs = [&g](const std::vector<DeviceId>& ids) {
    std::vector<NodeRef> out;
    for (const auto& d : ids) out.push_back({Side::Device, *g.find_device(d)});
    return out;
  };
  auto bad = refs(sample_sorted(gt.bad_devices, cfg.sample, rng));
  auto good = refs(sample_sorted(gt.good_devices, cfg.sample, rng));
  auto unk = refs(sample_sorted(unknown, cfg.sample, rng));
  if (bad.empty() || good.empty()) throw InfeasibleError("topology needs bad and good devices");

  std::vector<NodeRef> all = bad;
  all.insert(all.end(), good.begin(), good.end());
  auto dm = shortest_paths(g, all, cfg.threads);
  auto stats = cluster_distance_stats(dm, bad, good);
  std::string buf = "pair_class,mean,pairs,unreachable\n";
  for (auto c : {PairClass::GoodGood, PairClass::BadBad, PairClass::BadGood}) {
    const auto& s = stats.get(c);
    buf += std::string(to_string(c)) + "," + format_double(s.mean) + "," + std::to_string(s.pairs) +
           "," + std::to_string(s.unreachable) + "\n";
  }
  write_file(cfg.out / "topology_summary.csv", buf);
  write_cdfs(cfg.out / "path_cdf.csv", stats);

  // Heatmap over at most 50 devices per class.
  std::vector<NodeRef> heat(bad.begin(), bad.begin() + std::min<std::size_t>(50, bad.size()));
  heat.insert(heat.end(), good.begin(), good.begin() + std::min<std::size_t>(50, good.size()));
  write_heatmap(cfg.out / "heatmap.csv", g, shortest_paths(g, heat, cfg.threads));

  std::vector<NodeRef> central = all;
  central.insert(central.end(), unk.begin(), unk.end());
  auto cc = closeness_centrality(g, central, cfg.threads);
  auto ec = eigenvector_centrality(g, 1e-10, 100000, cfg.threads);
  if (!ec.converged)
    spdlog::warn("eigenvector centrality stopped after {} iterations (residual {})", ec.iterations,
                 ec.residual);
  std::string rows = "node_id,group,cc,ec\n";
  std::string summary = "group,devices,mean_cc,mean_ec\n";
  for (auto [name, set] : {std::pair<const char*, const std::vector<NodeRef>*>{"bad", &bad},
                           {"good", &good},
                           {"unknown", &unk}}) {
    double sum_cc = 0.0, sum_ec = 0.0;
    for (const auto& n : *set) {
      sum_cc += cc.at(n);
      sum_ec += ec.at(g, n);
      rows += g.id(n) + "," + name + "," + format_double(cc.at(n)) + "," + format_double(ec.at(g, n)) + "\n";
    }
    double m = set->empty() ? 0.0 : static_cast<double>(set->size());
    summary += std::string(name) + "," + std::to_string(set->size()) + "," +
               format_double(set->empty() ? 0.0 : sum_cc / m) + "," +
               format_double(set->empty() ? 0.0 : sum_ec / m) + "\n";
  }
  write_file(cfg.out / "centrality.csv", rows);
  write_file(cfg.out / "centrality_summary.csv", summary);
}

void run_postanalyze(const PipelineConfig& cfg) {
  write_effective_config(cfg, "postanalyze");
  if (cfg.traffic.empty()) throw ConfigError("postanalyze needs a traffic file (--traffic)");
  if (cfg.scores.empty()) throw ConfigError("postanalyze needs device scores (--scores)");
  auto records = from_file(cfg.traffic, [&] { return read_traffic_file(cfg.traffic, cfg.threads); });
  auto scores = from_file(cfg.scores, [&] { return read_scores(cfg.scores); });
  std::pair<std::vector<DeviceId>, std::vector<DeviceId>> groups;
  try {
    groups = select_extremes(scores, cfg.top_n);
  } catch (const std::invalid_argument& e) {
    throw InfeasibleError(e.what());
  }
  const auto& [top, bottom] = groups;
  auto catalog = cfg.catalog.empty()
                     ? default_leak_catalog()
                     : from_file(cfg.catalog, [&] { return LeakCatalog::load(cfg.catalog); });

  std::map<DeviceId, std::string> group_of;
  for (const auto& d : top) group_of[d] = "predicted_bad";
  for (const auto& d : bottom) group_of[d] = "predicted_good";
  std::set<DeviceId> chosen(top.begin(), top.end());
  chosen.insert(bottom.begin(), bottom.end());
  auto scan = scan_leaks(records, chosen, catalog);
  write_leak_report(cfg.out / "leak_report.csv", scan, group_of);

  std::string summary = "group,devices,leaking_devices,mean_leaking_app_ratio,mean_leaking_traffic_ratio,leaking_apps_not_bad\n";
  std::string types = "group,type,devices\n";
  std::set<AppId> bad_apps;
  if (!cfg.verdicts.empty()) {
    auto verdicts = load_verdicts(cfg);
    auto g = load_raw_graph(cfg);
    for (const auto& [a, l] : label_apps(g, verdicts, cfg.labeling))
      if (l == AppLabel::Bad) bad_apps.insert(a);
  }
  for (auto [name, list] : {std::pair<const char*, const std::vector<DeviceId>*>{"predicted_bad", &top},
                            {"predicted_good", &bottom}}) {
    LeakScan part;
    double app_ratio = 0.0, traffic_ratio = 0.0;
    std::size_t leaking = 0;
    std::map<std::string, std::size_t> by_type;
    for (const auto& d : *list) {
      const auto& r = scan.devices.at(d);
      part.devices[d] = r;
      app_ratio += r.leaking_app_ratio();
      traffic_ratio += r.leaking_traffic_ratio();
      if (r.leaking_packets) ++leaking;
      for (const auto& t : r.leaked_types) ++by_type[t];
    }
    double n = static_cast<double>(list->size());
    summary += std::string(name) + "," + std::to_string(list->size()) + "," + std::to_string(leaking) +
               "," + format_double(app_ratio / n) + "," + format_double(traffic_ratio / n) + "," +
               (cfg.verdicts.empty() ? std::string() : format_double(leaking_apps_outside(part, bad_apps))) +
               "\n";
    for (const auto& [t, c] : by_type) types += std::string(name) + "," + t + "," + std::to_string(c) + "\n";
  }
  write_file(cfg.out / "leak_summary.csv", summary);
  write_file(cfg.out / "leak_types.csv", types);

  if (cfg.enrich_dns.empty() && cfg.enrich_asn.empty()) return;
  DnsEnrichment enrich;
  if (!cfg.enrich_dns.empty()) from_file(cfg.enrich_dns, [&] { enrich.load_domains(cfg.enrich_dns); });
  if (!cfg.enrich_asn.empty()) from_file(cfg.enrich_asn, [&] { enrich.load_asns(cfg.enrich_asn); });
  std::set<DeviceId> top_set(top.begin(), top.end()), bottom_set(bottom.begin(), bottom.end());
  auto asn_top = asn_stats(records, top_set, enrich), asn_bottom = asn_stats(records, bottom_set, enrich);
  auto sl_top = short_lived_domains(records, top_set, enrich, cfg.window_days);
  auto sl_bottom = short_lived_domains(records, bottom_set, enrich, cfg.window_days);

  std::string infra = "device_id,group,asns,short_lived_domains\n";
  for (const auto& [d, g] : group_of) {
    bool is_top = g == "predicted_bad";
    infra += d + "," + g + "," + std::to_string((is_top ? asn_top : asn_bottom).at(d)) + "," +
             std::to_string((is_top ? sl_top : sl_bottom).at(d)) + "\n";
  }
  write_file(cfg.out / "infra.csv", infra);
  write_file(cfg.out / "asn_cdf.csv", "group,asns,cum_fraction\n" + cdf_rows("predicted_bad", asn_top) +
                                          cdf_rows("predicted_good", asn_bottom));
  write_file(cfg.out / "short_lived_cdf.csv", "group,domains,cum_fraction\n" +
                                                  cdf_rows("predicted_bad", sl_top) +
                                                  cdf_rows("predicted_good", sl_bottom));
  write_file(cfg.out / "infra_summary.csv",
             "group,frac_asns_above_20,frac_short_lived_above_40\npredicted_bad," +
                 format_double(fraction_above(asn_top, 20)) + "," + format_double(fraction_above(sl_top, 40)) +
                 "\npredicted_good," + format_double(fraction_above(asn_bottom, 20)) + "," +
                 format_double(fraction_above(sl_bottom, 40)) + "\n");
}

SynthCorpus run_synth(const PipelineConfig& cfg) {
  auto corpus = generate(cfg.synth);
  write_corpus(cfg.out, corpus);
  write_effective_config(cfg, "synth");
  return corpus;
}

std::string run_report(const PipelineConfig& cfg) {
  static constexpr const char* kFiles[] = {
      "label_counts.csv",     "results.csv",        "auc_vs_epsilon.csv", "topology_summary.csv",
      "centrality_summary.csv", "leak_summary.csv", "leak_types.csv",     "infra_summary.csv",
      "app_degree.csv"};
  auto dirs = cfg.inputs.empty() ? std::vector<fs::path>{cfg.out} : cfg.inputs;
  std::string text;
  for (const auto& dir : dirs) {
    if (!fs::is_directory(dir)) throw IoError("cannot open directory " + dir.string());
    for (const char* name : kFiles) {
      auto path = dir / name;
      if (!fs::exists(path)) continue;
      text += "== " + path.string() + "\n";
      for (const auto& line : read_lines(path)) text += line + "\n";
      text += "\n";
    }
  }
  write_file(cfg.out / "report.txt", text);
  write_effective_config(cfg, "report");
  return text;
}

}  // namespace guiltnet
