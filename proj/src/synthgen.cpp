#include "guiltnet/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "guiltnet/util.hpp"

namespace guiltnet {

namespace {

std::string ipv4(unsigned a, unsigned b_base, std::uint64_t idx) {
  return std::to_string(a) + "." + std::to_string(b_base + ((idx >> 16) & 0xff)) + "." +
         std::to_string((idx >> 8) & 0xff) + "." + std::to_string(idx & 0xff);
}

std::string padded(std::uint64_t v, std::size_t width) {
  std::string s = std::to_string(v);
  if (s.size() < width) s.insert(0, width - s.size(), '0');
  return s;
}

bool parse_bool(std::string_view s) {
  auto v = to_lower(trim(s));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("expected a boolean, got '" + std::string(s) + "'");
}

std::uint32_t parse_u32(std::string_view s) {
  auto v = parse_int(s);
  if (v < 0 || v > UINT32_MAX) throw ParseError("value out of range: " + std::string(s));
  return static_cast<std::uint32_t>(v);
}

// Pareto(alpha) weights, capped, rescaled to mean 1.
std::vector<double> app_weights(Rng& rng, std::size_t n, double alpha, double cap) {
  std::vector<double> w(n);
  for (auto& x : w) x = std::min(cap, std::pow(1.0 - rng.uniform(), -1.0 / alpha));
  double mean = n ? std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n) : 1.0;
  for (auto& x : w) x /= mean;
  return w;
}

// Weighted index draws by inverse CDF.
class WeightedPicker {
 public:
  explicit WeightedPicker(const std::vector<double>& w) : cum_(w.size()) {
    std::partial_sum(w.begin(), w.end(), cum_.begin());
  }
  std::uint32_t pick(Rng& rng) const {
    double u = rng.uniform() * cum_.back();
    auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    if (it == cum_.end()) --it;
    return static_cast<std::uint32_t>(it - cum_.begin());
  }

 private:
  std::vector<double> cum_;
};

std::string random_token(Rng& rng, std::size_t len) {
  static constexpr char kAlnum[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string s(len, ' ');
  for (auto& c : s) c = kAlnum[rng.below(sizeof kAlnum - 1)];
  return s;
}

std::string random_case(Rng& rng, std::string_view key) {
  std::string s(key);
  for (auto& c : s)
    if (c >= 'a' && c <= 'z' && rng.bernoulli(0.5)) c = static_cast<char>(c - 'a' + 'A');
  return s;
}

void add_query_pair(TrafficRecord& rec, const std::string& key, const std::string& value) {
  std::string path = rec.http_path.value_or("/");
  path += path.find('?') == std::string::npos ? '?' : '&';
  path += key + "=" + value;
  rec.http_path = std::move(path);
}

constexpr const char* kPaths[] = {"/v1/feed", "/api/config", "/sync", "/ads/get", "/update/check",
                                  "/log/upload", "/img/thumb", "/search"};
constexpr const char* kAgents[] = {"okhttp/3.12.1", "Dalvik/2.1.0", "CFNetwork/976",
                                   "Mozilla/5.0(Linux;Android9)"};
constexpr const char* kNets[] = {"wifi", "lte", "3g"};

constexpr std::uint32_t kCommonAsBase = 64500;
constexpr std::uint32_t kCommonAsCount = 5;
constexpr std::uint32_t kHostingAsBase = 65000;
constexpr std::uint32_t kHostingAsCount = 40;
constexpr std::uint32_t kWideAsCount = 25;
constexpr double kWideFraction = 0.9;
constexpr double kShortLivedHeavyFraction = 0.2;
constexpr std::uint32_t kShortLivedHeavyCount = 45;
constexpr std::uint32_t kShortLivedPool = 400;
constexpr std::int64_t kWindowDays = 90;

}  // namespace

std::string_view to_string(TopologyMode mode) {
  return mode == TopologyMode::MobileLike ? "mobile-like" : "dns-like";
}

TopologyMode parse_topology_mode(std::string_view s) {
  if (s == "mobile-like") return TopologyMode::MobileLike;
  if (s == "dns-like") return TopologyMode::DnsLike;
  throw ConfigError("unknown topology '" + std::string(s) + "' (expected mobile-like or dns-like)");
}

EntityMode SynthConfig::entity_mode() const {
  return topology == TopologyMode::MobileLike ? EntityMode::AppString : EntityMode::DestinationIP;
}

void SynthConfig::set(std::string_view key, std::string_view value) {
  try {
    if (key == "topology") topology = parse_topology_mode(trim(value));
    else if (key == "seed") {
      auto v = parse_int(value);
      if (v < 0) throw ParseError("seed must be non-negative");
      seed = static_cast<std::uint64_t>(v);
    }
    else if (key == "n_bad_devices") n_bad_devices = parse_u32(value);
    else if (key == "n_good_devices") n_good_devices = parse_u32(value);
    else if (key == "n_bad_apps") n_bad_apps = parse_u32(value);
    else if (key == "n_good_apps") n_good_apps = parse_u32(value);
    else if (key == "p_homophile") p_homophile = parse_double(value);
    else if (key == "p_good") p_good = parse_double(value);
    else if (key == "p_cross") p_cross = parse_double(value);
    else if (key == "bridge_hops") bridge_hops = parse_u32(value);
    else if (key == "weight_alpha") weight_alpha = parse_double(value);
    else if (key == "weight_cap") weight_cap = parse_double(value);
    else if (key == "min_bad_apps") min_bad_apps = parse_u32(value);
    else if (key == "max_records_per_edge") max_records_per_edge = parse_u32(value);
    else if (key == "vt") vt = parse_u32(value);
    else if (key == "total_engines") total_engines = parse_u32(value);
    else if (key == "no_verdict_fraction") no_verdict_fraction = parse_double(value);
    else if (key == "leak_fraction") leak_fraction = parse_double(value);
    else if (key == "decoy_fraction") decoy_fraction = parse_double(value);
    else if (key == "infra") infra = parse_bool(value);
    else throw ConfigError("unknown synth key '" + std::string(key) + "'");
  } catch (const ParseError& e) {
    throw ConfigError("synth key '" + std::string(key) + "': " + e.detail());
  }
}

SynthConfig SynthConfig::load(const std::filesystem::path& path) {
  SynthConfig cfg;
  for (const auto& e : read_kv_config(path)) {
    try {
      cfg.set(e.key, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(path.string() + ":" + std::to_string(e.line) + ": " + err.what());
    }
  }
  return cfg;
}

std::string SynthConfig::to_kv() const {
  std::string s;
  auto put = [&s](std::string_view k, const std::string& v) {
    s += std::string(k) + " = " + v + "\n";
  };
  put("topology", std::string(to_string(topology)));
  put("seed", std::to_string(seed));
  put("n_bad_devices", std::to_string(n_bad_devices));
  put("n_good_devices", std::to_string(n_good_devices));
  put("n_bad_apps", std::to_string(n_bad_apps));
  put("n_good_apps", std::to_string(n_good_apps));
  put("p_homophile", format_double(p_homophile));
  put("p_good", format_double(good_probability()));
  put("p_cross", format_double(p_cross));
  put("bridge_hops", std::to_string(bridge_hops));
  put("weight_alpha", format_double(weight_alpha));
  put("weight_cap", format_double(weight_cap));
  put("min_bad_apps", std::to_string(min_bad_apps));
  put("max_records_per_edge", std::to_string(max_records_per_edge));
  put("vt", std::to_string(vt));
  put("total_engines", std::to_string(total_engines));
  put("no_verdict_fraction", format_double(no_verdict_fraction));
  put("leak_fraction", format_double(leak_fraction));
  put("decoy_fraction", format_double(decoy_fraction));
  put("infra", infra ? "true" : "false");
  return s;
}

void SynthConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must be in [0, 1]");
  };
  if (n_bad_devices == 0 || n_good_devices == 0 || n_bad_apps == 0 || n_good_apps == 0)
    throw ConfigError("device and app counts must be positive");
  prob(p_homophile, "p_homophile");
  prob(good_probability(), "p_good");
  prob(p_cross, "p_cross");
  prob(no_verdict_fraction, "no_verdict_fraction");
  prob(leak_fraction, "leak_fraction");
  prob(decoy_fraction, "decoy_fraction");
  if (!(p_homophile > p_cross)) throw ConfigError("p_homophile must exceed p_cross");
  if (min_bad_apps == 0) throw ConfigError("min_bad_apps must be >= 1");
  if (min_bad_apps > n_bad_apps)
    throw ConfigError("infeasible: min_bad_apps exceeds n_bad_apps, bad devices cannot be labeled");
  if (!(weight_alpha > 1.0)) throw ConfigError("weight_alpha must be > 1");
  if (!(weight_cap >= 1.0)) throw ConfigError("weight_cap must be >= 1");
  if (max_records_per_edge == 0) throw ConfigError("max_records_per_edge must be >= 1");
  if (vt < 2) throw ConfigError("vt must be >= 2 so single-engine entities stay suspicious");
  if (total_engines < vt + 20) throw ConfigError("total_engines must be >= vt + 20");
  if (topology == TopologyMode::DnsLike && bridge_hops == 0)
    throw ConfigError("bridge_hops must be >= 1");
  if (infra && topology == TopologyMode::DnsLike)
    throw ConfigError("infra planting needs app-string traffic (mobile-like)");
  if (static_cast<std::uint64_t>(n_bad_devices) + n_good_devices > (1u << 24) - 2 ||
      static_cast<std::uint64_t>(n_bad_apps) + n_good_apps > (1u << 20) - 2)
    throw ConfigError("too many nodes for the synthetic address ranges");
}

SynthCorpus generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  SynthCorpus out;
  out.config = cfg;
  auto& man = out.manifest;

  const std::uint32_t nbd = cfg.n_bad_devices, ngd = cfg.n_good_devices;
  const std::uint32_t nba = cfg.n_bad_apps, nga = cfg.n_good_apps;

  out.bad_app_weights = app_weights(rng, nba, cfg.weight_alpha, cfg.weight_cap);
  out.good_app_weights = app_weights(rng, nga, cfg.weight_alpha, cfg.weight_cap);
  const auto& wb = out.bad_app_weights;
  const auto& wg = out.good_app_weights;

  // Device index: [0, nbd) bad, [nbd, nbd + ngd) good, then bridges.
  // App index: [0, nba) bad, [nba, nba + nga) good, then bridges.
  std::vector<std::vector<std::uint32_t>> adj(nbd + ngd);
  std::uint32_t n_devices = nbd + ngd, n_apps = nba + nga;

  for (std::uint32_t d = 0; d < nbd; ++d)
    for (std::uint32_t a = 0; a < nba; ++a)
      if (rng.bernoulli(std::min(1.0, cfg.p_homophile * wb[a]))) {
        adj[d].push_back(a);
        ++man.bad_bad_edges;
      }
  const double pg = cfg.good_probability();
  for (std::uint32_t d = 0; d < ngd; ++d)
    for (std::uint32_t a = 0; a < nga; ++a)
      if (rng.bernoulli(std::min(1.0, pg * wg[a]))) {
        adj[nbd + d].push_back(nba + a);
        ++man.good_good_edges;
      }
  if (cfg.topology == TopologyMode::MobileLike) {
    for (std::uint32_t d = 0; d < nbd; ++d)
      for (std::uint32_t a = 0; a < nga; ++a)
        if (rng.bernoulli(std::min(1.0, cfg.p_cross * wg[a]))) {
          adj[d].push_back(nba + a);
          ++man.cross_edges;
        }
  } else {
    for (std::uint32_t a = 0; a < nba; ++a)
      for (std::uint32_t b = 0; b < nga; ++b) {
        if (!rng.bernoulli(cfg.p_cross)) continue;
        ++man.bridges;
        // bad app - x1 - y1 - x2 - ... - y_{h-1} - x_h - good app
        std::uint32_t prev_app = a;
        for (std::uint32_t h = 0; h < cfg.bridge_hops; ++h) {
          std::uint32_t dev = n_devices++;
          adj.emplace_back();
          adj[dev].push_back(prev_app);
          if (h + 1 < cfg.bridge_hops) {
            prev_app = n_apps++;
            adj[dev].push_back(prev_app);
          } else {
            adj[dev].push_back(nba + b);
          }
        }
      }
  }

  // Top-up so generated classes satisfy the labeling rules.
  WeightedPicker pick_bad(wb), pick_good(wg);
  for (std::uint32_t d = 0; d < nbd; ++d) {
    auto count_bad = [&] {
      return static_cast<std::uint32_t>(
          std::count_if(adj[d].begin(), adj[d].end(), [&](std::uint32_t a) { return a < nba; }));
    };
    for (std::uint32_t have = count_bad(); have < cfg.min_bad_apps;) {
      std::uint32_t a = pick_bad.pick(rng);
      if (std::find(adj[d].begin(), adj[d].end(), a) != adj[d].end()) continue;
      adj[d].push_back(a);
      ++man.topped_up_edges;
      ++have;
    }
  }
  for (std::uint32_t d = nbd; d < nbd + ngd; ++d)
    if (adj[d].empty()) {
      adj[d].push_back(nba + pick_good.pick(rng));
      ++man.topped_up_edges;
    }
  for (auto& v : adj) std::sort(v.begin(), v.end());

  // Ids are assigned through random permutations so lexicographic order
  // carries no class information.
  std::vector<std::uint32_t> dperm(n_devices), aperm(n_apps);
  std::iota(dperm.begin(), dperm.end(), 1u);
  std::iota(aperm.begin(), aperm.end(), 1u);
  rng.shuffle(dperm);
  rng.shuffle(aperm);
  const bool ip_entities = cfg.entity_mode() == EntityMode::DestinationIP;
  std::vector<DeviceId> dev_id(n_devices);
  for (std::uint32_t d = 0; d < n_devices; ++d) dev_id[d] = ipv4(10, 0, dperm[d]);
  std::vector<std::string> app_pkg(n_apps), app_host(n_apps), app_domain(n_apps);
  std::vector<AppId> app_id(n_apps);
  for (std::uint32_t a = 0; a < n_apps; ++a) {
    app_pkg[a] = "com.synth.app" + padded(aperm[a], 6);
    app_host[a] = ipv4(172, 16, aperm[a]);
    app_domain[a] = "h" + padded(aperm[a], 6) + ".example.net";
    app_id[a] = ip_entities ? app_host[a] : app_pkg[a];
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t d = 0; d < n_devices; ++d)
    for (auto a : adj[d]) edges.emplace_back(d, a);
  {
    std::vector<bool> used(n_apps, false);
    for (const auto& e : edges) used[e.second] = true;
    // Keep only apps that carry an edge so the graph equals the ingested one.
    std::vector<std::uint32_t> remap(n_apps, 0);
    std::vector<AppId> ids;
    for (std::uint32_t a = 0; a < n_apps; ++a)
      if (used[a]) {
        remap[a] = static_cast<std::uint32_t>(ids.size());
        ids.push_back(app_id[a]);
      }
    auto idx_edges = edges;
    for (auto& e : idx_edges) e.second = remap[e.second];
    out.graph = BipartiteGraph::from_indexed(dev_id, std::move(ids), std::move(idx_edges));
  }

  for (std::uint32_t a = 0; a < nba; ++a) out.bad_apps.push_back(app_id[a]);
  for (std::uint32_t a = nba; a < nba + nga; ++a) out.good_apps.push_back(app_id[a]);
  for (std::uint32_t d = nbd + ngd; d < n_devices; ++d) out.bridge_devices.push_back(dev_id[d]);
  for (std::uint32_t a = nba + nga; a < n_apps; ++a) out.bridge_apps.push_back(app_id[a]);

  // Verdicts and the generated truth.
  std::vector<VerdictRecord> verdicts;
  for (std::uint32_t a = 0; a < n_apps; ++a) {
    bool present = out.graph.find_app(app_id[a]).has_value();
    AppLabel label;
    if (a < nba) {
      verdicts.push_back({app_id[a], cfg.vt + static_cast<std::uint32_t>(rng.below(21)),
                          cfg.total_engines});
      label = AppLabel::Bad;
    } else if (a < nba + nga) {
      if (rng.bernoulli(cfg.no_verdict_fraction)) {
        label = AppLabel::NoInfo;
      } else {
        verdicts.push_back({app_id[a], 0, cfg.total_engines});
        label = AppLabel::Good;
      }
    } else {
      verdicts.push_back({app_id[a], 1, cfg.total_engines});
      label = AppLabel::Suspicious;
    }
    if (present) out.truth.app_labels[app_id[a]] = label;
  }
  out.verdicts = StaticVerdicts(std::move(verdicts));
  for (std::uint32_t d = 0; d < nbd; ++d) out.truth.bad_devices.insert(dev_id[d]);
  for (std::uint32_t d = nbd; d < nbd + ngd; ++d) out.truth.good_devices.insert(dev_id[d]);

  // Enrichment for app hosts: long-lived domains in a few common ASes.
  const std::int64_t today = parse_iso_date("2017-06-30");
  const std::int64_t base_ts = today * 86400 - 30 * 86400;
  std::vector<std::uint32_t> app_as(n_apps);
  for (std::uint32_t a = 0; a < n_apps; ++a) {
    app_as[a] = kCommonAsBase + static_cast<std::uint32_t>(rng.below(kCommonAsCount));
    out.enrichment.asn_of_ip[app_host[a]] = app_as[a];
    out.enrichment.domains[app_domain[a]] = {
        today - 365 - static_cast<std::int64_t>(rng.below(2000)), today};
  }

  // Traffic: each edge becomes 1..max records.
  auto base_record = [&](std::uint32_t d) {
    TrafficRecord rec;
    rec.timestamp = base_ts + static_cast<std::int64_t>(rng.below(30 * 86400));
    rec.src_ip = dev_id[d];
    rec.http_method = rng.bernoulli(0.7) ? "GET" : "POST";
    rec.header_pairs = {{"ua", kAgents[rng.below(std::size(kAgents))]},
                        {"ver", "1." + std::to_string(rng.below(20))},
                        {"net", kNets[rng.below(std::size(kNets))]}};
    if (rng.bernoulli(0.5)) rec.header_pairs.push_back({"lang", "en"});
    return rec;
  };
  for (const auto& [d, a] : edges) {
    auto n = 1 + rng.below(cfg.max_records_per_edge);
    for (std::uint64_t r = 0; r < n; ++r) {
      auto rec = base_record(d);
      rec.dst_ip = app_host[a];
      rec.dst_domain = app_domain[a];
      rec.http_path = std::string(kPaths[rng.below(std::size(kPaths))]) +
                      "?q=" + std::to_string(rng.below(1000)) +
                      "&page=" + std::to_string(rng.below(10));
      rec.app_string = app_pkg[a];
      rec.header_pairs.push_back({"sdk", std::to_string(20 + rng.below(8))});
      out.traffic.push_back(std::move(rec));
    }
  }

  if (cfg.infra) {
    // Records without an app string: they add infrastructure but no edges.
    std::vector<std::string> short_domains(kShortLivedPool);
    for (std::uint32_t i = 0; i < kShortLivedPool; ++i) {
      short_domains[i] = "s" + padded(i, 4) + ".example.org";
      std::int64_t life;
      if (i % 10 == 0) life = kWindowDays;           // boundary: not short-lived
      else if (i % 10 == 1) life = kWindowDays + 1 + static_cast<std::int64_t>(rng.below(300));
      else life = static_cast<std::int64_t>(rng.below(kWindowDays));
      std::int64_t first = today - 400 + static_cast<std::int64_t>(rng.below(300));
      out.enrichment.domains[short_domains[i]] = {first, first + life};
    }
    auto is_short = [&](std::uint32_t i) {
      const auto& l = out.enrichment.domains.at(short_domains[i]);
      return l.last_seen - l.first_seen < kWindowDays;
    };
    std::uint64_t infra_ip = 0;
    auto infra_record = [&](std::uint32_t d, std::uint32_t asn, const std::string& domain) {
      auto rec = base_record(d);
      rec.dst_ip = ipv4(100, 64, ++infra_ip);
      rec.dst_domain = domain;
      rec.http_path = "/";
      out.enrichment.asn_of_ip[rec.dst_ip] = asn;
      out.traffic.push_back(std::move(rec));
    };

    for (std::uint32_t d = 0; d < nbd + ngd; ++d) {
      const bool bad = d < nbd;
      std::set<std::uint32_t> ases;
      for (auto a : adj[d]) ases.insert(app_as[a]);

      if (bad && rng.bernoulli(kWideFraction)) {
        std::vector<std::uint32_t> pool(kHostingAsCount);
        std::iota(pool.begin(), pool.end(), kHostingAsBase);
        rng.shuffle(pool);
        for (std::uint32_t i = 0; i < kWideAsCount; ++i) {
          infra_record(d, pool[i], "cdn" + padded(pool[i], 5) + ".example.com");
          ases.insert(pool[i]);
        }
      }
      // Short-lived domains are served from the common ASes. Each device also
      // sees a few domains at or past the window, which must not count.
      std::uint32_t want_short = bad && rng.bernoulli(kShortLivedHeavyFraction)
                                     ? kShortLivedHeavyCount
                                     : static_cast<std::uint32_t>(rng.below(bad ? 8 : 3));
      std::uint32_t want_long = static_cast<std::uint32_t>(rng.below(4));
      std::vector<std::uint32_t> pool(kShortLivedPool);
      std::iota(pool.begin(), pool.end(), 0u);
      rng.shuffle(pool);
      std::size_t short_count = 0, long_count = 0;
      for (auto i : pool) {
        bool s = is_short(i);
        if (s ? short_count >= want_short : long_count >= want_long) continue;
        auto asn = kCommonAsBase + static_cast<std::uint32_t>(rng.below(kCommonAsCount));
        infra_record(d, asn, short_domains[i]);
        ases.insert(asn);
        ++(s ? short_count : long_count);
      }
      man.expected_asns[dev_id[d]] = ases.size();
      man.expected_short_lived[dev_id[d]] = short_count;
    }
  }

  std::stable_sort(out.traffic.begin(), out.traffic.end(),
                   [](const TrafficRecord& x, const TrafficRecord& y) {
                     return x.timestamp < y.timestamp;
                   });

  if (cfg.leak_fraction > 0.0 || cfg.decoy_fraction > 0.0) {
    LeakPlantConfig lp;
    lp.fraction = cfg.leak_fraction;
    lp.decoy_fraction = cfg.decoy_fraction;
    lp.devices = out.truth.bad_devices;
    lp.seed = cfg.seed ^ 0x9e3779b97f4a7c15ULL;
    man.leaks = plant_leaks(out.traffic, lp, default_leak_catalog());
  }
  return out;
}

std::vector<LeakEvent> plant_leaks(std::vector<TrafficRecord>& traffic, const LeakPlantConfig& cfg,
                                   const LeakCatalog& catalog) {
  std::vector<LeakEvent> planted;
  if (cfg.fraction <= 0.0 && cfg.decoy_fraction <= 0.0) return planted;
  if (cfg.max_types_per_packet == 0) throw ConfigError("max_types_per_packet must be >= 1");
  std::vector<const LeakCategory*> types;
  for (const auto& c : catalog.categories())
    if (!c.keywords.empty()) types.push_back(&c);
  if (types.empty()) throw ConfigError("leak catalog has no keywords");

  Rng rng(cfg.seed);
  for (std::size_t i = 0; i < traffic.size(); ++i) {
    auto& rec = traffic[i];
    const bool target = cfg.devices.empty() || cfg.devices.count(rec.src_ip);
    if (target && rng.bernoulli(cfg.fraction)) {
      auto order = types;
      rng.shuffle(order);
      auto n = 1 + rng.below(std::min<std::uint64_t>(cfg.max_types_per_packet, order.size()));
      for (std::uint64_t t = 0; t < n; ++t) {
        const auto& kws = order[t]->keywords;
        std::string key = random_case(rng, kws[rng.below(kws.size())]);
        std::string value = random_token(rng, 8);
        if (rng.bernoulli(0.5))
          rec.header_pairs.push_back({key, value});
        else
          add_query_pair(rec, key, value);
        planted.push_back({i, rec.src_ip, order[t]->type, key});
      }
    } else if (rng.bernoulli(cfg.decoy_fraction)) {
      const auto& kws = types[rng.below(types.size())]->keywords;
      const auto& kw = kws[rng.below(kws.size())];
      if (rng.bernoulli(0.5))
        rec.header_pairs.push_back({random_case(rng, kw), ""});
      else
        add_query_pair(rec, "note", kw);
    }
  }
  std::sort(planted.begin(), planted.end());
  return planted;
}

BipartiteGraph random_bipartite(std::uint32_t n_devices, std::uint32_t n_apps, std::uint64_t n_edges,
                                std::uint64_t seed) {
  if (n_devices == 0 || n_apps == 0) throw ConfigError("random_bipartite needs nodes on both sides");
  Rng rng(seed);
  WeightedPicker pick(app_weights(rng, n_apps, 2.0, 1000.0));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(n_edges);
  // Every device gets one edge, the rest are spread uniformly.
  for (std::uint64_t e = 0; e < n_edges; ++e) {
    auto d = e < n_devices ? static_cast<std::uint32_t>(e) : static_cast<std::uint32_t>(rng.below(n_devices));
    edges.emplace_back(d, pick.pick(rng));
  }
  std::vector<DeviceId> devices(n_devices);
  std::vector<AppId> apps(n_apps);
  for (std::uint32_t i = 0; i < n_devices; ++i) devices[i] = "d" + padded(i, 7);
  for (std::uint32_t i = 0; i < n_apps; ++i) apps[i] = "a" + padded(i, 7);
  return BipartiteGraph::from_indexed(std::move(devices), std::move(apps), std::move(edges));
}

void write_corpus(const std::filesystem::path& dir, const SynthCorpus& corpus) {
  write_traffic_file(dir / "traffic.tsv", corpus.traffic);
  corpus.verdicts.save(dir / "verdicts.csv");
  corpus.enrichment.save_domains(dir / "dns.csv");
  corpus.enrichment.save_asns(dir / "asn.csv");
  write_ground_truth(dir / "ground_truth.csv", corpus.truth);
  write_edge_file(dir / "edges.tsv", corpus.graph.edges());
  write_file(dir / "synth.conf", corpus.config.to_kv());

  std::string leaks = "record_index,device_id,type,key\n";
  for (const auto& e : corpus.manifest.leaks)
    leaks += std::to_string(e.record_index) + "," + e.device + "," + e.type + "," + e.key + "\n";
  write_file(dir / "leaks.csv", leaks);

  std::string infra = "device_id,expected_asns,expected_short_lived\n";
  for (const auto& [d, n] : corpus.manifest.expected_asns)
    infra += d + "," + std::to_string(n) + "," +
             std::to_string(corpus.manifest.expected_short_lived.at(d)) + "\n";
  write_file(dir / "infra.csv", infra);

  const auto& m = corpus.manifest;
  write_file(dir / "manifest.csv",
             "bad_bad_edges,good_good_edges,cross_edges,bridges,topped_up_edges\n" +
                 std::to_string(m.bad_bad_edges) + "," + std::to_string(m.good_good_edges) + "," +
                 std::to_string(m.cross_edges) + "," + std::to_string(m.bridges) + "," +
                 std::to_string(m.topped_up_edges) + "\n");
}

}  // namespace guiltnet
