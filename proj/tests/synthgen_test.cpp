#include <gtest/gtest.h>

#include <cmath>

#include "guiltnet/ingest.hpp"
#include "guiltnet/synthgen.hpp"
#include "guiltnet/topology.hpp"
#include "test_support.hpp"

using namespace guiltnet;

namespace {

SynthConfig small(TopologyMode mode, std::uint64_t seed = 1) {
  SynthConfig cfg;
  cfg.topology = mode;
  cfg.seed = seed;
  cfg.n_bad_devices = 150;
  cfg.n_good_devices = 150;
  cfg.n_bad_apps = 20;
  cfg.n_good_apps = 60;
  cfg.p_homophile = 0.1;
  cfg.p_good = 0.05;
  cfg.p_cross = mode == TopologyMode::MobileLike ? 0.02 : 0.002;
  return cfg;
}

std::vector<NodeRef> device_refs(const BipartiteGraph& g, const std::set<DeviceId>& ids) {
  std::vector<NodeRef> out;
  for (const auto& d : ids) out.push_back({Side::Device, *g.find_device(d)});
  return out;
}

}  // namespace

TEST(Generate, Deterministic) {
  for (auto mode : {TopologyMode::MobileLike, TopologyMode::DnsLike}) {
    auto a = generate(small(mode, 9));
    auto b = generate(small(mode, 9));
    EXPECT_EQ(a.graph.edges(), b.graph.edges());
    EXPECT_EQ(a.traffic, b.traffic);
    EXPECT_EQ(a.truth.bad_devices, b.truth.bad_devices);
    auto c = generate(small(mode, 10));
    EXPECT_NE(a.graph.edges(), c.graph.edges());
  }
}

TEST(Generate, NoCrossMeansDisconnectedClasses) {
  auto cfg = small(TopologyMode::MobileLike);
  cfg.p_cross = 0.0;
  auto c = generate(cfg);
  auto bad = device_refs(c.graph, c.truth.bad_devices);
  auto good = device_refs(c.graph, c.truth.good_devices);
  auto d = bfs_distances(c.graph, bad[0]);
  for (auto n : good) EXPECT_EQ(d[c.graph.flat(n)], kUnreachable);
  std::vector<NodeRef> all = bad;
  all.insert(all.end(), good.begin(), good.end());
  auto stats = cluster_distance_stats(shortest_paths(c.graph, all), bad, good);
  EXPECT_EQ(stats.bad_good.pairs, 0u);
  EXPECT_EQ(stats.bad_good.unreachable, bad.size() * good.size());
}

TEST(Generate, TrafficRoundTripsToGraph) {
  for (auto mode : {TopologyMode::MobileLike, TopologyMode::DnsLike}) {
    auto c = generate(small(mode));
    gntest::TempDir dir;
    write_corpus(dir.path(), c);
    auto recs = read_traffic_file(dir / "traffic.tsv");
    EXPECT_EQ(recs, c.traffic);
    auto g = build_graph(build_edge_stream(recs, c.config.entity_mode()));
    EXPECT_EQ(g.edges(), c.graph.edges());
    EXPECT_EQ(read_edge_file(dir / "edges.tsv"), c.graph.edges());
  }
}

TEST(Generate, TruthMatchesLabelingRules) {
  for (auto mode : {TopologyMode::MobileLike, TopologyMode::DnsLike}) {
    auto c = generate(small(mode));
    LabelingConfig lc;
    lc.vt = c.config.vt;
    auto gt = build_ground_truth(c.graph, c.verdicts, lc);
    EXPECT_EQ(gt.bad_devices, c.truth.bad_devices);
    EXPECT_EQ(gt.good_devices, c.truth.good_devices);
    for (const auto& a : c.bad_apps)
      if (c.graph.find_app(a)) EXPECT_GE(c.verdicts.lookup(a)->positives, c.config.vt);
  }
}

TEST(Generate, ClassEdgeCountsMatchBinomial) {
  SynthConfig cfg;  // default sizes
  auto c = generate(cfg);
  auto check = [](std::uint64_t observed, std::uint32_t devices, const std::vector<double>& w, double p) {
    double mean = 0.0, var = 0.0;
    for (double wa : w) {
      double q = std::min(1.0, p * wa);
      mean += devices * q;
      var += devices * q * (1.0 - q);
    }
    EXPECT_LE(std::abs(static_cast<double>(observed) - mean), 3.0 * std::sqrt(var))
        << "observed " << observed << " expected " << mean;
  };
  check(c.manifest.bad_bad_edges, cfg.n_bad_devices, c.bad_app_weights, cfg.p_homophile);
  check(c.manifest.good_good_edges, cfg.n_good_devices, c.good_app_weights, cfg.good_probability());
  check(c.manifest.cross_edges, cfg.n_bad_devices, c.good_app_weights, cfg.p_cross);
  double mean_w = 0.0;
  for (double w : c.bad_app_weights) mean_w += w;
  EXPECT_NEAR(mean_w / c.bad_app_weights.size(), 1.0, 1e-9);
}

TEST(Generate, DnsLikeBridges) {
  auto c = generate(small(TopologyMode::DnsLike));
  EXPECT_GT(c.manifest.bridges, 0u);
  EXPECT_EQ(c.bridge_devices.size(), c.manifest.bridges * c.config.bridge_hops);
  EXPECT_EQ(c.bridge_apps.size(), c.manifest.bridges * (c.config.bridge_hops - 1));
  EXPECT_EQ(c.manifest.cross_edges, 0u);
  for (const auto& d : c.bridge_devices) {
    EXPECT_FALSE(c.truth.is_bad(d));
    EXPECT_FALSE(c.truth.is_good(d));
  }
  // App ids are destination IPs in this mode.
  EXPECT_EQ(c.graph.app_id(0).rfind("172.16.", 0), 0u);
}

TEST(Generate, MobileGapOnDefaultConfig) {
  auto cfg = SynthConfig::load(std::filesystem::path(GN_SOURCE_DIR) / "configs" / "mobile_like.conf");
  auto c = generate(cfg);
  Rng rng(1);
  auto sample = [&](const std::set<DeviceId>& ids) {
    std::vector<DeviceId> v(ids.begin(), ids.end());
    rng.shuffle(v);
    v.resize(std::min<std::size_t>(v.size(), 300));
    return device_refs(c.graph, {v.begin(), v.end()});
  };
  auto bad = sample(c.truth.bad_devices), good = sample(c.truth.good_devices);
  std::vector<NodeRef> all = bad;
  all.insert(all.end(), good.begin(), good.end());
  auto s = cluster_distance_stats(shortest_paths(c.graph, all), bad, good);
  EXPECT_LT(s.bad_bad.mean, s.bad_good.mean);
  EXPECT_LT(s.bad_good.mean, s.good_good.mean);
  double gap = s.bad_good.mean - s.bad_bad.mean;
  EXPECT_GE(gap, 0.5);
  EXPECT_LE(gap, 2.0);
}

TEST(Generate, ValidateRejectsInfeasible) {
  SynthConfig cfg;
  cfg.p_cross = cfg.p_homophile;
  EXPECT_THROW(generate(cfg), ConfigError);
  cfg = SynthConfig{};
  cfg.min_bad_apps = cfg.n_bad_apps + 1;
  EXPECT_THROW(generate(cfg), ConfigError);
  cfg = SynthConfig{};
  cfg.topology = TopologyMode::DnsLike;
  cfg.infra = true;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(cfg.set("bogus", "1"), ConfigError);
  EXPECT_THROW(cfg.set("p_cross", "high"), ConfigError);
}

TEST(SynthConfig, KvRoundTrip) {
  auto cfg = small(TopologyMode::DnsLike, 77);
  cfg.leak_fraction = 0.25;
  gntest::TempDir dir;
  write_file(dir / "s.conf", cfg.to_kv());
  auto back = SynthConfig::load(dir / "s.conf");
  EXPECT_EQ(back.to_kv(), cfg.to_kv());
  EXPECT_EQ(back.topology, TopologyMode::DnsLike);
  EXPECT_EQ(parse_topology_mode("mobile-like"), TopologyMode::MobileLike);
  EXPECT_THROW(parse_topology_mode("mobile"), ConfigError);
}

TEST(PlantLeaks, ZeroFractionLeavesTrafficUnchanged) {
  auto c = generate(small(TopologyMode::MobileLike));
  auto copy = c.traffic;
  LeakPlantConfig lp;
  EXPECT_TRUE(plant_leaks(copy, lp, default_leak_catalog()).empty());
  EXPECT_EQ(copy, c.traffic);
}

TEST(PlantLeaks, ScanRecoversManifest) {
  auto cfg = small(TopologyMode::MobileLike);
  cfg.leak_fraction = 0.3;
  cfg.decoy_fraction = 0.2;
  auto c = generate(cfg);
  ASSERT_FALSE(c.manifest.leaks.empty());
  auto scan = scan_leaks(c.traffic, {}, default_leak_catalog());
  EXPECT_EQ(scan.events, c.manifest.leaks);
  for (const auto& e : c.manifest.leaks) EXPECT_TRUE(c.truth.is_bad(e.device));
}

TEST(Infra, ManifestMatchesStats) {
  auto cfg = small(TopologyMode::MobileLike);
  cfg.infra = true;
  auto c = generate(cfg);
  std::set<DeviceId> labeled = c.truth.bad_devices;
  labeled.insert(c.truth.good_devices.begin(), c.truth.good_devices.end());
  auto asns = asn_stats(c.traffic, labeled, c.enrichment);
  auto shorts = short_lived_domains(c.traffic, labeled, c.enrichment);
  for (const auto& d : labeled) {
    EXPECT_EQ(asns.at(d), c.manifest.expected_asns.at(d));
    EXPECT_EQ(shorts.at(d), c.manifest.expected_short_lived.at(d));
  }
  // Infra records carry no app string, so the graph is unchanged.
  auto plain = small(TopologyMode::MobileLike);
  EXPECT_EQ(generate(plain).graph.device_count(), c.graph.device_count());
}

TEST(RandomBipartite, CoversEveryDevice) {
  auto g = random_bipartite(500, 50, 3000, 3);
  EXPECT_EQ(g.device_count(), 500u);
  for (std::uint32_t d = 0; d < g.device_count(); ++d) EXPECT_FALSE(g.apps_of(d).empty());
  EXPECT_LE(g.edge_count(), 3000u);
  EXPECT_GT(g.edge_count(), 2000u);
}
