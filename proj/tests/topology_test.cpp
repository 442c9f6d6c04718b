#include <gtest/gtest.h>

#include <cmath>

#include "guiltnet/topology.hpp"
#include "test_support.hpp"

using namespace guiltnet;
using gntest::graph_of;

namespace {
NodeRef dev(const BipartiteGraph& g, const std::string& id) { return {Side::Device, *g.find_device(id)}; }
NodeRef app(const BipartiteGraph& g, const std::string& id) { return {Side::App, *g.find_app(id)}; }
}  // namespace

TEST(ShortestPaths, PathAndUnreachable) {
  auto g = graph_of({{"d1", "a1"}, {"d2", "a1"}, {"d3", "a3"}});
  std::vector<NodeRef> src{dev(g, "d1"), dev(g, "d2"), dev(g, "d3")};
  auto dm = shortest_paths(g, src);
  auto i = dm.position(dev(g, "d1")), j = dm.position(dev(g, "d2")), k = dm.position(dev(g, "d3"));
  EXPECT_EQ(dm.at(i, j), 2);
  EXPECT_EQ(dm.at(i, i), 0);
  EXPECT_EQ(dm.at(i, k), kUnreachable);
  auto d = bfs_distances(g, dev(g, "d1"));
  EXPECT_EQ(d[g.flat(app(g, "a1"))], 1);
  EXPECT_EQ(d[g.flat(app(g, "a3"))], kUnreachable);
}

TEST(ShortestPaths, SymmetryParityTriangle) {
  Rng rng(21);
  auto g = gntest::random_connected(rng, 40, 30);
  std::vector<NodeRef> all;
  for (std::size_t k = 0; k < g.node_count(); ++k) all.push_back(g.from_flat(k));
  auto dm = shortest_paths(g, all, 3);
  auto dm1 = shortest_paths(g, all, 1);
  for (std::size_t i = 0; i < dm.size(); ++i)
    for (std::size_t j = 0; j < dm.size(); ++j) {
      EXPECT_EQ(dm.at(i, j), dm1.at(i, j));
      EXPECT_EQ(dm.at(i, j), dm.at(j, i));
      bool same_side = dm.nodes()[i].side == dm.nodes()[j].side;
      EXPECT_EQ(dm.at(i, j) % 2 == 0, same_side);
      for (std::size_t k = 0; k < dm.size(); k += 7) EXPECT_LE(dm.at(i, j), dm.at(i, k) + dm.at(k, j));
    }
}

TEST(ClusterStats, AllPairsDistanceTwo) {
  // Every device shares the hub, so every device pair is two hops apart.
  auto g = graph_of({{"b1", "hub"}, {"b2", "hub"}, {"g1", "hub"}, {"g2", "hub"}});
  std::vector<NodeRef> cb{dev(g, "b1"), dev(g, "b2")}, cg{dev(g, "g1"), dev(g, "g2")};
  std::vector<NodeRef> all{cb[0], cb[1], cg[0], cg[1]};
  auto stats = cluster_distance_stats(shortest_paths(g, all), cb, cg);
  for (auto c : {PairClass::GoodGood, PairClass::BadBad, PairClass::BadGood}) {
    const auto& s = stats.get(c);
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
    ASSERT_EQ(s.cdf.size(), 1u);
    EXPECT_EQ(s.cdf[0].length, 2);
    EXPECT_DOUBLE_EQ(s.cdf[0].cum_fraction, 1.0);
  }
  EXPECT_EQ(stats.bad_bad.pairs, 1u);
  EXPECT_EQ(stats.bad_good.pairs, 4u);
}

TEST(ClusterStats, Errors) {
  auto g = graph_of({{"b1", "a"}, {"g1", "a"}});
  std::vector<NodeRef> cb{dev(g, "b1")}, cg{dev(g, "g1")}, none;
  auto dm = shortest_paths(g, std::vector<NodeRef>{cb[0], cg[0]});
  EXPECT_THROW(cluster_distance_stats(dm, none, cg), std::invalid_argument);
  EXPECT_THROW(cluster_distance_stats(dm, cb, cb), std::invalid_argument);
}

TEST(ClusterStats, UnreachableExcluded) {
  auto g = graph_of({{"b1", "a"}, {"b2", "a"}, {"g1", "c"}});
  std::vector<NodeRef> cb{dev(g, "b1"), dev(g, "b2")}, cg{dev(g, "g1")};
  std::vector<NodeRef> all{cb[0], cb[1], cg[0]};
  auto stats = cluster_distance_stats(shortest_paths(g, all), cb, cg);
  EXPECT_EQ(stats.bad_good.pairs, 0u);
  EXPECT_EQ(stats.bad_good.unreachable, 2u);
  EXPECT_DOUBLE_EQ(stats.bad_bad.mean, 2.0);
}

TEST(Closeness, PathOfThree) {
  auto g = graph_of({{"d1", "a"}, {"d2", "a"}});
  std::vector<NodeRef> nodes{dev(g, "d1"), app(g, "a")};
  auto cc = closeness_centrality(g, nodes);
  EXPECT_DOUBLE_EQ(cc.at(app(g, "a")), 1.0);
  EXPECT_NEAR(cc.at(dev(g, "d1")), 2.0 / 3.0, 1e-15);
}

TEST(Closeness, SingletonIsZero) {
  auto g = BipartiteGraph::from_indexed({"d0", "d1"}, {"a0"}, {{0, 0}});
  std::vector<NodeRef> nodes{{Side::Device, 1}};
  EXPECT_EQ(closeness_centrality(g, nodes).at(nodes[0]), 0.0);
}

TEST(Closeness, MatchesFloydWarshall) {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = gntest::random_tree(rng, 2 + static_cast<std::uint32_t>(rng.below(30)));
    std::vector<NodeRef> all;
    for (std::size_t k = 0; k < g.node_count(); ++k) all.push_back(g.from_flat(k));
    auto cc = closeness_centrality(g, all, 2);
    auto expect = gntest::dense_closeness(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) EXPECT_NEAR(cc.at(g.from_flat(k)), expect[k], 1e-6);
  }
  auto g = graph_of({{"d1", "a1"}, {"d2", "a1"}, {"d3", "a3"}});
  std::vector<NodeRef> all;
  for (std::size_t k = 0; k < g.node_count(); ++k) all.push_back(g.from_flat(k));
  auto cc = closeness_centrality(g, all);
  auto expect = gntest::dense_closeness(g);
  for (std::size_t k = 0; k < g.node_count(); ++k) EXPECT_NEAR(cc.at(g.from_flat(k)), expect[k], 1e-12);
}

TEST(Eigenvector, StarAndEdge) {
  auto star = graph_of({{"c", "l1"}, {"c", "l2"}, {"c", "l3"}});
  auto ec = eigenvector_centrality(star);
  EXPECT_TRUE(ec.converged);
  EXPECT_NEAR(ec.at(star, dev(star, "c")), std::sqrt(0.5), 1e-6);
  for (auto l : {"l1", "l2", "l3"}) EXPECT_NEAR(ec.at(star, app(star, l)), 1.0 / std::sqrt(6.0), 1e-6);
  EXPECT_NEAR(ec.kappa, std::sqrt(3.0), 1e-8);

  auto edge = graph_of({{"d", "a"}});
  auto e2 = eigenvector_centrality(edge);
  EXPECT_NEAR(e2.scores[0], std::sqrt(0.5), 1e-9);
  EXPECT_NEAR(e2.scores[1], std::sqrt(0.5), 1e-9);
  EXPECT_THROW(eigenvector_centrality(BipartiteGraph{}), std::invalid_argument);
}

TEST(Eigenvector, MatchesDenseSolver) {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto n = 3 + static_cast<std::uint32_t>(rng.below(48));
    auto g = gntest::random_connected(rng, n, static_cast<std::uint32_t>(rng.below(n)));
    auto ec = eigenvector_centrality(g, 1e-12, 1000000, 2);
    auto [v, kappa] = gntest::dense_eigenvector(g);
    ASSERT_TRUE(ec.converged);
    EXPECT_NEAR(ec.kappa, kappa, 1e-6);
    double norm = 0.0;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      EXPECT_NEAR(ec.scores[k], v(static_cast<Eigen::Index>(k)), 1e-6);
      EXPECT_GE(ec.scores[k], 0.0);
      norm += ec.scores[k] * ec.scores[k];
    }
    EXPECT_NEAR(norm, 1.0, 1e-12);
    EXPECT_LT(ec.residual, 1e-10);
  }
}

TEST(TopologyFiles, Write) {
  gntest::TempDir dir;
  auto g = graph_of({{"b1", "a"}, {"g1", "a"}});
  std::vector<NodeRef> cb{dev(g, "b1")}, cg{dev(g, "g1")};
  std::vector<NodeRef> all{cb[0], cg[0]};
  auto dm = shortest_paths(g, all);
  write_cdfs(dir / "cdf.csv", cluster_distance_stats(dm, cb, cg));
  write_heatmap(dir / "hm.csv", g, dm);
  CentralityReport rep{closeness_centrality(g, all), eigenvector_centrality(g)};
  write_centrality(dir / "c.csv", g, all, rep);
  EXPECT_EQ(gntest::slurp(dir / "cdf.csv").rfind("pair_class,length,cum_fraction\n", 0), 0u);
  EXPECT_NE(gntest::slurp(dir / "hm.csv").find("b1,g1,2"), std::string::npos);
  EXPECT_EQ(gntest::slurp(dir / "c.csv").rfind("node_id,cc,ec\n", 0), 0u);
}
