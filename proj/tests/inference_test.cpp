#include <gtest/gtest.h>

#include <cmath>

#include "guiltnet/inference.hpp"
#include "test_support.hpp"

using namespace guiltnet;
using gntest::graph_of;

namespace {

BpConfig tight(double eps) {
  BpConfig cfg;
  cfg.epsilon = eps;
  cfg.convergence_tol = 1e-14;
  cfg.max_iterations = 200;
  return cfg;
}

NodeBeliefs random_priors(Rng& rng, const BipartiteGraph& g) {
  auto priors = uniform_beliefs(g);
  for (std::uint32_t d = 0; d < g.device_count(); ++d) {
    auto r = rng.below(3);
    if (r == 0) priors.device[d] = BeliefVector::from_bad(0.99);
    if (r == 1) priors.device[d] = BeliefVector::from_bad(0.01);
  }
  return priors;
}

}  // namespace

TEST(InitBeliefs, TrainingDevicesOnly) {
  auto g = graph_of({{"b", "a"}, {"g", "a"}, {"u", "a"}});
  GroundTruth gt;
  gt.bad_devices = {"b"};
  gt.good_devices = {"g", "u"};
  BpConfig cfg;
  auto pri = init_beliefs(g, gt, {"b", "g"}, cfg);
  EXPECT_DOUBLE_EQ(pri.device[*g.find_device("b")].p_bad, 0.99);
  EXPECT_NEAR(pri.device[*g.find_device("b")].p_good, 0.01, 1e-15);
  EXPECT_NEAR(pri.device[*g.find_device("g")].p_bad, 0.01, 1e-15);
  EXPECT_EQ(pri.device[*g.find_device("u")], (BeliefVector{0.5, 0.5}));
  EXPECT_EQ(pri.app[*g.find_app("a")], (BeliefVector{0.5, 0.5}));
  EXPECT_THROW(init_beliefs(g, gt, {"nope"}, cfg), std::invalid_argument);
}

TEST(InitBeliefs, DeltaBounds) {
  BpConfig cfg;
  cfg.delta = 0.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.delta = 1.0;
  EXPECT_NO_THROW(cfg.validate());
  cfg.epsilon = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.epsilon = 0.5;
  EXPECT_NO_THROW(cfg.validate());
}

TEST(BpMessage, HandValues) {
  auto prior = BeliefVector::from_bad(0.99);
  auto m = bp_message(prior, {}, 0.51);
  EXPECT_NEAR(m.p_bad, 0.5098, 1e-12);
  EXPECT_NEAR(m.p_good, 0.4902, 1e-12);
  m = bp_message(prior, {}, 0.9);
  EXPECT_NEAR(m.p_bad, 0.892, 1e-12);
  m = bp_message(BeliefVector::from_bad(0.2), std::vector<BeliefVector>{BeliefVector::from_bad(0.7)}, 0.5);
  EXPECT_DOUBLE_EQ(m.p_bad, 0.5);
}

TEST(BpMessage, IncomingProductMatchesDirectSum) {
  std::vector<BeliefVector> in{BeliefVector::from_bad(0.7), BeliefVector::from_bad(0.2),
                               BeliefVector::from_bad(0.9)};
  auto prior = BeliefVector::from_bad(0.3);
  double eps = 0.8;
  double pb = prior.p_bad, pg = prior.p_good;
  for (auto& b : in) {
    pb *= b.p_bad;
    pg *= b.p_good;
  }
  double out_bad = pb * eps + pg * (1 - eps);
  double out_good = pb * (1 - eps) + pg * eps;
  auto m = bp_message(prior, in, eps);
  EXPECT_NEAR(m.p_bad, out_bad / (out_bad + out_good), 1e-12);
  EXPECT_NEAR(m.p_bad + m.p_good, 1.0, 1e-12);
}

TEST(RunBp, TwoNodes) {
  auto g = graph_of({{"d", "a"}});
  auto pri = uniform_beliefs(g);
  pri.device[0] = BeliefVector::from_bad(0.99);
  auto res = run_bp(g, pri, tight(0.51));
  EXPECT_NEAR(res.beliefs.app[0].p_bad, 0.5098, 1e-12);
  EXPECT_NEAR(res.beliefs.device[0].p_bad, 0.99, 1e-12);
  EXPECT_TRUE(res.converged);
  EXPECT_LE(res.iterations_run, 2u);
}

TEST(RunBp, UniformPriorsStayUniform) {
  Rng rng(5);
  auto g = gntest::random_tree(rng, 9);
  auto res = run_bp(g, uniform_beliefs(g), tight(0.8));
  for (auto& b : res.beliefs.device) EXPECT_DOUBLE_EQ(b.p_bad, 0.5);
  for (auto& b : res.beliefs.app) EXPECT_DOUBLE_EQ(b.p_bad, 0.5);
}

TEST(RunBp, NeutralEpsilonReturnsPriors) {
  Rng rng(6);
  auto g = gntest::random_tree(rng, 8);
  auto pri = random_priors(rng, g);
  auto res = run_bp(g, pri, tight(0.5));
  for (std::size_t k = 0; k < g.node_count(); ++k)
    EXPECT_NEAR(res.beliefs.at(g.from_flat(k)).p_bad, pri.at(g.from_flat(k)).p_bad, 1e-15);
}

TEST(RunBp, ExactOnTrees) {
  Rng rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    auto n = 2 + static_cast<std::uint32_t>(rng.below(9));
    auto g = gntest::random_tree(rng, n);
    auto pri = random_priors(rng, g);
    double eps = 0.5 + 0.49 * rng.uniform();
    auto res = run_bp(g, pri, tight(eps));
    auto exact = gntest::brute_force_marginals(g, pri, eps);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
      auto b = res.beliefs.at(g.from_flat(k));
      EXPECT_NEAR(b.p_bad, exact.at(g.from_flat(k)).p_bad, 1e-9);
      EXPECT_NEAR(b.p_bad + b.p_good, 1.0, 1e-12);
    }
  }
}

TEST(RunBp, LabelSymmetry) {
  Rng rng(8);
  auto g = gntest::random_tree(rng, 10);
  auto pri = random_priors(rng, g);
  auto flipped = pri;
  for (auto& b : flipped.device) b = {b.p_good, b.p_bad};
  auto a = run_bp(g, pri, tight(0.7));
  auto b = run_bp(g, flipped, tight(0.7));
  for (std::size_t k = 0; k < g.node_count(); ++k)
    EXPECT_NEAR(a.beliefs.at(g.from_flat(k)).p_bad, b.beliefs.at(g.from_flat(k)).p_good, 1e-12);
}

TEST(RunBp, MonotoneInEpsilonOnPath) {
  auto g = graph_of({{"b", "u"}});
  auto pri = uniform_beliefs(g);
  pri.device[0] = BeliefVector::from_bad(0.99);
  double prev = 0.0;
  for (double eps = 0.51; eps < 0.995; eps += 0.02) {
    double exact = gntest::brute_force_marginals(g, pri, eps).app[0].p_bad;
    double bp = run_bp(g, pri, tight(eps)).beliefs.app[0].p_bad;
    EXPECT_NEAR(bp, exact, 1e-12);
    EXPECT_GT(bp, prev);
    prev = bp;
  }
}

TEST(RunBp, DeterministicAcrossThreads) {
  Rng rng(9);
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < 3000; ++i)
    pairs.push_back({"d" + std::to_string(rng.below(400)), "a" + std::to_string(rng.below(120))});
  auto g = graph_of(pairs);
  auto pri = random_priors(rng, g);
  BpConfig cfg;
  cfg.max_iterations = 15;
  auto one = run_bp(g, pri, cfg);
  cfg.threads = 4;
  auto four = run_bp(g, pri, cfg);
  EXPECT_EQ(one.beliefs.device, four.beliefs.device);
  EXPECT_EQ(one.beliefs.app, four.beliefs.app);
  EXPECT_EQ(one.iterations_run, four.iterations_run);
}

TEST(RunBp, HighDegreeDoesNotUnderflow) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < 5000; ++i) pairs.push_back({"d" + std::to_string(i), "hub"});
  auto g = graph_of(pairs);
  auto pri = uniform_beliefs(g);
  for (auto& b : pri.device) b = BeliefVector::from_bad(0.99);
  auto res = run_bp(g, pri, tight(0.9));
  double p = res.beliefs.app[0].p_bad;
  EXPECT_TRUE(std::isfinite(p));
  EXPECT_NEAR(p, 1.0, 1e-9);
}

TEST(Classify, StrictThreshold) {
  auto g = graph_of({{"d1", "a"}, {"d2", "a"}, {"d3", "a"}});
  InferenceResult r;
  r.beliefs = uniform_beliefs(g);
  r.beliefs.device[0] = BeliefVector::from_bad(0.51);
  r.beliefs.device[1] = BeliefVector::from_bad(0.5);
  r.beliefs.device[2] = BeliefVector::from_bad(0.2);
  auto c = classify(g, r, 0.5);
  EXPECT_EQ(c.size(), 3u);
  EXPECT_EQ(c.at("d1"), DeviceClass::Bad);
  EXPECT_EQ(c.at("d2"), DeviceClass::Good);
  for (auto& [d, cls] : classify(g, r, 0.0)) EXPECT_EQ(cls, DeviceClass::Bad);
  for (auto& [d, cls] : classify(g, r, 1.0)) EXPECT_EQ(cls, DeviceClass::Good);
}

TEST(RunLp, ChainAndAbsorbing) {
  auto g = graph_of({{"bad", "a"}, {"good", "a"}});
  GroundTruth gt;
  gt.bad_devices = {"bad"};
  gt.good_devices = {"good"};
  auto lp = run_lp(g, gt, {"bad", "good"});
  EXPECT_NEAR(lp.app[0], 0.5, 1e-12);

  auto g2 = graph_of({{"b1", "a"}, {"u", "a"}, {"u", "c"}, {"b2", "c"}});
  GroundTruth gt2;
  gt2.bad_devices = {"b1", "b2"};
  auto lp2 = run_lp(g2, gt2, {"b1", "b2"});
  for (double s : lp2.device) EXPECT_NEAR(s, 1.0, 1e-6);
  for (double s : lp2.app) EXPECT_NEAR(s, 1.0, 1e-6);
}

TEST(RunLp, MatchesHarmonicSolveOnTrees) {
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = gntest::random_tree(rng, 2 + static_cast<std::uint32_t>(rng.below(9)));
    GroundTruth gt;
    std::set<DeviceId> training;
    std::vector<std::pair<std::size_t, double>> clamp;
    for (std::uint32_t d = 0; d < g.device_count(); ++d) {
      auto r = rng.below(3);
      if (r == 2) continue;
      (r == 0 ? gt.bad_devices : gt.good_devices).insert(g.device_id(d));
      training.insert(g.device_id(d));
      clamp.emplace_back(d, r == 0 ? 1.0 : 0.0);
    }
    auto lp = run_lp(g, gt, training, 100000, 1e-13);
    // Without any clamp the harmonic system is singular; every node stays 0.5.
    std::vector<double> expect =
        clamp.empty() ? std::vector<double>(g.node_count(), 0.5) : gntest::harmonic_solution(g, clamp);
    for (std::size_t k = 0; k < g.node_count(); ++k) EXPECT_NEAR(lp.at(g.from_flat(k)), expect[k], 1e-8);
  }
}

TEST(Beliefs, WriteCsv) {
  gntest::TempDir dir;
  auto g = graph_of({{"d", "a"}});
  auto pri = uniform_beliefs(g);
  pri.device[0] = BeliefVector::from_bad(0.99);
  auto res = run_bp(g, pri, tight(0.51));
  write_beliefs(dir / "b.csv", g, res);
  auto text = gntest::slurp(dir / "b.csv");
  EXPECT_EQ(text.rfind("node_id,side,p_bad,iterations,converged\n", 0), 0u);
  EXPECT_NE(text.find("a,app,"), std::string::npos);
}
