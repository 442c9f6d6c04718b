#include <gtest/gtest.h>

#include "guiltnet/labeling.hpp"
#include "test_support.hpp"

using namespace guiltnet;
using gntest::graph_of;

namespace {
VerdictRecord v(std::string id, std::uint32_t pos) { return {std::move(id), pos, 60}; }
}  // namespace

TEST(LabelApp, Thresholds) {
  LabelingConfig cfg;
  EXPECT_EQ(label_app(v("a", 5), cfg), AppLabel::Bad);
  EXPECT_EQ(label_app(v("a", 4), cfg), AppLabel::Suspicious);
  EXPECT_EQ(label_app(v("a", 0), cfg), AppLabel::Good);
  EXPECT_EQ(label_app(std::nullopt, cfg), AppLabel::NoInfo);
}

TEST(LabelIp, Thresholds) {
  EXPECT_EQ(label_ip(v("1.2.3.4", 2)), AppLabel::Bad);
  EXPECT_EQ(label_ip(v("1.2.3.4", 1)), AppLabel::Suspicious);
  EXPECT_EQ(label_ip(v("1.2.3.4", 0)), AppLabel::Good);
  EXPECT_EQ(label_ip(std::nullopt), AppLabel::NoInfo);
}

TEST(LabelDevices, Rules) {
  auto g = graph_of({{"bad", "b1"},
                     {"bad", "b2"},
                     {"one_bad", "b1"},
                     {"sus", "s"},
                     {"good", "g"},
                     {"good", "n"},
                     {"mixed", "g"},
                     {"mixed", "s"}});
  StaticVerdicts verdicts({v("b1", 9), v("b2", 30), v("s", 1), v("g", 0)});
  LabelingConfig cfg;
  auto gt = build_ground_truth(g, verdicts, cfg);
  EXPECT_EQ(gt.bad_devices, (std::set<DeviceId>{"bad"}));
  EXPECT_EQ(gt.good_devices, (std::set<DeviceId>{"good"}));
  EXPECT_EQ(gt.app_labels.at("n"), AppLabel::NoInfo);
  EXPECT_EQ(gt.app_labels.at("s"), AppLabel::Suspicious);
}

TEST(LabelDevices, PopularBadAppIsFilteredFirst) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int i = 0; i < 5; ++i) pairs.push_back({"d" + std::to_string(i), "hub"});
  pairs.push_back({"d0", "b"});
  auto g = graph_of(pairs);
  StaticVerdicts verdicts({v("hub", 10), v("b", 10)});
  LabelingConfig cfg;
  cfg.n_p = 4;
  BipartiteGraph filtered;
  auto gt = build_ground_truth(g, verdicts, cfg, &filtered);
  EXPECT_TRUE(gt.bad_devices.empty());  // d0 keeps a single bad app
  EXPECT_FALSE(filtered.find_app("hub"));
  EXPECT_EQ(gt.good_devices.size(), 4u);  // isolated after filtering
}

TEST(LabelDevices, VtMonotone) {
  Rng rng(3);
  std::vector<std::pair<std::string, std::string>> pairs;
  std::vector<VerdictRecord> recs;
  for (int a = 0; a < 60; ++a) recs.push_back(v("a" + std::to_string(a), static_cast<std::uint32_t>(rng.below(12))));
  for (int d = 0; d < 300; ++d)
    for (int k = 0; k < 4; ++k) pairs.push_back({"d" + std::to_string(d), "a" + std::to_string(rng.below(60))});
  auto g = graph_of(pairs);
  StaticVerdicts verdicts(recs);
  std::size_t prev_apps = SIZE_MAX, prev_devs = SIZE_MAX;
  for (std::uint32_t vt = 1; vt <= 12; ++vt) {
    LabelingConfig cfg;
    cfg.vt = vt;
    auto gt = build_ground_truth(g, verdicts, cfg);
    std::size_t bad_apps = 0;
    for (const auto& [a, l] : gt.app_labels) bad_apps += l == AppLabel::Bad;
    EXPECT_LE(bad_apps, prev_apps);
    EXPECT_LE(gt.bad_devices.size(), prev_devs);
    prev_apps = bad_apps;
    prev_devs = gt.bad_devices.size();
  }
}

TEST(GroundTruth, FileRoundTripAndChecks) {
  gntest::TempDir dir;
  GroundTruth gt;
  gt.bad_devices = {"10.0.0.1"};
  gt.good_devices = {"10.0.0.2", "10.0.0.3"};
  write_ground_truth(dir / "gt.csv", gt);
  auto back = read_ground_truth(dir / "gt.csv");
  EXPECT_EQ(back.bad_devices, gt.bad_devices);
  EXPECT_EQ(back.good_devices, gt.good_devices);

  auto g = graph_of({{"10.0.0.1", "a"}, {"10.0.0.2", "a"}});
  EXPECT_THROW(check_ground_truth(gt, g), std::logic_error);  // 10.0.0.3 missing
  gt.good_devices = {"10.0.0.1"};
  EXPECT_THROW(check_ground_truth(gt, g), std::logic_error);  // overlap
}

TEST(Verdicts, LoadSaveAndErrors) {
  gntest::TempDir dir;
  StaticVerdicts s({v("com.a", 7), v("com.b", 0)});
  s.save(dir / "v.csv");
  auto back = StaticVerdicts::load(dir / "v.csv");
  EXPECT_EQ(back.size(), 2u);
  EXPECT_EQ(back.lookup("com.a")->positives, 7u);
  EXPECT_FALSE(back.lookup("com.c"));
  write_file(dir / "bad.csv", "entity_id,positives,total_engines\ncom.a,x,60\n");
  EXPECT_THROW(StaticVerdicts::load(dir / "bad.csv"), ParseError);
  EXPECT_THROW(StaticVerdicts::load(dir / "missing.csv"), IoError);
}

TEST(LabelingConfig, Validate) {
  LabelingConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.n_ab = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
