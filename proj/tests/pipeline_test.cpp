#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>

#include "guiltnet/pipeline.hpp"
#include "test_support.hpp"

using namespace guiltnet;
namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  std::string cmd = std::string(GN_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

SynthConfig small_mobile() {
  SynthConfig cfg;
  cfg.n_bad_devices = 100;
  cfg.n_good_devices = 150;
  cfg.n_bad_apps = 20;
  cfg.n_good_apps = 60;
  cfg.p_homophile = 0.1;
  cfg.p_good = 0.04;
  cfg.p_cross = 0.01;
  return cfg;
}

}  // namespace

TEST(PipelineConfig, SetAndRoundTrip) {
  PipelineConfig cfg;
  cfg.set("epsilon", "0.7");
  cfg.set("epsilons", "0.51,0.9");
  cfg.set("synth.p_cross", "0.001");
  cfg.set("seed", "9");
  EXPECT_DOUBLE_EQ(cfg.bp.epsilon, 0.7);
  EXPECT_EQ(cfg.eval.epsilons, (std::vector<double>{0.51, 0.9}));
  EXPECT_DOUBLE_EQ(cfg.synth.p_cross, 0.001);
  EXPECT_EQ(cfg.eval.seed, 9u);
  EXPECT_EQ(cfg.synth.seed, 9u);
  EXPECT_THROW(cfg.set("no_such_key", "1"), ConfigError);
  EXPECT_THROW(cfg.set("synth.no_such_key", "1"), ConfigError);
  EXPECT_THROW(cfg.set("k", "many"), ConfigError);

  gntest::TempDir dir;
  write_file(dir / "c.conf", cfg.to_kv());
  PipelineConfig back;
  back.load(dir / "c.conf");
  EXPECT_EQ(back.to_kv(), cfg.to_kv());
}

TEST(PipelineConfig, FinalizeValidates) {
  PipelineConfig cfg;
  cfg.set("epsilon", "1.5");
  EXPECT_THROW(cfg.finalize(), ConfigError);
  PipelineConfig ok;
  ok.finalize();
  EXPECT_GE(ok.threads, 1u);
  EXPECT_EQ(ok.eval.vts, std::vector<std::uint32_t>{ok.labeling.vt});
}

TEST(Cli, PrecedenceAndEffectiveConfig) {
  gntest::TempDir dir;
  write_file(dir / "t.tsv", "");
  write_file(dir / "c.conf", "# test\nepsilon = 0.7\nk = 3\n");
  ASSERT_EQ(cli("ingest --config " + q(dir / "c.conf") + " --epsilon 0.8 --set epsilon=0.9 --traffic " +
                q(dir / "t.tsv") + " --out " + q(dir / "o")),
            0);
  auto text = gntest::slurp(dir / "o" / "config.txt");
  EXPECT_NE(text.find("epsilon = 0.9\n"), std::string::npos);
  EXPECT_NE(text.find("k = 3\n"), std::string::npos);
  EXPECT_NE(text.find("subcommand = ingest"), std::string::npos);
  ASSERT_EQ(cli("ingest --config " + q(dir / "c.conf") + " --epsilon 0.8 --traffic " + q(dir / "t.tsv") +
                " --out " + q(dir / "o2")),
            0);
  EXPECT_NE(gntest::slurp(dir / "o2" / "config.txt").find("epsilon = 0.8\n"), std::string::npos);
}

TEST(Cli, EmptyTrafficIngests) {
  gntest::TempDir dir;
  write_file(dir / "t.tsv", "");
  ASSERT_EQ(cli("ingest --traffic " + q(dir / "t.tsv") + " --out " + q(dir / "o")), 0);
  EXPECT_TRUE(fs::exists(dir / "o" / "edges.tsv"));
}

TEST(Cli, ExitCodes) {
  gntest::TempDir dir;
  write_file(dir / "bad.tsv", "not a record\n");
  write_file(dir / "bad.conf", "nonsense_key = 1\n");
  EXPECT_EQ(cli("ingest --traffic " + q(dir / "missing.tsv") + " --out " + q(dir / "o")), 3);
  EXPECT_EQ(cli("ingest --traffic " + q(dir / "bad.tsv") + " --out " + q(dir / "o")), 4);
  EXPECT_EQ(cli("ingest --config " + q(dir / "bad.conf") + " --out " + q(dir / "o")), 2);
  EXPECT_EQ(cli("eval --epsilon 2 --out " + q(dir / "o")), 2);
  EXPECT_NE(cli("frobnicate"), 0);

  // Two bad devices cannot fill five folds.
  write_file(dir / "e.tsv", "10.0.0.1\tb1\n10.0.0.1\tb2\n10.0.0.2\tb1\n10.0.0.2\tb2\n10.0.0.3\tg\n");
  write_file(dir / "v.csv", "entity_id,positives,total_engines\nb1,9,60\nb2,9,60\ng,0,60\n");
  EXPECT_EQ(cli("eval --edges " + q(dir / "e.tsv") + " --verdicts " + q(dir / "v.csv") + " --out " +
                q(dir / "o")),
            5);
}

TEST(Cli, ComposedStagesMatchMonolithicEval) {
  gntest::TempDir dir;
  auto corpus = generate(small_mobile());
  write_corpus(dir / "c", corpus);
  auto c = dir / "c";
  ASSERT_EQ(cli("eval --traffic " + q(c / "traffic.tsv") + " --verdicts " + q(c / "verdicts.csv") +
                " --out " + q(dir / "mono")),
            0);
  ASSERT_EQ(cli("ingest --traffic " + q(c / "traffic.tsv") + " --out " + q(dir / "ing")), 0);
  ASSERT_EQ(cli("label --edges " + q(dir / "ing" / "edges.tsv") + " --verdicts " + q(c / "verdicts.csv") +
                " --out " + q(dir / "lab")),
            0);
  ASSERT_EQ(cli("eval --edges " + q(dir / "ing" / "edges.tsv") + " --ground-truth " +
                q(dir / "lab" / "ground_truth.csv") + " --out " + q(dir / "comp")),
            0);
  for (auto f : {"results.csv", "scores.csv", "roc.csv", "roc_folds.csv"})
    EXPECT_EQ(gntest::slurp(dir / "mono" / f), gntest::slurp(dir / "comp" / f)) << f;
  EXPECT_FALSE(gntest::slurp(dir / "mono" / "results.csv").empty());
}

TEST(Cli, SynthThenSweepThenReport) {
  gntest::TempDir dir;
  ASSERT_EQ(cli("synth --mode dns-like --seed 7 --set synth.n_bad_devices=120 --set synth.n_good_devices=120"
                " --set synth.n_bad_apps=20 --set synth.n_good_apps=40 --set synth.p_homophile=0.1"
                " --set synth.p_good=0.1 --set synth.p_cross=0.005 --out " +
                q(dir / "s")),
            0);
  auto conf = gntest::slurp(dir / "s" / "synth.conf");
  EXPECT_NE(conf.find("topology = dns-like"), std::string::npos);
  EXPECT_NE(conf.find("seed = 7"), std::string::npos);
  ASSERT_EQ(cli("sweep --traffic " + q(dir / "s" / "traffic.tsv") + " --verdicts " +
                q(dir / "s" / "verdicts.csv") + " --mode dst-ip --epsilons 0.51,0.9 --k 3 --out " +
                q(dir / "w")),
            0);
  auto auc = gntest::slurp(dir / "w" / "auc_vs_epsilon.csv");
  EXPECT_NE(auc.find("0.51,"), std::string::npos);
  EXPECT_NE(auc.find("0.9,"), std::string::npos);
  ASSERT_EQ(cli("topology --traffic " + q(dir / "s" / "traffic.tsv") + " --verdicts " +
                q(dir / "s" / "verdicts.csv") + " --mode dst-ip --sample 50 --out " + q(dir / "t")),
            0);
  EXPECT_TRUE(fs::exists(dir / "t" / "topology_summary.csv"));
  ASSERT_EQ(cli("report --in " + q(dir / "w") + "," + q(dir / "t") + " --out " + q(dir / "r")), 0);
  EXPECT_FALSE(gntest::slurp(dir / "r" / "report.txt").empty());
}

TEST(Cli, InferAndPostanalyze) {
  gntest::TempDir dir;
  auto cfg = small_mobile();
  cfg.leak_fraction = 0.2;
  cfg.infra = true;
  write_corpus(dir / "c", generate(cfg));
  auto c = dir / "c";
  ASSERT_EQ(cli("infer --traffic " + q(c / "traffic.tsv") + " --verdicts " + q(c / "verdicts.csv") +
                " --out " + q(dir / "i")),
            0);
  EXPECT_TRUE(fs::exists(dir / "i" / "beliefs.csv"));
  ASSERT_EQ(cli("eval --traffic " + q(c / "traffic.tsv") + " --verdicts " + q(c / "verdicts.csv") +
                " --out " + q(dir / "e")),
            0);
  ASSERT_EQ(cli("postanalyze --traffic " + q(c / "traffic.tsv") + " --scores " + q(dir / "e" / "scores.csv") +
                " --verdicts " + q(c / "verdicts.csv") + " --enrich-dns " + q(c / "dns.csv") +
                " --enrich-asn " + q(c / "asn.csv") + " --top-n 20 --out " + q(dir / "p")),
            0);
  for (auto f : {"leak_report.csv", "leak_summary.csv", "infra.csv", "asn_cdf.csv", "short_lived_cdf.csv"})
    EXPECT_TRUE(fs::exists(dir / "p" / f)) << f;
  EXPECT_EQ(cli("postanalyze --traffic " + q(c / "traffic.tsv") + " --scores " + q(dir / "e" / "scores.csv") +
                " --top-n 100000 --out " + q(dir / "p2")),
            5);
}
