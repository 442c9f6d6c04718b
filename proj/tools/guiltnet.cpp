// guiltnet: command-line front end for the device-classification pipeline.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "guiltnet/pipeline.hpp"
#include "guiltnet/util.hpp"

using namespace guiltnet;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("guiltnet");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("GG_LOG");
  std::string level = env ? env : "info";
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else throw ConfigError("GG_LOG must be error, info or debug");
}

int fail(const char* kind, const std::string& what, int code) {
  std::fprintf(stderr, "guiltnet: %s: %s\n", kind, what.c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guilt-by-association classification of devices from traffic logs"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "key = value config file (flags take precedence)");

  // flag name -> config key; values are applied in this order after --config.
  std::vector<std::pair<std::string, std::string>> flag_keys = {
      {"--traffic", "traffic"},       {"--verdicts", "verdicts"},
      {"--enrich-dns", "enrich_dns"}, {"--enrich-asn", "enrich_asn"},
      {"--catalog", "catalog"},       {"--edges", "edges"},
      {"--ground-truth", "ground_truth"}, {"--scores", "scores"},
      {"--out", "out"},               {"--in", "inputs"},
      {"--mode", "mode"},             {"--vt", "vt"},
      {"--np", "np"},                 {"--nab", "nab"},
      {"--delta", "delta"},           {"--epsilon", "epsilon"},
      {"--max-iterations", "max_iterations"}, {"--tol", "tol"},
      {"--k", "k"},                   {"--seed", "seed"},
      {"--epsilons", "epsilons"},     {"--vts", "vts"},
      {"--nps", "nps"},               {"--threads", "threads"},
      {"--threshold", "threshold"},   {"--top-n", "top_n"},
      {"--sample", "sample"},         {"--window-days", "window_days"},
      {"--synth-config", "synth_config"}};
  std::vector<std::string> values(flag_keys.size());
  std::vector<CLI::Option*> options;
  for (std::size_t i = 0; i < flag_keys.size(); ++i)
    options.push_back(app.add_option(flag_keys[i].first, values[i]));
  app.get_option("--mode")->description("entity mode: app-string | dst-ip (synth: mobile-like | dns-like)");
  std::vector<std::string> extra;
  app.add_option("--set", extra, "extra key=value overrides (e.g. synth.p_cross=0.01)");

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"ingest", "traffic file -> device-app edge list"},
      {"label", "edge list + verdicts -> ground truth"},
      {"infer", "belief propagation with all labeled devices as priors"},
      {"eval", "balanced k-fold cross-validation, ROC and AUC"},
      {"sweep", "AUC over epsilon, vt and N_p grids"},
      {"topology", "path lengths and centrality of the labeled clusters"},
      {"postanalyze", "privacy leaks and infrastructure of extreme-scored devices"},
      {"synth", "synthetic corpus with planted classes"},
      {"report", "aggregate summary CSVs into one report"},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    setup_logging();
    PipelineConfig cfg;
    if (!config_path.empty()) cfg.load(config_path);
    for (std::size_t i = 0; i < flag_keys.size(); ++i) {
      if (!options[i]->count()) continue;
      std::string key = flag_keys[i].second;
      if (sub == "synth" && key == "mode") key = "synth.topology";
      cfg.set(key, values[i]);
    }
    for (const auto& kv : extra) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
      cfg.set(trim(std::string_view(kv).substr(0, eq)), std::string_view(kv).substr(eq + 1));
    }
    cfg.finalize();

    if (sub == "ingest") {
      auto s = run_ingest(cfg);
      std::printf("records=%zu devices=%zu apps=%zu edges=%zu\n", s.records, s.devices, s.apps, s.edges);
    } else if (sub == "label") {
      auto gt = run_label(cfg);
      std::printf("bad_devices=%zu good_devices=%zu\n", gt.bad_devices.size(), gt.good_devices.size());
    } else if (sub == "infer") {
      auto r = run_infer(cfg);
      std::printf("bp_iterations=%u wall_seconds=%.6f\n", r.iterations_run, r.wall_seconds);
      if (!r.converged) spdlog::warn("BP did not converge (last change {})", r.last_change);
    } else if (sub == "eval") {
      auto rows = run_eval(cfg);
      std::printf("auc=%s\n", format_double(rows.front().auc).c_str());
    } else if (sub == "sweep") {
      std::fputs(format_sweep_table(run_sweep(cfg)).c_str(), stdout);
    } else if (sub == "topology") {
      run_topology(cfg);
    } else if (sub == "postanalyze") {
      run_postanalyze(cfg);
    } else if (sub == "synth") {
      auto c = run_synth(cfg);
      std::printf("devices=%zu apps=%zu edges=%zu records=%zu\n", c.graph.device_count(),
                  c.graph.app_count(), c.graph.edge_count(), c.traffic.size());
    } else if (sub == "report") {
      std::fputs(run_report(cfg).c_str(), stdout);
    }
    spdlog::info("outputs written to {}", cfg.out.string());
  } catch (const InfeasibleError& e) {
    return fail("infeasible evaluation", e.what(), 5);
  } catch (const ConfigError& e) {
    return fail("bad config", e.what(), 2);
  } catch (const IoError& e) {
    return fail("missing file", e.what(), 3);
  } catch (const ParseError& e) {
    return fail("parse failure", e.what(), 4);
  } catch (const std::exception& e) {
    return fail("error", e.what(), 1);
  }
  return 0;
}
