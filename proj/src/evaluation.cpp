#include "guiltnet/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "guiltnet/util.hpp"

namespace guiltnet {

void EvalConfig::validate() const {
  if (k < 2) throw ConfigError("k must be >= 2");
  if (epsilons.empty() || vts.empty() || nps.empty())
    throw ConfigError("sweep lists must be non-empty");
  for (double e : epsilons)
    if (!(e >= 0.5 && e < 1.0)) throw ConfigError("sweep epsilon outside [0.5, 1)");
}

std::vector<Fold> balanced_folds(const GroundTruth& gt, std::uint32_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k must be >= 2");
  if (gt.bad_devices.size() < k || gt.good_devices.size() < k)
    throw InfeasibleError("infeasible evaluation: need at least k=" + std::to_string(k) +
                      " devices per class, have " + std::to_string(gt.bad_devices.size()) +
                      " bad and " + std::to_string(gt.good_devices.size()) + " good");

  std::vector<DeviceId> bad(gt.bad_devices.begin(), gt.bad_devices.end());
  std::vector<DeviceId> good(gt.good_devices.begin(), gt.good_devices.end());
  const std::size_t n = std::min(bad.size(), good.size());
  Rng rng(seed);
  rng.shuffle(bad);
  rng.shuffle(good);

  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < n; ++i) {
    folds[i % k].testing.insert(bad[i]);
    folds[i % k].testing.insert(good[i]);
  }
  for (std::uint32_t f = 0; f < k; ++f)
    for (std::uint32_t o = 0; o < k; ++o)
      if (o != f) folds[f].training.insert(folds[o].testing.begin(), folds[o].testing.end());
  return folds;
}

namespace {

struct FoldRun {
  std::map<DeviceId, double> scores;
  std::uint32_t iterations = 0;
  bool converged = false;
};

FoldRun run_fold(const BipartiteGraph& g, const GroundTruth& gt, const Fold& fold,
                 const BpConfig& bp) {
  auto priors = init_beliefs(g, gt, fold.training, bp);
  auto result = run_bp(g, priors, bp);
  FoldRun out;
  out.iterations = result.iterations_run;
  out.converged = result.converged;
  for (const auto& d : fold.testing) {
    auto idx = g.find_device(d);
    if (!idx) throw std::invalid_argument("test device '" + d + "' not in graph");
    out.scores.emplace_hint(out.scores.end(), d, result.beliefs.device[*idx].p_bad);
  }
  return out;
}

}  // namespace

std::map<DeviceId, double> score_fold(const BipartiteGraph& g, const GroundTruth& gt,
                                      const Fold& fold, const BpConfig& bp) {
  return run_fold(g, gt, fold, bp).scores;
}

CvResult run_cv(const BipartiteGraph& g, const GroundTruth& gt, const BpConfig& bp,
                const EvalConfig& eval) {
  eval.validate();
  auto folds = balanced_folds(gt, eval.k, eval.seed);
  CvResult cv;
  for (std::uint32_t f = 0; f < folds.size(); ++f) {
    auto run = run_fold(g, gt, folds[f], bp);
    for (auto& [d, s] : run.scores) {
      cv.scores[d] = s;
      cv.fold_of[d] = f;
    }
    cv.iterations.push_back(run.iterations);
    cv.converged.push_back(run.converged);
    if (!run.converged)
      spdlog::warn("fold {}: BP hit the iteration cap ({}) without converging", f, run.iterations);
  }
  return cv;
}

RocCurve roc(const std::map<DeviceId, double>& scores, const GroundTruth& gt,
             const std::optional<std::vector<double>>& thresholds) {
  std::vector<double> bad, good;
  for (const auto& [d, s] : scores) {
    if (gt.is_bad(d))
      bad.push_back(s);
    else if (gt.is_good(d))
      good.push_back(s);
    else
      throw std::invalid_argument("scored device '" + d + "' has no ground-truth label");
  }
  if (bad.empty() || good.empty())
    throw std::invalid_argument("ROC needs at least one bad and one good device");
  std::sort(bad.begin(), bad.end());
  std::sort(good.begin(), good.end());

  std::vector<double> grid;
  if (thresholds) {
    grid = *thresholds;
  } else {
    grid = bad;
    grid.insert(grid.end(), good.begin(), good.end());
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto above = [](const std::vector<double>& v, double t) {
    return static_cast<double>(v.end() - std::upper_bound(v.begin(), v.end(), t));
  };
  RocCurve curve;
  for (double t : grid)
    curve.points.push_back({t, above(good, t) / static_cast<double>(good.size()),
                            above(bad, t) / static_cast<double>(bad.size())});

  std::vector<std::pair<double, double>> poly{{0.0, 0.0}, {1.0, 1.0}};
  for (const auto& p : curve.points) poly.emplace_back(p.fpr, p.tpr);
  std::sort(poly.begin(), poly.end());
  poly.erase(std::unique(poly.begin(), poly.end()), poly.end());
  double area = 0.0;
  for (std::size_t i = 1; i < poly.size(); ++i)
    area += (poly[i].first - poly[i - 1].first) * (poly[i].second + poly[i - 1].second) / 2.0;
  curve.auc = area;
  return curve;
}

std::map<double, double> epsilon_sweep(const BipartiteGraph& g, const GroundTruth& gt,
                                       const BpConfig& bp, const EvalConfig& eval) {
  eval.validate();
  std::map<double, double> out;
  for (double eps : eval.epsilons) {
    BpConfig cfg = bp;
    cfg.epsilon = eps;
    auto cv = run_cv(g, gt, cfg, eval);
    out[eps] = roc(cv.scores, gt).auc;
  }
  return out;
}

std::string config_hash(const LabelingConfig& labeling, const BpConfig& bp, const EvalConfig& eval,
                        double epsilon) {
  std::ostringstream os;
  os << "vt=" << labeling.vt << ";np=" << labeling.n_p << ";nab=" << labeling.n_ab
     << ";mode=" << to_string(labeling.mode) << ";delta=" << format_double(bp.delta)
     << ";epsilon=" << format_double(epsilon) << ";max_iter=" << bp.max_iterations
     << ";tol=" << format_double(bp.convergence_tol) << ";k=" << eval.k << ";seed=" << eval.seed;
  return hex64(fnv1a64(os.str()));
}

std::vector<SweepRow> cv_rows(const CvResult& cv, const GroundTruth& gt,
                              const LabelingConfig& labeling, const BpConfig& bp,
                              const EvalConfig& eval) {
  std::vector<SweepRow> rows;
  SweepRow base;
  base.config_hash = config_hash(labeling, bp, eval, bp.epsilon);
  base.epsilon = bp.epsilon;
  base.vt = labeling.vt;
  base.n_p = labeling.n_p;
  base.mode = labeling.mode;

  SweepRow pooled = base;
  pooled.auc = roc(cv.scores, gt).auc;
  rows.push_back(pooled);
  for (std::uint32_t f = 0; f < cv.iterations.size(); ++f) {
    std::map<DeviceId, double> fold_scores;
    for (const auto& [d, s] : cv.scores)
      if (cv.fold_of.at(d) == f) fold_scores.emplace(d, s);
    SweepRow row = base;
    row.fold = f;
    row.auc = roc(fold_scores, gt).auc;
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepRow> parameter_sweep(const BipartiteGraph& raw, const VerdictProvider& verdicts,
                                      const LabelingConfig& labeling, const BpConfig& bp,
                                      const EvalConfig& eval) {
  eval.validate();
  std::vector<SweepRow> rows;
  for (auto vt : eval.vts)
    for (auto np : eval.nps) {
      LabelingConfig lc = labeling;
      lc.vt = vt;
      lc.n_p = np;
      BipartiteGraph g;
      GroundTruth gt = build_ground_truth(raw, verdicts, lc, &g);
      for (double eps : eval.epsilons) {
        BpConfig cfg = bp;
        cfg.epsilon = eps;
        CvResult cv;
        try {
          cv = run_cv(g, gt, cfg, eval);
        } catch (const ConfigError& e) {
          spdlog::warn("skipping vt={} np={} epsilon={}: {}", vt, np, eps, e.what());
          continue;
        }
        auto part = cv_rows(cv, gt, lc, cfg, eval);
        rows.insert(rows.end(), part.begin(), part.end());
      }
    }
  return rows;
}

void write_results(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::string buf = "config_hash,epsilon,vt,n_p,mode,fold,auc\n";
  for (const auto& r : rows)
    buf += r.config_hash + "," + format_double(r.epsilon) + "," + std::to_string(r.vt) + "," +
           std::to_string(r.n_p) + "," + std::string(to_string(r.mode)) + "," +
           (r.fold ? std::to_string(*r.fold) : std::string("all")) + "," + format_double(r.auc) +
           "\n";
  write_file(path, buf);
}

void write_roc(const std::filesystem::path& path, const RocCurve& curve) {
  std::string buf = "threshold,fpr,tpr\n";
  for (const auto& p : curve.points)
    buf += format_double(p.threshold) + "," + format_double(p.fpr) + "," + format_double(p.tpr) +
           "\n";
  write_file(path, buf);
}

void write_scores(const std::filesystem::path& path, const CvResult& cv, const GroundTruth& gt) {
  std::string buf = "device_id,label,fold,p_bad\n";
  for (const auto& [d, s] : cv.scores)
    buf += d + "," + (gt.is_bad(d) ? "bad" : "good") + "," + std::to_string(cv.fold_of.at(d)) +
           "," + format_double(s) + "\n";
  write_file(path, buf);
}

std::map<DeviceId, double> read_scores(const std::filesystem::path& path) {
  std::map<DeviceId, double> out;
  auto lines = read_lines(path);
  std::size_t id_col = 0, score_col = 0;
  bool header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto cols = split(line, ',');
    if (!header) {
      // Accept any CSV with device_id / node_id and p_bad columns.
      bool found_id = false, found_score = false;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c] == "device_id" || cols[c] == "node_id") id_col = c, found_id = true;
        if (cols[c] == "p_bad") score_col = c, found_score = true;
      }
      if (!found_id || !found_score) throw ParseError("score file needs device_id and p_bad columns", i + 1);
      header = true;
      continue;
    }
    if (cols.size() <= std::max(id_col, score_col)) throw ParseError("short row", i + 1);
    // Belief dumps also list apps; keep devices only.
    if (cols.size() > 1 && cols[1] == "app") continue;
    try {
      out[std::string(cols[id_col])] = parse_double(cols[score_col]);
    } catch (const ParseError& e) {
      throw ParseError(e.detail(), i + 1);
    }
  }
  return out;
}

std::string format_sweep_table(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(10) << "mode" << std::right << std::setw(6) << "vt" << std::setw(8)
     << "n_p" << std::setw(10) << "epsilon" << std::setw(10) << "auc" << "\n";
  for (const auto& r : rows) {
    if (r.fold) continue;
    os << std::left << std::setw(10) << to_string(r.mode) << std::right << std::setw(6) << r.vt
       << std::setw(8) << r.n_p << std::setw(10) << std::fixed << std::setprecision(3) << r.epsilon
       << std::setw(10) << std::setprecision(4) << r.auc << "\n";
  }
  return os.str();
}

}  // namespace guiltnet
