#pragma once

// Balanced k-fold cross-validation of BP device scores, ROC/AUC, and
// parameter sweeps over epsilon, vt and N_p.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "guiltnet/graph.hpp"
#include "guiltnet/inference.hpp"
#include "guiltnet/labeling.hpp"

namespace guiltnet {

struct EvalConfig {
  std::uint32_t k = 5;
  std::uint64_t seed = 1;
  std::vector<double> epsilons{0.51};
  std::vector<std::uint32_t> vts{5};
  std::vector<std::uint32_t> nps{1000};
  EntityMode mode = EntityMode::AppString;

  void validate() const;
};

struct Fold {
  std::set<DeviceId> training;
  std::set<DeviceId> testing;
};

/// Samples min(|D_B|, |D_G|) devices from each class with the seeded
/// generator, shuffles each class and deals it round-robin into k folds. Fold
/// f tests fold f of both classes and trains on the rest. Throws InfeasibleError
/// if a class has fewer than k devices, ConfigError if k < 2.
std::vector<Fold> balanced_folds(const GroundTruth& gt, std::uint32_t k, std::uint64_t seed);

/// BP scores (p_bad) of one fold's test devices. Priors come from the
/// training set only.
std::map<DeviceId, double> score_fold(const BipartiteGraph& g, const GroundTruth& gt,
                                      const Fold& fold, const BpConfig& bp);

struct CvResult {
  std::map<DeviceId, double> scores;           // each sampled device, from its test fold
  std::map<DeviceId, std::uint32_t> fold_of;   // test fold index per device
  std::vector<std::uint32_t> iterations;       // BP iterations per fold
  std::vector<bool> converged;
};

CvResult run_cv(const BipartiteGraph& g, const GroundTruth& gt, const BpConfig& bp,
                const EvalConfig& eval);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;  // ascending threshold
  double auc = 0.0;
};

/// A device is classified bad when its score is strictly above the
/// threshold. TPR = bad devices classified bad / bad devices scored; FPR =
/// good devices classified bad / good devices scored. Without explicit
/// thresholds the grid is the sorted unique scores (the exact empirical
/// curve). AUC is the trapezoidal area over the distinct (fpr, tpr) points
/// together with (0,0) and (1,1). Throws std::invalid_argument if a scored
/// device is unlabeled or either class is empty.
RocCurve roc(const std::map<DeviceId, double>& scores, const GroundTruth& gt,
             const std::optional<std::vector<double>>& thresholds = std::nullopt);

/// One full CV per epsilon with everything else fixed.
std::map<double, double> epsilon_sweep(const BipartiteGraph& g, const GroundTruth& gt,
                                       const BpConfig& bp, const EvalConfig& eval);

struct SweepRow {
  std::string config_hash;
  double epsilon = 0.0;
  std::uint32_t vt = 0;
  std::uint32_t n_p = 0;
  EntityMode mode = EntityMode::AppString;
  std::optional<std::uint32_t> fold;  // nullopt = pooled across folds
  double auc = 0.0;
};

/// Full grid over eval.vts x eval.nps x eval.epsilons. Each (vt, N_p) pair
/// relabels the raw graph; rows are emitted for the pooled curve and every
/// fold. Points whose ground truth cannot be folded are skipped with a
/// warning.
std::vector<SweepRow> parameter_sweep(const BipartiteGraph& raw, const VerdictProvider& verdicts,
                                      const LabelingConfig& labeling, const BpConfig& bp,
                                      const EvalConfig& eval);

/// Stable digest of every parameter that affects a result row.
std::string config_hash(const LabelingConfig& labeling, const BpConfig& bp, const EvalConfig& eval,
                        double epsilon);

/// Pooled and per-fold rows for one finished CV.
std::vector<SweepRow> cv_rows(const CvResult& cv, const GroundTruth& gt,
                              const LabelingConfig& labeling, const BpConfig& bp,
                              const EvalConfig& eval);

// CSV config_hash,epsilon,vt,n_p,mode,fold,auc ; fold is "all" for pooled rows.
void write_results(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
// CSV threshold,fpr,tpr
void write_roc(const std::filesystem::path& path, const RocCurve& curve);
// CSV device_id,label,fold,p_bad
void write_scores(const std::filesystem::path& path, const CvResult& cv, const GroundTruth& gt);
std::map<DeviceId, double> read_scores(const std::filesystem::path& path);

/// Pooled rows as an aligned text table.
std::string format_sweep_table(const std::vector<SweepRow>& rows);

}  // namespace guiltnet
