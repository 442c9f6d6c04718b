#pragma once

// Sum-product belief propagation over the device-app graph, plus a
// label-propagation baseline.
//
// Each node is a binary variable over {bad, good}. Priors come from ground
// truth: known-bad (delta, 1-delta), known-good (1-delta, delta), everything
// else (0.5, 0.5). The edge potential is epsilon on the diagonal and
// 1-epsilon off it. Messages are normalized two-state vectors and are kept
// internally as log-odds log(m(bad)/m(good)), so products over large
// neighborhoods become sums and never underflow.

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "guiltnet/graph.hpp"
#include "guiltnet/labeling.hpp"

namespace guiltnet {

struct BeliefVector {
  double p_bad = 0.5;
  double p_good = 0.5;

  static BeliefVector from_bad(double p) { return {p, 1.0 - p}; }
  // Normalized pair for log(p_bad / p_good) = r.
  static BeliefVector from_log_odds(double r);
  double log_odds() const;
  bool operator==(const BeliefVector&) const = default;
};

struct BpConfig {
  double delta = 0.99;
  double epsilon = 0.51;
  std::uint32_t max_iterations = 100;
  double convergence_tol = 1e-6;
  unsigned threads = 1;

  // 0.5 < delta <= 1, 0.5 <= epsilon < 1, max_iterations >= 1, tol > 0.
  void validate() const;
};

// psi(x_i, x_j); index 0 = bad, 1 = good.
struct EdgePotential {
  double psi[2][2];
};
EdgePotential edge_potential(double epsilon);

/// Per-node vectors indexed by device and app index.
struct NodeBeliefs {
  std::vector<BeliefVector> device;
  std::vector<BeliefVector> app;

  const BeliefVector& at(NodeRef n) const {
    return n.side == Side::Device ? device.at(n.index) : app.at(n.index);
  }
  BeliefVector& at(NodeRef n) { return n.side == Side::Device ? device.at(n.index) : app.at(n.index); }
};

NodeBeliefs uniform_beliefs(const BipartiteGraph& g);

/// Priors for one BP run. Training devices take their ground-truth label
/// with strength delta; all other devices and every app are uniform.
/// Throws std::invalid_argument if a training device is missing from g or
/// carries no label in gt.
NodeBeliefs init_beliefs(const BipartiteGraph& g, const GroundTruth& gt,
                         const std::set<DeviceId>& training, const BpConfig& cfg);

/// One message m_ij(x_j) = sum_{x_i} phi_i(x_i) psi(x_i, x_j) prod_k m_ki(x_i),
/// normalized. `incoming` must already exclude the message from j.
BeliefVector bp_message(const BeliefVector& prior, std::span<const BeliefVector> incoming,
                        double epsilon);

/// Directed message storage: one log-odds value per edge per direction.
class MessageTable {
 public:
  MessageTable() = default;
  explicit MessageTable(std::size_t edges) : to_app_(edges, 0.0), to_device_(edges, 0.0) {}

  // Device-side CSR slot s: message from the device to its app.
  double& to_app(std::size_t s) { return to_app_[s]; }
  double to_app(std::size_t s) const { return to_app_[s]; }
  // App-side CSR slot t: message from the app to its device.
  double& to_device(std::size_t t) { return to_device_[t]; }
  double to_device(std::size_t t) const { return to_device_[t]; }

  BeliefVector device_to_app(std::size_t s) const { return BeliefVector::from_log_odds(to_app_[s]); }
  BeliefVector app_to_device(std::size_t t) const {
    return BeliefVector::from_log_odds(to_device_[t]);
  }
  std::size_t size() const { return to_app_.size(); }

 private:
  std::vector<double> to_app_;
  std::vector<double> to_device_;
};

struct InferenceResult {
  NodeBeliefs beliefs;
  std::uint32_t iterations_run = 0;
  bool converged = false;
  // Largest message change in the last iteration, in probability units.
  double last_change = 0.0;
  double wall_seconds = 0.0;
};

using BpObserver = std::function<void(std::uint32_t iteration, const MessageTable&)>;

/// Synchronous (flooding) BP: iteration t computes every message from the
/// table of iteration t-1. Stops when the largest absolute change of any
/// message's p_bad falls below convergence_tol, or after max_iterations.
/// Output is identical for every thread count.
InferenceResult run_bp(const BipartiteGraph& g, const NodeBeliefs& priors, const BpConfig& cfg,
                       const BpObserver& observer = {});

enum class DeviceClass { Bad, Good };

/// p_bad > threshold -> Bad, otherwise Good. Devices only.
std::map<DeviceId, DeviceClass> classify(const BipartiteGraph& g, const InferenceResult& result,
                                         double threshold);

struct LpResult {
  std::vector<double> device;
  std::vector<double> app;
  std::uint32_t iterations_run = 0;
  bool converged = false;

  double at(NodeRef n) const { return n.side == Side::Device ? device.at(n.index) : app.at(n.index); }
};

/// Label propagation: training devices are clamped to 1 (bad) / 0 (good);
/// every other node takes the mean of its neighbors' scores from the
/// previous sweep. Unlabeled nodes start at 0.5; isolated ones stay there.
LpResult run_lp(const BipartiteGraph& g, const GroundTruth& gt, const std::set<DeviceId>& training,
                std::uint32_t max_iterations = 10000, double tol = 1e-9, unsigned threads = 1);

// CSV node_id,side,p_bad,iterations,converged
void write_beliefs(const std::filesystem::path& path, const BipartiteGraph& g,
                   const InferenceResult& result);

}  // namespace guiltnet
