#include "guiltnet/inference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "guiltnet/util.hpp"

namespace guiltnet {

namespace {

// Outgoing log-odds for a sender whose cavity log-odds is h:
//   log((eps e^h + 1 - eps) / ((1 - eps) e^h + eps)).
// Evaluated for |h| with t = e^-|h| in (0, 1] and mirrored, which makes the
// map exactly odd (label swaps negate messages bit-for-bit) and finite for
// h = +-inf.
struct MessageMap {
  double eps;
  double rest;

  explicit MessageMap(double epsilon) : eps(epsilon), rest(1.0 - epsilon) {}

  double operator()(double h) const {
    double t = std::exp(-std::fabs(h));
    double out = std::log(eps + rest * t) - std::log(rest + eps * t);
    return h < 0 ? -out : out;
  }
};

double prior_log_odds(const BeliefVector& b) {
  return std::log(b.p_bad) - std::log(b.p_good);
}

double sigmoid_bad(double r) { return 1.0 / (1.0 + std::exp(-r)); }

BeliefVector final_belief(const BeliefVector& prior, double incoming_sum) {
  // C * phi * prod m: with no net evidence the normalized product is phi.
  if (incoming_sum == 0.0) return prior;
  return BeliefVector::from_log_odds(prior_log_odds(prior) + incoming_sum);
}

}  // namespace

BeliefVector BeliefVector::from_log_odds(double r) {
  if (std::isinf(r)) return r > 0 ? BeliefVector{1.0, 0.0} : BeliefVector{0.0, 1.0};
  return {1.0 / (1.0 + std::exp(-r)), 1.0 / (1.0 + std::exp(r))};
}

double BeliefVector::log_odds() const { return prior_log_odds(*this); }

void BpConfig::validate() const {
  if (!(delta > 0.5 && delta <= 1.0)) throw ConfigError("delta must satisfy 0.5 < delta <= 1");
  if (!(epsilon >= 0.5 && epsilon < 1.0))
    throw ConfigError("epsilon must satisfy 0.5 <= epsilon < 1");
  if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  if (!(convergence_tol > 0.0)) throw ConfigError("convergence_tol must be > 0");
}

EdgePotential edge_potential(double epsilon) {
  return EdgePotential{{{epsilon, 1.0 - epsilon}, {1.0 - epsilon, epsilon}}};
}

NodeBeliefs uniform_beliefs(const BipartiteGraph& g) {
  return NodeBeliefs{std::vector<BeliefVector>(g.device_count()),
                     std::vector<BeliefVector>(g.app_count())};
}

NodeBeliefs init_beliefs(const BipartiteGraph& g, const GroundTruth& gt,
                         const std::set<DeviceId>& training, const BpConfig& cfg) {
  NodeBeliefs priors = uniform_beliefs(g);
  const BeliefVector bad = BeliefVector::from_bad(cfg.delta);
  const BeliefVector good{1.0 - cfg.delta, cfg.delta};
  for (const auto& d : training) {
    auto idx = g.find_device(d);
    if (!idx) throw std::invalid_argument("training device '" + d + "' not in graph");
    if (gt.is_bad(d))
      priors.device[*idx] = bad;
    else if (gt.is_good(d))
      priors.device[*idx] = good;
    else
      throw std::invalid_argument("training device '" + d + "' has no ground-truth label");
  }
  return priors;
}

BeliefVector bp_message(const BeliefVector& prior, std::span<const BeliefVector> incoming,
                        double epsilon) {
  double h = prior_log_odds(prior);
  for (const auto& m : incoming) h += m.log_odds();
  return BeliefVector::from_log_odds(MessageMap(epsilon)(h));
}

InferenceResult run_bp(const BipartiteGraph& g, const NodeBeliefs& priors, const BpConfig& cfg,
                       const BpObserver& observer) {
  cfg.validate();
  if (priors.device.size() != g.device_count() || priors.app.size() != g.app_count())
    throw std::invalid_argument("priors must cover every node");

  const auto start = std::chrono::steady_clock::now();
  const MessageMap msg(cfg.epsilon);
  const std::size_t nd = g.device_count(), na = g.app_count();
  auto doff = g.device_offsets();
  auto aoff = g.app_offsets();
  auto d2a = g.device_to_app_slot();
  auto a2d = g.app_to_device_slot();

  std::vector<double> dev_prior(nd), app_prior(na);
  for (std::size_t i = 0; i < nd; ++i) dev_prior[i] = prior_log_odds(priors.device[i]);
  for (std::size_t j = 0; j < na; ++j) app_prior[j] = prior_log_odds(priors.app[j]);

  MessageTable cur(g.edge_count()), next(g.edge_count());
  InferenceResult result;

  for (std::uint32_t it = 1; it <= cfg.max_iterations; ++it) {
    double max_change = 0.0;
    std::mutex mu;
    auto merge_max = [&](double local) {
      std::lock_guard lock(mu);
      max_change = std::max(max_change, local);
    };

    parallel_for(nd, cfg.threads, [&](std::size_t begin, std::size_t end) {
      double local = 0.0;
      for (std::size_t d = begin; d < end; ++d) {
        double sum = dev_prior[d];
        for (auto s = doff[d]; s < doff[d + 1]; ++s) sum += cur.to_device(d2a[s]);
        for (auto s = doff[d]; s < doff[d + 1]; ++s) {
          double out = msg(sum - cur.to_device(d2a[s]));
          local = std::max(local, std::fabs(sigmoid_bad(out) - sigmoid_bad(cur.to_app(s))));
          next.to_app(s) = out;
        }
      }
      merge_max(local);
    });
    parallel_for(na, cfg.threads, [&](std::size_t begin, std::size_t end) {
      double local = 0.0;
      for (std::size_t a = begin; a < end; ++a) {
        double sum = app_prior[a];
        for (auto t = aoff[a]; t < aoff[a + 1]; ++t) sum += cur.to_app(a2d[t]);
        for (auto t = aoff[a]; t < aoff[a + 1]; ++t) {
          double out = msg(sum - cur.to_app(a2d[t]));
          local = std::max(local, std::fabs(sigmoid_bad(out) - sigmoid_bad(cur.to_device(t))));
          next.to_device(t) = out;
        }
      }
      merge_max(local);
    });

    std::swap(cur, next);
    result.iterations_run = it;
    result.last_change = max_change;
    if (observer) observer(it, cur);
    if (max_change < cfg.convergence_tol) {
      result.converged = true;
      break;
    }
  }

  result.beliefs = uniform_beliefs(g);
  parallel_for(nd, cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t d = begin; d < end; ++d) {
      double sum = 0.0;
      for (auto s = doff[d]; s < doff[d + 1]; ++s) sum += cur.to_device(d2a[s]);
      result.beliefs.device[d] = final_belief(priors.device[d], sum);
    }
  });
  parallel_for(na, cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t a = begin; a < end; ++a) {
      double sum = 0.0;
      for (auto t = aoff[a]; t < aoff[a + 1]; ++t) sum += cur.to_app(a2d[t]);
      result.beliefs.app[a] = final_belief(priors.app[a], sum);
    }
  });

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  spdlog::debug("bp_iterations={} wall_seconds={:.6f}", result.iterations_run, result.wall_seconds);
  return result;
}

std::map<DeviceId, DeviceClass> classify(const BipartiteGraph& g, const InferenceResult& result,
                                         double threshold) {
  std::map<DeviceId, DeviceClass> out;
  for (std::uint32_t d = 0; d < g.device_count(); ++d)
    out.emplace_hint(out.end(), g.device_id(d),
                     result.beliefs.device.at(d).p_bad > threshold ? DeviceClass::Bad
                                                                   : DeviceClass::Good);
  return out;
}

LpResult run_lp(const BipartiteGraph& g, const GroundTruth& gt, const std::set<DeviceId>& training,
                std::uint32_t max_iterations, double tol, unsigned threads) {
  const std::size_t nd = g.device_count(), na = g.app_count();
  LpResult r;
  r.device.assign(nd, 0.5);
  r.app.assign(na, 0.5);
  std::vector<char> clamped(nd, 0);
  for (const auto& d : training) {
    auto idx = g.find_device(d);
    if (!idx) throw std::invalid_argument("training device '" + d + "' not in graph");
    if (gt.is_bad(d))
      r.device[*idx] = 1.0;
    else if (gt.is_good(d))
      r.device[*idx] = 0.0;
    else
      throw std::invalid_argument("training device '" + d + "' has no ground-truth label");
    clamped[*idx] = 1;
  }

  std::vector<double> next_dev = r.device, next_app = r.app;
  for (std::uint32_t it = 1; it <= max_iterations; ++it) {
    double max_change = 0.0;
    std::mutex mu;
    parallel_for(nd, threads, [&](std::size_t begin, std::size_t end) {
      double local = 0.0;
      for (std::size_t d = begin; d < end; ++d) {
        auto apps = g.apps_of(static_cast<std::uint32_t>(d));
        if (clamped[d] || apps.empty()) continue;
        double sum = 0.0;
        for (auto a : apps) sum += r.app[a];
        next_dev[d] = sum / static_cast<double>(apps.size());
        local = std::max(local, std::fabs(next_dev[d] - r.device[d]));
      }
      std::lock_guard lock(mu);
      max_change = std::max(max_change, local);
    });
    parallel_for(na, threads, [&](std::size_t begin, std::size_t end) {
      double local = 0.0;
      for (std::size_t a = begin; a < end; ++a) {
        auto devs = g.devices_of(static_cast<std::uint32_t>(a));
        if (devs.empty()) continue;
        double sum = 0.0;
        for (auto d : devs) sum += r.device[d];
        next_app[a] = sum / static_cast<double>(devs.size());
        local = std::max(local, std::fabs(next_app[a] - r.app[a]));
      }
      std::lock_guard lock(mu);
      max_change = std::max(max_change, local);
    });
    std::swap(r.device, next_dev);
    std::swap(r.app, next_app);
    // Keep the back buffers in sync for nodes that were skipped.
    next_dev = r.device;
    next_app = r.app;
    r.iterations_run = it;
    if (max_change < tol) {
      r.converged = true;
      break;
    }
  }
  return r;
}

void write_beliefs(const std::filesystem::path& path, const BipartiteGraph& g,
                   const InferenceResult& result) {
  std::string buf = "node_id,side,p_bad,iterations,converged\n";
  const std::string tail =
      "," + std::to_string(result.iterations_run) + "," + (result.converged ? "true" : "false") + "\n";
  for (std::uint32_t d = 0; d < g.device_count(); ++d)
    buf += g.device_id(d) + ",device," + format_double(result.beliefs.device[d].p_bad) + tail;
  for (std::uint32_t a = 0; a < g.app_count(); ++a)
    buf += g.app_id(a) + ",app," + format_double(result.beliefs.app[a].p_bad) + tail;
  write_file(path, buf);
}

}  // namespace guiltnet
