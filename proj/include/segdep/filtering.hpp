#ifndef SEGDEP_FILTERING_HPP
#define SEGDEP_FILTERING_HPP

#include <span>
#include <vector>

#include "segdep/dlm.hpp"
#include "segdep/parallel.hpp"
#include "segdep/resampling.hpp"
#include "segdep/segment_model.hpp"

namespace segdep {

// Weighted particle approximation to p(C_t, M_t, theta_t | y_{1:t}).
// Particles are sorted by (s, m) and carry normalized log weights.
struct FilterState {
  int t = 0;
  std::vector<Particle> particles;
  // log of the normalizer applied at this step, i.e. the one-step log
  // predictive density of y_t.
  double log_normalizer = 0.0;
};

struct FilterHistory {
  // states[t - 1] holds the approximation at time t.
  std::vector<FilterState> states;
  double log_evidence = 0.0;

  const FilterState& at(int t) const { return states.at(static_cast<std::size_t>(t - 1)); }
  int n() const { return static_cast<int>(states.size()); }
  std::size_t total_particles() const;
};

struct SigmaCollapse {
  double nu = 0.0;
  double gamma = 0.0;
};

struct BetaCollapse {
  double eta = 0.0;
  double tau = 0.0;
};

// Above this nu the collapsed precision is treated as a point mass.
inline constexpr double kMaxCollapsedNu = 1e8;

// Moment match of the mixture of sigma^{-2} laws onto one Gamma law, using
// weights[i] as mixture weights (normalized here). Improper components are
// skipped. A mixture whose components share (nu, gamma) collapses to them.
SigmaCollapse collapse_sigma(std::span<const Particle> particles, std::span<const double> weights);
// Same, with each particle's own weight.
SigmaCollapse collapse_sigma(std::span<const Particle> particles);

// Mean and variance of the extrapolated intercept beta_{t+1,0} used by the
// continuous birth prior. weights as for collapse_sigma.
BetaCollapse collapse_beta0(std::span<const Particle> particles, std::span<const double> weights,
                            const TimeSeries& data, int t);
BetaCollapse collapse_beta0(std::span<const Particle> particles, const TimeSeries& data, int t);

FilterState filter_init(const TimeSeries& data, const Hyperparams& hp);

// Advances a normalized state at time t to time t + 1.
FilterState filter_step(const FilterState& state, const TimeSeries& data, const Hyperparams& hp,
                        Execution exec = Execution::Serial);

// Full forward pass; resamples after every step with cfg.
FilterHistory run_filter(const TimeSeries& data, const Hyperparams& hp, const ResampleConfig& cfg,
                         Execution exec = Execution::Serial);

}  // namespace segdep

#endif  // SEGDEP_FILTERING_HPP
