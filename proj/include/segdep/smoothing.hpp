#ifndef SEGDEP_SMOOTHING_HPP
#define SEGDEP_SMOOTHING_HPP

#include <cstdint>
#include <vector>

#include "segdep/filtering.hpp"
#include "segdep/parallel.hpp"
#include "segdep/random.hpp"

namespace segdep {

// A quadratic form h D h' below this is treated as a point mass.
inline constexpr double kDegenerateVariance = 1e-12;
inline constexpr double kPointMassTolerance = 1e-8;

// Segment that follows a candidate changepoint at t in the backward pass.
struct NextSegment {
  int t = 0;
  ModelKind model = ModelKind::Discontinuous;
  Theta theta;
};

struct BackwardWeight {
  int s = 0;
  ModelKind m = ModelKind::Discontinuous;
  double log_w = kNegInf;
  // Position of the particle in the filter state.
  std::size_t index = 0;
};

// log of the integral over theta_t of p(theta_t | zeta) p(theta_{t+1} | theta_t)
// for a changepoint at t. h is the previous segment's design row at x_{t+1}.
double log_transition_integral(const NIGParams& zeta, ModelKind next_model, const Theta& next,
                               const DesignRow& h, const Hyperparams& hp);
double transition_integral(const NIGParams& zeta, ModelKind next_model, const Theta& next,
                           const DesignRow& h, const Hyperparams& hp);

// Unnormalized log weights of each (s, m) in the filter state at next.t.
std::vector<BackwardWeight> backward_weights(const FilterState& state, const TimeSeries& data,
                                             const Hyperparams& hp, const NextSegment& next);

// Draws theta_t given the following segment's model and parameters. For a
// continuous successor the draw satisfies h . beta_t = next.beta[0].
Theta sample_theta_given_next(const NIGParams& zeta, ModelKind next_model, const Theta& next,
                              const DesignRow& h, Rng& rng);

// One backward simulation of changepoints, models and parameters.
SegmentationDraw sample_segmentation(const FilterHistory& history, const TimeSeries& data,
                                     const Hyperparams& hp, Rng& rng);

// Redraws all parameters exactly from p(theta | changepoints, models, y).
SegmentationDraw resimulate_parameters(const SegmentationDraw& draw, const TimeSeries& data,
                                       const Hyperparams& hp, Rng& rng);

// count independent draws; draw i uses make_stream(seed, i), so results do
// not depend on the execution policy.
std::vector<SegmentationDraw> sample_segmentations(const FilterHistory& history, const TimeSeries& data,
                                                   const Hyperparams& hp, std::size_t count,
                                                   std::uint64_t seed, bool resimulate,
                                                   Execution exec = Execution::Serial);

}  // namespace segdep

#endif  // SEGDEP_SMOOTHING_HPP
