#ifndef SEGDEP_SYNTHESIS_HPP
#define SEGDEP_SYNTHESIS_HPP

#include <optional>
#include <variant>
#include <vector>

#include "segdep/random.hpp"
#include "segdep/segment_model.hpp"

namespace segdep {

struct PiecewiseQuadratic {};

// Adds a cubic basis term whose coefficient has prior standard deviation d
// (scaled by sigma like the other coefficients).
struct PiecewiseCubic {
  double d = 100.0;
};

struct SyntheticSpec {
  int n = 256;
  // Empty means n equally spaced points on [0, 1].
  std::vector<double> x_grid;
  Hyperparams hp;
  // Observation variance; unset means draw it from IG(nu0/2, gamma0/2).
  std::optional<double> sigma2 = 1.0;
  // Variance multiplier for the regression coefficients; unset uses sigma2
  // (the exact generative model).
  std::optional<double> coefficient_scale;
  std::variant<PiecewiseQuadratic, PiecewiseCubic> generator;

  std::vector<double> grid() const;
};

struct SyntheticData {
  TimeSeries data;
  SegmentationDraw truth;
  std::vector<double> z;
  // Per-segment cubic coefficients (empty for the quadratic generator).
  std::vector<double> cubic;
  double sigma2 = 1.0;
};

std::vector<double> equally_spaced_grid(int n);

SyntheticData simulate_from_prior(const SyntheticSpec& spec, Rng& rng);

// f(x; c, x_c): shifts every point left of x_c down by c * sigma.
std::vector<double> inject_jump(std::span<const double> z, double sigma, double c, double x_c,
                                std::span<const double> x_grid);

// Piecewise-linear interpolation of a sampled base curve onto a new grid.
std::vector<double> interpolate_curve(std::span<const double> base_x, std::span<const double> base_z,
                                      std::span<const double> x_grid);

// Smooth test curve used when no base curve is supplied to the power study.
double default_power_curve(double x);

}  // namespace segdep

#endif  // SEGDEP_SYNTHESIS_HPP
