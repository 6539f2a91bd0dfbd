#ifndef SEGDEP_EVALUATION_HPP
#define SEGDEP_EVALUATION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "segdep/filtering.hpp"
#include "segdep/parallel.hpp"
#include "segdep/smoothing.hpp"
#include "segdep/synthesis.hpp"

namespace segdep {

struct PosteriorQuantiles {
  std::vector<double> q_z;
  double q_sigma = 0.0;
};

// Fraction of draws at or below the truth (ties count as below).
PosteriorQuantiles posterior_quantiles(std::span<const SegmentationDraw> draws, const TimeSeries& data,
                                       std::span<const double> truth_z, double truth_sigma2);

double mse(std::span<const double> est_z, std::span<const double> truth_z);

// Pointwise posterior mean of the fitted curve.
std::vector<double> posterior_mean_curve(std::span<const SegmentationDraw> draws, const TimeSeries& data);

struct CredibleBand {
  std::vector<double> lo;
  std::vector<double> hi;
};

// Equal-tailed pointwise band; quantiles interpolate between order statistics.
CredibleBand credible_band(std::span<const SegmentationDraw> draws, const TimeSeries& data, double level);

// Fraction of points whose truth lies inside the equal-tailed band.
double coverage(std::span<const SegmentationDraw> draws, const TimeSeries& data,
                std::span<const double> truth_z, double level);

// x position of changepoint tau: midway between x_tau and x_{tau+1}.
double changepoint_x(const TimeSeries& data, int tau);

// Fraction of draws with at least one discontinuous changepoint whose x
// position lies in [lo, hi].
double discontinuity_probability(std::span<const SegmentationDraw> draws, double lo, double hi,
                                 const TimeSeries& data);

double mean_changepoint_count(std::span<const SegmentationDraw> draws);

// Kolmogorov-Smirnov distance between the sample and Uniform[0, 1].
double ks_uniform(std::vector<double> values);

struct FitOptions {
  Hyperparams hp;
  ResampleConfig resample;
  std::size_t n_draws = 1000;
  bool resimulate = true;
  int eb_iterations = 0;
  std::size_t eb_draws = 1000;
  std::uint64_t seed = 0;
};

struct FitResult {
  // Hyperparameters of the final analysis (after empirical Bayes, if any).
  Hyperparams hp;
  double log_evidence = 0.0;
  std::size_t total_particles = 0;
  std::vector<SegmentationDraw> draws;
};

FitResult fit(const TimeSeries& data, const FitOptions& opts, Execution exec = Execution::Serial);

// Iterated fit-then-reestimate of (p, D0). p becomes the posterior mean
// changepoint count over n; delta_j becomes the mean of beta_j^2 / sigma^2
// over discontinuous segments in the draws. nu0, gamma0 and model_prior are
// kept. Requires a geometric segment-length prior.
Hyperparams empirical_bayes(const TimeSeries& data, const Hyperparams& hp0, int iterations,
                            std::size_t draws_per_iter, std::uint64_t seed,
                            const ResampleConfig& resample = {}, Execution exec = Execution::Serial);

struct ReplicateResult {
  double q_sigma = 0.0;
  std::vector<double> q_z;
  double mse = 0.0;
  double coverage = 0.0;
  double mean_changepoints = 0.0;
  int true_changepoints = 0;
};

struct StudyConfig {
  SyntheticSpec data;
  FitOptions analysis;
  int replicates = 100;
  double coverage_level = 0.9;
  std::uint64_t seed = 0;
};

// Simulates each replicate with make_stream(seed, r) and analyses it.
// Replicates run in parallel under Execution::Parallel.
std::vector<ReplicateResult> run_study(const StudyConfig& cfg, Execution exec = Execution::Serial);

struct PowerConfig {
  std::vector<double> base_x;
  std::vector<double> base_z;
  double sigma = 0.3;
  double c = 3.0;
  double x_c = 0.3;
  int n = 200;
  int replicates = 20;
  double window_halfwidth = 0.01;
  FitOptions analysis;
  std::uint64_t seed = 0;
};

struct PowerResult {
  std::vector<double> probabilities;
  double mean = 0.0;
  double std_error = 0.0;
};

PowerResult run_power(const PowerConfig& cfg, Execution exec = Execution::Serial);

}  // namespace segdep

#endif  // SEGDEP_EVALUATION_HPP
