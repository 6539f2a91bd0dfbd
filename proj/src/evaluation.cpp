#include "segdep/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace segdep {

namespace {

enum SeedTag : std::uint64_t {
  kFilterSeed = 1,
  kDrawSeed = 2,
  kEmpiricalBayesSeed = 3,
  kAnalysisSeed = 4,
  kNoiseSeed = 5,
};

double sorted_quantile(const std::vector<double>& sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

// curves[d][t] for every draw.
std::vector<std::vector<double>> all_curves(std::span<const SegmentationDraw> draws, const TimeSeries& data) {
  std::vector<std::vector<double>> curves;
  curves.reserve(draws.size());
  for (const auto& d : draws) curves.push_back(fitted_curve(d, data));
  return curves;
}

}  // namespace

PosteriorQuantiles posterior_quantiles(std::span<const SegmentationDraw> draws, const TimeSeries& data,
                                       std::span<const double> truth_z, double truth_sigma2) {
  if (draws.empty()) throw InvalidArgument("posterior_quantiles: no draws");
  if (truth_z.size() != data.size()) throw InvalidArgument("posterior_quantiles: truth length differs from n");
  PosteriorQuantiles q;
  q.q_z.assign(data.size(), 0.0);
  std::size_t below_sigma = 0;
  for (const auto& d : draws) {
    const auto curve = fitted_curve(d, data);
    for (std::size_t t = 0; t < curve.size(); ++t)
      if (curve[t] <= truth_z[t]) q.q_z[t] += 1.0;
    if (d.sigma2 <= truth_sigma2) ++below_sigma;
  }
  const auto count = static_cast<double>(draws.size());
  for (double& v : q.q_z) v /= count;
  q.q_sigma = static_cast<double>(below_sigma) / count;
  return q;
}

double mse(std::span<const double> est_z, std::span<const double> truth_z) {
  if (est_z.size() != truth_z.size()) throw InvalidArgument("mse: length mismatch");
  if (est_z.empty()) throw InvalidArgument("mse: empty input");
  double total = 0.0;
  for (std::size_t i = 0; i < est_z.size(); ++i) {
    const double r = est_z[i] - truth_z[i];
    total += r * r;
  }
  return total / static_cast<double>(est_z.size());
}

std::vector<double> posterior_mean_curve(std::span<const SegmentationDraw> draws, const TimeSeries& data) {
  if (draws.empty()) throw InvalidArgument("posterior_mean_curve: no draws");
  std::vector<double> mean(data.size(), 0.0);
  for (const auto& d : draws) {
    const auto curve = fitted_curve(d, data);
    for (std::size_t t = 0; t < mean.size(); ++t) mean[t] += curve[t];
  }
  for (double& v : mean) v /= static_cast<double>(draws.size());
  return mean;
}

CredibleBand credible_band(std::span<const SegmentationDraw> draws, const TimeSeries& data, double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("credible level must lie in (0, 1)");
  if (draws.empty()) throw InvalidArgument("credible_band: no draws");
  const auto curves = all_curves(draws, data);
  CredibleBand band{std::vector<double>(data.size()), std::vector<double>(data.size())};
  std::vector<double> column(draws.size());
  const double tail = 0.5 * (1.0 - level);
  for (std::size_t t = 0; t < data.size(); ++t) {
    for (std::size_t d = 0; d < curves.size(); ++d) column[d] = curves[d][t];
    std::sort(column.begin(), column.end());
    band.lo[t] = sorted_quantile(column, tail);
    band.hi[t] = sorted_quantile(column, 1.0 - tail);
  }
  return band;
}

double coverage(std::span<const SegmentationDraw> draws, const TimeSeries& data,
                std::span<const double> truth_z, double level) {
  if (truth_z.size() != data.size()) throw InvalidArgument("coverage: truth length differs from n");
  const CredibleBand band = credible_band(draws, data, level);
  std::size_t inside = 0;
  for (std::size_t t = 0; t < truth_z.size(); ++t)
    if (band.lo[t] <= truth_z[t] && truth_z[t] <= band.hi[t]) ++inside;
  return static_cast<double>(inside) / static_cast<double>(truth_z.size());
}

double changepoint_x(const TimeSeries& data, int tau) {
  return 0.5 * (data.x_at(tau) + data.x_at(tau + 1));
}

double discontinuity_probability(std::span<const SegmentationDraw> draws, double lo, double hi,
                                 const TimeSeries& data) {
  if (!(lo < hi)) throw InvalidArgument("discontinuity window needs lo < hi");
  if (draws.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& d : draws) {
    for (std::size_t k = 0; k < d.changepoints.size(); ++k) {
      if (d.models[k + 1] != ModelKind::Discontinuous) continue;
      const double x = changepoint_x(data, d.changepoints[k]);
      if (lo <= x && x <= hi) {
        ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(draws.size());
}

double mean_changepoint_count(std::span<const SegmentationDraw> draws) {
  if (draws.empty()) return 0.0;
  double total = 0.0;
  for (const auto& d : draws) total += static_cast<double>(d.changepoints.size());
  return total / static_cast<double>(draws.size());
}

double ks_uniform(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("ks_uniform: empty sample");
  std::sort(values.begin(), values.end());
  const auto N = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double u = std::clamp(values[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / N - u, u - static_cast<double>(i) / N});
  }
  return d;
}

FitResult fit(const TimeSeries& data, const FitOptions& opts, Execution exec) {
  FitResult result;
  result.hp = opts.hp;
  if (opts.eb_iterations > 0)
    result.hp = empirical_bayes(data, opts.hp, opts.eb_iterations, opts.eb_draws,
                                derive_seed(opts.seed, kEmpiricalBayesSeed), opts.resample, exec);
  ResampleConfig rc = opts.resample;
  rc.rng_seed = derive_seed(opts.seed, kFilterSeed);
  const FilterHistory history = run_filter(data, result.hp, rc, exec);
  result.log_evidence = history.log_evidence;
  result.total_particles = history.total_particles();
  result.draws = sample_segmentations(history, data, result.hp, opts.n_draws,
                                      derive_seed(opts.seed, kDrawSeed), opts.resimulate, exec);
  return result;
}

Hyperparams empirical_bayes(const TimeSeries& data, const Hyperparams& hp0, int iterations,
                            std::size_t draws_per_iter, std::uint64_t seed, const ResampleConfig& resample,
                            Execution exec) {
  if (iterations < 1) throw InvalidArgument("empirical_bayes: iterations must be >= 1");
  if (draws_per_iter == 0) throw InvalidArgument("empirical_bayes: draws_per_iter must be >= 1");
  if (hp0.segment_length.kind() != SegmentLengthPrior::Kind::Geometric)
    throw InvalidArgument("empirical_bayes: needs a geometric segment-length prior");

  Hyperparams hp = hp0;
  const double n = static_cast<double>(data.n());
  for (int it = 0; it < iterations; ++it) {
    const std::uint64_t it_seed = derive_seed(seed, static_cast<std::uint64_t>(it));
    ResampleConfig rc = resample;
    rc.rng_seed = derive_seed(it_seed, kFilterSeed);
    const FilterHistory history = run_filter(data, hp, rc, exec);
    const auto draws =
        sample_segmentations(history, data, hp, draws_per_iter, derive_seed(it_seed, kDrawSeed), true, exec);

    // A p of exactly zero is not a valid geometric law.
    const double p_hat = std::clamp(mean_changepoint_count(draws) / n, 0.1 / n, 0.5);

    Vec3 second = Vec3::Zero();
    std::size_t births = 0;
    for (const auto& d : draws) {
      for (std::size_t k = 0; k < d.num_segments(); ++k) {
        if (d.models[k] != ModelKind::Discontinuous) continue;
        second += d.beta[k].cwiseProduct(d.beta[k]) / d.sigma2;
        ++births;
      }
    }
    hp.segment_length = SegmentLengthPrior::geometric(p_hat);
    if (births > 0) {
      const Vec3 delta = second / static_cast<double>(births);
      hp.delta[0] = delta[0];
      // delta1 and delta2 must stay strictly positive.
      hp.delta[1] = std::max(delta[1], 1e-8);
      hp.delta[2] = std::max(delta[2], 1e-8);
    }
  }
  return hp;
}

std::vector<ReplicateResult> run_study(const StudyConfig& cfg, Execution exec) {
  if (cfg.replicates < 1) throw InvalidArgument("study needs at least one replicate");
  std::vector<ReplicateResult> results(static_cast<std::size_t>(cfg.replicates));
  ErrorSlot errors;
#pragma omp parallel for schedule(dynamic, 1) if (exec == Execution::Parallel)
  for (int r = 0; r < cfg.replicates; ++r) {
    try {
      const auto ur = static_cast<std::uint64_t>(r);
      Rng rng = make_stream(cfg.seed, ur);
      const SyntheticData sim = simulate_from_prior(cfg.data, rng);
      FitOptions opts = cfg.analysis;
      opts.seed = derive_seed(derive_seed(cfg.seed, kAnalysisSeed), ur);
      const FitResult res = fit(sim.data, opts);
      ReplicateResult& out = results[static_cast<std::size_t>(r)];
      const PosteriorQuantiles q = posterior_quantiles(res.draws, sim.data, sim.z, sim.sigma2);
      out.q_sigma = q.q_sigma;
      out.q_z = q.q_z;
      out.mse = mse(posterior_mean_curve(res.draws, sim.data), sim.z);
      out.coverage = coverage(res.draws, sim.data, sim.z, cfg.coverage_level);
      out.mean_changepoints = mean_changepoint_count(res.draws);
      out.true_changepoints = static_cast<int>(sim.truth.changepoints.size());
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();
  return results;
}

PowerResult run_power(const PowerConfig& cfg, Execution exec) {
  if (cfg.replicates < 1) throw InvalidArgument("power study needs at least one replicate");
  if (!(cfg.sigma > 0.0)) throw InvalidArgument("power study needs sigma > 0");
  const std::vector<double> x = equally_spaced_grid(cfg.n);
  const std::vector<double> base = interpolate_curve(cfg.base_x, cfg.base_z, x);
  const std::vector<double> z = inject_jump(base, cfg.sigma, cfg.c, cfg.x_c, x);

  PowerResult result;
  result.probabilities.assign(static_cast<std::size_t>(cfg.replicates), 0.0);
  ErrorSlot errors;
#pragma omp parallel for schedule(dynamic, 1) if (exec == Execution::Parallel)
  for (int r = 0; r < cfg.replicates; ++r) {
    try {
      const auto ur = static_cast<std::uint64_t>(r);
      Rng rng = make_stream(derive_seed(cfg.seed, kNoiseSeed), ur);
      std::vector<double> y(z);
      for (double& v : y) v += cfg.sigma * draw_standard_normal(rng);
      const TimeSeries data(x, std::move(y));
      FitOptions opts = cfg.analysis;
      opts.seed = derive_seed(derive_seed(cfg.seed, kAnalysisSeed), ur);
      const FitResult res = fit(data, opts);
      result.probabilities[static_cast<std::size_t>(r)] = discontinuity_probability(
          res.draws, cfg.x_c - cfg.window_halfwidth, cfg.x_c + cfg.window_halfwidth, data);
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();

  const auto R = static_cast<double>(cfg.replicates);
  result.mean = std::accumulate(result.probabilities.begin(), result.probabilities.end(), 0.0) / R;
  double ss = 0.0;
  for (double v : result.probabilities) ss += (v - result.mean) * (v - result.mean);
  result.std_error = cfg.replicates > 1 ? std::sqrt(ss / (R - 1.0) / R) : 0.0;
  return result;
}

}  // namespace segdep
