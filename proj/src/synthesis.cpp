#include "segdep/synthesis.hpp"

#include <algorithm>
#include <cmath>

namespace segdep {

namespace {

int draw_segment_length(const SegmentLengthPrior& prior, Rng& rng) {
  if (prior.kind() == SegmentLengthPrior::Kind::Geometric) {
    std::geometric_distribution<int> geom(prior.p());
    return geom(rng) + 1;
  }
  // Inverse CDF on the survival scale.
  const double u = draw_uniform(rng);
  int d = 1;
  while (prior.survival(d) > u) ++d;
  return d;
}

}  // namespace

std::vector<double> equally_spaced_grid(int n) {
  if (n < 2) throw InvalidArgument("grid needs at least 2 points");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(i) / (n - 1);
  return x;
}

std::vector<double> SyntheticSpec::grid() const {
  if (x_grid.empty()) return equally_spaced_grid(n);
  if (static_cast<int>(x_grid.size()) != n) throw InvalidArgument("x_grid length differs from n");
  return x_grid;
}

SyntheticData simulate_from_prior(const SyntheticSpec& spec, Rng& rng) {
  spec.hp.validate();
  const int n = spec.n;
  const std::vector<double> x = spec.grid();
  const Hyperparams& hp = spec.hp;

  double sigma2;
  if (spec.sigma2) {
    sigma2 = *spec.sigma2;
    if (!(sigma2 >= 0.0)) throw InvalidArgument("sigma2 must be >= 0");
  } else {
    if (!(hp.nu0 > 0.0 && hp.gamma0 > 0.0))
      throw InvalidArgument("drawing sigma2 from the prior needs nu0 > 0 and gamma0 > 0");
    sigma2 = draw_inverse_gamma(0.5 * hp.nu0, 0.5 * hp.gamma0, rng);
  }
  const double scale = spec.coefficient_scale.value_or(sigma2);
  const bool cubic = std::holds_alternative<PiecewiseCubic>(spec.generator);
  const double cubic_sd = cubic ? std::get<PiecewiseCubic>(spec.generator).d : 0.0;

  SyntheticData out{TimeSeries({0.0, 1.0}, {0.0, 0.0}), {}, {}, {}, sigma2};
  SegmentationDraw& truth = out.truth;
  truth.sigma2 = sigma2 > 0.0 ? sigma2 : 1.0;

  // Overshooting segment lengths are truncated at n.
  for (int tau = draw_segment_length(hp.segment_length, rng); tau < n;
       tau += draw_segment_length(hp.segment_length, rng))
    truth.changepoints.push_back(tau);

  const double sd = std::sqrt(scale);
  std::vector<double> z(static_cast<std::size_t>(n));
  const std::size_t K = truth.changepoints.size() + 1;
  for (std::size_t k = 0; k < K; ++k) {
    ModelKind m = ModelKind::Discontinuous;
    if (k > 0 && draw_uniform(rng) < hp.model_prior) m = ModelKind::Continuous;
    Vec3 beta;
    for (int j = 0; j < 3; ++j) beta[j] = sd * std::sqrt(hp.delta[j]) * draw_standard_normal(rng);
    const double c3 = cubic ? sd * cubic_sd * draw_standard_normal(rng) : 0.0;
    const int start = truth.segment_start(k);
    if (m == ModelKind::Continuous) {
      const Vec3& prev = truth.beta[k - 1];
      const double d = x[static_cast<std::size_t>(start)] - x[static_cast<std::size_t>(truth.segment_start(k - 1))];
      beta[0] = prev[0] + d * prev[1] + d * d * prev[2];
      if (cubic) beta[0] += out.cubic[k - 1] * d * d * d;
    }
    truth.models.push_back(m);
    truth.beta.push_back(beta);
    if (cubic) out.cubic.push_back(c3);

    const int end = k + 1 < K ? truth.changepoints[k] : n;
    const double x0 = x[static_cast<std::size_t>(start)];
    for (int t = start; t < end; ++t) {
      const double d = x[static_cast<std::size_t>(t)] - x0;
      z[static_cast<std::size_t>(t)] = beta[0] + d * beta[1] + d * d * beta[2] + c3 * d * d * d;
    }
  }

  const double sigma = std::sqrt(sigma2);
  std::vector<double> y(z);
  if (sigma > 0.0)
    for (double& v : y) v += sigma * draw_standard_normal(rng);
  out.data = TimeSeries(x, std::move(y));
  out.z = std::move(z);
  return out;
}

std::vector<double> inject_jump(std::span<const double> z, double sigma, double c, double x_c,
                                std::span<const double> x_grid) {
  if (!(x_c > 0.0 && x_c < 1.0)) throw InvalidArgument("x_c must lie strictly inside (0, 1)");
  if (z.size() != x_grid.size()) throw InvalidArgument("inject_jump: z and x differ in length");
  std::vector<double> out(z.begin(), z.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (x_grid[i] < x_c) out[i] -= c * sigma;
  return out;
}

std::vector<double> interpolate_curve(std::span<const double> base_x, std::span<const double> base_z,
                                      std::span<const double> x_grid) {
  if (base_x.size() != base_z.size() || base_x.size() < 2)
    throw InvalidArgument("base curve needs at least 2 (x, z) samples");
  std::vector<double> out(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    auto it = std::upper_bound(base_x.begin(), base_x.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - base_x.begin());
    hi = std::clamp<std::size_t>(hi, 1, base_x.size() - 1);
    const std::size_t lo = hi - 1;
    const double w = (x - base_x[lo]) / (base_x[hi] - base_x[lo]);
    out[i] = base_z[lo] + w * (base_z[hi] - base_z[lo]);
  }
  return out;
}

double default_power_curve(double x) {
  const double u = 4.0 * x - 2.0;
  return std::sin(u) + 2.0 * std::exp(-30.0 * u * u);
}

}  // namespace segdep
