#include "segdep/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace segdep {

namespace {

const double kLogTwoPi = std::log(2.0 * std::numbers::pi);

double log_inverse_gamma_pdf(double x, double shape, double scale) {
  if (shape > 0.0 && scale > 0.0)
    return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
  // Improper prior: unnormalized x^{-shape-1}.
  return -(shape + 1.0) * std::log(x);
}

// log N(beta; mean, sigma2 * diag(var)). A coordinate with variance below
// kDegenerateVariance is a point mass: it contributes the capped density
// 1/sqrt(2 pi sigma2 kDegenerateVariance) when hit and -inf when missed.
double log_diag_normal(const Vec3& beta, const Vec3& mean, const Vec3& var, double sigma2) {
  double total = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double r = beta[j] - mean[j];
    if (var[j] < kDegenerateVariance) {
      if (std::abs(r) > kPointMassTolerance) return kNegInf;
      total += -0.5 * (kLogTwoPi + std::log(sigma2 * kDegenerateVariance));
      continue;
    }
    const double v = sigma2 * var[j];
    total += -0.5 * (kLogTwoPi + std::log(v) + r * r / v);
  }
  return total;
}

Theta draw_from_nig(const NIGParams& zeta, Rng& rng) {
  if (!zeta.proper()) throw NumericalError("cannot sample from an improper NIG posterior");
  Theta theta;
  theta.sigma2 = draw_inverse_gamma(0.5 * zeta.nu, 0.5 * zeta.gamma, rng);
  theta.beta = draw_normal(zeta.mu, zeta.D, theta.sigma2, rng);
  return theta;
}

}  // namespace

double log_transition_integral(const NIGParams& zeta, ModelKind next_model, const Theta& next,
                               const DesignRow& h, const Hyperparams& hp) {
  const double log_ig = log_inverse_gamma_pdf(next.sigma2, 0.5 * zeta.nu, 0.5 * zeta.gamma);
  if (next_model == ModelKind::Discontinuous)
    return log_ig + log_diag_normal(next.beta, Vec3::Zero(), hp.delta, next.sigma2);
  const double mean0 = h.h.dot(zeta.mu);
  const double var0 = std::max(h.h.dot(zeta.D * h.h), 0.0);
  return log_ig + log_diag_normal(next.beta, Vec3(mean0, 0.0, 0.0), Vec3(var0, hp.delta[1], hp.delta[2]),
                                  next.sigma2);
}

double transition_integral(const NIGParams& zeta, ModelKind next_model, const Theta& next,
                           const DesignRow& h, const Hyperparams& hp) {
  return std::exp(log_transition_integral(zeta, next_model, next, h, hp));
}

std::vector<BackwardWeight> backward_weights(const FilterState& state, const TimeSeries& data,
                                             const Hyperparams& hp, const NextSegment& next) {
  if (state.t != next.t) throw InvalidArgument("backward_weights: filter state is not at the changepoint time");
  std::vector<BackwardWeight> out;
  out.reserve(state.particles.size());
  bool any = false;
  for (std::size_t i = 0; i < state.particles.size(); ++i) {
    const Particle& p = state.particles[i];
    const DesignRow h = design_row(data, p.s, next.t + 1);
    const double lw = p.log_w + hp.segment_length.log_hazard(next.t - p.s) +
                      log_transition_integral(p.zeta, next.model, next.theta, h, hp);
    any = any || std::isfinite(lw);
    out.push_back({p.s, p.m, lw, i});
  }
  if (!any) throw NumericalError("smoother underflow");
  return out;
}

Theta sample_theta_given_next(const NIGParams& zeta, ModelKind next_model, const Theta& next,
                              const DesignRow& h, Rng& rng) {
  Theta theta;
  theta.sigma2 = next.sigma2;
  const Vec3 z = draw_normal(zeta.mu, zeta.D, theta.sigma2, rng);
  if (next_model == ModelKind::Discontinuous) {
    theta.beta = z;
    return theta;
  }
  // Condition N(mu, sigma2 D) on h . beta = b by correcting an unconstrained
  // draw along D h'.
  const double b = next.beta[0];
  const Vec3 Dh = zeta.D * h.h;
  const double v = h.h.dot(Dh);
  if (v >= kDegenerateVariance) {
    theta.beta = z - Dh * ((h.h.dot(z) - b) / v);
    return theta;
  }
  if (std::abs(h.h.dot(zeta.mu) - b) > kPointMassTolerance)
    throw NumericalError("inconsistent continuity constraint");
  theta.beta = z + h.h * ((b - h.h.dot(z)) / h.h.squaredNorm());
  return theta;
}

SegmentationDraw sample_segmentation(const FilterHistory& history, const TimeSeries& data,
                                     const Hyperparams& hp, Rng& rng) {
  const int n = data.n();
  if (history.n() != n) throw InvalidArgument("sample_segmentation: incomplete filter history");

  std::vector<double> lw;
  auto pick = [&](std::span<const double> weights) { return draw_categorical_log(weights, rng); };

  const FilterState& last = history.at(n);
  lw.resize(last.particles.size());
  for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = last.particles[i].log_w;
  const Particle& final_particle = last.particles[pick(lw)];

  // Collected right to left.
  std::vector<int> starts{final_particle.s};
  std::vector<ModelKind> models{final_particle.m};
  Theta theta = draw_from_nig(final_particle.zeta, rng);
  std::vector<Vec3> betas{theta.beta};
  const double sigma2 = theta.sigma2;

  int t = final_particle.s;
  ModelKind next_model = final_particle.m;
  while (t > 0) {
    const FilterState& state = history.at(t);
    const auto weights = backward_weights(state, data, hp, {t, next_model, theta});
    lw.resize(weights.size());
    for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = weights[i].log_w;
    const Particle& p = state.particles[weights[pick(lw)].index];
    theta = sample_theta_given_next(p.zeta, next_model, theta, design_row(data, p.s, t + 1), rng);
    starts.push_back(p.s);
    models.push_back(p.m);
    betas.push_back(theta.beta);
    t = p.s;
    next_model = p.m;
  }

  SegmentationDraw draw;
  draw.sigma2 = sigma2;
  for (std::size_t k = starts.size(); k-- > 0;) {
    if (starts[k] > 0) draw.changepoints.push_back(starts[k]);
    draw.models.push_back(models[k]);
    draw.beta.push_back(betas[k]);
  }
  return draw;
}

SegmentationDraw resimulate_parameters(const SegmentationDraw& draw, const TimeSeries& data,
                                       const Hyperparams& hp, Rng& rng) {
  const std::size_t K = draw.num_segments();
  if (K == 0 || draw.changepoints.size() + 1 != K) throw InvalidArgument("resimulate_parameters: malformed draw");

  // Forward pass over the fixed segmentation. end_state[k] holds the
  // conjugate parameters after the last observation of segment k.
  std::vector<NIGParams> end_state(K);
  NIGParams zeta{hp.nu0, hp.gamma0, Vec3::Zero(), hp.D0()};
  for (std::size_t k = 0; k < K; ++k) {
    const int start = draw.segment_start(k);
    const int end = k + 1 < K ? draw.changepoints[k] : data.n();
    if (k > 0) {
      if (draw.models[k] == ModelKind::Discontinuous) {
        zeta.mu = Vec3::Zero();
        zeta.D = hp.D0();
      } else {
        const NIGParams& prev = end_state[k - 1];
        const DesignRow h = design_row(data, draw.segment_start(k - 1), start + 1);
        zeta.mu = Vec3(h.h.dot(prev.mu), 0.0, 0.0);
        zeta.D = Vec3(std::max(h.h.dot(prev.D * h.h), 0.0), hp.delta[1], hp.delta[2]).asDiagonal();
      }
    }
    for (int t = start + 1; t <= end; ++t) zeta = posterior_update(zeta, design_row(data, start, t), data.y_at(t));
    end_state[k] = zeta;
  }

  // Backward draw; nu and gamma have accumulated over the whole series.
  SegmentationDraw out;
  out.changepoints = draw.changepoints;
  out.models = draw.models;
  out.beta.resize(K);
  Theta theta = draw_from_nig(end_state[K - 1], rng);
  out.sigma2 = theta.sigma2;
  out.beta[K - 1] = theta.beta;
  for (std::size_t k = K - 1; k-- > 0;) {
    const DesignRow h = design_row(data, draw.segment_start(k), draw.segment_start(k + 1) + 1);
    theta = sample_theta_given_next(end_state[k], draw.models[k + 1], theta, h, rng);
    out.beta[k] = theta.beta;
  }
  return out;
}

std::vector<SegmentationDraw> sample_segmentations(const FilterHistory& history, const TimeSeries& data,
                                                   const Hyperparams& hp, std::size_t count,
                                                   std::uint64_t seed, bool resimulate, Execution exec) {
  std::vector<SegmentationDraw> draws(count);
  ErrorSlot errors;
#pragma omp parallel for schedule(dynamic, 8) if (exec == Execution::Parallel)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      Rng rng = make_stream(seed, i);
      SegmentationDraw d = sample_segmentation(history, data, hp, rng);
      draws[i] = resimulate ? resimulate_parameters(d, data, hp, rng) : std::move(d);
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();
  return draws;
}

}  // namespace segdep
