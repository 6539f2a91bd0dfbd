#include "segdep/filtering.hpp"

#include <algorithm>
#include <cmath>

namespace segdep {

namespace {

// Below this many particles the OpenMP fork costs more than it saves.
constexpr std::size_t kParallelGrain = 256;

double log_sum_exp(std::span<const double> values) {
  double top = kNegInf;
  for (double v : values) top = std::max(top, v);
  if (!std::isfinite(top)) return kNegInf;
  double total = 0.0;
  for (double v : values) total += std::exp(v - top);
  return top + std::log(total);
}

std::vector<double> own_weights(std::span<const Particle> particles) {
  std::vector<double> w(particles.size());
  for (std::size_t i = 0; i < particles.size(); ++i) w[i] = particles[i].weight();
  return w;
}

}  // namespace

std::size_t FilterHistory::total_particles() const {
  std::size_t total = 0;
  for (const auto& s : states) total += s.particles.size();
  return total;
}

SigmaCollapse collapse_sigma(std::span<const Particle> particles, std::span<const double> weights) {
  if (particles.empty()) throw InvalidArgument("collapse_sigma: empty mixture");
  const double nu0 = particles.front().zeta.nu;
  const double gamma0 = particles.front().zeta.gamma;
  bool identical = true;
  for (const auto& p : particles)
    if (p.zeta.nu != nu0 || p.zeta.gamma != gamma0) identical = false;
  if (identical) return {nu0, gamma0};

  double total = 0.0, e1 = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const NIGParams& z = particles[i].zeta;
    if (!z.proper() || !(weights[i] > 0.0)) continue;
    total += weights[i];
    e1 += weights[i] * z.nu / z.gamma;
    e2 += weights[i] * z.nu * (z.nu + 2.0) / (z.gamma * z.gamma);
  }
  if (!(total > 0.0)) return {nu0, gamma0};
  e1 /= total;
  e2 /= total;
  const double var = e2 - e1 * e1;
  double nu = var > 0.0 ? 2.0 * e1 * e1 / var : kMaxCollapsedNu;
  nu = std::min(nu, kMaxCollapsedNu);
  return {nu, nu / e1};
}

SigmaCollapse collapse_sigma(std::span<const Particle> particles) {
  const auto w = own_weights(particles);
  return collapse_sigma(particles, w);
}

BetaCollapse collapse_beta0(std::span<const Particle> particles, std::span<const double> weights,
                            const TimeSeries& data, int t) {
  if (particles.empty()) throw InvalidArgument("collapse_beta0: empty mixture");
  if (t >= data.n()) throw InvalidArgument("collapse_beta0: need t < n");
  double total = 0.0, mean = 0.0, second = 0.0;
  for (std::size_t i = 0; i < particles.size(); ++i) {
    if (!(weights[i] > 0.0)) continue;
    const Particle& p = particles[i];
    const Vec3 a = design_row(data, p.s, t + 1).h;
    const double m = p.zeta.mu.dot(a);
    total += weights[i];
    mean += weights[i] * m;
    second += weights[i] * (a.dot(p.zeta.D * a) + m * m);
  }
  mean /= total;
  second /= total;
  return {mean, std::max(second - mean * mean, 0.0)};
}

BetaCollapse collapse_beta0(std::span<const Particle> particles, const TimeSeries& data, int t) {
  const auto w = own_weights(particles);
  return collapse_beta0(particles, w, data, t);
}

FilterState filter_init(const TimeSeries& data, const Hyperparams& hp) {
  hp.validate();
  NIGParams prior{hp.nu0, hp.gamma0, Vec3::Zero(), hp.D0()};
  const DesignRow h = design_row(data, 0, 1);
  FilterState state;
  state.t = 1;
  state.log_normalizer = log_predictive_density(prior, h, data.y_at(1));
  state.particles.push_back({0, ModelKind::Discontinuous, 0.0, posterior_update(prior, h, data.y_at(1))});
  return state;
}

FilterState filter_step(const FilterState& state, const TimeSeries& data, const Hyperparams& hp,
                        Execution exec) {
  const int t = state.t;
  if (t >= data.n()) throw InvalidArgument("filter_step: no observation left");
  const double y = data.y_at(t + 1);
  const auto& in = state.particles;
  const std::size_t count = in.size();
  const SegmentLengthPrior& prior = hp.segment_length;

  FilterState out;
  out.t = t + 1;
  out.particles.resize(count);
  std::vector<double> log_birth(count);

  // Survivors: no changepoint between t and t + 1.
  ErrorSlot errors;
  const bool parallel = exec == Execution::Parallel && count >= kParallelGrain;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      const Particle& p = in[i];
      const int age = t - p.s;
      const DesignRow h = design_row(data, p.s, t + 1);
      Particle& q = out.particles[i];
      q.s = p.s;
      q.m = p.m;
      q.log_w = p.log_w + prior.log_survival_factor(age) + log_predictive_density(p.zeta, h, y);
      q.zeta = posterior_update(p.zeta, h, y);
      log_birth[i] = p.log_w + prior.log_hazard(age);
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();

  // Births at s = t from the collapsed mixture.
  const double log_B = log_sum_exp(log_birth);
  if (std::isfinite(log_B)) {
    std::vector<double> mix(count);
    for (std::size_t i = 0; i < count; ++i) mix[i] = std::exp(log_birth[i] - log_B);
    const SigmaCollapse sc = collapse_sigma(in, mix);
    const DesignRow first = DesignRow::from_offset(0.0);
    for (ModelKind m : {ModelKind::Discontinuous, ModelKind::Continuous}) {
      const double log_pm = hp.log_model_prob(m);
      if (!std::isfinite(log_pm)) continue;
      NIGParams birth{sc.nu, sc.gamma, Vec3::Zero(), hp.D0()};
      if (m == ModelKind::Continuous) {
        const BetaCollapse bc = collapse_beta0(in, mix, data, t);
        birth.mu = Vec3(bc.eta, 0.0, 0.0);
        birth.D = Vec3(bc.tau, hp.delta[1], hp.delta[2]).asDiagonal();
      }
      const double lw = log_pm + log_B + log_predictive_density(birth, first, y);
      out.particles.push_back({t, m, lw, posterior_update(birth, first, y)});
    }
  }

  std::erase_if(out.particles, [](const Particle& p) { return !std::isfinite(p.log_w); });
  std::vector<double> lw(out.particles.size());
  for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = out.particles[i].log_w;
  const double log_Z = log_sum_exp(lw);
  if (!std::isfinite(log_Z)) throw NumericalError("numerical underflow; operate in log-weight domain");
  for (auto& p : out.particles) p.log_w -= log_Z;
  out.log_normalizer = log_Z;
  return out;
}

FilterHistory run_filter(const TimeSeries& data, const Hyperparams& hp, const ResampleConfig& cfg,
                         Execution exec) {
  cfg.validate();
  Rng rng = make_stream(cfg.rng_seed, 0x5245534dULL);
  FilterHistory history;
  history.states.reserve(data.size());
  history.states.push_back(filter_init(data, hp));
  history.log_evidence = history.states.back().log_normalizer;
  for (int t = 1; t < data.n(); ++t) {
    FilterState next = filter_step(history.states.back(), data, hp, exec);
    next.particles = resample(std::move(next.particles), cfg, rng);
    history.log_evidence += next.log_normalizer;
    history.states.push_back(std::move(next));
  }
  return history;
}

}  // namespace segdep
