#include "segdep/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace segdep {

namespace {

void renormalize(std::vector<Particle>& particles) {
  double top = kNegInf;
  for (const auto& p : particles) top = std::max(top, p.log_w);
  double total = 0.0;
  for (const auto& p : particles) total += std::exp(p.log_w - top);
  const double log_total = top + std::log(total);
  for (auto& p : particles) p.log_w -= log_total;
}

}  // namespace

void ResampleConfig::validate() const {
  if (!(threshold >= 0.0 && threshold < 1.0)) throw InvalidArgument("resample threshold must lie in [0, 1)");
}

std::vector<Particle> resample(std::vector<Particle> particles, const ResampleConfig& cfg, Rng& rng) {
  cfg.validate();
  bool changed = false;

  if (cfg.threshold > 0.0) {
    const double log_alpha = std::log(cfg.threshold);
    std::vector<std::size_t> small;
    for (std::size_t i = 0; i < particles.size(); ++i)
      if (particles[i].log_w < log_alpha) small.push_back(i);

    if (!small.empty()) {
      std::vector<char> keep(particles.size(), 1);
      // Position of the next stratified point, measured from the start of the
      // current particle's interval.
      double u = draw_uniform(rng);
      for (std::size_t i : small) {
        const double len = std::exp(particles[i].log_w - log_alpha);
        if (u < len) {
          particles[i].log_w = log_alpha;
          u += 1.0 - len;
        } else {
          keep[i] = 0;
          u -= len;
        }
      }
      std::size_t out = 0;
      for (std::size_t i = 0; i < particles.size(); ++i)
        if (keep[i]) particles[out++] = std::move(particles[i]);
      particles.resize(out);
      changed = true;
    }
  }

  if (cfg.max_particles > 0 && particles.size() > cfg.max_particles) {
    std::vector<std::size_t> order(particles.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Ties broken by (s, m) position so the cap is deterministic.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return particles[a].log_w > particles[b].log_w;
    });
    order.resize(cfg.max_particles);
    std::sort(order.begin(), order.end());
    std::vector<Particle> capped;
    capped.reserve(order.size());
    for (std::size_t i : order) capped.push_back(std::move(particles[i]));
    particles = std::move(capped);
    changed = true;
  }

  if (changed) renormalize(particles);
  return particles;
}

}  // namespace segdep
