#ifndef SEGDEP_RESAMPLING_HPP
#define SEGDEP_RESAMPLING_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "segdep/random.hpp"
#include "segdep/segment_model.hpp"

namespace segdep {

struct ResampleConfig {
  // Particles with normalized weight below this are thinned. Zero disables.
  double threshold = 1e-6;
  // Hard cap on the support size after thinning; 0 means unlimited.
  std::size_t max_particles = 0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// Stratified rejection control. Particles with weight >= threshold are kept
// unchanged. The K particles below it are walked in (s, m) order along the
// cumulative scale of w / threshold; a single uniform U places points at
// U, U+1, U+2, ... and a particle survives (with weight = threshold) when one
// of those points falls in its interval. Since each interval is shorter than
// one, survival happens with probability exactly w / threshold. The result is
// renormalized. Input weights (log domain) must be normalized and the
// particles sorted by (s, m).
std::vector<Particle> resample(std::vector<Particle> particles, const ResampleConfig& cfg, Rng& rng);

}  // namespace segdep

#endif  // SEGDEP_RESAMPLING_HPP
