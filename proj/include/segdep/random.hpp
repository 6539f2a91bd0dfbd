#ifndef SEGDEP_RANDOM_HPP
#define SEGDEP_RANDOM_HPP

#include <cstdint>
#include <random>

#include "segdep/segment_model.hpp"

namespace segdep {

using Rng = std::mt19937_64;

// Deterministic, well-separated stream for (seed, stream id).
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

// Child seed for a named sub-task of seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

// sigma^2 ~ IG(shape, scale), i.e. scale / Gamma(shape, 1).
double draw_inverse_gamma(double shape, double scale, Rng& rng);

// One draw from N(mean, sigma2 * D) for positive semi-definite D.
Vec3 draw_normal(const Vec3& mean, const Mat3& D, double sigma2, Rng& rng);

double draw_standard_normal(Rng& rng);
double draw_uniform(Rng& rng);

// Index drawn with probability proportional to exp(log_w[i]).
std::size_t draw_categorical_log(std::span<const double> log_w, Rng& rng);

}  // namespace segdep

#endif  // SEGDEP_RANDOM_HPP
