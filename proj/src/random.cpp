#include "segdep/random.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace segdep {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed;
  const std::uint64_t a = splitmix64(state);
  state ^= stream * 0xD1B54A32D192ED03ULL;
  const std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  Rng rng = make_stream(seed, tag ^ 0xA5A5A5A5DEADBEEFULL);
  return rng();
}

double draw_standard_normal(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return normal(rng);
}

double draw_uniform(Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return unif(rng);
}

double draw_inverse_gamma(double shape, double scale, Rng& rng) {
  if (!(shape > 0.0) || !(scale > 0.0))
    throw NumericalError("inverse-gamma draw needs positive shape and scale");
  std::gamma_distribution<double> gamma(shape, 1.0);
  return scale / gamma(rng);
}

Vec3 draw_normal(const Vec3& mean, const Mat3& D, double sigma2, Rng& rng) {
  Vec3 z(draw_standard_normal(rng), draw_standard_normal(rng), draw_standard_normal(rng));
  // Diagonal covariances are common (birth priors); skip the factorization.
  if (D(0, 1) == 0.0 && D(0, 2) == 0.0 && D(1, 2) == 0.0 && D(1, 0) == 0.0 &&
      D(2, 0) == 0.0 && D(2, 1) == 0.0) {
    const Vec3 sd = D.diagonal().cwiseMax(0.0).cwiseSqrt() * std::sqrt(sigma2);
    return mean + sd.cwiseProduct(z);
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(D);
  const Vec3 root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt() * std::sqrt(sigma2);
  return mean + eig.eigenvectors() * root.cwiseProduct(z);
}

std::size_t draw_categorical_log(std::span<const double> log_w, Rng& rng) {
  if (log_w.empty()) throw NumericalError("categorical draw over an empty support");
  const double top = *std::max_element(log_w.begin(), log_w.end());
  if (!std::isfinite(top)) throw NumericalError("categorical draw with no positive weight");
  double total = 0.0;
  for (double lw : log_w) total += std::exp(lw - top);
  double u = draw_uniform(rng) * total;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    const double w = std::exp(log_w[i] - top);
    if (u < w) return i;
    u -= w;
  }
  // Rounding left u slightly above the last positive weight.
  for (std::size_t i = log_w.size(); i-- > 0;)
    if (std::isfinite(log_w[i])) return i;
  return log_w.size() - 1;
}

}  // namespace segdep
