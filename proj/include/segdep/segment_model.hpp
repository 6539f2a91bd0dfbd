#ifndef SEGDEP_SEGMENT_MODEL_HPP
#define SEGDEP_SEGMENT_MODEL_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace segdep {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Bad input supplied by a caller (maps to CLI exit code 2).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical assertion failed inside the algorithms (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordered (x, y) observations. Observation positions used throughout the
// library are counts: a segment that starts after changepoint s contains
// observations s+1, s+2, ... and observation t lives at x(t-1), y(t-1).
class TimeSeries {
 public:
  TimeSeries(std::vector<double> x, std::vector<double> y);

  std::size_t size() const { return x_.size(); }
  int n() const { return static_cast<int>(x_.size()); }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }

  // 1-based accessors matching the observation-count convention.
  double x_at(int t) const { return x_[static_cast<std::size_t>(t - 1)]; }
  double y_at(int t) const { return y_[static_cast<std::size_t>(t - 1)]; }

  bool operator==(const TimeSeries&) const = default;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
};

// Distribution g(d), d >= 1, of the distance between successive changepoints.
class SegmentLengthPrior {
 public:
  enum class Kind { Geometric, General };

  static SegmentLengthPrior geometric(double p);
  // Explicit probabilities g(1..L); the remaining mass 1 - sum(g) is spread
  // over d > L as a geometric tail with success probability tail_p.
  static SegmentLengthPrior general(std::vector<double> g, double tail_p);

  Kind kind() const { return kind_; }
  // Success probability of the geometric law (or of the tail for General).
  double p() const { return p_; }

  double pmf(int d) const;
  double cdf(int s) const;
  // 1 - G(s), evaluated without cancellation.
  double survival(int s) const;

  // (G(age+1) - G(age)) / (1 - G(age)).
  double hazard(int age) const;
  // (1 - G(age+1)) / (1 - G(age)).
  double survival_factor(int age) const;
  double log_hazard(int age) const;
  double log_survival_factor(int age) const;

 private:
  SegmentLengthPrior() = default;

  Kind kind_ = Kind::Geometric;
  double p_ = 0.5;
  std::vector<double> g_;
  // tail_[s] = 1 - G(s) for s = 0..L.
  std::vector<double> tail_;
};

enum class ModelKind : std::uint8_t { Discontinuous = 1, Continuous = 2 };

const char* to_string(ModelKind m);

struct Hyperparams {
  double nu0 = 0.0;
  double gamma0 = 0.0;
  // Diagonal of D0.
  Vec3 delta = Vec3(1.0, 100.0, 1600.0);
  SegmentLengthPrior segment_length = SegmentLengthPrior::geometric(0.01);
  // Pr(M = Continuous) for every segment after the first.
  double model_prior = 0.5;

  Mat3 D0() const { return delta.asDiagonal(); }
  double log_model_prob(ModelKind m) const;
  // Throws InvalidArgument if any invariant is violated.
  void validate() const;
};

// Normal-inverse-gamma parameters: sigma^2 ~ IG(nu/2, gamma/2),
// beta | sigma^2 ~ N(mu, sigma^2 D).
struct NIGParams {
  double nu = 0.0;
  double gamma = 0.0;
  Vec3 mu = Vec3::Zero();
  Mat3 D = Mat3::Zero();

  bool proper() const { return nu > 0.0 && gamma > 0.0; }
};

struct Particle {
  int s = 0;
  ModelKind m = ModelKind::Discontinuous;
  double log_w = 0.0;
  NIGParams zeta;

  double weight() const;
};

// Orders particles by (s, m).
inline bool particle_key_less(const Particle& a, const Particle& b) {
  return a.s != b.s ? a.s < b.s : a.m < b.m;
}

struct Theta {
  double sigma2 = 1.0;
  Vec3 beta = Vec3::Zero();
};

// One posterior sample of a full segmentation. The observation variance is
// shared by every segment, so it is stored once.
struct SegmentationDraw {
  std::vector<int> changepoints;
  std::vector<ModelKind> models;
  double sigma2 = 1.0;
  std::vector<Vec3> beta;

  std::size_t num_segments() const { return models.size(); }
  // Number of observations preceding segment k (0 for the first segment).
  int segment_start(std::size_t k) const { return k == 0 ? 0 : changepoints[k - 1]; }
  Theta theta(std::size_t k) const { return {sigma2, beta[k]}; }
};

// Curve value h . beta of the segment containing each observation.
std::vector<double> fitted_curve(const SegmentationDraw& draw, const TimeSeries& data);

// Checks ordering, model and continuity invariants; returns an empty string
// when they hold, otherwise a description of the first violation.
std::string check_invariants(const SegmentationDraw& draw, const TimeSeries& data,
                             double continuity_tol = 1e-9);

}  // namespace segdep

#endif  // SEGDEP_SEGMENT_MODEL_HPP
