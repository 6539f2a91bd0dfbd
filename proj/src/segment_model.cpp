#include "segdep/segment_model.hpp"

#include <cmath>
#include <sstream>

namespace segdep {

TimeSeries::TimeSeries(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) throw InvalidArgument("x and y must have equal length");
  if (x_.size() < 2) throw InvalidArgument("a time series needs at least 2 observations");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]))
      throw InvalidArgument("non-finite value at observation " + std::to_string(i + 1));
    if (i > 0 && !(x_[i - 1] < x_[i]))
      throw InvalidArgument("x must be strictly increasing (observation " +
                            std::to_string(i + 1) + ")");
  }
}

SegmentLengthPrior SegmentLengthPrior::geometric(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("geometric p must lie in (0, 1)");
  SegmentLengthPrior prior;
  prior.kind_ = Kind::Geometric;
  prior.p_ = p;
  return prior;
}

SegmentLengthPrior SegmentLengthPrior::general(std::vector<double> g, double tail_p) {
  if (g.empty()) throw InvalidArgument("general segment-length prior needs at least one probability");
  if (!(tail_p > 0.0 && tail_p <= 1.0)) throw InvalidArgument("tail probability must lie in (0, 1]");
  double total = 0.0;
  for (double v : g) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("segment-length probabilities must be >= 0");
    total += v;
  }
  if (total > 1.0 + 1e-12) throw InvalidArgument("segment-length probabilities sum above 1");

  SegmentLengthPrior prior;
  prior.kind_ = Kind::General;
  prior.p_ = tail_p;
  prior.g_ = std::move(g);
  const std::size_t L = prior.g_.size();
  prior.tail_.assign(L + 1, 0.0);
  // Accumulate from the right so 1 - G(s) carries no cancellation error.
  double tail_mass = std::max(0.0, 1.0 - total);
  prior.tail_[L] = tail_mass;
  for (std::size_t s = L; s-- > 0;) prior.tail_[s] = prior.tail_[s + 1] + prior.g_[s];
  return prior;
}

double SegmentLengthPrior::pmf(int d) const {
  if (d < 1) return 0.0;
  if (kind_ == Kind::Geometric) return p_ * std::pow(1.0 - p_, d - 1);
  const auto L = static_cast<int>(g_.size());
  if (d <= L) return g_[static_cast<std::size_t>(d - 1)];
  return tail_[static_cast<std::size_t>(L)] * p_ * std::pow(1.0 - p_, d - L - 1);
}

double SegmentLengthPrior::survival(int s) const {
  if (s <= 0) return 1.0;
  if (kind_ == Kind::Geometric) return std::pow(1.0 - p_, s);
  const auto L = static_cast<int>(g_.size());
  if (s <= L) return tail_[static_cast<std::size_t>(s)];
  return tail_[static_cast<std::size_t>(L)] * std::pow(1.0 - p_, s - L);
}

double SegmentLengthPrior::cdf(int s) const { return 1.0 - survival(s); }

double SegmentLengthPrior::hazard(int age) const {
  if (age < 1) throw InvalidArgument("segment age must be positive");
  if (kind_ == Kind::Geometric) return p_;
  const double S = survival(age);
  if (!(S > 0.0)) throw InvalidArgument("exhausted segment-length support");
  return (S - survival(age + 1)) / S;
}

double SegmentLengthPrior::survival_factor(int age) const {
  if (age < 1) throw InvalidArgument("segment age must be positive");
  if (kind_ == Kind::Geometric) return 1.0 - p_;
  const double S = survival(age);
  if (!(S > 0.0)) throw InvalidArgument("exhausted segment-length support");
  return survival(age + 1) / S;
}

double SegmentLengthPrior::log_hazard(int age) const {
  const double h = hazard(age);
  return h > 0.0 ? std::log(h) : kNegInf;
}

double SegmentLengthPrior::log_survival_factor(int age) const {
  const double f = survival_factor(age);
  return f > 0.0 ? std::log(f) : kNegInf;
}

const char* to_string(ModelKind m) {
  return m == ModelKind::Discontinuous ? "discontinuous" : "continuous";
}

double Hyperparams::log_model_prob(ModelKind m) const {
  const double p = m == ModelKind::Continuous ? model_prior : 1.0 - model_prior;
  return p > 0.0 ? std::log(p) : kNegInf;
}

void Hyperparams::validate() const {
  if (!(nu0 >= 0.0) || !(gamma0 >= 0.0)) throw InvalidArgument("nu0 and gamma0 must be >= 0");
  if (!(delta[0] >= 0.0)) throw InvalidArgument("delta0 must be >= 0");
  if (!(delta[1] > 0.0) || !(delta[2] > 0.0)) throw InvalidArgument("delta1 and delta2 must be > 0");
  if (!delta.allFinite()) throw InvalidArgument("delta must be finite");
  if (!(model_prior >= 0.0 && model_prior <= 1.0)) throw InvalidArgument("model_prior must lie in [0, 1]");
}

double Particle::weight() const { return std::exp(log_w); }

std::vector<double> fitted_curve(const SegmentationDraw& draw, const TimeSeries& data) {
  std::vector<double> z(data.size());
  const std::size_t K = draw.num_segments();
  for (std::size_t k = 0; k < K; ++k) {
    const int start = draw.segment_start(k);
    const int end = k + 1 < K ? draw.changepoints[k] : data.n();
    const double x0 = data.x_at(start + 1);
    const Vec3& b = draw.beta[k];
    for (int t = start + 1; t <= end; ++t) {
      const double d = data.x_at(t) - x0;
      z[static_cast<std::size_t>(t - 1)] = b[0] + d * b[1] + d * d * b[2];
    }
  }
  return z;
}

std::string check_invariants(const SegmentationDraw& draw, const TimeSeries& data,
                             double continuity_tol) {
  std::ostringstream err;
  if (draw.models.size() != draw.changepoints.size() + 1) return "segment count mismatch";
  if (draw.beta.size() != draw.models.size()) return "parameter count mismatch";
  if (draw.models.front() != ModelKind::Discontinuous) return "first segment must be discontinuous";
  if (!(draw.sigma2 > 0.0)) return "sigma2 must be positive";
  int prev = 0;
  for (int c : draw.changepoints) {
    if (c <= prev || c >= data.n()) {
      err << "changepoint " << c << " out of order or range";
      return err.str();
    }
    prev = c;
  }
  for (std::size_t k = 1; k < draw.num_segments(); ++k) {
    if (draw.models[k] != ModelKind::Continuous) continue;
    const int start = draw.segment_start(k);
    const double d = data.x_at(start + 1) - data.x_at(draw.segment_start(k - 1) + 1);
    const Vec3& b = draw.beta[k - 1];
    const double extrapolated = b[0] + d * b[1] + d * d * b[2];
    const double gap = std::abs(extrapolated - draw.beta[k][0]);
    if (gap > continuity_tol * std::max(1.0, std::abs(extrapolated))) {
      err << "continuity violated at segment " << k << " (gap " << gap << ")";
      return err.str();
    }
  }
  return {};
}

}  // namespace segdep
