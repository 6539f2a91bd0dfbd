#include "doctest.h"

#include <cmath>
#include <map>

#include "oracles/exact_posterior.hpp"
#include "segdep/smoothing.hpp"

using namespace segdep;

namespace {

const std::vector<double> kX{0.0, 0.1, 0.25, 0.3, 0.55, 0.6, 0.8, 1.0};
const std::vector<double> kY{0.3, -0.2, 1.1, 0.4, 2.9, 3.1, 2.2, 0.7};

Hyperparams test_hp() {
  Hyperparams hp;
  hp.nu0 = 2.0;
  hp.gamma0 = 1.5;
  hp.delta = Vec3(2.0, 10.0, 50.0);
  hp.segment_length = SegmentLengthPrior::geometric(0.2);
  hp.model_prior = 0.3;
  return hp;
}

}  // namespace

TEST_CASE("transition integral against independent values") {
  Hyperparams hp;
  hp.delta = Vec3(1.0, 100.0, 1600.0);
  const NIGParams disc_zeta{4.0, 3.0, Vec3::Zero(), Mat3::Identity()};
  const Theta at_mode{0.5, Vec3::Zero()};
  const auto h0 = DesignRow::from_offset(0.2);
  CHECK(transition_integral(disc_zeta, ModelKind::Discontinuous, at_mode, h0, hp) ==
        doctest::Approx(0.000402350234725512).epsilon(1e-12));

  Mat3 D;
  D << 0.5, 0.1, 0.0, 0.1, 2.0, 0.3, 0.0, 0.3, 4.0;
  const NIGParams cont_zeta{4.0, 3.0, Vec3(0.4, -1.0, 2.0), D};
  const Theta next{0.7, Vec3(0.1, 3.0, -20.0)};
  CHECK(transition_integral(cont_zeta, ModelKind::Continuous, next, h0, hp) ==
        doctest::Approx(0.0001985190346825919).epsilon(1e-12));
}

TEST_CASE("degenerate intercept variance uses a capped point mass") {
  Hyperparams hp;
  const NIGParams zeta{4.0, 3.0, Vec3(1.0, 0.0, 0.0), Mat3::Zero()};
  const auto h = DesignRow::from_offset(0.0);
  const Theta hit{1.0, Vec3(1.0, 0.0, 0.0)};
  const Theta miss{1.0, Vec3(1.1, 0.0, 0.0)};
  CHECK(std::isfinite(log_transition_integral(zeta, ModelKind::Continuous, hit, h, hp)));
  CHECK(std::isinf(log_transition_integral(zeta, ModelKind::Continuous, miss, h, hp)));
}

TEST_CASE("continuous conditional draw satisfies the constraint exactly") {
  Mat3 D;
  D << 0.5, 0.1, 0.0, 0.1, 2.0, 0.3, 0.0, 0.3, 4.0;
  const NIGParams zeta{6.0, 3.0, Vec3(0.4, -1.0, 2.0), D};
  const auto h = DesignRow::from_offset(0.35);
  const Theta next{0.8, Vec3(1.7, 0.0, 0.0)};
  Rng rng = make_stream(5, 0);
  const Vec3 Dh = D * h.h;
  const Vec3 cond_mean = zeta.mu + Dh * ((1.7 - h.h.dot(zeta.mu)) / h.h.dot(Dh));
  Vec3 mean = Vec3::Zero();
  const int reps = 40000;
  for (int r = 0; r < reps; ++r) {
    const Theta th = sample_theta_given_next(zeta, ModelKind::Continuous, next, h, rng);
    CHECK(std::abs(h.h.dot(th.beta) - 1.7) <= 1e-12);
    CHECK(th.sigma2 == 0.8);
    mean += th.beta / reps;
  }
  // Conditional standard deviations are at most sqrt(0.8 * 4).
  for (int j = 0; j < 3; ++j) CHECK(std::abs(mean[j] - cond_mean[j]) <= 5.0 * std::sqrt(3.2 / reps));
}

TEST_CASE("inconsistent degenerate constraint throws") {
  const NIGParams zeta{4.0, 3.0, Vec3(1.0, 0.0, 0.0), Mat3::Zero()};
  Rng rng = make_stream(6, 0);
  const Theta next{1.0, Vec3(2.0, 0.0, 0.0)};
  CHECK_THROWS_WITH_AS(sample_theta_given_next(zeta, ModelKind::Continuous, next, DesignRow::from_offset(0.0), rng),
                       "inconsistent continuity constraint", NumericalError);
}

TEST_CASE("discontinuous conditional draw has moments mu and sigma2 D") {
  Mat3 D;
  D << 1.0, 0.3, 0.0, 0.3, 2.0, -0.4, 0.0, -0.4, 0.5;
  const NIGParams zeta{6.0, 3.0, Vec3(0.4, -1.0, 2.0), D};
  const Theta next{0.6, Vec3(0.0, 0.0, 0.0)};
  Rng rng = make_stream(7, 0);
  const int reps = 100000;
  Vec3 mean = Vec3::Zero();
  Mat3 second = Mat3::Zero();
  for (int r = 0; r < reps; ++r) {
    const Vec3 b = sample_theta_given_next(zeta, ModelKind::Discontinuous, next, DesignRow::from_offset(0.1), rng).beta;
    mean += b;
    second += b * b.transpose();
  }
  mean /= reps;
  const Mat3 cov = second / reps - mean * mean.transpose();
  const Mat3 target = 0.6 * D;
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(mean[i] - zeta.mu[i]) <= 5.0 * std::sqrt(target(i, i) / reps));
    for (int j = 0; j < 3; ++j)
      CHECK(std::abs(cov(i, j) - target(i, j)) <= 5.0 * std::sqrt(2.0 * target(i, i) * target(j, j) / reps) + 1e-3);
  }
}

TEST_CASE("backward weights require matching time") {
  const TimeSeries data(kX, kY);
  const auto hist = run_filter(data, test_hp(), {0.0, 0, 0});
  CHECK_THROWS_AS(backward_weights(hist.at(3), data, test_hp(), {4, ModelKind::Discontinuous, {1.0, Vec3::Zero()}}),
                  InvalidArgument);
  const auto w = backward_weights(hist.at(4), data, test_hp(), {4, ModelKind::Discontinuous, {1.0, Vec3::Zero()}});
  CHECK(w.size() == hist.at(4).particles.size());
}

TEST_CASE("sampled segmentations are well formed and policy independent") {
  const TimeSeries data(kX, kY);
  const auto hp = test_hp();
  const auto hist = run_filter(data, hp, {0.0, 0, 0});
  for (bool resim : {false, true}) {
    const auto a = sample_segmentations(hist, data, hp, 300, 99, resim, Execution::Serial);
    const auto b = sample_segmentations(hist, data, hp, 300, 99, resim, Execution::Parallel);
    REQUIRE(a.size() == 300);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(check_invariants(a[i], data).empty());
      CHECK(a[i].changepoints == b[i].changepoints);
      CHECK(a[i].sigma2 == b[i].sigma2);
      CHECK(a[i].beta.back() == b[i].beta.back());
      CHECK(a[i].models.front() == ModelKind::Discontinuous);
    }
  }
}

TEST_CASE("resimulated coefficients have the exact posterior mean") {
  const TimeSeries data(kX, kY);
  const auto hp = test_hp();
  SegmentationDraw seg;
  seg.changepoints = {3, 5};
  seg.models = {ModelKind::Discontinuous, ModelKind::Continuous, ModelKind::Discontinuous};
  seg.beta.assign(3, Vec3::Zero());
  const auto exact = oracle::posterior_mean_coefficients(data, hp, seg.changepoints, seg.models);
  Rng rng = make_stream(8, 0);
  const int reps = 40000;
  std::vector<Vec3> sum(3, Vec3::Zero()), sq(3, Vec3::Zero());
  for (int r = 0; r < reps; ++r) {
    const auto d = resimulate_parameters(seg, data, hp, rng);
    CHECK(check_invariants(d, data).empty());
    for (int k = 0; k < 3; ++k) {
      sum[k] += d.beta[k];
      sq[k] += d.beta[k].cwiseProduct(d.beta[k]);
    }
  }
  for (int k = 0; k < 3; ++k)
    for (int j = 0; j < 3; ++j) {
      const double m = sum[k][j] / reps;
      const double se = std::sqrt((sq[k][j] / reps - m * m) / reps);
      CHECK(std::abs(m - exact[k][j]) <= 4.0 * se);
    }
}

TEST_CASE("two observations: sampled segmentations match exact enumeration") {
  const TimeSeries data({0.0, 0.4}, {0.5, 1.9});
  Hyperparams hp;
  hp.delta = Vec3(1.0, 100.0, 1600.0);
  hp.segment_length = SegmentLengthPrior::geometric(0.4);
  const auto exact = oracle::enumerate_posterior(data, hp);
  std::map<std::vector<int>, double> truth, sampled;
  for (const auto& c : exact) {
    std::vector<int> key = c.changepoints;
    for (auto m : c.models) key.push_back(-static_cast<int>(m));
    truth[key] += c.probability;
  }
  const auto hist = run_filter(data, hp, {0.0, 0, 0});
  const std::size_t count = 100000;
  const auto draws = sample_segmentations(hist, data, hp, count, 3, false);
  for (const auto& d : draws) {
    std::vector<int> key = d.changepoints;
    for (auto m : d.models) key.push_back(-static_cast<int>(m));
    sampled[key] += 1.0 / count;
  }
  CHECK(oracle::total_variation(truth, sampled) <= 0.01);
}
