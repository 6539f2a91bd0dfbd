#include "doctest.h"

#include <cmath>

#include "segdep/evaluation.hpp"
#include "segdep/synthesis.hpp"

using namespace segdep;

namespace {

SegmentationDraw flat(double level, double sigma2) {
  SegmentationDraw d;
  d.models = {ModelKind::Discontinuous};
  d.sigma2 = sigma2;
  d.beta = {Vec3(level, 0.0, 0.0)};
  return d;
}

SegmentationDraw jump_at(int tau, ModelKind m) {
  SegmentationDraw d;
  d.changepoints = {tau};
  d.models = {ModelKind::Discontinuous, m};
  d.sigma2 = 1.0;
  d.beta = {Vec3::Zero(), Vec3::Zero()};
  return d;
}

}  // namespace

TEST_CASE("posterior quantiles count ties as below") {
  const TimeSeries data({0.0, 1.0}, {0.0, 0.0});
  const std::vector<SegmentationDraw> draws{flat(0.0, 0.5), flat(1.0, 1.0), flat(2.0, 2.0), flat(3.0, 3.0)};
  const std::vector<double> truth{1.0, 1.0};
  const auto q = posterior_quantiles(draws, data, truth, 1.0);
  CHECK(q.q_z[0] == 0.5);
  CHECK(q.q_sigma == 0.5);
}

TEST_CASE("mse and posterior mean curve") {
  CHECK(mse(std::vector<double>{1.0, 2.0}, std::vector<double>{0.0, 0.0}) == 2.5);
  CHECK_THROWS_AS(mse(std::vector<double>{1.0}, std::vector<double>{}), InvalidArgument);
  const TimeSeries data({0.0, 1.0}, {0.0, 0.0});
  const std::vector<SegmentationDraw> draws{flat(1.0, 1.0), flat(3.0, 1.0)};
  CHECK(posterior_mean_curve(draws, data) == std::vector<double>{2.0, 2.0});
}

TEST_CASE("credible band interpolates order statistics") {
  const TimeSeries data({0.0, 1.0}, {0.0, 0.0});
  std::vector<SegmentationDraw> draws;
  for (int i = 0; i <= 100; ++i) draws.push_back(flat(i, 1.0));
  const auto band = credible_band(draws, data, 0.9);
  CHECK(band.lo[0] == doctest::Approx(5.0));
  CHECK(band.hi[1] == doctest::Approx(95.0));
  CHECK(coverage(draws, data, std::vector<double>{50.0, 99.0}, 0.9) == 0.5);
  CHECK_THROWS_AS(credible_band(draws, data, 1.0), InvalidArgument);
}

TEST_CASE("changepoint position and discontinuity probability") {
  const TimeSeries data({0.0, 0.1, 0.2, 0.3, 0.4}, {0, 0, 0, 0, 0});
  CHECK(changepoint_x(data, 2) == doctest::Approx(0.15));
  const std::vector<SegmentationDraw> draws{jump_at(2, ModelKind::Discontinuous), jump_at(2, ModelKind::Continuous),
                                            jump_at(3, ModelKind::Discontinuous), flat(0.0, 1.0)};
  CHECK(discontinuity_probability(draws, 0.1, 0.2, data) == 0.25);
  CHECK(discontinuity_probability(draws, 0.1, 0.3, data) == 0.5);
  CHECK(mean_changepoint_count(draws) == 0.75);
}

TEST_CASE("Kolmogorov-Smirnov distance") {
  CHECK(ks_uniform({0.5}) == 0.5);
  CHECK(ks_uniform({0.25, 0.75}) == doctest::Approx(0.25));
  CHECK(ks_uniform({0.0, 0.0}) == 1.0);
  CHECK_THROWS_AS(ks_uniform({}), InvalidArgument);
}

TEST_CASE("fit is reproducible and policy independent") {
  SyntheticSpec spec;
  spec.n = 120;
  spec.hp.segment_length = SegmentLengthPrior::geometric(0.03);
  Rng rng = make_stream(30, 0);
  const auto sim = simulate_from_prior(spec, rng);
  FitOptions opts;
  opts.hp.segment_length = SegmentLengthPrior::geometric(0.03);
  opts.n_draws = 50;
  opts.seed = 7;
  const auto a = fit(sim.data, opts, Execution::Serial);
  const auto b = fit(sim.data, opts, Execution::Parallel);
  CHECK(a.log_evidence == b.log_evidence);
  CHECK(a.total_particles == b.total_particles);
  REQUIRE(a.draws.size() == 50);
  for (std::size_t i = 0; i < a.draws.size(); ++i) {
    CHECK(a.draws[i].changepoints == b.draws[i].changepoints);
    CHECK(a.draws[i].sigma2 == b.draws[i].sigma2);
  }
}

TEST_CASE("empirical Bayes keeps hyperparameters valid") {
  SyntheticSpec spec;
  spec.n = 150;
  spec.hp.segment_length = SegmentLengthPrior::geometric(0.02);
  Rng rng = make_stream(31, 0);
  const auto sim = simulate_from_prior(spec, rng);
  Hyperparams hp0;
  hp0.segment_length = SegmentLengthPrior::geometric(1.0 / 150);
  hp0.delta = Vec3(10.0, 1e4, 1.6e6);
  const auto hp = empirical_bayes(sim.data, hp0, 2, 100, 3);
  CHECK_NOTHROW(hp.validate());
  CHECK(hp.segment_length.p() >= 0.1 / 150);
  CHECK(hp.segment_length.p() <= 0.5);
  CHECK(hp.delta[1] >= 1e-8);
  CHECK(hp.nu0 == hp0.nu0);
  CHECK_THROWS_AS(empirical_bayes(sim.data, hp0, 0, 100, 3), InvalidArgument);
  Hyperparams general = hp0;
  general.segment_length = SegmentLengthPrior::general({0.5}, 0.1);
  CHECK_THROWS_AS(empirical_bayes(sim.data, general, 1, 10, 3), InvalidArgument);
}

TEST_CASE("small study and power runs") {
  StudyConfig study;
  study.data.n = 60;
  study.data.hp.segment_length = SegmentLengthPrior::geometric(0.05);
  study.analysis.hp = study.data.hp;
  study.analysis.n_draws = 40;
  study.replicates = 3;
  study.seed = 4;
  const auto a = run_study(study, Execution::Serial);
  const auto b = run_study(study, Execution::Parallel);
  REQUIRE(a.size() == 3);
  for (std::size_t r = 0; r < a.size(); ++r) {
    CHECK(a[r].q_sigma == b[r].q_sigma);
    CHECK(a[r].mse == b[r].mse);
    CHECK(a[r].q_z.size() == 60);
    CHECK(a[r].coverage >= 0.0);
    CHECK(a[r].coverage <= 1.0);
  }

  PowerConfig power;
  power.base_x = equally_spaced_grid(50);
  for (double x : power.base_x) power.base_z.push_back(default_power_curve(x));
  power.n = 80;
  power.replicates = 2;
  power.analysis.n_draws = 30;
  power.analysis.hp.segment_length = SegmentLengthPrior::geometric(4.0 / 80);
  const auto res = run_power(power);
  CHECK(res.probabilities.size() == 2);
  CHECK(res.mean >= 0.0);
  CHECK(res.mean <= 1.0);
}

TEST_CASE("one empirical Bayes iteration moves p up from 1/n toward the truth") {
  int moved = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SyntheticSpec spec;
    spec.n = 256;
    spec.hp.segment_length = SegmentLengthPrior::geometric(4.0 / 256);
    Rng rng = make_stream(40, seed);
    const auto sim = simulate_from_prior(spec, rng);
    Hyperparams hp0 = spec.hp;
    hp0.segment_length = SegmentLengthPrior::geometric(1.0 / 256);
    const auto hp = empirical_bayes(sim.data, hp0, 1, 200, seed);
    if (hp.segment_length.p() > 1.0 / 256) ++moved;
  }
  CHECK(moved >= 18);
}
