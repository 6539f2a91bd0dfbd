#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>

#include "CLI11.hpp"
#include "segdep/evaluation.hpp"
#include "segdep/io.hpp"
#include "segdep/synthesis.hpp"

using namespace segdep;
namespace fs = std::filesystem;

namespace {

io::Config load_config(const std::string& path) { return path.empty() ? io::Config{} : io::Config::load(path); }

SyntheticSpec synthetic_spec(const io::Config& cfg) {
  SyntheticSpec spec;
  const auto n = cfg.get_int("n", 256);
  if (n < 2) throw InvalidArgument("n must be >= 2");
  spec.n = static_cast<int>(n);
  spec.hp = io::fit_options_from_config(cfg, spec.n).hp;
  const std::string s2 = cfg.get_string("sigma2", "1");
  if (s2 == "prior")
    spec.sigma2.reset();
  else
    spec.sigma2 = cfg.get_double("sigma2", 1.0);
  const std::string gen = cfg.get_string("generator", "quadratic");
  if (gen == "cubic")
    spec.generator = PiecewiseCubic{cfg.get_double("cubic_d", 100.0)};
  else if (gen != "quadratic")
    throw InvalidArgument("generator must be 'quadratic' or 'cubic'");
  return spec;
}

std::string format_hyperparams(const Hyperparams& hp) {
  std::string out;
  out += "p: " + io::format_double(hp.segment_length.p()) + "\n";
  out += "delta: " + io::format_double(hp.delta[0]) + " " + io::format_double(hp.delta[1]) + " " +
         io::format_double(hp.delta[2]) + "\n";
  return out;
}

int cmd_fit(const std::string& data_path, const std::string& config_path, const std::string& prefix) {
  const auto start = std::chrono::steady_clock::now();
  const io::Config cfg = load_config(config_path);
  const io::SeriesFile file = io::read_series(data_path);
  const TimeSeries& data = file.series;
  const FitOptions opts = io::fit_options_from_config(cfg, data.n());
  const double hw = cfg.get_double("window_halfwidth", 0.001);
  if (!(hw > 0.0)) throw InvalidArgument("window_halfwidth must be > 0");

  const FitResult res = fit(data, opts, Execution::Parallel);
  const auto mean = posterior_mean_curve(res.draws, data);
  const auto band = credible_band(res.draws, data, 0.9);

  std::string curve = "t,x,posterior_mean,lo90,hi90,p_discontinuity_window\n";
  for (int t = 1; t <= data.n(); ++t) {
    const auto i = static_cast<std::size_t>(t - 1);
    const double x = data.x_at(t);
    curve += std::to_string(t) + "," + io::format_double(x) + "," + io::format_double(mean[i]) + "," +
             io::format_double(band.lo[i]) + "," + io::format_double(band.hi[i]) + "," +
             io::format_double(discontinuity_probability(res.draws, x - hw, x + hw, data)) + "\n";
  }
  std::string draws = "draw_id,changepoint_x,model\n";
  for (std::size_t d = 0; d < res.draws.size(); ++d) {
    const auto& draw = res.draws[d];
    for (std::size_t k = 0; k < draw.changepoints.size(); ++k)
      draws += std::to_string(d) + "," + io::format_double(changepoint_x(data, draw.changepoints[k])) + "," +
               to_string(draw.models[k + 1]) + "\n";
  }
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string summary;
  summary += "log_evidence: " + io::format_double(res.log_evidence) + "\n";
  summary += "mean_changepoints: " + io::format_double(mean_changepoint_count(res.draws)) + "\n";
  summary += "n: " + std::to_string(data.n()) + "\n";
  summary += "n_draws: " + std::to_string(res.draws.size()) + "\n";
  summary += "total_particles: " + std::to_string(res.total_particles) + "\n";
  summary += format_hyperparams(res.hp);
  summary += "runtime_seconds: " + io::format_double(runtime) + "\n";

  io::write_file_atomic(prefix + "_curve.csv", curve);
  io::write_file_atomic(prefix + "_draws.csv", draws);
  io::write_file_atomic(prefix + "_summary.txt", summary);
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out) {
  const io::Config cfg = load_config(config_path);
  const SyntheticSpec spec = synthetic_spec(cfg);
  Rng rng = make_stream(cfg.get_seed("seed", 1), 0);
  const SyntheticData sim = simulate_from_prior(spec, rng);
  io::write_file_atomic(out, io::series_to_csv(sim.data, &sim.z));
  return 0;
}

int cmd_calibrate(const std::string& config_path, const std::string& out_dir) {
  const io::Config cfg = load_config(config_path);
  StudyConfig study;
  study.data = synthetic_spec(cfg);
  study.analysis = io::fit_options_from_config(cfg, study.data.n);
  study.replicates = static_cast<int>(cfg.get_int("replicates", 100));
  study.coverage_level = cfg.get_double("coverage_level", 0.9);
  study.seed = cfg.get_seed("seed", 1);
  if (study.replicates < 1) throw InvalidArgument("replicates must be >= 1");
  const auto results = run_study(study, Execution::Parallel);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const auto R = results.size();

  std::string q_sigma = "replicate,q_sigma\n";
  std::string table = "replicate,q_sigma,mse,coverage,mean_changepoints,true_changepoints\n";
  std::vector<double> qs;
  std::vector<double> pooled;
  for (std::size_t r = 0; r < R; ++r) {
    const auto& res = results[r];
    qs.push_back(res.q_sigma);
    pooled.insert(pooled.end(), res.q_z.begin(), res.q_z.end());
    q_sigma += std::to_string(r) + "," + io::format_double(res.q_sigma) + "\n";
    table += std::to_string(r) + "," + io::format_double(res.q_sigma) + "," + io::format_double(res.mse) + "," +
             io::format_double(res.coverage) + "," + io::format_double(res.mean_changepoints) + "," +
             std::to_string(res.true_changepoints) + "\n";
  }

  auto qq = [](std::vector<double> v, const std::string& name) {
    std::sort(v.begin(), v.end());
    std::string out = "rank,uniform," + name + "\n";
    for (std::size_t i = 0; i < v.size(); ++i)
      out += std::to_string(i + 1) + "," + io::format_double((static_cast<double>(i) + 0.5) / static_cast<double>(v.size())) +
             "," + io::format_double(v[i]) + "\n";
    return out;
  };

  double mean_mse = 0.0, mean_cov = 0.0;
  for (const auto& res : results) {
    mean_mse += res.mse / static_cast<double>(R);
    mean_cov += res.coverage / static_cast<double>(R);
  }
  const double ks = ks_uniform(qs);
  std::string summary;
  summary += "replicates: " + std::to_string(R) + "\n";
  summary += "ks_q_sigma: " + io::format_double(ks) + "\n";
  summary += "ks_critical_10pct: " + io::format_double(1.224 / std::sqrt(static_cast<double>(R))) + "\n";
  summary += "ks_q_z_pooled: " + io::format_double(ks_uniform(pooled)) + "\n";
  summary += "mean_mse: " + io::format_double(mean_mse) + "\n";
  summary += "mean_coverage: " + io::format_double(mean_cov) + "\n";

  io::write_file_atomic(dir / "q_sigma.csv", q_sigma);
  io::write_file_atomic(dir / "q_sigma_qq.csv", qq(qs, "q_sigma"));
  io::write_file_atomic(dir / "q_z_qq.csv", qq(pooled, "q_z"));
  io::write_file_atomic(dir / "study.csv", table);
  io::write_file_atomic(dir / "summary.txt", summary);
  return 0;
}

int cmd_power(const std::string& config_path, const std::string& base_path, const std::string& out) {
  const io::Config cfg = load_config(config_path);
  PowerConfig base;
  if (base_path.empty()) {
    base.base_x = equally_spaced_grid(1001);
    for (double x : base.base_x) base.base_z.push_back(default_power_curve(x));
  } else {
    const io::Table t = io::read_table(base_path);
    base.base_x = t.column("x");
    base.base_z = t.column(t.column_index("z") ? "z" : "y");
    for (std::size_t i = 1; i < base.base_x.size(); ++i)
      if (!(base.base_x[i - 1] < base.base_x[i]))
        throw InvalidArgument(base_path + ":" + std::to_string(t.lines[i]) + ": x must be strictly increasing");
  }
  base.sigma = std::sqrt(cfg.get_double("sigma2", 0.09));
  base.replicates = static_cast<int>(cfg.get_int("replicates", 20));
  base.window_halfwidth = cfg.get_double("window_halfwidth", 0.01);
  base.seed = cfg.get_seed("seed", 1);

  std::string table = "c,x_c,n,mean_probability,std_error,replicates\n";
  for (double n_real : cfg.get_list("power_n", {200.0})) {
    const int n = static_cast<int>(n_real);
    if (n != n_real || n < 2) throw InvalidArgument("power_n entries must be integers >= 2");
    for (double x_c : cfg.get_list("power_xc", {0.3})) {
      for (double c : cfg.get_list("power_c", {0.0, 1.0, 2.0, 3.0})) {
        PowerConfig pc = base;
        pc.n = n;
        pc.x_c = x_c;
        pc.c = c;
        pc.analysis = io::fit_options_from_config(cfg, n);
        const PowerResult res = run_power(pc, Execution::Parallel);
        table += io::format_double(c) + "," + io::format_double(x_c) + "," + std::to_string(n) + "," +
                 io::format_double(res.mean) + "," + io::format_double(res.std_error) + "," +
                 std::to_string(pc.replicates) + "\n";
      }
    }
  }
  io::write_file_atomic(out, table);
  return 0;
}

int cmd_eb(const std::string& data_path, const std::string& config_path, const std::string& out) {
  io::Config cfg = load_config(config_path);
  const io::SeriesFile file = io::read_series(data_path);
  const FitOptions opts = io::fit_options_from_config(cfg, file.series.n());
  const auto iterations = cfg.get_int("eb_iterations", 3);
  const Hyperparams hp = empirical_bayes(file.series, opts.hp, static_cast<int>(iterations == 0 ? 3 : iterations),
                                         opts.eb_draws, opts.seed, opts.resample, Execution::Parallel);
  cfg.set("p", io::format_double(hp.segment_length.p()));
  cfg.set("delta0", io::format_double(hp.delta[0]));
  cfg.set("delta1", io::format_double(hp.delta[1]));
  cfg.set("delta2", io::format_double(hp.delta[2]));
  cfg.set("eb_iterations", "0");
  io::write_file_atomic(out, cfg.to_text());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads_from_env();
  CLI::App app{"Bayesian multiple-changepoint regression with continuous and discontinuous changepoints"};
  app.require_subcommand(1);

  std::string data, config, out;

  auto* fit_cmd = app.add_subcommand("fit", "Fit a series and write curve, draws and summary files");
  fit_cmd->add_option("data", data, "Input CSV with x,y (and optional z) columns")->required();
  fit_cmd->add_option("-c,--config", config, "Config file");
  fit_cmd->add_option("-o,--out", out, "Output prefix")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a series from the prior");
  sim_cmd->add_option("-c,--config", config, "Config file");
  sim_cmd->add_option("-o,--out", out, "Output CSV")->required();

  auto* cal_cmd = app.add_subcommand("calibrate", "Exact-model calibration study");
  cal_cmd->add_option("-c,--config", config, "Config file");
  cal_cmd->add_option("-o,--out", out, "Output directory")->required();

  std::string base;
  auto* pow_cmd = app.add_subcommand("power", "Power to detect an injected jump");
  pow_cmd->add_option("-c,--config", config, "Config file");
  pow_cmd->add_option("-b,--base", base, "Base curve CSV with x and z (or y) columns");
  pow_cmd->add_option("-o,--out", out, "Output CSV")->required();

  auto* eb_cmd = app.add_subcommand("eb", "Empirical Bayes estimates of p and D0");
  eb_cmd->add_option("data", data, "Input CSV")->required();
  eb_cmd->add_option("-c,--config", config, "Starting config file");
  eb_cmd->add_option("-o,--out", out, "Output config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*fit_cmd) return cmd_fit(data, config, out);
    if (*sim_cmd) return cmd_simulate(config, out);
    if (*cal_cmd) return cmd_calibrate(config, out);
    if (*pow_cmd) return cmd_power(config, base, out);
    if (*eb_cmd) return cmd_eb(data, config, out);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
