#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "stabreg/config.hpp"
#include "stabreg/errors.hpp"
#include "stabreg/experiment.hpp"
#include "stabreg/io.hpp"
#include "stabreg/simulate.hpp"
#include "stabreg/stability.hpp"
#include "stabreg/stats.hpp"
#include "stabreg/version.hpp"

namespace {

using namespace stabreg;

std::vector<double> parse_sweep(const std::string& text) {
  // start:stop:step, inclusive of the stop within rounding slack
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw ConfigError("sweep format is start:stop:step");
  }
  const double start = std::stod(text.substr(0, c1));
  const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(text.substr(c2 + 1));
  if (!(step > 0) || stop < start) throw ConfigError("sweep needs stop >= start and step > 0");
  std::vector<double> out;
  for (double v = start; v <= stop + 1e-9; v += step) out.push_back(std::min(v, stop));
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto end = comma == std::string::npos ? text.size() : comma;
    if (end > pos) out.push_back(text.substr(pos, end - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int cmd_region(const std::string& config_path, double theta, bool theta_given,
               int n_dirs, const std::string& out_path, const std::string& svg_path) {
  const ParsedConfig cfg = load_config_file(config_path);
  const double th = theta_given ? theta : cfg.scenario.pred.theta;
  const Region2D region = region_hull_2d(cfg.scenario.net, cfg.scenario.model, th, n_dirs);
  write_text_atomic(out_path, region_csv(region));
  if (!svg_path.empty()) {
    write_text_atomic(svg_path, region_svg({{"theta=" + format_double(th), region}}));
  }
  std::cout << "region: theta=" << format_double(th) << " vertices="
            << region.vertices.size() << " area=" << format_double(region.area)
            << " -> " << out_path << "\n";
  return 0;
}

int cmd_reserve(const std::string& config_path, double theta, bool theta_given,
                const std::string& sweep, const std::string& out_path) {
  const ParsedConfig cfg = load_config_file(config_path);
  std::vector<double> thetas;
  if (!sweep.empty()) {
    thetas = parse_sweep(sweep);
  } else {
    thetas.push_back(theta_given ? theta : cfg.scenario.pred.theta);
  }
  std::vector<std::pair<double, double>> rows;
  for (double th : thetas) {
    const ReserveResult rr =
        reserve_demand(cfg.scenario.net, cfg.scenario.model, cfg.scenario.demand.base, th);
    rows.emplace_back(th, rr.eps_max);
  }
  write_text_atomic(out_path, reserve_csv(rows));
  std::cout << "reserve: " << rows.size() << " point(s), eps_max["
            << format_double(rows.front().first) << "]=" << format_double(rows.front().second);
  if (rows.size() > 1) {
    std::cout << " .. eps_max[" << format_double(rows.back().first)
              << "]=" << format_double(rows.back().second);
  }
  std::cout << " -> " << out_path << "\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& controller,
                 std::uint64_t seed, bool seed_given, long horizon, bool horizon_given,
                 double theta, bool theta_given, const std::string& out_path) {
  ParsedConfig cfg = load_config_file(config_path);
  if (!controller.empty() && controller != cfg.controller.type) {
    cfg.controller = ControllerSpec{};
    cfg.controller.type = controller;
  }
  if (seed_given) cfg.scenario.seed = seed;
  if (horizon_given) cfg.scenario.horizon = horizon;
  if (theta_given) cfg.scenario.pred.theta = theta;
  auto ctrl = make_controller(cfg.controller, cfg.scenario, cfg.scenario.net);
  const Trace tr = run(cfg.scenario, *ctrl);
  write_text_atomic(out_path, trace_csv(tr));
  const StabilityStats ss = stability_stats(tr);
  std::cout << "simulate: controller=" << ctrl->name() << " T=" << tr.horizon
            << " rate_stat=" << format_double(ss.rate_stat)
            << " entered=" << tr.entered << " exited=" << tr.exited << " -> "
            << out_path << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& kind,
              const std::string& controllers, const std::string& thetas_text,
              const std::string& guesses, int reps, std::uint64_t base_seed,
              int jobs, double increment, double period, const std::string& thresholds_text,
              long max_intervals, bool ramp_all, const std::string& out_path) {
  ParsedConfig cfg = load_config_file(config_path);
  const Provenance prov{fnv1a64(cfg.raw), base_seed};

  if (kind == "reserve_ramp") {
    RampConfig rc;
    rc.increment_veh_h = increment;
    rc.period_s = period;
    rc.max_intervals = max_intervals;
    rc.ramp_all_movements = ramp_all;
    if (!thresholds_text.empty()) {
      rc.thresholds.clear();
      for (const std::string& item : split_list(thresholds_text)) {
        rc.thresholds.push_back(std::stol(item));
      }
    }
    if (!controllers.empty()) {
      const auto list = split_list(controllers);
      if (list.size() != 1) throw ConfigError("reserve_ramp takes one controller");
      if (list[0] != cfg.controller.type) {
        cfg.controller = ControllerSpec{};
        cfg.controller.type = list[0];
      }
    }
    const RampReport report = run_reserve_experiment(
        cfg.scenario, controller_factory(cfg.controller, cfg.scenario), rc, reps,
        base_seed, jobs);
    write_text_atomic(out_path, ramp_csv(report, prov));
    std::cout << "reserve_ramp: " << reps << " replication(s) x "
              << report.thresholds.size() << " threshold(s)";
    for (std::size_t k = 0; k < report.thresholds.size(); ++k) {
      std::cout << " | thr " << report.thresholds[k]
                << ": mean eps_hat=" << format_double(report.summary[k].mean) << " veh/h";
    }
    std::cout << " -> " << out_path << "\n";
    return 0;
  }

  if (kind == "delay_sweep") {
    std::vector<DelayCell> cells;
    const auto ctrl_list =
        controllers.empty() ? std::vector<std::string>{cfg.controller.type}
                            : split_list(controllers);
    std::vector<double> theta_list{cfg.scenario.pred.theta};
    if (!thetas_text.empty()) {
      theta_list.clear();
      for (const std::string& item : split_list(thetas_text)) {
        theta_list.push_back(std::stod(item));
      }
    }
    std::vector<GuessStrategy> guess_list{cfg.scenario.pred.guess};
    if (guesses == "mean_point") {
      guess_list = {GuessStrategy::MeanPoint};
    } else if (guesses == "empirical") {
      guess_list = {GuessStrategy::Empirical};
    } else if (guesses == "both") {
      guess_list = {GuessStrategy::MeanPoint, GuessStrategy::Empirical};
    } else if (!guesses.empty()) {
      throw ConfigError("guess must be mean_point, empirical, or both");
    }
    for (const std::string& name : ctrl_list) {
      ControllerSpec spec = cfg.controller;
      if (name != cfg.controller.type) {
        spec = ControllerSpec{};
        spec.type = name;
      }
      for (double th : theta_list) {
        for (GuessStrategy g : guess_list) {
          Scenario for_factory = cfg.scenario;
          for_factory.pred.theta = th;
          for_factory.pred.guess = g;
          cells.push_back({name, controller_factory(spec, for_factory), th, g});
        }
      }
    }
    const DelayReport report =
        run_delay_sweep(cfg.scenario, cells, reps, base_seed, jobs);
    write_text_atomic(out_path, delay_csv(report, prov));
    std::cout << "delay_sweep: " << cells.size() << " cell(s) x " << reps
              << " replication(s) -> " << out_path << "\n";
    return 0;
  }

  throw ConfigError("sweep kind must be reserve_ramp or delay_sweep");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-supply traffic network toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path, out_path, svg_path, controller, sweep_text;
  std::string kind, controllers, thetas_text, guesses, thresholds_text;
  double theta = 1.0;
  int n_dirs = 64;
  std::uint64_t seed = 0;
  long horizon = 0;
  int reps = 30;
  std::uint64_t base_seed = 1;
  int jobs = 1;
  double increment = 5.0, period = 60.0;
  long max_intervals = 20000;
  bool ramp_all = false;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario document")->required();
    cmd->add_option("--out", out_path, "output CSV path")->required();
  };

  // `stability` and `region` are the same computation under both names.
  CLI::App* region_cmd = app.add_subcommand("region", "stability region of a 2-movement network");
  CLI::App* stability_cmd = app.add_subcommand("stability", "alias of region");
  CLI::Option *region_theta = nullptr, *stability_theta = nullptr;
  for (CLI::App* cmd : {region_cmd, stability_cmd}) {
    add_common(cmd);
    CLI::Option* opt = cmd->add_option("--theta", theta, "information ability");
    (cmd == region_cmd ? region_theta : stability_theta) = opt;
    cmd->add_option("--n-dirs", n_dirs, "frontier sweep directions");
    cmd->add_option("--svg", svg_path, "optional SVG plot path");
  }

  CLI::App* reserve_cmd = app.add_subcommand("reserve", "maximum uniform demand reserve");
  add_common(reserve_cmd);
  CLI::Option* reserve_theta = reserve_cmd->add_option("--theta", theta, "information ability");
  reserve_cmd->add_option("--theta-sweep", sweep_text, "start:stop:step grid");

  CLI::App* sim_cmd = app.add_subcommand("simulate", "one seeded simulation run");
  add_common(sim_cmd);
  sim_cmd->add_option("--controller", controller, "bp|pwbp|lescbp|fixed|sfronly");
  CLI::Option* sim_seed = sim_cmd->add_option("--seed", seed, "run seed");
  CLI::Option* sim_horizon = sim_cmd->add_option("--horizon", horizon, "intervals");
  CLI::Option* sim_theta = sim_cmd->add_option("--theta", theta, "information ability");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "replicated experiment protocols");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--kind", kind, "reserve_ramp|delay_sweep")->required();
  sweep_cmd->add_option("--controllers", controllers, "comma list");
  sweep_cmd->add_option("--thetas", thetas_text, "comma list");
  sweep_cmd->add_option("--guess", guesses, "mean_point|empirical|both");
  sweep_cmd->add_option("--reps", reps, "replications");
  sweep_cmd->add_option("--base-seed", base_seed, "seed of replication 0");
  sweep_cmd->add_option("--jobs", jobs, "worker threads");
  sweep_cmd->add_option("--increment", increment, "ramp increment, veh/h");
  sweep_cmd->add_option("--period", period, "ramp period, seconds");
  sweep_cmd->add_option("--thresholds", thresholds_text, "comma list of stack thresholds");
  sweep_cmd->add_option("--max-intervals", max_intervals, "ramp horizon");
  sweep_cmd->add_flag("--ramp-all", ramp_all, "ramp interior movements too");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*region_cmd || *stability_cmd) {
      const bool given = (*region_cmd && region_theta->count() > 0) ||
                         (*stability_cmd && stability_theta->count() > 0);
      return cmd_region(config_path, theta, given, n_dirs, out_path, svg_path);
    }
    if (*reserve_cmd) {
      return cmd_reserve(config_path, theta, reserve_theta->count() > 0, sweep_text,
                         out_path);
    }
    if (*sim_cmd) {
      return cmd_simulate(config_path, controller, seed, sim_seed->count() > 0, horizon,
                          sim_horizon->count() > 0, theta, sim_theta->count() > 0,
                          out_path);
    }
    if (*sweep_cmd) {
      return cmd_sweep(config_path, kind, controllers, thetas_text, guesses, reps,
                       base_seed, jobs, increment, period, thresholds_text,
                       max_intervals, ramp_all, out_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
