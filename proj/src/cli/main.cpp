#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <iostream>

#include "ption/cli.hpp"

namespace ption::cli {

namespace {

const char* key_help(const std::string& key) {
  if (key == "omega_khz") return "Rabi frequency Omega / 2 pi in kHz";
  if (key == "gamma_khz") return "loss rate gamma / 2 pi in kHz: value or start:stop:count";
  if (key == "t_max_us") return "final time in microseconds";
  if (key == "n_samples") return "number of output time samples";
  if (key == "initial_state") return "ket0, ket1 or custom:a,b,c,d (c0 = a+ib, c1 = c+id)";
  if (key == "seed") return "PRNG seed";
  if (key == "n_shots") return "shots per time point (0 = noiseless)";
  if (key == "output") return "output CSV path, - for stdout";
  if (key == "picture") return "lossy or pt";
  if (key == "levels") return "2 or 3";
  if (key == "t_periods") return "comma list of evaluation times in units of 2 pi / Omega";
  if (key == "n_points") return "samples per period for order-parameter averages";
  if (key == "pt_output") return "experiment: PT-series CSV path";
  if (key == "shots_input") return "experiment: fit this shot CSV instead of simulating";
  return "";
}

const char* command_help(Command c) {
  switch (c) {
    case Command::Spectrum: return "eigenvalues of H_PT, H_eff and the Liouvillian over a gamma grid";
    case Command::Evolve: return "density-matrix trajectory with a cross-check footer";
    case Command::OrderParams: return "order parameters Sigma_Z and Sigma_Y over a gamma grid";
    case Command::TurningPoint: return "rho00 at fixed times versus gamma, with gamma_min";
    case Command::Experiment: return "simulated shot data, gamma fit and PT-picture series";
  }
  return "";
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Passive PT-symmetric qubit simulator"};
  app.require_subcommand(1);

  const std::vector<Command> commands{Command::Spectrum, Command::Evolve, Command::OrderParams, Command::TurningPoint,
                                      Command::Experiment};
  std::string config_path;
  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<CLI::App*, std::vector<std::pair<std::string, CLI::Option*>>>> subs;
  for (Command c : commands) {
    CLI::App* sub = app.add_subcommand(to_string(c), command_help(c));
    sub->add_option("--config", config_path, "key = value config file; flags override it");
    std::vector<std::pair<std::string, CLI::Option*>> opts;
    for (const auto& key : known_keys()) {
      std::string kebab = key;
      std::replace(kebab.begin(), kebab.end(), '_', '-');
      const std::string names = kebab == key ? "--" + key : "--" + key + ",--" + kebab;
      opts.emplace_back(key, sub->add_option(names, flag_values[key], key_help(key))->allow_extra_args(false));
    }
    subs.emplace_back(sub, std::move(opts));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i].first->parsed()) continue;
    try {
      ConfigValues values;
      if (!config_path.empty()) values = load_config_file(config_path);
      for (const auto& [key, opt] : subs[i].second)
        if (opt->count() > 0) values[key] = flag_values[key];
      return run(resolve_config(commands[i], values), std::cerr);
    } catch (const ConfigError& e) {
      fmt::print(std::cerr, "config error: {}\n", e.what());
      return kExitConfig;
    } catch (const IoError& e) {
      fmt::print(std::cerr, "i/o error: {}\n", e.what());
      return kExitIo;
    }
  }
  return kExitConfig;
}

}  // namespace ption::cli
