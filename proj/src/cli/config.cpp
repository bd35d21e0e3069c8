#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ption/cli.hpp"

namespace ption::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    parts.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

double parse_real(std::string_view key, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, text));
  return v;
}

template <class Int>
Int parse_integer(std::string_view key, std::string_view text) {
  text = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError(fmt::format("{}: '{}' is not an integer", key, text));
  return v;
}

std::string fmt_real(double v) { return fmt::format("{}", v); }

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::Spectrum: return "spectrum";
    case Command::Evolve: return "evolve";
    case Command::OrderParams: return "order-params";
    case Command::TurningPoint: return "turning-point";
    case Command::Experiment: return "experiment";
  }
  return "?";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::Spectrum, Command::Evolve, Command::OrderParams, Command::TurningPoint,
                    Command::Experiment})
    if (name == to_string(c)) return c;
  throw ConfigError(fmt::format("unknown command '{}'", name));
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{"omega_khz", "gamma_khz", "t_max_us",  "n_samples", "initial_state",
                                             "seed",      "n_shots",   "output",    "picture",   "levels",
                                             "t_periods", "n_points",  "pt_output", "shots_input"};
  return keys;
}

ConfigValues parse_config_text(std::string_view text) {
  ConfigValues values;
  const auto& keys = known_keys();
  int line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("line {}: expected 'key = value'", line_no));
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
    if (value.empty()) throw ConfigError(fmt::format("line {}: empty value for '{}'", line_no, key));
    if (!values.emplace(key, value).second)
      throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, key));
  }
  return values;
}

ConfigValues load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config file '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

GridSpec parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  GridSpec g;
  if (parts.size() == 1) {
    g.start = g.stop = parse_real("gamma_khz", parts[0]);
    return g;
  }
  if (parts.size() != 3) throw ConfigError(fmt::format("gamma_khz: '{}' is neither a value nor start:stop:count", text));
  g.start = parse_real("gamma_khz", parts[0]);
  g.stop = parse_real("gamma_khz", parts[1]);
  g.count = parse_integer<int>("gamma_khz", parts[2]);
  if (g.count < 2) throw ConfigError("gamma_khz: grid count must be at least 2");
  return g;
}

std::vector<double> grid_values(const GridSpec& g) {
  if (g.count == 1) return {g.start};
  std::vector<double> v(static_cast<std::size_t>(g.count));
  for (int i = 0; i < g.count; ++i) v[static_cast<std::size_t>(i)] = g.start + (g.stop - g.start) * i / (g.count - 1);
  v.back() = g.stop;
  return v;
}

InitialState parse_initial_state(std::string_view text) {
  text = trim(text);
  InitialState s;
  if (text == "ket0") return s;
  if (text == "ket1") {
    s.kind = InitialKind::Ket1;
    s.c0 = 0.0;
    s.c1 = 1.0;
    return s;
  }
  if (text.substr(0, 7) == "custom:") {
    const auto parts = split(text.substr(7), ',');
    if (parts.size() != 4) throw ConfigError("initial_state: custom needs four reals a,b,c,d");
    double x[4];
    for (int i = 0; i < 4; ++i) x[i] = parse_real("initial_state", parts[static_cast<std::size_t>(i)]);
    const double norm = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
    if (!(norm > 1e-12)) throw ConfigError("initial_state: custom amplitudes are zero");
    s.kind = InitialKind::Custom;
    s.c0 = cplx{x[0], x[1]} / norm;
    s.c1 = cplx{x[2], x[3]} / norm;
    return s;
  }
  throw ConfigError(fmt::format("initial_state: '{}' is not ket0, ket1 or custom:a,b,c,d", text));
}

RunConfig resolve_config(Command command, const ConfigValues& values) {
  RunConfig cfg;
  cfg.command = command;
  switch (command) {
    case Command::Spectrum:
      cfg.gamma_khz = {0.0, 64.0, 201};
      break;
    case Command::Evolve:
      cfg.gamma_khz = {1.0, 1.0, 1};
      break;
    case Command::OrderParams:
      cfg.gamma_khz = {1.6, 64.0, 40};
      break;
    case Command::TurningPoint:
      cfg.gamma_khz = {0.0, 96.0, 301};
      break;
    case Command::Experiment:
      cfg.gamma_khz = {10.0, 10.0, 1};
      cfg.t_max_us = 100.0;
      cfg.n_samples = 20;
      break;
  }

  for (const auto& [key, value] : values) {
    if (key == "omega_khz") cfg.omega_khz = parse_real(key, value);
    else if (key == "gamma_khz") cfg.gamma_khz = parse_grid(value);
    else if (key == "t_max_us") cfg.t_max_us = parse_real(key, value);
    else if (key == "n_samples") cfg.n_samples = parse_integer<int>(key, value);
    else if (key == "initial_state") cfg.initial_state = parse_initial_state(value);
    else if (key == "seed") cfg.seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "n_shots") cfg.n_shots = parse_integer<std::int64_t>(key, value);
    else if (key == "output") cfg.output = value;
    else if (key == "picture") {
      if (value == "lossy") cfg.picture = Picture::Lossy;
      else if (value == "pt") cfg.picture = Picture::PT;
      else throw ConfigError(fmt::format("picture: '{}' is not lossy or pt", value));
    } else if (key == "levels") cfg.levels = parse_integer<int>(key, value);
    else if (key == "t_periods") {
      cfg.t_periods.clear();
      for (auto part : split(value, ',')) cfg.t_periods.push_back(parse_real(key, part));
    } else if (key == "n_points") cfg.n_points = parse_integer<int>(key, value);
    else if (key == "pt_output") cfg.pt_output = value;
    else if (key == "shots_input") cfg.shots_input = value;
    else throw ConfigError(fmt::format("unknown key '{}'", key));
  }

  if (!(cfg.omega_khz > 0.0)) throw ConfigError("omega_khz must be positive");
  for (double g : grid_values(cfg.gamma_khz))
    if (!(g >= 0.0)) throw ConfigError("gamma_khz values must be non-negative");
  if (!(cfg.t_max_us > 0.0)) throw ConfigError("t_max_us must be positive");
  if (cfg.n_samples < 2) throw ConfigError("n_samples must be at least 2");
  if (cfg.n_shots < 0) throw ConfigError("n_shots must be >= 1, or 0 for noiseless mode");
  if (cfg.levels != 2 && cfg.levels != 3) throw ConfigError("levels must be 2 or 3");
  if (cfg.n_points < 64) throw ConfigError("n_points must be at least 64");
  if (cfg.t_periods.empty()) throw ConfigError("t_periods must not be empty");
  for (double t : cfg.t_periods)
    if (!(t > 0.0)) throw ConfigError("t_periods entries must be positive");
  if (cfg.output.empty()) throw ConfigError("output must not be empty");
  if ((command == Command::Evolve || command == Command::Experiment) && cfg.gamma_khz.count != 1)
    throw ConfigError(fmt::format("{} takes a single gamma_khz value", to_string(command)));
  if (command == Command::Evolve && cfg.picture == Picture::PT && cfg.levels == 3)
    throw ConfigError("picture = pt is only defined for levels = 2");
  return cfg;
}

std::vector<std::pair<std::string, std::string>> RunConfig::describe() const {
  std::string gamma = fmt_real(gamma_khz.start);
  if (gamma_khz.count != 1) gamma = fmt::format("{}:{}:{}", fmt_real(gamma_khz.start), fmt_real(gamma_khz.stop), gamma_khz.count);
  std::string state = "ket0";
  if (initial_state.kind == InitialKind::Ket1) state = "ket1";
  if (initial_state.kind == InitialKind::Custom)
    state = fmt::format("custom:{},{},{},{}", fmt_real(initial_state.c0.real()), fmt_real(initial_state.c0.imag()),
                        fmt_real(initial_state.c1.real()), fmt_real(initial_state.c1.imag()));
  std::string periods;
  for (std::size_t i = 0; i < t_periods.size(); ++i) periods += (i ? "," : "") + fmt_real(t_periods[i]);

  return {{"omega_khz", fmt_real(omega_khz)},
          {"gamma_khz", gamma},
          {"t_max_us", fmt_real(t_max_us)},
          {"n_samples", std::to_string(n_samples)},
          {"initial_state", state},
          {"seed", std::to_string(seed)},
          {"n_shots", std::to_string(n_shots)},
          {"output", output},
          {"picture", picture == Picture::PT ? "pt" : "lossy"},
          {"levels", std::to_string(levels)},
          {"t_periods", periods},
          {"n_points", std::to_string(n_points)},
          {"pt_output", pt_output},
          {"shots_input", shots_input}};
}

}  // namespace ption::cli
