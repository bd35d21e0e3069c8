#pragma once

// Command-line driver: config resolution and the five figure commands.
//
// Units at this boundary are kHz (ordinary frequency, converted with 2 pi)
// and microseconds. Every CSV starts with `#` comment lines holding the
// command name and the fully resolved config, then a header row. Floats are
// printed with 9 significant digits.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ption/dynamics.hpp"
#include "ption/measurement.hpp"

namespace ption::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

enum class Command { Spectrum, Evolve, OrderParams, TurningPoint, Experiment };

const char* to_string(Command c);
Command parse_command(std::string_view name);

/// Raw key -> value text, before defaults and validation.
using ConfigValues = std::map<std::string, std::string>;

/// Keys accepted in config files and as flags.
const std::vector<std::string>& known_keys();

/// `key = value` lines; blank lines and `#` comments (whole-line or
/// trailing) are ignored. Unknown keys, malformed lines and duplicates raise
/// ConfigError naming the 1-based line number.
ConfigValues parse_config_text(std::string_view text);
ConfigValues load_config_file(const std::string& path);

/// A single value (count = 1, start = stop) or start:stop:count with
/// count >= 2; values are start + (stop - start) i / (count - 1).
struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;
};

GridSpec parse_grid(std::string_view text);
std::vector<double> grid_values(const GridSpec& g);

enum class InitialKind { Ket0, Ket1, Custom };

/// custom:a,b,c,d is c0 = a + i b, c1 = c + i d, normalized.
struct InitialState {
  InitialKind kind = InitialKind::Ket0;
  cplx c0{1.0, 0.0};
  cplx c1{0.0, 0.0};
};

InitialState parse_initial_state(std::string_view text);

struct RunConfig {
  Command command = Command::Evolve;
  double omega_khz = 32.0;
  GridSpec gamma_khz;
  double t_max_us = 50.0;
  int n_samples = 501;
  InitialState initial_state;
  std::uint64_t seed = 1;
  std::int64_t n_shots = 800;  ///< 0 = noiseless
  std::string output = "-";    ///< "-" is stdout
  Picture picture = Picture::Lossy;
  int levels = 2;
  std::vector<double> t_periods{1, 2, 5, 10, 50};  ///< turning-point times in units of 2 pi / Omega
  int n_points = 4096;
  std::string pt_output;   ///< experiment: PT-series CSV; empty derives it from `output`
  std::string shots_input; ///< experiment: fit an existing shot CSV instead of simulating

  /// Resolved values in a fixed key order, as written to CSV headers.
  std::vector<std::pair<std::string, std::string>> describe() const;
};

/// Applies per-command defaults, then the given values, then validates.
RunConfig resolve_config(Command command, const ConfigValues& values);

void run_spectrum(const RunConfig& cfg, std::ostream& out);
/// Returns max |numeric - reference| over all entries and samples (lossy
/// picture), also written as a footer comment.
double run_evolve(const RunConfig& cfg, std::ostream& out);
void run_order_params(const RunConfig& cfg, std::ostream& out);
void run_turning_point(const RunConfig& cfg, std::ostream& out);
FitResult run_experiment(const RunConfig& cfg, std::ostream& shots_out, std::ostream& pt_out, std::ostream& log);

std::vector<ShotRecord> read_shots_csv(std::istream& in);

/// Opens outputs, dispatches, and maps exceptions to exit codes.
int run(const RunConfig& cfg, std::ostream& err);

/// Full command line entry point.
int cli_main(int argc, const char* const* argv);

}  // namespace ption::cli
