#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "ption/cli.hpp"

using namespace ption;
using namespace ption::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "ption_test_cli";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ption-cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      csv.comments.push_back(line);
    } else if (csv.header.empty()) {
      csv.header = split_commas(line);
    } else {
      csv.rows.push_back(split_commas(line));
    }
  }
  return csv;
}

double cell(const Csv& csv, std::size_t row, const std::string& col) {
  const auto it = std::find(csv.header.begin(), csv.header.end(), col);
  REQUIRE(it != csv.header.end());
  return std::stod(csv.rows[row][static_cast<std::size_t>(it - csv.header.begin())]);
}

double fit_khz(const Csv& csv) {
  for (const auto& c : csv.comments)
    if (c.rfind("# fit", 0) == 0) return std::stod(c.substr(c.find("gamma_hat_khz = ") + 16));
  return -1.0;
}

}  // namespace

TEST_CASE("config text parsing") {
  const ConfigValues v = parse_config_text("# comment\n\nomega_khz = 30  # trailing\n gamma_khz=0:10:3\n");
  CHECK(v.at("omega_khz") == "30");
  CHECK(v.at("gamma_khz") == "0:10:3");
  try {
    parse_config_text("omega_khz = 1\n\nbogus = 2\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("omega_khz 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("seed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("seed =\n"), ConfigError);
}

TEST_CASE("grid specs") {
  const GridSpec g = parse_grid("0:2:5");
  const auto v = grid_values(g);
  REQUIRE(v.size() == 5);
  CHECK(v[0] == 0.0);
  CHECK(v[2] == 1.0);
  CHECK(v[4] == 2.0);
  CHECK(grid_values(parse_grid("3.5")) == std::vector<double>{3.5});
  CHECK_THROWS_AS(parse_grid("0:1:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("a:1:3"), ConfigError);
}

TEST_CASE("initial states") {
  CHECK(parse_initial_state("ket0").kind == InitialKind::Ket0);
  CHECK(parse_initial_state("ket1").c1 == cplx{1.0, 0.0});
  const InitialState s = parse_initial_state("custom:3,0,4,0");
  CHECK(s.kind == InitialKind::Custom);
  CHECK(std::abs(s.c0 - 0.6) < 1e-15);
  CHECK(std::abs(s.c1 - 0.8) < 1e-15);
  CHECK_THROWS_AS(parse_initial_state("custom:0,0,0,0"), ConfigError);
  CHECK_THROWS_AS(parse_initial_state("custom:1,2"), ConfigError);
  CHECK_THROWS_AS(parse_initial_state("plus"), ConfigError);
}

TEST_CASE("config resolution") {
  const RunConfig exp = resolve_config(Command::Experiment, {});
  CHECK(exp.t_max_us == 100.0);
  CHECK(exp.n_samples == 20);
  CHECK(exp.n_shots == 800);
  CHECK(resolve_config(Command::Spectrum, {}).gamma_khz.count == 201);
  CHECK_THROWS_AS(resolve_config(Command::Evolve, {{"picture", "pt"}, {"levels", "3"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config(Command::Evolve, {{"omega_khz", "-1"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config(Command::Evolve, {{"gamma_khz", "0:10:5"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config(Command::Experiment, {{"n_shots", "-3"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config(Command::Evolve, {{"levels", "4"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config(Command::Evolve, {{"seed", "1.5"}}), ConfigError);
  CHECK(parse_command("order-params") == Command::OrderParams);
  CHECK_THROWS_AS(parse_command("plot"), ConfigError);
}

TEST_CASE("spectrum output") {
  const fs::path out = scratch_dir() / "spectrum.csv";
  REQUIRE(run_cli({"spectrum", "--gamma-khz", "0:64:101", "--output", out.string()}) == kExitOk);
  const Csv csv = parse_csv(slurp(out));
  REQUIRE(csv.rows.size() == 101);
  CHECK(csv.comments.front() == "# ption spectrum");
  // gamma = 0: Hermitian limit
  CHECK(cell(csv, 0, "im_e1") == 0.0);
  CHECK(cell(csv, 0, "im_e2") == 0.0);
  // EP row: coalescence
  CHECK(cell(csv, 50, "gamma_over_omega") == 1.0);
  CHECK(std::abs(cell(csv, 50, "re_e1")) < 1e-12);
  CHECK(std::abs(cell(csv, 50, "re_e2")) < 1e-12);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const cplx h1{cell(csv, r, "re_heff1"), cell(csv, r, "im_heff1")};
    const cplx h2{cell(csv, r, "re_heff2"), cell(csv, r, "im_heff2")};
    std::vector<cplx> combos;
    for (cplx a : {h1, h2})
      for (cplx b : {h1, h2}) combos.push_back(cplx{0.0, -1.0} * (a - std::conj(b)));
    for (int k = 1; k <= 4; ++k) {
      const cplx l{cell(csv, r, "re_l" + std::to_string(k)), cell(csv, r, "im_l" + std::to_string(k))};
      double best = 1e300;
      for (cplx c : combos) best = std::min(best, std::abs(c - l));
      CHECK(best < 1e-7);
    }
  }
}

TEST_CASE("evolve output and footer") {
  const fs::path out = scratch_dir() / "evolve.csv";
  REQUIRE(run_cli({"evolve", "--gamma-khz", "47", "--t-max-us", "60", "--n-samples", "61", "--output",
                   out.string()}) == kExitOk);
  const Csv csv = parse_csv(slurp(out));
  REQUIRE(csv.rows.size() == 61);
  CHECK(csv.header.size() == 9);
  CHECK(csv.rows[5][3].empty());
  const double w = oracle::khz(32.0), g = oracle::khz(47.0);
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const double t = cell(csv, r, "t_us") * 1e-6;
    CHECK(cell(csv, r, "rho00") == doctest::Approx(oracle::rho00_lossy(w, g, t)).epsilon(1e-7));
  }
  const std::string footer = csv.comments.back();
  REQUIRE(footer.find("max_abs_diff_numeric_vs_closed_form") != std::string::npos);
  CHECK(std::stod(footer.substr(footer.find('=') + 1)) < 1e-7);

  const fs::path three = scratch_dir() / "evolve3.csv";
  REQUIRE(run_cli({"evolve", "--levels", "3", "--output", three.string()}) == kExitOk);
  const Csv c3 = parse_csv(slurp(three));
  CHECK_FALSE(c3.rows[10][3].empty());
}

TEST_CASE("order-params output peaks at the EP") {
  const fs::path out = scratch_dir() / "order.csv";
  REQUIRE(run_cli({"order-params", "--n-points", "512", "--output", out.string()}) == kExitOk);
  const Csv csv = parse_csv(slurp(out));
  REQUIRE(csv.rows.size() == 40);
  std::size_t peak = 0;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    if (cell(csv, r, "sigma_y_numeric") > cell(csv, peak, "sigma_y_numeric")) peak = r;
    CHECK(std::abs(cell(csv, r, "sigma_y_numeric") - cell(csv, r, "sigma_y_analytic")) < 1e-3);
    CHECK(std::abs(cell(csv, r, "sigma_z_numeric") - cell(csv, r, "sigma_z_analytic")) < 1e-3);
  }
  CHECK(cell(csv, peak, "gamma_over_omega") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("turning-point output") {
  const fs::path out = scratch_dir() / "turning.csv";
  REQUIRE(run_cli({"turning-point", "--t-periods", "1,2", "--output", out.string()}) == kExitOk);
  const Csv csv = parse_csv(slurp(out));
  CHECK(csv.header == std::vector<std::string>{"gamma_over_omega", "rho00_1T", "rho00_2T"});
  int n_min = 0;
  for (const auto& c : csv.comments)
    if (c.rfind("# gamma_min", 0) == 0) ++n_min;
  CHECK(n_min == 2);
}

TEST_CASE("experiment round trip and shot CSV ingestion") {
  const fs::path dir = scratch_dir();
  const fs::path shots = dir / "shots.csv";
  REQUIRE(run_cli({"experiment", "--n-shots", "0", "--gamma-khz", "32", "--output", shots.string()}) == kExitOk);
  const fs::path pt = dir / "shots_pt.csv";
  REQUIRE(fs::exists(pt));
  const Csv pt_csv = parse_csv(slurp(pt));
  const double g_hat = fit_khz(pt_csv);
  CHECK(std::abs(g_hat - 32.0) / 32.0 < 1e-4);

  const fs::path noisy = dir / "noisy.csv";
  REQUIRE(run_cli({"experiment", "--seed", "5", "--output", noisy.string()}) == kExitOk);
  const std::string text = slurp(noisy);
  CHECK(text.find(std::string(kPrngAlgorithm)) != std::string::npos);
  std::istringstream in(text);
  const auto recs = read_shots_csv(in);
  CHECK(recs.size() == 20);
  CHECK(recs[0].n_shots == 800);

  const fs::path refit = dir / "refit.csv";
  const fs::path refit_pt = dir / "refit_pt_series.csv";
  REQUIRE(run_cli({"experiment", "--shots-input", noisy.string(), "--output", refit.string(), "--pt-output",
                   refit_pt.string()}) == kExitOk);
  // times are stored with 9 significant digits, so the refit agrees closely but not bitwise
  CHECK(fit_khz(parse_csv(slurp(refit_pt))) == doctest::Approx(fit_khz(parse_csv(slurp(dir / "noisy_pt.csv")))).epsilon(1e-6));

  std::istringstream bad("t_us,n_shots\n1,2\n");
  CHECK_THROWS_AS(read_shots_csv(bad), ConfigError);
}

TEST_CASE("config file with flag overrides") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = dir / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "# evolve settings\ngamma_khz = 47\nt_max_us = 10\nn_samples = 11\n";
  }
  const fs::path out = dir / "cfg.csv";
  REQUIRE(run_cli({"evolve", "--config", cfg.string(), "--n-samples", "6", "--output", out.string()}) == kExitOk);
  const Csv csv = parse_csv(slurp(out));
  CHECK(csv.rows.size() == 6);
  CHECK(std::find(csv.comments.begin(), csv.comments.end(), "# gamma_khz = 47") != csv.comments.end());
  CHECK(std::find(csv.comments.begin(), csv.comments.end(), "# n_samples = 6") != csv.comments.end());
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch_dir();
  const fs::path cfg = dir / "bad.cfg";
  {
    std::ofstream f(cfg);
    f << "gamma_khz = 1\ncolour = blue\n";
  }
  CHECK(run_cli({"evolve", "--config", cfg.string()}) == kExitConfig);
  CHECK(run_cli({"evolve", "--levels", "5"}) == kExitConfig);
  CHECK(run_cli({"evolve", "--no-such-flag", "1"}) == kExitConfig);
  CHECK(run_cli({}) == kExitConfig);
  CHECK(run_cli({"evolve", "--output", (dir / "missing" / "x.csv").string()}) == kExitIo);
  CHECK(run_cli({"evolve", "--config", (dir / "absent.cfg").string()}) == kExitIo);
  // e^{gamma t} beyond the overflow guard in the PT picture
  CHECK(run_cli({"evolve", "--picture", "pt", "--gamma-khz", "47", "--t-max-us", "3000", "--n-samples", "3",
                 "--output", (dir / "overflow.csv").string()}) == kExitNumerical);
}

TEST_CASE("commands are deterministic") {
  const fs::path dir = scratch_dir();
  const std::vector<std::vector<std::string>> cmds{
      {"spectrum", "--gamma-khz", "0:64:11"},
      {"evolve", "--gamma-khz", "10", "--n-samples", "21"},
      {"order-params", "--gamma-khz", "8:64:8", "--n-points", "256"},
      {"turning-point", "--t-periods", "1,5"},
      {"experiment", "--seed", "9"}};
  for (const auto& cmd : cmds) {
    std::vector<std::string> first = cmd, second = cmd;
    first.insert(first.end(), {"--output", (dir / "first.csv").string()});
    second.insert(second.end(), {"--output", (dir / "second.csv").string()});
    REQUIRE(run_cli(first) == kExitOk);
    REQUIRE(run_cli(second) == kExitOk);
    // the resolved output path is part of the header; compare the rest
    auto strip = [](std::string s) {
      const auto pos = s.find("# output = ");
      s.erase(pos, s.find('\n', pos) - pos);
      return s;
    };
    CHECK(strip(slurp(dir / "first.csv")) == strip(slurp(dir / "second.csv")));
  }
}
