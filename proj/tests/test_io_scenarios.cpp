// Copyright 2026 The paritysim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "paritysim/io.hpp"
#include "paritysim/scenarios.hpp"

using namespace paritysim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("paritysim_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir))
    files[entry.path().filename().string()] = slurp(entry.path());
  return files;
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("double formatting round-trips") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(0.25) == "0.25");
  CHECK(format_double(-2.0) == "-2");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(0.0125) == "0.0125");

  // strtod instead of stod: stod raises out_of_range on denormals.
  auto parse_back = [](const std::string& s) {
    return std::strtod(s.c_str(), nullptr);
  };
  Xoshiro256pp gen(424242);
  for (int k = 0; k < 200; ++k) {
    const double x = (gen.uniform() - 0.5) * std::pow(10.0, 12 * gen.uniform() - 6);
    CHECK(parse_back(format_double(x)) == x);
  }
  CHECK(parse_back(format_double(1e300)) == 1e300);
  CHECK(parse_back(format_double(5e-324)) == 5e-324);
}

TEST_CASE("CSV writers produce the documented tables") {
  TempDir tmp("io_csv");

  const SystemParams p = SystemParams::reference();
  const auto table =
      integrate_pointer_fields(p, DrivePulse::constant(0.5), 0.01, 1e-3);
  write_pointer_csv(tmp.path / "pointer.csv", table);
  auto pointer = lines_of(slurp(tmp.path / "pointer.csv"));
  REQUIRE(pointer.size() == 1 + 8 * (table.steps() + 1));
  CHECK(pointer[0] == "t,label,re_alpha,im_alpha,re_beta,im_beta,re_sigma,im_sigma");
  CHECK(pointer[1].rfind("0,0,", 0) == 0);

  TrajectoryRecord rec;
  rec.seed = 77;
  rec.s = 1.5;
  rec.final_state = projector(parity_target(+1));
  rec.current = {0.5, -0.25};
  TrajectoryRecord rec2 = rec;
  rec2.s = -3.0;
  rec2.final_state = projector(parity_target(-1));
  write_records_csv(tmp.path / "records.csv", {rec, rec2}, parity_target(+1),
                    parity_target(-1), 1.0, 1);
  auto records = lines_of(slurp(tmp.path / "records.csv"));
  REQUIRE(records.size() == 3);
  CHECK(records[0] ==
        "index,seed,s,outcome,true_parity,overlap_plus,overlap_minus,"
        "min_eigenvalue,max_trace_drift");
  CHECK(records[1].rfind("0,77,1.5,even,1,1,0,", 0) == 0);
  CHECK(records[2].rfind("1,77,-3,odd,-1,0,1,", 0) == 0);

  write_current_csv(tmp.path / "current.csv", rec, 0.5);
  auto current = lines_of(slurp(tmp.path / "current.csv"));
  REQUIRE(current.size() == 3);
  CHECK(current[0] == "t,j");
  CHECK(current[1] == "0,0.5");
  CHECK(current[2] == "0.5,-0.25");

  const auto hist = histogram({rec, rec2}, 2);
  write_histogram_csv(tmp.path / "hist.csv", hist);
  auto hlines = lines_of(slurp(tmp.path / "hist.csv"));
  REQUIRE(hlines.size() == 3);
  CHECK(hlines[0] == "bin_left,bin_right,count_even_true,count_odd_true");
  CHECK(hlines[1] == "-3,-0.75,0,1");
  CHECK(hlines[2] == "-0.75,1.5,1,0");

  std::vector<LeakagePoint> points(2);
  points[0] = {5.0, 0.25, 0.0125};
  points[1] = {10.0, 0.125, 0.005};
  write_leakage_csv(tmp.path / "leakage.csv", points);
  auto llines = lines_of(slurp(tmp.path / "leakage.csv"));
  REQUIRE(llines.size() == 3);
  CHECK(llines[0] == "sigma,quadrature_integral,orthogonal_integral");
  CHECK(llines[1] == "5,0.25,0.0125");

  ScanConfig sc;
  sc.kappa_min = sc.kappa_max = 1.0;
  sc.n_kappa = 1;
  sc.delta_min = 0.8;
  sc.delta_max = 3.2;
  sc.n_delta = 31;
  const auto report = parity_condition_scan(sc);
  write_scan_surface_csv(tmp.path / "surface.csv", report);
  write_scan_locus_csv(tmp.path / "locus.csv", report);
  auto surface = lines_of(slurp(tmp.path / "surface.csv"));
  REQUIRE(surface.size() == 1 + 8 * report.surface.size());
  CHECK(surface[0] == "kappa,delta,label,re_sigma,im_sigma");
  auto locus = lines_of(slurp(tmp.path / "locus.csv"));
  REQUIRE(locus.size() == 1 + report.locus.size());
  CHECK(locus[0] == "kappa,delta,full_coincidence");

  std::vector<ThresholdPoint> curve(1);
  curve[0].s_th = 2.0;
  curve[0].f_plus = 0.5;
  curve[0].accepted_fraction = 1.0;
  write_threshold_csv(tmp.path / "threshold.csv", curve);
  auto tlines = lines_of(slurp(tmp.path / "threshold.csv"));
  REQUIRE(tlines.size() == 2);
  CHECK(tlines[0] ==
        "s_th,f_plus,f_plus_err,f_minus,f_minus_err,accepted_fraction,"
        "n_even,n_odd");
  CHECK(tlines[1] == "2,0.5,nan,nan,nan,1,0,0");

  std::vector<FidelityVsTauPoint> ft(1);
  ft[0] = {10.0, 0.9, 0.8, 0.7};
  write_fidelity_vs_tau_csv(tmp.path / "ft.csv", ft);
  auto ftlines = lines_of(slurp(tmp.path / "ft.csv"));
  REQUIRE(ftlines.size() == 2);
  CHECK(ftlines[0] == "tau,f_plus,f_minus,accepted_fraction");
  CHECK(ftlines[1] == "10,0.9,0.8,0.7");
}

TEST_CASE("scenario config parsing") {
  json j;
  j["scenario"] = "transients";
  ScenarioConfig c = parse_scenario_config(j);
  CHECK(c.scenario == "transients");
  CHECK(c.kappa == 2.0);
  CHECK(c.delta == Catch::Approx(std::sqrt(3.0)));
  CHECK(c.n_delta == 121);
  CHECK(c.seed == 20260818u);
  CHECK(std::isnan(c.eps_ss));
  CHECK(!c.chi_hz.has_value());

  j["chi_hz"] = nullptr;
  CHECK(!parse_scenario_config(j).chi_hz.has_value());
  j["chi_hz"] = 2.0e6;
  CHECK(parse_scenario_config(j).chi_hz.value() == 2.0e6);

  j["amplitudes"] = json::array({1.0, json::array({0.0, 1.0}), 0.0, 0.0, 0.0,
                                 0.0, 0.0, 0.0});
  c = parse_scenario_config(j);
  REQUIRE(c.amplitudes.size() == 8);
  CHECK(c.amplitudes[0] == Complex(1.0, 0.0));
  CHECK(c.amplitudes[1] == Complex(0.0, 1.0));

  json bad = j;
  bad["banana"] = 1;
  CHECK_THROWS_AS(parse_scenario_config(bad), std::invalid_argument);
  bad = j;
  bad["scenario"] = "mystery";
  CHECK_THROWS_AS(parse_scenario_config(bad), std::invalid_argument);
  bad = j;
  bad["decoherence"] = "sometimes";
  CHECK_THROWS_AS(parse_scenario_config(bad), std::invalid_argument);
  bad = j;
  bad["amplitudes"] = json::array({1.0, 2.0});
  CHECK_THROWS_AS(parse_scenario_config(bad), std::invalid_argument);
  bad = j;
  bad["amplitudes"][3] = json::array({1.0, 2.0, 3.0});
  CHECK_THROWS_AS(parse_scenario_config(bad), std::invalid_argument);
  bad = j;
  bad["n_trajectories"] = -5;
  CHECK_THROWS_AS(parse_scenario_config(bad), std::invalid_argument);
  CHECK_THROWS_AS(parse_scenario_config(json::array({1, 2})),
                  std::invalid_argument);
}

TEST_CASE("an echoed config re-parses to the same run") {
  json j;
  j["scenario"] = "optimal";
  j["tau"] = 2.0;
  j["amplitudes"] = json::array({1.0, 0.0, 0.0, json::array({0.5, -0.5}), 0.0,
                                 0.0, 0.0, 0.0});
  const ScenarioConfig c1 = parse_scenario_config(j);
  const json echo = config_echo(c1);
  // Unset numbers echo as null and survive the trip back.
  CHECK(echo.at("eps_ss").is_null());
  CHECK(echo.at("t_on").is_null());
  const ScenarioConfig c2 = parse_scenario_config(echo);
  CHECK(config_echo(c2) == echo);
  CHECK(std::isnan(c2.eps_ss));
  CHECK(c2.tau == 2.0);
  CHECK(c2.amplitudes == c1.amplitudes);
}

TEST_CASE("initial state selection") {
  ScenarioConfig c;
  c.initial_state = "psi_pre";
  CHECK((initial_state_vector(c) - uniform_superposition()).norm() == 0.0);
  c.initial_state = "psi_plus";
  CHECK((initial_state_vector(c) - parity_target(+1)).norm() == 0.0);
  c.initial_state = "psi_minus";
  CHECK((initial_state_vector(c) - parity_target(-1)).norm() == 0.0);
  c.initial_state = "basis:101";
  CHECK((initial_state_vector(c) - basis_state(5)).norm() == 0.0);
  c.initial_state = "basis:000";
  CHECK((initial_state_vector(c) - basis_state(0)).norm() == 0.0);

  c.initial_state = "basis:12";
  CHECK_THROWS_AS(initial_state_vector(c), std::invalid_argument);
  c.initial_state = "basis:abc";
  CHECK_THROWS_AS(initial_state_vector(c), std::invalid_argument);
  c.initial_state = "vortex";
  CHECK_THROWS_AS(initial_state_vector(c), std::invalid_argument);

  c.initial_state = "amplitudes";
  CHECK_THROWS_AS(initial_state_vector(c), std::invalid_argument);
  c.amplitudes.assign(8, Complex(0.0, 0.0));
  CHECK_THROWS_AS(initial_state_vector(c), std::invalid_argument);
  c.amplitudes[0] = Complex(3.0, 0.0);
  c.amplitudes[7] = Complex(0.0, 4.0);
  const PureState psi = initial_state_vector(c);
  CHECK(psi.norm() == Catch::Approx(1.0));
  CHECK(psi(0).real() == Catch::Approx(0.6));
  CHECK(psi(7).imag() == Catch::Approx(0.8));
}

TEST_CASE("post-measurement targets") {
  const auto [plus, minus] = post_measurement_targets(uniform_superposition());
  CHECK((plus - parity_target(+1)).norm() < 1e-15);
  CHECK((minus - parity_target(-1)).norm() < 1e-15);

  // A fully even input leaves the odd target at the subspace default.
  const auto [p2, m2] = post_measurement_targets(basis_state(0));
  CHECK((p2 - basis_state(0)).norm() < 1e-15);
  CHECK((m2 - parity_target(-1)).norm() == 0.0);
}

TEST_CASE("steady-scan scenario writes the surface and locus") {
  TempDir tmp("scn_scan");
  json j;
  j["scenario"] = "steady-scan";
  j["out_dir"] = (tmp.path / "out").string();
  j["kappa_min"] = 1.0;
  j["kappa_max"] = 2.0;
  j["n_kappa"] = 2;
  j["delta_min"] = 0.8;
  j["delta_max"] = 3.2;
  j["n_delta"] = 21;
  const auto c = parse_scenario_config(j);
  run_scenario(c);

  const fs::path dir = tmp.path / "out";
  const auto summary = read_json(dir / "summary.json");
  CHECK(summary.at("reference_on_locus").get<bool>());
  CHECK(summary.at("n_surface_points").get<int>() == 42);
  CHECK(summary.at("n_locus_points").get<int>() >= 2);
  CHECK(summary.at("snr_empirical").is_null());

  auto surface = lines_of(slurp(dir / "surface.csv"));
  CHECK(surface.size() == 1u + 8u * 42u);
  CHECK(lines_of(slurp(dir / "records.csv")).size() == 1);
  CHECK(lines_of(slurp(dir / "histogram.csv")).size() == 1);
  CHECK(read_json(dir / "config.json").at("n_delta").get<int>() == 21);

  // An empty grid is a valid request for no data.
  json je = j;
  je["n_kappa"] = 0;
  je["n_delta"] = 0;
  je["out_dir"] = (tmp.path / "empty").string();
  run_scenario(parse_scenario_config(je));
  const auto s2 = read_json(tmp.path / "empty" / "summary.json");
  CHECK(s2.at("n_surface_points").get<int>() == 0);
  CHECK(s2.at("n_locus_points").get<int>() == 0);
  CHECK(s2.at("reference_on_locus").get<bool>());
  CHECK(lines_of(slurp(tmp.path / "empty" / "surface.csv")).size() == 1);
}

TEST_CASE("pointer-traj scenario records the transient") {
  TempDir tmp("scn_traj");
  json j;
  j["scenario"] = "pointer-traj";
  j["out_dir"] = (tmp.path / "out").string();
  j["tau"] = 6.0;
  j["dt"] = 2e-3;
  j["eps_ss"] = 0.5;
  j["chi_hz"] = 2.0e6;
  j["gamma_p"] = 0.0025;
  run_scenario(parse_scenario_config(j));

  const fs::path dir = tmp.path / "out";
  const auto summary = read_json(dir / "summary.json");
  CHECK(summary.at("phi_lo").get<double>() == 0.0);
  // By tau = 6 only the arctan drive tail separates the endpoint from the
  // steady state.
  CHECK(summary.at("endpoint_max_abs_err").get<double>() < 0.02);
  CHECK(summary.at("rate_parity").get<double>() > 0.0);
  CHECK(summary.at("rate_intra").get<double>() >= 0.0);
  const auto ann = summary.at("annotations");
  CHECK(ann.at("chi_hz").get<double>() == 2.0e6);
  CHECK(ann.at("t1_us").get<double>() == Catch::Approx(200.0));

  auto pointer = lines_of(slurp(dir / "pointer.csv"));
  CHECK(pointer.size() == 1u + 8u * 3001u);
}

TEST_CASE("transients scenario fans out over the integration-time grid") {
  TempDir tmp("scn_trans");
  json j;
  j["scenario"] = "transients";
  j["out_dir"] = (tmp.path / "out").string();
  j["tau_grid"] = json::array({1.0, 2.0});
  j["n_trajectories"] = 6;
  j["dt"] = 2e-3;
  j["s_th"] = 0.0;
  const auto c = parse_scenario_config(j);
  run_scenario(c);

  const fs::path dir = tmp.path / "out";
  CHECK(lines_of(slurp(dir / "records.csv")).size() == 7);
  CHECK(lines_of(slurp(dir / "records_tau2.csv")).size() == 7);
  CHECK(fs::exists(dir / "histogram.csv"));
  CHECK(fs::exists(dir / "histogram_tau2.csv"));

  const auto summary = read_json(dir / "summary.json");
  CHECK(summary.at("tau").get<double>() == 1.0);
  // eps on the default schedule keeps eps*sqrt(tau) fixed at 2.
  CHECK(summary.at("eps_ss").get<double>() == 2.0);
  CHECK(summary.at("accepted_fraction").get<double>() == 1.0);
  const auto& nested = summary.at("tau_2");
  CHECK(nested.at("tau").get<double>() == 2.0);
  CHECK(nested.at("eps_ss").get<double>() == Catch::Approx(std::sqrt(2.0)));
  CHECK(nested.at("snr_predicted").get<double>() > 0.0);

  // Same config, same bytes.
  const auto first = snapshot_dir(dir);
  run_scenario(c);
  CHECK(snapshot_dir(dir) == first);
}

TEST_CASE("efficiency scenario compares detector efficiencies") {
  TempDir tmp("scn_eff");
  json j;
  j["scenario"] = "efficiency";
  j["out_dir"] = (tmp.path / "out").string();
  j["etas"] = json::array({1.0, 0.5});
  j["tau"] = 2.0;
  j["n_trajectories"] = 4;
  j["dt"] = 2e-3;
  run_scenario(parse_scenario_config(j));

  const fs::path dir = tmp.path / "out";
  CHECK(lines_of(slurp(dir / "records.csv")).size() == 5);
  CHECK(lines_of(slurp(dir / "records_eta0.5.csv")).size() == 5);
  const auto summary = read_json(dir / "summary.json");
  CHECK(summary.at("eta").get<double>() == 1.0);
  const auto& half = summary.at("eta_0.5");
  CHECK(half.at("eta").get<double>() == 0.5);
  // Lower efficiency costs SNR at fixed drive and time.
  CHECK(half.at("snr_predicted").get<double>() <
        summary.at("snr_predicted").get<double>());
}

TEST_CASE("risetime scenario sweeps the pulse slew rate") {
  TempDir tmp("scn_rise");
  json j;
  j["scenario"] = "risetime";
  j["out_dir"] = (tmp.path / "out").string();
  j["sigmas"] = json::array({5.0, 10.0});
  j["dt"] = 2e-3;
  run_scenario(parse_scenario_config(j));

  const fs::path dir = tmp.path / "out";
  auto leakage = lines_of(slurp(dir / "leakage.csv"));
  REQUIRE(leakage.size() == 3);
  const auto summary = read_json(dir / "summary.json");
  CHECK(summary.at("n_sigma").get<int>() == 2);
  CHECK(summary.at("quadrature_integral_rel_variation").get<double>() >= 0.0);
}

TEST_CASE("optimal scenario writes the full report") {
  TempDir tmp("scn_opt");
  json j;
  j["scenario"] = "optimal";
  j["out_dir"] = (tmp.path / "out").string();
  j["tau"] = 2.0;
  j["tau_grid"] = json::array({1.0, 2.0});
  j["hist_taus"] = json::array({1.0});
  j["n_trajectories"] = 8;
  j["s_th"] = 2.0;
  j["s_th_grid"] = json::array({0.0, 1.0});
  j["dt"] = 2e-3;
  j["decoherence"] = "on";
  const auto c = parse_scenario_config(j);
  run_scenario(c);

  const fs::path dir = tmp.path / "out";
  // The echoed config carries the resolved decoherence rates.
  const auto echo = read_json(dir / "config.json");
  CHECK(echo.at("gamma_p").get<double>() == Catch::Approx(1.0 / 400.0));
  CHECK(echo.at("gamma_phi").get<double>() == Catch::Approx(1.0 / 300.0));

  CHECK(lines_of(slurp(dir / "records.csv")).size() == 9);
  CHECK(fs::exists(dir / "histogram_tau1.csv"));
  auto threshold = lines_of(slurp(dir / "threshold.csv"));
  REQUIRE(threshold.size() == 3);
  auto ft = lines_of(slurp(dir / "fidelity_vs_tau.csv"));
  REQUIRE(ft.size() == 3);
  auto bench = lines_of(slurp(dir / "benchmark.csv"));
  REQUIRE(bench.size() == 3);
  CHECK(bench[0] == "tau,f_plus_off,f_minus_off");

  const auto summary = read_json(dir / "summary.json");
  CHECK(summary.at("tau").get<double>() == 2.0);
  const double f_bench = summary.at("benchmark_f_plus").get<double>();
  CHECK(f_bench > 0.9);
  CHECK(f_bench < 1.0);

  // Feeding the echoed config back reproduces every byte.
  const auto first = snapshot_dir(dir);
  run_scenario(parse_scenario_config(echo));
  CHECK(snapshot_dir(dir) == first);
}
