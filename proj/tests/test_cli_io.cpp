#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "common.hpp"
#include "paraswap/config.hpp"
#include "paraswap/errors.hpp"
#include "paraswap/io.hpp"

using namespace paraswap;
using json = nlohmann::json;

namespace {

json reference_doc() {
  std::ifstream in(test::reference_config_path());
  return json::parse(in, nullptr, true, true);
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

// One physically or syntactically invalid edit of a valid document.
void break_config(json& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  const char* qubit = u(rng) < 0.5 ? "q1" : "q2";
  switch (std::uniform_int_distribution<int>(0, 23)(rng)) {
    case 0: d["device"][qubit]["freq_ghz"] = -x; break;
    case 1: d["device"][qubit]["anharmonicity_ghz"] = -x; break;
    case 2: d["device"][qubit]["t2_us"] = 2.0 * d["device"][qubit]["t1_us"].get<double>() + 1.0 + x; break;
    case 3: d["device"][qubit]["t1_us"] = -1.0 - x; break;
    case 4: d["device"]["coupler"]["asymmetry"] = 1.0 + x; break;
    case 5: d["device"]["coupler"]["flux_map"]["mv_per_phi0"] = 0.0; break;
    case 6: d["device"]["couplings"]["g1_mhz"] = -1.0 - 100 * x; break;
    case 7: d["device"].erase(u(rng) < 0.5 ? "couplings" : "coupler"); break;
    case 8: d["crosstalk"] = json::array({{1, 2, 3}, {2, 4, 6}, {0, 0, 1}}); break;
    case 9: d["crosstalk"] = json::array({{1, 0}, {0, 1}}); break;
    case 10: d["readout"] = {{"q1_f0", 0.3 * x}, {"q1_f1", 0.9}, {"q2_f0", 0.9}, {"q2_f1", 0.9}}; break;
    case 11: d["prep_depolarizing"] = 1.0 + x; break;
    case 12: d["operating_points"][0]["flux_mv"] = 55.082 - 899.443 * (0.5 + x); break;
    case 13: d["operating_points"] = json::array(); break;
    case 14: d["gate"]["ramp_ns"] = 102.0 + 100 * x; break;
    case 15: d["gate"]["time_ns"] = -x; break;
    case 16: d["model"] = {{"kind", "qutrit"}}; break;
    case 17: d["experiment"] = "bogus-" + std::to_string(static_cast<int>(1000 * x)); break;
    case 18: d["shots"] = 100 + static_cast<int>(1000 * x); d.erase("seed"); break;
    case 19: d["shots"] = -static_cast<int>(1000 * x); break;
    case 20: d["threads"] = 0; break;
    case 21: d["experiments"]["j12-sweep"]["coupler_ghz"]["stop"] = 6.0 + x; break;
    case 22: d["experiments"]["swap-spec"]["coupler_ghz"] = {{"start", 5.9}, {"stop", 5.5 - x}, {"points", 11}}; break;
    default: d["unexpected_" + std::to_string(static_cast<int>(100 * x))] = x; break;
  }
}

}  // namespace

TEST_SUITE("cli_io") {

TEST_CASE("crosstalk correction") {
  CrosstalkMatrix id;
  const Eigen::Vector3d v(1.5, -2.0, 3.0);
  CHECK((apply_crosstalk_correction(v, id) - v).norm() == 0.0);
  const CrosstalkMatrix& ref = test::reference().crosstalk;
  const Eigen::Vector3d c = apply_crosstalk_correction(Eigen::Vector3d(1, 0, 0), ref);
  CHECK(c(0) == doctest::Approx(0.9963));
  CHECK(c(1) == doctest::Approx(-0.0798));
  CHECK(c(2) == doctest::Approx(-0.0116));
  CHECK(ref.diagonally_dominant());

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int k = 0; k < 100; ++k) {
    Eigen::Matrix3d response = Eigen::Matrix3d::Identity();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) response(i, j) += u(rng);
    CrosstalkMatrix m{response.inverse()};
    m.validate();
    CHECK((m.m * response - Eigen::Matrix3d::Identity()).norm() < 1e-6);
    CHECK((apply_crosstalk_correction(response * v, m) - v).norm() < 1e-9);
  }
  CrosstalkMatrix singular{Eigen::Matrix3d::Zero()};
  CHECK_THROWS_AS(singular.validate(), InvalidArgument);
}

TEST_CASE("reference configuration") {
  const RunConfig& c = test::reference();
  CHECK(c.points.size() == 4);
  CHECK(units::to_ghz(c.device.coupler.freq_max) == doctest::Approx(5.977));
  CHECK(units::to_mhz(c.device.g1) == doctest::Approx(76.9));
  CHECK(c.device.t1_q1 == doctest::Approx(14e-6));
  // 1/Tφ = 1/T2 − 1/(2T1)
  CHECK(c.device.tphi_q1 == doctest::Approx(12e-6));
  CHECK(c.seed.has_value());
  CHECK_FALSE(c.shots.has_value());
  CHECK(validate_config(reference_doc()).empty());
}

TEST_CASE("empty configuration lists the missing keys") {
  const auto errors = validate_config(json::object());
  CHECK(mentions(errors, "device: missing required key"));
  CHECK(mentions(errors, "operating_points: missing required key"));
  CHECK_THROWS_AS(parse_config(json::object()), ConfigError);
  json partial = reference_doc();
  partial["device"]["q1"].erase("t1_us");
  CHECK(mentions(validate_config(partial), "device.q1.t1_us: missing required key"));
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("fuzzed invalid configurations fail in validation") {
  std::mt19937_64 rng(2024);
  const json base = reference_doc();
  int rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    json d = base;
    const int edits = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < edits; ++k) break_config(d, rng);
    const auto errors = validate_config(d);
    CAPTURE(d.dump());
    CHECK_FALSE(errors.empty());
    try {
      parse_config(d);
    } catch (const ConfigError&) {
      ++rejected;
    }
  }
  CHECK(rejected == 1000);
}

TEST_CASE("decay-fit twirl flag") {
  json d = reference_doc();
  CHECK_FALSE(parse_config(d).decay_fit.twirl);
  d["experiments"]["decay-fit"]["twirl"] = true;
  CHECK(parse_config(d).decay_fit.twirl);
  d["experiments"]["decay-fit"]["twirl"] = 1;
  CHECK(mentions(validate_config(d), "experiments.decay-fit.twirl"));
}

TEST_CASE("sweep range") {
  SweepRange r{1.0, 2.0, 5};
  const auto v = r.values();
  REQUIRE(v.size() == 5);
  CHECK(v.front() == 1.0);
  CHECK(v.back() == 2.0);
  CHECK(v[2] == doctest::Approx(1.5));
}

TEST_CASE("CSV formatting") {
  CHECK(io::format_cell(0.1) == "0.1");
  CHECK(io::format_cell(1.0 / 3.0) == "0.333333333333");
  CHECK(io::format_cell(static_cast<long long>(42)) == "42");
  CHECK(io::format_cell(std::string("a,b")) == "\"a,b\"");
  CHECK(io::format_cell(std::string("say \"hi\"")) == "\"say \"\"hi\"\"\"");
  CHECK(io::format_cell(std::nan("")) == "nan");
  const std::string csv = io::to_csv({"x", "y"}, {{1.0, 2.0}, {3.0, std::string("z")}});
  CHECK(csv == "x,y\r\n1,2\r\n3,z\r\n");
  CHECK_THROWS_AS(io::to_csv({"x"}, {{1.0, 2.0}}), InvalidArgument);
}

TEST_CASE("chi CSV layout") {
  const std::string csv = io::chi_csv(ideal_chi(Mat4::Identity()).chi);
  std::istringstream in(csv);
  std::string line;
  int lines = 0;
  std::getline(in, line);
  CHECK(line.rfind("re_II,im_II,re_IX", 0) == 0);
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 16);
  const json meta = io::chi_metadata(false, std::nullopt, std::nullopt);
  CHECK(meta["basis_order"][15] == "ZZ");
  CHECK(meta["shots"] == "exact");
}

TEST_CASE("resolved configuration reports file units") {
  const json j = test::reference().to_json();
  CHECK(j["device"]["q1"]["t2_us"].get<double>() == doctest::Approx(8.4));
  CHECK(j["device"]["coupler"]["freq_max_ghz"].get<double>() == doctest::Approx(5.977));
  CHECK(j["seed"] == 20240607);
}

TEST_CASE("plot scripts exist for every experiment") {
  for (const auto& name : experiment_names()) {
    if (name == "qpt") continue;
    CHECK_FALSE(io::plot_script(name, name + ".csv").empty());
  }
  CHECK_FALSE(io::plot_script("chi", "chi.csv").empty());
  CHECK_THROWS_AS(io::plot_script("nothing", "x.csv"), InvalidArgument);
}

}  // TEST_SUITE
