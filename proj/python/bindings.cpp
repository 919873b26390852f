#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "paraswap/config.hpp"
#include "paraswap/error_analysis.hpp"
#include "paraswap/errors.hpp"
#include "paraswap/experiments.hpp"
#include "paraswap/tomography.hpp"

namespace py = pybind11;
using namespace paraswap;

namespace {

ModelSpec model_from(const std::string& kind, int levels) {
  if (kind == "two_level") return ModelSpec::two_level();
  if (kind == "transmon") return ModelSpec::transmon(levels);
  throw InvalidArgument("model must be 'two_level' or 'transmon'");
}

py::dict calibration_dict(const GateCalibration& c) {
  py::dict d;
  d["amplitude"] = c.pulse.amplitude;
  d["drive_frequency"] = c.pulse.omega_drive;
  d["swap_time"] = c.swap_time;
  d["transfer"] = c.transfer;
  d["max_coupler_population"] = c.max_coupler_population;
  d["virtual_z"] = std::make_pair(c.virtual_z_q1, c.virtual_z_q2);
  d["coherent_fidelity"] = c.coherent_fidelity;
  return d;
}

class Device {
 public:
  explicit Device(const std::string& path) : cfg_(load_config(path)) {}

  const DeviceParams& params() const { return cfg_.device; }
  double point_phi(int i) const {
    return params().coupler_flux_map.to_phi(cfg_.points.at(static_cast<std::size_t>(i)).flux_mv);
  }
  std::vector<std::pair<std::string, double>> points() const {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& p : cfg_.points) out.emplace_back(p.name, p.flux_mv);
    return out;
  }
  const RunConfig& config() const { return cfg_; }

 private:
  RunConfig cfg_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "paraswap core bindings";

  static py::handle base = py::exception<Error>(m, "ParaswapError", PyExc_RuntimeError).release();
  static py::handle config_error = py::exception<ConfigError>(m, "ConfigError", base).release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(config_error, e.what());
    } catch (const Error& e) {
      py::set_error(base, (e.code() + ": " + e.what()).c_str());
    }
  });

  py::class_<Device>(m, "Device")
      .def(py::init<const std::string&>(), py::arg("config_path"))
      .def_property_readonly("operating_points", &Device::points)
      .def("point_phi", &Device::point_phi, py::arg("index"))
      .def("coupler_frequency", [](const Device& d, double phi) { return coupler_frequency(d.params(), phi); })
      .def("flux_for_coupler_frequency",
           [](const Device& d, double w) { return flux_for_coupler_frequency(d.params(), w); })
      .def("effective_coupling_j12", [](const Device& d, double phi) { return effective_coupling_j12(d.params(), phi); })
      .def("j12_derivative", [](const Device& d, double phi, int order) { return j12_derivative(d.params(), phi, order); },
           py::arg("phi"), py::arg("order") = 1)
      .def("static_zz", [](const Device& d, double phi, int levels) { return static_zz(d.params(), phi, levels); },
           py::arg("phi"), py::arg("levels") = 3)
      .def("find_off_flux", [](const Device& d) { return find_off_flux(d.params()); })
      .def("find_zero_zz_flux", [](const Device& d, int levels) { return find_zero_zz_flux(d.params(), levels); },
           py::arg("levels") = 3);

  m.def("validate_config", [](const std::string& text) {
    return validate_config(nlohmann::json::parse(text, nullptr, true, true));
  }, py::arg("json_text"), "Problems found in a configuration document; empty when valid.");

  m.def("calibrate_gate", [](const Device& d, int point, const std::string& model, int levels) {
    CalibrationOptions opt = d.config().calibration_options();
    opt.spec = model_from(model, levels);
    return calibration_dict(calibrate_gate(d.params(), d.point_phi(point), d.config().gate.time, opt));
  }, py::arg("device"), py::arg("point"), py::arg("model") = "two_level", py::arg("levels") = 3);

  m.def("run_error_budget", [](const Device& d, const std::string& model, int levels) {
    BudgetOptions opt = d.config().budget_options();
    opt.calibration.spec = model_from(model, levels);
    std::vector<PointResult> res;
    {
      py::gil_scoped_release release;
      res = run_error_budget(d.params(), d.config().points, opt);
    }
    py::list out;
    for (const auto& r : res) {
      py::dict p;
      p["name"] = r.point.name;
      p["coupler_frequency"] = r.coupler_freq;
      p["static_zz"] = r.static_zz;
      p["fidelity"] = r.budget.fidelity;
      p["delta_dec"] = r.budget.delta_dec;
      p["delta_zz"] = r.budget.delta_zz;
      p["delta_coh"] = r.budget.delta_coh_limit;
      p["delta_osc"] = r.budget.delta_osc;
      p["h_zz"] = r.budget.h_zz;
      p["calibration"] = calibration_dict(r.calibration);
      p["chi_error"] = r.qpt.error.chi_err;
      out.append(p);
    }
    return out;
  }, py::arg("device"), py::arg("model") = "two_level", py::arg("levels") = 3);

  m.def("iswap", &iswap);
  m.def("pauli_labels", [] {
    const auto& l = pauli_labels();
    return std::vector<std::string>(l.begin(), l.end());
  });
  m.def("ideal_chi", [](const Mat4& u) { return ideal_chi(u).chi; }, py::arg("unitary"));
  m.def("process_fidelity", [](const Mat16& a, const Mat16& b) {
    ProcessMatrix x, y;
    x.chi = a;
    y.chi = b;
    return process_fidelity(x, y);
  });
  m.def("error_matrix", [](const Mat16& chi, const Mat4& target) {
    ProcessMatrix p;
    p.chi = chi;
    return error_matrix(p, target).chi_err;
  }, py::arg("chi"), py::arg("target"));
  m.def("dynamic_zz", [](const Mat16& chi_err, double gate_time) {
    ErrorMatrix e;
    e.chi_err = chi_err;
    return dynamic_zz(e, gate_time).h_zz;
  }, py::arg("chi_err"), py::arg("gate_time"));
  m.def("decoherence_error", [](const Mat16& chi_err) {
    ErrorMatrix e;
    e.chi_err = chi_err;
    return decoherence_error(e).delta;
  }, py::arg("chi_err"));
  m.def("coherence_budget", &coherence_budget, py::arg("t1_q1"), py::arg("t1_q2"), py::arg("tphi_q1"),
        py::arg("tphi_q2"), py::arg("gate_time"));
  m.def("fit_fidelity_decay", [](const std::vector<std::pair<int, double>>& pts) {
    const DecayFit f = fit_fidelity_decay(pts);
    py::dict d;
    d["A"] = f.a;
    d["P"] = f.p;
    d["A_err"] = f.a_err;
    d["P_err"] = f.p_err;
    return d;
  }, py::arg("points"));
}
