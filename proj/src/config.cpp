#include "paraswap/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "paraswap/errors.hpp"
#include "paraswap/log.hpp"

namespace paraswap {

using nlohmann::json;

bool CrosstalkMatrix::diagonally_dominant() const {
  for (int i = 0; i < 3; ++i) {
    double off = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (j != i) off += std::abs(m(i, j));
    }
    if (!(std::abs(m(i, i)) > off)) return false;
  }
  return true;
}

void CrosstalkMatrix::validate() const {
  if (!m.allFinite()) throw InvalidArgument("crosstalk matrix entries must be finite");
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
  const auto& s = svd.singularValues();
  if (!(s(2) > 1e-12 * s(0))) throw InvalidArgument("crosstalk matrix is singular");
  if (!diagonally_dominant()) log::warn("crosstalk matrix is not diagonally dominant");
}

Eigen::Vector3d apply_crosstalk_correction(const Eigen::Vector3d& requested,
                                           const CrosstalkMatrix& matrix) {
  matrix.validate();
  return matrix.m * requested;
}

std::vector<double> SweepRange::values() const {
  std::vector<double> v(static_cast<std::size_t>(std::max(points, 0)));
  for (int i = 0; i < points; ++i) {
    v[i] = points == 1 ? start : start + (stop - start) * i / (points - 1);
  }
  return v;
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"j12-sweep", "zz-sweep",     "chevron",
                                              "swap-spec", "qpt",          "error-budget",
                                              "decay-fit", "calibrate"};
  return names;
}

CalibrationOptions RunConfig::calibration_options() const {
  CalibrationOptions c;
  c.spec = model;
  c.ramp = gate.ramp;
  return c;
}

QptSettings RunConfig::qpt_settings() const {
  QptSettings s;
  s.qpt.confusion = confusion;
  s.qpt.shots = shots;
  s.qpt.seed = seed.value_or(0);
  s.qpt.prep_depolarizing = prep_depolarizing;
  s.qpt.threads = threads;
  return s;
}

BudgetOptions RunConfig::budget_options() const {
  BudgetOptions b;
  b.calibration = calibration_options();
  b.qpt = qpt_settings();
  b.gate_time = gate.time;
  b.zz_levels = zz_levels;
  b.threads = threads;
  return b;
}

namespace {

double tphi_from_t2(double t1, double t2) {
  // 1/T2 = 1/(2T1) + 1/Tφ
  const double rate = 1.0 / t2 - 1.0 / (2.0 * t1);
  return rate > 0.0 ? 1.0 / rate : kInfinity;
}

double t2_from_tphi(double t1, double tphi) {
  const double rate = 1.0 / (2.0 * t1) + 1.0 / tphi;
  return rate > 0.0 ? 1.0 / rate : kInfinity;
}

json time_or_null(double t) { return std::isfinite(t) ? json(units::to_us(t)) : json(nullptr); }

// Walks the document once, collecting every problem with its dotted path.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  const json* object(const json& parent, const std::string& key, const std::string& path,
                     bool required) {
    const std::string p = join(path, key);
    if (!parent.contains(key)) {
      if (required) fail(p, "missing required key");
      return nullptr;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
      fail(p, "must be an object");
      return nullptr;
    }
    return &v;
  }

  void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) fail(join(path, k), "unknown key");
    }
  }

  // Finite number; `nullable` accepts null as +infinity.
  std::optional<double> number(const json& obj, const std::string& key, const std::string& path,
                               bool required, bool nullable = false) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) {
      if (required) fail(p, "missing required key");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (nullable && v.is_null()) return kInfinity;
    if (!v.is_number()) {
      fail(p, nullable ? "must be a number or null" : "must be a number");
      return std::nullopt;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      fail(p, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<long long> integer(const json& obj, const std::string& key,
                                   const std::string& path, bool required, long long lo,
                                   long long hi) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) {
      if (required) fail(p, "missing required key");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(p, "must be an integer");
      return std::nullopt;
    }
    const long long i = v.get<long long>();
    if (i < lo || i > hi) {
      std::ostringstream os;
      os << "must lie in [" << lo << ", " << hi << "]";
      fail(p, os.str());
      return std::nullopt;
    }
    return i;
  }

  std::optional<bool> boolean(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj.at(key);
    if (!v.is_boolean()) {
      fail(join(path, key), "must be true or false");
      return std::nullopt;
    }
    return v.get<bool>();
  }

  std::optional<std::string> string(const json& obj, const std::string& key,
                                    const std::string& path, bool required) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) {
      if (required) fail(p, "missing required key");
      return std::nullopt;
    }
    const json& v = obj.at(key);
    if (!v.is_string()) {
      fail(p, "must be a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

struct Parsed {
  RunConfig config;
  std::vector<std::string> errors;
};

void read_transmon(Reader& r, const json& obj, const std::string& path, TransmonParams& t,
                   const char* freq_key) {
  if (auto v = r.number(obj, freq_key, path, true)) {
    if (*v > 0.0) t.freq_max = units::ghz(*v);
    else r.fail(Reader::join(path, freq_key), "must be > 0");
  }
  if (auto v = r.number(obj, "anharmonicity_ghz", path, true)) {
    if (*v > 0.0) t.anharmonicity = units::ghz(*v);
    else r.fail(Reader::join(path, "anharmonicity_ghz"), "must be > 0 (magnitude of E(2) - 2E(1))");
  }
}

void read_coherence(Reader& r, const json& obj, const std::string& path, double& t1, double& tphi) {
  const auto v1 = r.number(obj, "t1_us", path, true, true);
  const auto v2 = r.number(obj, "t2_us", path, true, true);
  bool ok = true;
  if (v1 && !(*v1 > 0.0)) {
    r.fail(Reader::join(path, "t1_us"), "must be > 0 (null for no relaxation)");
    ok = false;
  }
  if (v2 && !(*v2 > 0.0)) {
    r.fail(Reader::join(path, "t2_us"), "must be > 0 (null for no dephasing)");
    ok = false;
  }
  if (!v1 || !v2 || !ok) return;
  t1 = std::isfinite(*v1) ? units::us(*v1) : kInfinity;
  const double t2 = std::isfinite(*v2) ? units::us(*v2) : kInfinity;
  if (t2 > 2.0 * t1 * (1.0 + 1e-12)) {
    r.fail(Reader::join(path, "t2_us"), "must not exceed 2*t1_us");
    return;
  }
  tphi = std::isfinite(t2) ? tphi_from_t2(t1, t2) : kInfinity;
}

void read_range(Reader& r, const json& parent, const std::string& key, const std::string& path,
                SweepRange& range) {
  const json* obj = r.object(parent, key, path, false);
  if (!obj) return;
  const std::string p = Reader::join(path, key);
  r.allow_keys(*obj, p, {"start", "stop", "points"});
  if (auto v = r.number(*obj, "start", p, true)) range.start = *v;
  if (auto v = r.number(*obj, "stop", p, true)) range.stop = *v;
  if (auto v = r.integer(*obj, "points", p, true, 2, 100000)) range.points = static_cast<int>(*v);
  if (!(range.start < range.stop)) r.fail(p, "start must be below stop");
}

// Coupler frequencies reachable on the principal branch.
void check_coupler_range(Reader& r, const DeviceParams& d, const SweepRange& range,
                         const std::string& path) {
  const double top = units::to_ghz(coupler_frequency(d, 0.0));
  const double bottom = units::to_ghz(coupler_frequency(d, 0.5 - 1e-12));
  if (range.start < bottom || range.stop > top) {
    std::ostringstream os;
    os << "coupler frequencies must lie within [" << bottom << ", " << top << "] GHz";
    r.fail(path, os.str());
  }
}

void check_off_resonant(Reader& r, const std::vector<double>& coupler, const std::vector<double>& qubits,
                        const std::string& path) {
  for (double wc : coupler) {
    for (double wq : qubits) {
      if (std::abs(wc - wq) <= 1e-6 * wq) {
        r.fail(path, "a coupler frequency coincides with a qubit frequency");
        return;
      }
    }
  }
}

Parsed parse(const json& doc) {
  Parsed out;
  Reader r;
  RunConfig& c = out.config;
  if (!doc.is_object()) {
    out.errors.push_back("configuration must be an object");
    return out;
  }
  r.allow_keys(doc, "", {"device", "crosstalk", "readout", "prep_depolarizing", "operating_points",
                         "gate", "model", "zz_levels", "experiments", "experiment", "output_dir",
                         "seed", "shots", "threads"});

  bool device_ok = false;
  if (const json* dev = r.object(doc, "device", "", true)) {
    const std::size_t before = r.errors.size();
    r.allow_keys(*dev, "device", {"q1", "q2", "coupler", "couplings"});
    for (const char* name : {"q1", "q2"}) {
      const std::string p = std::string("device.") + name;
      if (const json* q = r.object(*dev, name, "device", true)) {
        r.allow_keys(*q, p, {"freq_ghz", "anharmonicity_ghz", "t1_us", "t2_us"});
        TransmonParams& t = name[1] == '1' ? c.device.q1 : c.device.q2;
        read_transmon(r, *q, p, t, "freq_ghz");
        if (name[1] == '1') read_coherence(r, *q, p, c.device.t1_q1, c.device.tphi_q1);
        else read_coherence(r, *q, p, c.device.t1_q2, c.device.tphi_q2);
      }
    }
    if (const json* cp = r.object(*dev, "coupler", "device", true)) {
      const std::string p = "device.coupler";
      r.allow_keys(*cp, p, {"freq_max_ghz", "anharmonicity_ghz", "asymmetry", "flux_map"});
      read_transmon(r, *cp, p, c.device.coupler, "freq_max_ghz");
      if (auto v = r.number(*cp, "asymmetry", p, false)) {
        if (*v >= 0.0 && *v < 1.0) c.device.coupler.asymmetry = *v;
        else r.fail(p + ".asymmetry", "must lie in [0, 1)");
      }
      if (const json* fm = r.object(*cp, "flux_map", p, true)) {
        const std::string q = p + ".flux_map";
        r.allow_keys(*fm, q, {"mv_per_phi0", "offset_mv"});
        if (auto v = r.number(*fm, "mv_per_phi0", q, true)) {
          if (*v != 0.0) c.device.coupler_flux_map.volts_per_phi0 = *v;
          else r.fail(q + ".mv_per_phi0", "must be nonzero");
        }
        if (auto v = r.number(*fm, "offset_mv", q, false)) c.device.coupler_flux_map.offset_mv = *v;
      }
    }
    if (const json* g = r.object(*dev, "couplings", "device", true)) {
      const std::string p = "device.couplings";
      r.allow_keys(*g, p, {"g1_mhz", "g2_mhz", "g12_mhz"});
      for (auto [key, dst] : {std::pair{"g1_mhz", &c.device.g1}, std::pair{"g2_mhz", &c.device.g2}}) {
        if (auto v = r.number(*g, key, p, true)) {
          if (*v >= 0.0) *dst = units::mhz(*v);
          else r.fail(p + "." + key, "must be >= 0");
        }
      }
      if (auto v = r.number(*g, "g12_mhz", p, true)) c.device.g12 = units::mhz(*v);
    }
    device_ok = r.errors.size() == before;
  }

  if (doc.contains("crosstalk")) {
    const json& m = doc.at("crosstalk");
    bool shape = m.is_array() && m.size() == 3;
    for (std::size_t i = 0; shape && i < 3; ++i) {
      shape = m[i].is_array() && m[i].size() == 3;
      for (std::size_t j = 0; shape && j < 3; ++j) {
        shape = m[i][j].is_number() && std::isfinite(m[i][j].get<double>());
        if (shape) c.crosstalk.m(i, j) = m[i][j].get<double>();
      }
    }
    if (!shape) {
      r.fail("crosstalk", "must be a 3x3 array of finite numbers");
    } else {
      const Eigen::JacobiSVD<Eigen::Matrix3d> svd(c.crosstalk.m);
      const auto& s = svd.singularValues();
      if (!(s(2) > 1e-12 * s(0))) r.fail("crosstalk", "matrix is singular");
    }
  }

  if (const json* ro = r.object(doc, "readout", "", false)) {
    r.allow_keys(*ro, "readout", {"q1_f0", "q1_f1", "q2_f0", "q2_f1"});
    std::array<double, 4> f{1.0, 1.0, 1.0, 1.0};
    const char* keys[4] = {"q1_f0", "q1_f1", "q2_f0", "q2_f1"};
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
      if (auto v = r.number(*ro, keys[i], "readout", true)) {
        if (*v > 0.5 && *v <= 1.0) f[i] = *v;
        else {
          r.fail(std::string("readout.") + keys[i], "must lie in (0.5, 1]");
          ok = false;
        }
      } else {
        ok = false;
      }
    }
    if (ok) c.confusion = ConfusionMatrix::from_fidelities(f[0], f[1], f[2], f[3]);
  }

  if (auto v = r.number(doc, "prep_depolarizing", "", false)) {
    if (*v >= 0.0 && *v <= 1.0) c.prep_depolarizing = *v;
    else r.fail("prep_depolarizing", "must lie in [0, 1]");
  }

  if (!doc.contains("operating_points")) {
    r.fail("operating_points", "missing required key");
  } else if (!doc.at("operating_points").is_array() || doc.at("operating_points").empty()) {
    r.fail("operating_points", "must be a nonempty array");
  } else {
    const json& pts = doc.at("operating_points");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::string p = "operating_points[" + std::to_string(i) + "]";
      if (!pts[i].is_object()) {
        r.fail(p, "must be an object");
        continue;
      }
      r.allow_keys(pts[i], p, {"name", "flux_mv"});
      OperatingPoint op;
      op.name = r.string(pts[i], "name", p, false).value_or("P" + std::to_string(i + 1));
      if (auto v = r.number(pts[i], "flux_mv", p, true)) op.flux_mv = *v;
      c.points.push_back(op);
    }
  }

  if (const json* g = r.object(doc, "gate", "", false)) {
    r.allow_keys(*g, "gate", {"time_ns", "ramp_ns", "phase"});
    if (auto v = r.number(*g, "time_ns", "gate", false)) c.gate.time = units::ns(*v);
    if (auto v = r.number(*g, "ramp_ns", "gate", false)) c.gate.ramp = units::ns(*v);
    if (auto v = r.number(*g, "phase", "gate", false)) c.gate.phase = *v;
  }
  if (!(c.gate.time > 0.0)) r.fail("gate.time_ns", "must be > 0");
  if (!(c.gate.ramp >= 0.0 && c.gate.ramp < 0.5 * c.gate.time)) {
    r.fail("gate.ramp_ns", "must lie in [0, time_ns/2)");
  }

  if (const json* m = r.object(doc, "model", "", false)) {
    r.allow_keys(*m, "model", {"kind", "levels"});
    const auto kind = r.string(*m, "kind", "model", false).value_or("two_level");
    if (kind == "two_level") {
      c.model = ModelSpec::two_level();
      if (m->contains("levels")) r.fail("model.levels", "not used by the two_level model");
    } else if (kind == "transmon") {
      const auto levels = r.integer(*m, "levels", "model", false, 2, 6).value_or(3);
      c.model = ModelSpec::transmon(static_cast<int>(levels));
    } else {
      r.fail("model.kind", "must be \"two_level\" or \"transmon\"");
    }
  }
  if (auto v = r.integer(doc, "zz_levels", "", false, 2, 6)) c.zz_levels = static_cast<int>(*v);

  const int n_points = static_cast<int>(c.points.size());
  auto read_point = [&](const json& obj, const std::string& p, int& dst) {
    if (auto v = r.integer(obj, "point", p, false, 0, std::max(n_points - 1, 0))) dst = static_cast<int>(*v);
  };
  if (const json* ex = r.object(doc, "experiments", "", false)) {
    r.allow_keys(*ex, "experiments", {"j12-sweep", "zz-sweep", "chevron", "swap-spec", "qpt",
                                      "error-budget", "decay-fit", "calibrate"});
    const std::string base = "experiments";
    if (const json* e = r.object(*ex, "j12-sweep", base, false)) {
      const std::string p = base + ".j12-sweep";
      r.allow_keys(*e, p, {"coupler_ghz"});
      read_range(r, *e, "coupler_ghz", p, c.j12_sweep.coupler_ghz);
    }
    if (const json* e = r.object(*ex, "zz-sweep", base, false)) {
      const std::string p = base + ".zz-sweep";
      r.allow_keys(*e, p, {"coupler_ghz", "levels", "ramsey"});
      read_range(r, *e, "coupler_ghz", p, c.zz_sweep.coupler_ghz);
      if (auto v = r.integer(*e, "levels", p, false, 2, 6)) c.zz_sweep.levels = static_cast<int>(*v);
      if (auto v = r.boolean(*e, "ramsey", p)) c.zz_sweep.ramsey = *v;
    }
    if (const json* e = r.object(*ex, "chevron", base, false)) {
      const std::string p = base + ".chevron";
      r.allow_keys(*e, p, {"point", "amplitude_phi0", "center_mhz", "span_mhz", "freq_points",
                           "duration_ns", "time_points"});
      auto& s = c.chevron;
      read_point(*e, p, s.point);
      if (auto v = r.number(*e, "amplitude_phi0", p, false)) {
        if (*v >= 0.0) s.amplitude = *v;
        else r.fail(p + ".amplitude_phi0", "must be >= 0");
      }
      if (auto v = r.number(*e, "center_mhz", p, false)) s.center_mhz = *v;
      if (auto v = r.number(*e, "span_mhz", p, false)) {
        if (*v > 0.0) s.span_mhz = *v;
        else r.fail(p + ".span_mhz", "must be > 0");
      }
      if (auto v = r.integer(*e, "freq_points", p, false, 3, 10000)) s.freq_points = static_cast<int>(*v);
      if (auto v = r.number(*e, "duration_ns", p, false)) {
        if (*v > 0.0) s.duration_ns = *v;
        else r.fail(p + ".duration_ns", "must be > 0");
      }
      if (auto v = r.integer(*e, "time_points", p, false, 2, 100000)) s.time_points = static_cast<int>(*v);
    }
    if (const json* e = r.object(*ex, "swap-spec", base, false)) {
      const std::string p = base + ".swap-spec";
      r.allow_keys(*e, p, {"coupler_ghz", "duration_ns", "time_points", "levels", "ripple_threshold"});
      auto& s = c.swap_spec;
      read_range(r, *e, "coupler_ghz", p, s.coupler_ghz);
      if (auto v = r.number(*e, "duration_ns", p, false)) {
        if (*v > 0.0) s.duration_ns = *v;
        else r.fail(p + ".duration_ns", "must be > 0");
      }
      if (auto v = r.integer(*e, "time_points", p, false, 16, 100000)) s.time_points = static_cast<int>(*v);
      if (auto v = r.integer(*e, "levels", p, false, 2, 6)) s.levels = static_cast<int>(*v);
      if (auto v = r.number(*e, "ripple_threshold", p, false)) {
        if (*v > 0.0) s.ripple_threshold = *v;
        else r.fail(p + ".ripple_threshold", "must be > 0");
      }
    }
    if (const json* e = r.object(*ex, "qpt", base, false)) {
      const std::string p = base + ".qpt";
      r.allow_keys(*e, p, {"point"});
      read_point(*e, p, c.qpt.point);
    }
    if (const json* e = r.object(*ex, "decay-fit", base, false)) {
      const std::string p = base + ".decay-fit";
      r.allow_keys(*e, p, {"point", "n_list", "twirl"});
      read_point(*e, p, c.decay_fit.point);
      if (e->contains("n_list")) {
        const json& n = e->at("n_list");
        std::vector<int> list;
        bool ok = n.is_array() && n.size() >= 3;
        for (std::size_t i = 0; ok && i < n.size(); ++i) {
          ok = n[i].is_number_integer() && n[i].get<long long>() >= 1 &&
               n[i].get<long long>() <= 1001 && n[i].get<long long>() % 2 == 1;
          if (ok) list.push_back(n[i].get<int>());
        }
        if (ok && std::set<int>(list.begin(), list.end()).size() != list.size()) ok = false;
        if (ok) c.decay_fit.n_list = list;
        else r.fail(p + ".n_list", "must list at least 3 distinct odd integers in [1, 1001]");
      }
      if (e->contains("twirl")) {
        if (e->at("twirl").is_boolean()) c.decay_fit.twirl = e->at("twirl").get<bool>();
        else r.fail(p + ".twirl", "must be a boolean");
      }
    }
    for (const char* name : {"error-budget", "calibrate"}) {
      if (const json* e = r.object(*ex, name, base, false)) r.allow_keys(*e, base + "." + name, {});
    }
  }

  if (auto v = r.string(doc, "experiment", "", false)) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), *v) == names.end()) {
      r.fail("experiment", "unknown experiment \"" + *v + "\"");
    } else {
      c.experiment = *v;
    }
  }
  if (auto v = r.string(doc, "output_dir", "", false)) {
    if (v->empty()) r.fail("output_dir", "must be nonempty");
    else c.output_dir = *v;
  }
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (s.is_number_unsigned()) c.seed = s.get<std::uint64_t>();
    else if (s.is_number_integer() && s.get<long long>() >= 0) c.seed = static_cast<std::uint64_t>(s.get<long long>());
    else r.fail("seed", "must be a nonnegative 64-bit integer");
  }
  if (doc.contains("shots")) {
    const json& s = doc.at("shots");
    if (s.is_string() && s.get<std::string>() == "exact") {
      c.shots.reset();
    } else if (s.is_number_integer() && s.get<long long>() >= 1) {
      c.shots = s.get<long long>();
    } else {
      r.fail("shots", "must be a positive integer or \"exact\"");
    }
  }
  if (c.shots && !c.seed) r.fail("seed", "required when shots is finite");
  if (auto v = r.integer(doc, "threads", "", false, 1, 1024)) c.threads = static_cast<int>(*v);

  // Cross-field physics, once the device itself is sound.
  if (device_ok) {
    const DeviceParams& d = c.device;
    const double wq1 = d.q1.freq_max, wq2 = d.q2.freq_max;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
      const std::string p = "operating_points[" + std::to_string(i) + "].flux_mv";
      const double phi = d.coupler_flux_map.to_phi(c.points[i].flux_mv);
      if (!(std::abs(phi) < 0.5 - 1e-9)) {
        r.fail(p, "bias maps outside the principal flux branch |phi| < 0.5");
        continue;
      }
      check_off_resonant(r, {coupler_frequency(d, phi)}, {wq1, wq2}, p);
    }
    for (auto [name, range] : {std::pair{"experiments.j12-sweep.coupler_ghz", c.j12_sweep.coupler_ghz},
                               std::pair{"experiments.zz-sweep.coupler_ghz", c.zz_sweep.coupler_ghz}}) {
      check_coupler_range(r, d, range, name);
      std::vector<double> w;
      for (double f : range.values()) w.push_back(units::ghz(f));
      check_off_resonant(r, w, {wq1, wq2}, name);
    }
    {
      const std::string name = "experiments.swap-spec.coupler_ghz";
      check_coupler_range(r, d, c.swap_spec.coupler_ghz, name);
      std::vector<double> w;
      for (double f : c.swap_spec.coupler_ghz.values()) w.push_back(units::ghz(f));
      check_off_resonant(r, w, {wq2}, name);
    }
    if (!c.points.empty() && c.chevron.point < n_points && c.chevron.amplitude > 0.0) {
      const double phi = d.coupler_flux_map.to_phi(c.points[c.chevron.point].flux_mv);
      if (!(std::abs(phi) + c.chevron.amplitude < 0.5)) {
        r.fail("experiments.chevron.amplitude_phi0", "flux excursion leaves the principal branch");
      }
    }
    if (std::abs(wq1 - wq2) < 1e-9 * wq1) {
      r.fail("device.q2.freq_ghz", "qubits must be detuned for a parametric drive");
    }
  }
  out.errors = std::move(r.errors);
  return out;
}

}  // namespace

std::vector<std::string> validate_config(const json& doc) { return parse(doc).errors; }

RunConfig parse_config(const json& doc) {
  Parsed p = parse(doc);
  if (!p.errors.empty()) {
    std::ostringstream os;
    os << "invalid configuration (" << p.errors.size() << " problem" << (p.errors.size() == 1 ? "" : "s")
       << "):";
    for (const auto& e : p.errors) os << "\n  " << e;
    throw ConfigError(os.str());
  }
  p.config.crosstalk.validate();
  return p.config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file: " + path);
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
  return parse_config(doc);
}

json RunConfig::to_json() const {
  const DeviceParams& d = device;
  auto qubit = [](const TransmonParams& t, double t1, double tphi) {
    return json{{"freq_ghz", units::to_ghz(t.freq_max)},
                {"anharmonicity_ghz", units::to_ghz(t.anharmonicity)},
                {"t1_us", time_or_null(t1)},
                {"t2_us", time_or_null(std::isfinite(t1) || std::isfinite(tphi) ? t2_from_tphi(t1, tphi)
                                                                                 : kInfinity)}};
  };
  json j;
  j["device"] = {
      {"q1", qubit(d.q1, d.t1_q1, d.tphi_q1)},
      {"q2", qubit(d.q2, d.t1_q2, d.tphi_q2)},
      {"coupler",
       {{"freq_max_ghz", units::to_ghz(d.coupler.freq_max)},
        {"anharmonicity_ghz", units::to_ghz(d.coupler.anharmonicity)},
        {"asymmetry", d.coupler.asymmetry},
        {"flux_map",
         {{"mv_per_phi0", d.coupler_flux_map.volts_per_phi0},
          {"offset_mv", d.coupler_flux_map.offset_mv}}}}},
      {"couplings",
       {{"g1_mhz", units::to_mhz(d.g1)}, {"g2_mhz", units::to_mhz(d.g2)}, {"g12_mhz", units::to_mhz(d.g12)}}}};
  j["crosstalk"] = json::array();
  for (int i = 0; i < 3; ++i) {
    j["crosstalk"].push_back({crosstalk.m(i, 0), crosstalk.m(i, 1), crosstalk.m(i, 2)});
  }
  j["confusion"] = json::array();
  for (int i = 0; i < 4; ++i) {
    j["confusion"].push_back({confusion.m(i, 0), confusion.m(i, 1), confusion.m(i, 2), confusion.m(i, 3)});
  }
  j["prep_depolarizing"] = prep_depolarizing;
  j["operating_points"] = json::array();
  for (const auto& p : points) j["operating_points"].push_back({{"name", p.name}, {"flux_mv", p.flux_mv}});
  j["gate"] = {{"time_ns", units::to_ns(gate.time)}, {"ramp_ns", units::to_ns(gate.ramp)}, {"phase", gate.phase}};
  j["model"] = model.kind == ModelKind::TwoLevel ? json{{"kind", "two_level"}}
                                                 : json{{"kind", "transmon"}, {"levels", model.n_levels}};
  j["zz_levels"] = zz_levels;
  auto range = [](const SweepRange& r) {
    return json{{"start", r.start}, {"stop", r.stop}, {"points", r.points}};
  };
  j["experiments"] = {
      {"j12-sweep", {{"coupler_ghz", range(j12_sweep.coupler_ghz)}}},
      {"zz-sweep",
       {{"coupler_ghz", range(zz_sweep.coupler_ghz)}, {"levels", zz_sweep.levels}, {"ramsey", zz_sweep.ramsey}}},
      {"chevron",
       {{"point", chevron.point},
        {"amplitude_phi0", chevron.amplitude},
        {"center_mhz", chevron.center_mhz},
        {"span_mhz", chevron.span_mhz},
        {"freq_points", chevron.freq_points},
        {"duration_ns", chevron.duration_ns},
        {"time_points", chevron.time_points}}},
      {"swap-spec",
       {{"coupler_ghz", range(swap_spec.coupler_ghz)},
        {"duration_ns", swap_spec.duration_ns},
        {"time_points", swap_spec.time_points},
        {"levels", swap_spec.levels},
        {"ripple_threshold", swap_spec.ripple_threshold}}},
      {"qpt", {{"point", qpt.point}}},
      {"decay-fit", {{"point", decay_fit.point}, {"n_list", decay_fit.n_list}, {"twirl", decay_fit.twirl}}}};
  j["experiment"] = experiment;
  j["output_dir"] = output_dir;
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["shots"] = shots ? json(*shots) : json("exact");
  j["threads"] = threads;
  return j;
}

}  // namespace paraswap
