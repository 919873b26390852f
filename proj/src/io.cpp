#include "paraswap/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "paraswap/errors.hpp"

namespace paraswap::io {

std::string format_cell(const Cell& cell) {
  if (const double* d = std::get_if<double>(&cell)) {
    if (std::isnan(*d)) return "nan";
    if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", *d);
    return buf;
  }
  if (const long long* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  const std::string& s = std::get<std::string>(cell);
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string to_csv(const std::vector<std::string>& header, const std::vector<Row>& rows) {
  std::string out;
  auto line = [&out](const auto& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += format_cell(Cell(cells[i]));
    }
    out += "\r\n";
  };
  line(header);
  for (const Row& r : rows) {
    if (r.size() != header.size()) throw InvalidArgument("CSV row width does not match the header");
    line(r);
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
  if (!out) throw InvalidArgument("write failed: " + path.string());
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<Row>& rows) {
  write_text(path, to_csv(header, rows));
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

std::string population_csv(const PopulationTrace& trace) {
  std::vector<Row> rows;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    rows.push_back({units::to_ns(trace.times[i]), trace.pop_q1[i], trace.pop_q2[i], trace.pop_coupler[i]});
  }
  return to_csv({"time_ns", "pop_q1", "pop_q2", "pop_coupler"}, rows);
}

std::string chi_csv(const Mat16& chi) {
  std::vector<std::string> header;
  const auto& labels = pauli_labels();
  for (int n = 0; n < 16; ++n) {
    header.push_back("re_" + labels[n]);
    header.push_back("im_" + labels[n]);
  }
  std::vector<Row> rows;
  for (int m = 0; m < 16; ++m) {
    Row r;
    for (int n = 0; n < 16; ++n) {
      r.emplace_back(chi(m, n).real());
      r.emplace_back(chi(m, n).imag());
    }
    rows.push_back(std::move(r));
  }
  return to_csv(header, rows);
}

nlohmann::json chi_metadata(bool cp_projected, std::optional<std::uint64_t> seed,
                            std::optional<std::int64_t> shots) {
  const auto& labels = pauli_labels();
  return {{"basis_order", std::vector<std::string>(labels.begin(), labels.end())},
          {"basis_convention", "E_n = sigma_a (x) sigma_b, n = 4a + b, order I, X, Y, Z; Q1 first"},
          {"layout", "row m, columns re/im of chi_mn"},
          {"cp_projected", cp_projected},
          {"seed", seed ? nlohmann::json(*seed) : nlohmann::json(nullptr)},
          {"shots", shots ? nlohmann::json(*shots) : nlohmann::json("exact")}};
}

const std::vector<std::string>& budget_header() {
  static const std::vector<std::string> h{"flux_mv", "coupler_freq_ghz", "static_zz_mhz", "F",
                                          "dF_dec",  "dF_zz",            "dF_coh",        "dF_osc",
                                          "h_zz_khz"};
  return h;
}

Row budget_row(const PointResult& r) {
  const ErrorBudget& b = r.budget;
  return {r.point.flux_mv,        units::to_ghz(r.coupler_freq), units::to_mhz(r.static_zz),
          b.fidelity,             b.delta_dec,                   b.delta_zz,
          b.delta_coh_limit,      b.delta_osc,                   units::to_khz(b.h_zz)};
}

std::string grid_csv(const SweepGrid& grid, const std::string& x_col, double x_scale,
                     const std::string& y_col, double y_scale, const std::string& value_col) {
  std::vector<Row> rows;
  rows.reserve(grid.x.size() * grid.y.size());
  for (std::size_t ix = 0; ix < grid.x.size(); ++ix) {
    for (std::size_t iy = 0; iy < grid.y.size(); ++iy) {
      rows.push_back({grid.x[ix] * x_scale, grid.y[iy] * y_scale,
                      grid.values(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix))});
    }
  }
  return to_csv({x_col, y_col, value_col}, rows);
}

namespace {

const char* kPrelude =
    "import sys\n"
    "import pandas as pd\n"
    "import matplotlib.pyplot as plt\n"
    "\n";

std::string map_plot(const std::string& csv, const std::string& x, const std::string& y,
                     const std::string& z, const std::string& title) {
  std::ostringstream os;
  os << kPrelude << "df = pd.read_csv('" << csv << "')\n"
     << "grid = df.pivot(index='" << y << "', columns='" << x << "', values='" << z << "')\n"
     << "fig, ax = plt.subplots(figsize=(6, 4))\n"
     << "m = ax.pcolormesh(grid.columns, grid.index, grid.values, shading='auto', cmap='viridis')\n"
     << "fig.colorbar(m, ax=ax, label='" << z << "')\n"
     << "ax.set_xlabel('" << x << "')\nax.set_ylabel('" << y << "')\nax.set_title('" << title << "')\n"
     << "fig.tight_layout()\nfig.savefig(sys.argv[1] if len(sys.argv) > 1 else '" << csv
     << ".png', dpi=150)\n";
  return os.str();
}

std::string line_plot(const std::string& csv, const std::string& x,
                      const std::vector<std::string>& ys, const std::string& title) {
  std::ostringstream os;
  os << kPrelude << "df = pd.read_csv('" << csv << "')\n"
     << "fig, ax = plt.subplots(figsize=(6, 4))\n";
  for (const auto& y : ys) os << "ax.plot(df['" << x << "'], df['" << y << "'], label='" << y << "')\n";
  os << "ax.set_xlabel('" << x << "')\nax.legend()\nax.set_title('" << title << "')\n"
     << "fig.tight_layout()\nfig.savefig(sys.argv[1] if len(sys.argv) > 1 else '" << csv
     << ".png', dpi=150)\n";
  return os.str();
}

}  // namespace

std::string plot_script(const std::string& kind, const std::string& csv) {
  if (kind == "j12-sweep") return line_plot(csv, "coupler_freq_ghz", {"j12_mhz"}, "effective coupling");
  if (kind == "zz-sweep") return line_plot(csv, "coupler_freq_ghz", {"static_zz_mhz"}, "static ZZ");
  if (kind == "chevron") return map_plot(csv, "drive_freq_mhz", "time_ns", "pop_q1", "chevron");
  if (kind == "swap-spec") return map_plot(csv, "coupler_freq_ghz", "time_ns", "pop_q2", "swap spectroscopy");
  if (kind == "populations") {
    return line_plot(csv, "time_ns", {"pop_q1", "pop_q2", "pop_coupler"}, "populations");
  }
  if (kind == "chi") {
    std::ostringstream os;
    os << kPrelude << "import numpy as np\n"
       << "df = pd.read_csv('" << csv << "')\n"
       << "re = df[[c for c in df.columns if c.startswith('re_')]].values\n"
       << "im = df[[c for c in df.columns if c.startswith('im_')]].values\n"
       << "labels = [c[3:] for c in df.columns if c.startswith('re_')]\n"
       << "fig, axes = plt.subplots(1, 2, figsize=(10, 4.5))\n"
       << "for ax, data, name in zip(axes, (re, im), ('Re', 'Im')):\n"
       << "    m = ax.imshow(data, cmap='RdBu_r', vmin=-np.abs(re).max(), vmax=np.abs(re).max())\n"
       << "    ax.set_xticks(range(16), labels, rotation=90)\n"
       << "    ax.set_yticks(range(16), labels)\n"
       << "    ax.set_title(name + ' chi')\n"
       << "fig.colorbar(m, ax=axes)\n"
       << "fig.savefig(sys.argv[1] if len(sys.argv) > 1 else '" << csv << ".png', dpi=150)\n";
    return os.str();
  }
  if (kind == "error-budget") {
    std::ostringstream os;
    os << kPrelude << "df = pd.read_csv('" << csv << "')\n"
       << "fig, (a, b) = plt.subplots(1, 2, figsize=(10, 4))\n"
       << "a.plot(df['coupler_freq_ghz'], df['F'], 'o-', label='F')\n"
       << "a.set_xlabel('coupler_freq_ghz')\na.legend()\n"
       << "for col in ('dF_dec', 'dF_zz', 'dF_coh', 'dF_osc'):\n"
       << "    b.plot(df['coupler_freq_ghz'], df[col], 'o-', label=col)\n"
       << "b.set_xlabel('coupler_freq_ghz')\nb.legend()\n"
       << "fig.tight_layout()\nfig.savefig(sys.argv[1] if len(sys.argv) > 1 else '" << csv
       << ".png', dpi=150)\n";
    return os.str();
  }
  if (kind == "decay-fit") {
    std::ostringstream os;
    os << kPrelude << "df = pd.read_csv('" << csv << "')\n"
       << "fig, ax = plt.subplots(figsize=(6, 4))\n"
       << "ax.plot(df['N'], df['F'], 'o', label='QPT')\n"
       << "ax.plot(df['N'], df['F_fit'], '-', label='A P^N + 1/16')\n"
       << "ax.set_xlabel('N')\nax.set_ylabel('process fidelity')\nax.legend()\n"
       << "fig.tight_layout()\nfig.savefig(sys.argv[1] if len(sys.argv) > 1 else '" << csv
       << ".png', dpi=150)\n";
    return os.str();
  }
  if (kind == "calibrate") {
    return line_plot(csv, "coupler_freq_ghz", {"amplitude_phi0"}, "calibrated drive amplitude");
  }
  throw InvalidArgument("no plot script for " + kind);
}

}  // namespace paraswap::io
