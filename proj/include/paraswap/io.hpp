#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "paraswap/dynamics.hpp"
#include "paraswap/error_analysis.hpp"
#include "paraswap/experiments.hpp"
#include "paraswap/tomography.hpp"

namespace paraswap::io {

using Cell = std::variant<double, long long, std::string>;
using Row = std::vector<Cell>;

/// RFC 4180 text: CRLF line ends, fields quoted only when they contain a
/// comma, quote or line break. Doubles use 12 significant digits.
std::string format_cell(const Cell& cell);
std::string to_csv(const std::vector<std::string>& header, const std::vector<Row>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<Row>& rows);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Populations CSV: time_ns, pop_q1, pop_q2, pop_coupler.
std::string population_csv(const PopulationTrace& trace);

/// 16 rows of χ with real/imag parts interleaved (32 columns).
std::string chi_csv(const Mat16& chi);
/// Sidecar description of a χ file.
nlohmann::json chi_metadata(bool cp_projected, std::optional<std::uint64_t> seed,
                            std::optional<std::int64_t> shots);

/// Header of the per-point budget table.
const std::vector<std::string>& budget_header();
Row budget_row(const PointResult& result);

/// Long-format grid: x, y, value per line.
std::string grid_csv(const SweepGrid& grid, const std::string& x_col, double x_scale,
                     const std::string& y_col, double y_scale, const std::string& value_col);

/// Matplotlib script that renders `csv_name` next to it.
std::string plot_script(const std::string& kind, const std::string& csv_name);

}  // namespace paraswap::io
