#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "biruin/invert.hpp"
#include "biruin/simulate.hpp"

namespace biruin {

inline constexpr double kMonotoneSlack = 5e-3;

struct QuantileCurve {
    double level = 0.0;
    std::vector<std::pair<double, double>> vertices;  // (u1, u2), u2 ascending, u1 descending
};

QuantileCurve quantile_curve(const TailGrid& t, double level);

// Bilinear interpolation of the grid at (u1, u2), constant beyond the last node.
double grid_value(const Matrix& values, const GridSpec& g, double u1, double u2);

struct DerivedFunctions {
    Matrix Fs;   // both lines survive
    Matrix For;  // at least one line survives
    Matrix F12;  // line 1 survives, line 2 is ruined
    Matrix F21;  // line 2 survives, line 1 is ruined
    Matrix Ror;  // at least one line is ruined
};

DerivedFunctions derived_functions(const TailGrid& tail, std::span<const double> m1, std::span<const double> m2);

struct ComparisonReport {
    std::vector<std::string> names;
    Matrix max_diff;                          // pairwise max |t_i - t_j|
    std::vector<std::vector<bool>> below;     // below[i][j]: t_i <= t_j + slack everywhere
    std::vector<std::pair<double, double>> points;
    Matrix extract;                           // extract(model, point)

    std::string to_string() const;
};

ComparisonReport compare_models(const std::vector<TailGrid>& tails, const std::vector<std::string>& names,
                                const std::vector<std::pair<double, double>>& points, double slack = kMonotoneSlack);

// Grid with axis values u1 = k delta1 * scale1, u2 = l delta2 * scale2.
void write_grid_csv(std::ostream& out, const Matrix& values, const GridSpec& g, double scale1 = 1.0, double scale2 = 1.0);
void emit_tail_csv(const TailGrid& t, const std::string& path, double scale1 = 1.0, double scale2 = 1.0);
// Tail block, a blank line, then the standard-error block with the same layout.
void emit_sim_csv(const SimEstimate& e, const std::string& path, double scale1 = 1.0, double scale2 = 1.0);

struct ParsedGrid {
    std::vector<double> u1, u2;
    Matrix values;
};
ParsedGrid parse_grid_csv(std::istream& in);
ParsedGrid read_grid_csv(const std::string& path);

void emit_quantile_csv(const std::vector<QuantileCurve>& curves, const std::string& path, double scale1 = 1.0,
                       double scale2 = 1.0);
std::string quantile_svg(const std::vector<QuantileCurve>& curves, double u1_max, double u2_max, double scale1 = 1.0,
                         double scale2 = 1.0);
std::string heatmap_svg(const Matrix& values, const GridSpec& g, double scale1 = 1.0, double scale2 = 1.0);
void write_text(const std::string& path, const std::string& text);

}  // namespace biruin
