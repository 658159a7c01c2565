#include "biruin/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "biruin/error.hpp"

namespace biruin {
namespace {

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    if (s == "-0.000000") s = "0.000000";
    return s;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
    return f;
}

// Last crossing of a decreasing sequence through `level`, as a fractional index.
bool crossing(const std::vector<double>& v, double level, double& pos) {
    for (std::size_t k = v.size() - 1; k-- > 0;) {
        if (v[k] >= level && v[k + 1] < level) {
            pos = double(k) + (v[k] - level) / (v[k] - v[k + 1]);
            return true;
        }
    }
    return false;
}

}  // namespace

QuantileCurve quantile_curve(const TailGrid& t, double level) {
    const Matrix& v = t.values;
    if (!(level > 0.0) || !(level < v(0, 0)))
        throw Error(ErrorCode::LevelOutOfRange, "level " + std::to_string(level) + " outside (0, " + std::to_string(v(0, 0)) + ")");
    QuantileCurve c;
    c.level = level;
    const double d1 = t.spec.delta1, d2 = t.spec.delta2;
    for (std::size_t i = 0; i < v.rows; ++i) {
        std::vector<double> row(v.cols);
        for (std::size_t j = 0; j < v.cols; ++j) row[j] = v(i, j);
        double pos;
        if (crossing(row, level, pos)) c.vertices.emplace_back(double(i) * d1, pos * d2);
    }
    for (std::size_t j = 0; j < v.cols; ++j) {
        std::vector<double> col(v.rows);
        for (std::size_t i = 0; i < v.rows; ++i) col[i] = v(i, j);
        double pos;
        if (crossing(col, level, pos)) c.vertices.emplace_back(pos * d1, double(j) * d2);
    }
    std::sort(c.vertices.begin(), c.vertices.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first > b.first;
    });
    c.vertices.erase(std::unique(c.vertices.begin(), c.vertices.end(),
                                 [](const auto& a, const auto& b) {
                                     return std::abs(a.first - b.first) < 1e-12 && std::abs(a.second - b.second) < 1e-12;
                                 }),
                     c.vertices.end());
    return c;
}

double grid_value(const Matrix& v, const GridSpec& g, double u1, double u2) {
    auto locate = [](double u, double d, std::size_t M, std::size_t& k, double& w) {
        double x = std::max(0.0, u / d);
        if (x >= double(M - 1)) {
            k = M - 2;
            w = 1.0;
            return;
        }
        k = std::size_t(x);
        w = x - double(k);
    };
    std::size_t i, j;
    double a, b;
    locate(u1, g.delta1, v.rows, i, a);
    locate(u2, g.delta2, v.cols, j, b);
    return (1 - a) * (1 - b) * v(i, j) + a * (1 - b) * v(i + 1, j) + (1 - a) * b * v(i, j + 1) + a * b * v(i + 1, j + 1);
}

DerivedFunctions derived_functions(const TailGrid& tail, std::span<const double> m1, std::span<const double> m2) {
    DerivedFunctions d;
    d.Fs = survival_grid(tail, m1, m2);
    const std::size_t R = d.Fs.rows, C = d.Fs.cols;
    d.For = d.F12 = d.F21 = d.Ror = Matrix(R, C);
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < C; ++j) {
            double fs = d.Fs(i, j), s1 = 1.0 - m1[i], s2 = 1.0 - m2[j];
            d.F12(i, j) = std::clamp(s1 - fs, 0.0, 1.0);
            d.F21(i, j) = std::clamp(s2 - fs, 0.0, 1.0);
            d.For(i, j) = std::clamp(s1 + s2 - fs, 0.0, 1.0);
            d.Ror(i, j) = 1.0 - fs;
        }
    return d;
}

ComparisonReport compare_models(const std::vector<TailGrid>& tails, const std::vector<std::string>& names,
                                const std::vector<std::pair<double, double>>& points, double slack) {
    if (tails.empty()) throw Error(ErrorCode::InvalidArgument, "no models to compare");
    if (names.size() != tails.size()) throw Error(ErrorCode::ShapeMismatch, "one name per model required");
    for (const auto& t : tails)
        if (!(t.spec == tails[0].spec)) throw Error(ErrorCode::ShapeMismatch, "grids differ between models");
    const std::size_t n = tails.size();
    ComparisonReport r;
    r.names = names;
    r.points = points;
    r.max_diff = Matrix(n, n);
    r.below.assign(n, std::vector<bool>(n, true));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const auto& x = tails[a].values.data;
            const auto& y = tails[b].values.data;
            double md = 0.0;
            bool le = true;
            for (std::size_t k = 0; k < x.size(); ++k) {
                md = std::max(md, std::abs(x[k] - y[k]));
                le = le && x[k] <= y[k] + slack;
            }
            r.max_diff(a, b) = md;
            r.below[a][b] = le;
        }
    r.extract = Matrix(n, points.size());
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t p = 0; p < points.size(); ++p)
            r.extract(a, p) = grid_value(tails[a].values, tails[a].spec, points[p].first, points[p].second);
    return r;
}

std::string ComparisonReport::to_string() const {
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    if (!points.empty()) {
        out << "point";
        for (const auto& nm : names) out << ',' << nm;
        out << '\n';
        for (std::size_t p = 0; p < points.size(); ++p) {
            out << '(' << points[p].first << ' ' << points[p].second << ')';
            for (std::size_t a = 0; a < names.size(); ++a) out << ',' << extract(a, p);
            out << '\n';
        }
    }
    for (std::size_t a = 0; a < names.size(); ++a)
        for (std::size_t b = a + 1; b < names.size(); ++b) {
            out << names[a] << " vs " << names[b] << ": max |diff| = " << max_diff(a, b) << ", ";
            if (below[a][b]) out << names[a] << " <= " << names[b];
            if (below[a][b] && below[b][a]) out << " and ";
            if (below[b][a]) out << names[b] << " <= " << names[a];
            if (!below[a][b] && !below[b][a]) out << "not ordered";
            out << '\n';
        }
    return out.str();
}

void write_grid_csv(std::ostream& out, const Matrix& v, const GridSpec& g, double scale1, double scale2) {
    out << "u1\\u2";
    for (std::size_t j = 0; j < v.cols; ++j) out << ',' << fmt6(double(j) * g.delta2 * scale2);
    out << '\n';
    for (std::size_t i = 0; i < v.rows; ++i) {
        out << fmt6(double(i) * g.delta1 * scale1);
        for (std::size_t j = 0; j < v.cols; ++j) out << ',' << fmt6(v(i, j));
        out << '\n';
    }
}

void emit_tail_csv(const TailGrid& t, const std::string& path, double scale1, double scale2) {
    auto f = open_out(path);
    write_grid_csv(f, t.values, t.spec, scale1, scale2);
}

void emit_sim_csv(const SimEstimate& e, const std::string& path, double scale1, double scale2) {
    auto f = open_out(path);
    write_grid_csv(f, e.tail, e.grid, scale1, scale2);
    f << '\n';
    write_grid_csv(f, e.se, e.grid, scale1, scale2);
}

namespace {

double parse_cell(const std::string& cell) {
    double v = 0.0;
    const char* end = cell.data() + cell.size();
    auto [p, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || p != end) throw Error(ErrorCode::IoError, "bad CSV cell '" + cell + "'");
    return v;
}

}  // namespace

ParsedGrid parse_grid_csv(std::istream& in) {
    ParsedGrid g;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    if (!std::getline(in, line)) throw Error(ErrorCode::IoError, "empty grid file");
    auto head = split(line);
    for (std::size_t j = 1; j < head.size(); ++j) g.u2.push_back(parse_cell(head[j]));
    std::vector<double> data;
    while (std::getline(in, line) && !line.empty()) {
        auto cells = split(line);
        if (cells.size() != head.size()) throw Error(ErrorCode::IoError, "ragged grid row");
        g.u1.push_back(parse_cell(cells[0]));
        for (std::size_t j = 1; j < cells.size(); ++j) data.push_back(parse_cell(cells[j]));
    }
    g.values = Matrix(g.u1.size(), g.u2.size());
    g.values.data = std::move(data);
    return g;
}

ParsedGrid read_grid_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorCode::IoError, "cannot read " + path);
    return parse_grid_csv(f);
}

void emit_quantile_csv(const std::vector<QuantileCurve>& curves, const std::string& path, double scale1, double scale2) {
    auto f = open_out(path);
    f << "level,u1,u2\n";
    for (const auto& c : curves)
        for (const auto& [u1, u2] : c.vertices) f << fmt6(c.level) << ',' << fmt6(u1 * scale1) << ',' << fmt6(u2 * scale2) << '\n';
}

std::string quantile_svg(const std::vector<QuantileCurve>& curves, double u1_max, double u2_max, double scale1,
                         double scale2) {
    const double W = 480, H = 480, pad = 50;
    const double x_max = u1_max * scale1, y_max = u2_max * scale2;
    auto X = [&](double u) { return pad + (W - 2 * pad) * u / x_max; };
    auto Y = [&](double u) { return H - pad - (H - 2 * pad) * u / y_max; };
    std::ostringstream s;
    s << std::fixed << std::setprecision(2);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    s << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    s << "<line x1=\"" << pad << "\" y1=\"" << H - pad << "\" x2=\"" << W - pad << "\" y2=\"" << H - pad
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << pad << "\" y1=\"" << pad << "\" x2=\"" << pad << "\" y2=\"" << H - pad << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">u1</text>\n";
    s << "<text x=\"14\" y=\"" << H / 2 << "\" text-anchor=\"middle\">u2</text>\n";
    s << "<text x=\"" << pad << "\" y=\"" << H - pad + 16 << "\" text-anchor=\"middle\">0</text>\n";
    s << "<text x=\"" << W - pad << "\" y=\"" << H - pad + 16 << "\" text-anchor=\"middle\">" << x_max << "</text>\n";
    s << "<text x=\"" << pad - 6 << "\" y=\"" << pad + 4 << "\" text-anchor=\"end\">" << y_max << "</text>\n";
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const auto& c = curves[k];
        s << "<path fill=\"none\" stroke=\"" << colors[k % 6] << "\" d=\"";
        for (std::size_t i = 0; i < c.vertices.size(); ++i)
            s << (i ? " L " : "M ") << X(c.vertices[i].first * scale1) << ' ' << Y(c.vertices[i].second * scale2);
        s << "\"/>\n";
        if (!c.vertices.empty()) {
            const auto& v = c.vertices.back();
            s << "<text x=\"" << X(v.first * scale1) + 4 << "\" y=\"" << Y(v.second * scale2) - 4 << "\" fill=\""
              << colors[k % 6] << "\">" << std::setprecision(3) << c.level << std::setprecision(2) << "</text>\n";
        }
    }
    s << "</svg>\n";
    return s.str();
}

std::string heatmap_svg(const Matrix& v, const GridSpec& g, double scale1, double scale2) {
    const double cell = std::max(2.0, 480.0 / double(std::max(v.rows, v.cols))), pad = 40;
    const double W = pad * 2 + cell * double(v.rows), H = pad * 2 + cell * double(v.cols);
    std::ostringstream s;
    s << std::fixed << std::setprecision(2);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    for (std::size_t i = 0; i < v.rows; ++i)
        for (std::size_t j = 0; j < v.cols; ++j) {
            int shade = int(std::lround(255.0 * (1.0 - std::clamp(v(i, j), 0.0, 1.0))));
            s << "<rect x=\"" << pad + cell * double(i) << "\" y=\"" << H - pad - cell * double(j + 1) << "\" width=\"" << cell
              << "\" height=\"" << cell << "\" fill=\"rgb(255," << shade << ',' << shade << ")\"/>\n";
        }
    s << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">u1 (0 to "
      << double(v.rows - 1) * g.delta1 * scale1 << ")</text>\n";
    s << "<text x=\"10\" y=\"20\">u2 (0 to " << double(v.cols - 1) * g.delta2 * scale2 << ")</text>\n";
    s << "</svg>\n";
    return s.str();
}

void write_text(const std::string& path, const std::string& text) {
    auto f = open_out(path);
    f << text;
}

}  // namespace biruin
