#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "biruin/analysis.hpp"
#include "biruin/error.hpp"

using namespace biruin;

namespace {

// Synthetic ordered tail: W1 = W2 + E with W2 = 0 w.p. 1/2 else Exp(1), E ~ Exp(1) independent.
// For u1 >= u2: P(W1 > u1, W2 > u2) = 1/2 e^{-u2} (1 + u1 - u2) e^{-(u1 - u2)}; else 1/2 e^{-u2}.
double synth(double u1, double u2) {
    if (u1 <= u2) return 0.5 * std::exp(-u2);
    double d = u1 - u2;
    return 0.5 * std::exp(-u2) * (1.0 + d) * std::exp(-d);
}

TailGrid synth_grid(std::size_t M = 64, double delta = 0.1, double scale = 1.0) {
    TailGrid t;
    t.spec = GridSpec{M, M, delta, delta};
    t.values = Matrix(M, M);
    for (std::size_t k = 0; k < M; ++k)
        for (std::size_t l = 0; l < M; ++l) t.values(k, l) = scale * synth(k * delta, l * delta);
    return t;
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "biruin_test_analysis";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("quantile curve of a synthetic tail") {
    TailGrid t = synth_grid();
    for (double level : {0.25, 0.15, 0.10, 0.05}) {
        QuantileCurve c = quantile_curve(t, level);
        REQUIRE(c.vertices.size() > 10);
        for (auto [u1, u2] : c.vertices) CHECK(std::abs(synth(u1, u2) - level) < 3e-3);
        for (std::size_t i = 1; i < c.vertices.size(); ++i) {
            CHECK(c.vertices[i].second >= c.vertices[i - 1].second);
            if (c.vertices[i].second == c.vertices[i - 1].second)
                CHECK(c.vertices[i].first <= c.vertices[i - 1].first);
        }
    }
    // below the diagonal the curve is the vertical line u2 = marginal quantile of W2
    QuantileCurve c = quantile_curve(t, 0.1);
    const double q2 = std::log(5.0);
    for (auto [u1, u2] : c.vertices)
        if (u1 < q2 - 0.2) CHECK(u2 == doctest::Approx(q2).epsilon(5e-3));
}

TEST_CASE("quantile levels outside the range are rejected") {
    TailGrid t = synth_grid();
    for (double bad : {0.0, 0.5, 0.7, -0.1}) {
        try {
            quantile_curve(t, bad);
            CHECK(false);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::LevelOutOfRange);
        }
    }
}

TEST_CASE("bilinear interpolation") {
    GridSpec g{8, 8, 0.5, 0.25};
    Matrix v(8, 8);
    for (std::size_t k = 0; k < 8; ++k)
        for (std::size_t l = 0; l < 8; ++l) v(k, l) = 1.0 + 2.0 * k * 0.5 - 3.0 * l * 0.25 + 0.5 * (k * 0.5) * (l * 0.25);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 3.5), w(0.0, 1.75);
    for (int i = 0; i < 50; ++i) {
        double a = u(rng), b = w(rng);
        CHECK(grid_value(v, g, a, b) == doctest::Approx(1.0 + 2.0 * a - 3.0 * b + 0.5 * a * b));
    }
    CHECK(grid_value(v, g, 100.0, 0.0) == doctest::Approx(v(7, 0)));
}

TEST_CASE("derived functions partition the probability") {
    TailGrid t = synth_grid();
    std::vector<double> m1(64), m2(64);
    for (std::size_t k = 0; k < 64; ++k) {
        double u = 0.1 * k;
        m1[k] = synth(u, 0.0) + 0.5 * (1.0 + u) * std::exp(-u);  // P(W1 > u) over both W2 branches
        m2[k] = 0.5 * std::exp(-u);
    }
    m1[0] = 1.0;
    DerivedFunctions d = derived_functions(t, m1, m2);
    for (std::size_t k = 1; k < 64; k += 5)
        for (std::size_t l = 1; l < 64; l += 5) {
            double tail = t.values(k, l);
            CHECK(d.Fs(k, l) + d.F12(k, l) + d.F21(k, l) + tail == doctest::Approx(1.0));
            CHECK(d.For(k, l) == doctest::Approx(1.0 - tail));
            CHECK(d.Ror(k, l) == doctest::Approx(1.0 - d.Fs(k, l)));
            CHECK(d.F12(k, l) == doctest::Approx(m2[l] - tail).epsilon(1e-9));
        }
}

TEST_CASE("model comparison") {
    TailGrid a = synth_grid(), b = synth_grid(64, 0.1, 0.8);
    std::vector<std::pair<double, double>> pts = {{0, 0}, {2, 0}, {2, 2}};
    ComparisonReport r = compare_models({a, b}, {"hi", "lo"}, pts);
    CHECK(r.below[1][0]);
    CHECK_FALSE(r.below[0][1]);
    CHECK(r.max_diff(0, 1) == doctest::Approx(0.1));
    CHECK(r.max_diff(0, 0) == 0.0);
    CHECK(r.extract(0, 0) == doctest::Approx(0.5));
    CHECK(r.extract(1, 0) == doctest::Approx(0.4));
    std::string s = r.to_string();
    CHECK(s.find("hi") != std::string::npos);
    CHECK(s.find("lo") != std::string::npos);
    TailGrid c = synth_grid(32, 0.1);
    CHECK_THROWS_AS(compare_models({a, c}, {"a", "c"}, pts), Error);
}

TEST_CASE("grid CSV round trip") {
    TailGrid t = synth_grid(16, 0.25);
    auto path = scratch("tail.csv").string();
    emit_tail_csv(t, path, 2.0, 1.0);
    ParsedGrid p = read_grid_csv(path);
    REQUIRE(p.u1.size() == 16);
    REQUIRE(p.u2.size() == 16);
    CHECK(p.u1[3] == doctest::Approx(1.5));
    CHECK(p.u2[3] == doctest::Approx(0.75));
    for (std::size_t k = 0; k < 16; ++k)
        for (std::size_t l = 0; l < 16; ++l) CHECK(std::abs(p.values(k, l) - t.values(k, l)) <= 5e-7);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header.rfind("u1\\u2,", 0) == 0);
}

TEST_CASE("simulation CSV holds the tail and the standard errors") {
    SimEstimate e;
    e.grid = GridSpec{4, 4, 0.5, 0.5};
    e.tail = Matrix(4, 4, 0.25);
    e.se = Matrix(4, 4, 0.001);
    auto path = scratch("sim.csv").string();
    emit_sim_csv(e, path);
    ParsedGrid first = read_grid_csv(path);
    CHECK(first.values(2, 3) == doctest::Approx(0.25));
    std::ifstream in(path);
    std::stringstream all;
    all << in.rdbuf();
    std::string text = all.str();
    auto blank = text.find("\n\n");
    REQUIRE(blank != std::string::npos);
    std::istringstream rest(text.substr(blank + 2));
    ParsedGrid second = parse_grid_csv(rest);
    CHECK(second.values(1, 1) == doctest::Approx(0.001));
}

TEST_CASE("quantile outputs") {
    TailGrid t = synth_grid();
    std::vector<QuantileCurve> cs = {quantile_curve(t, 0.25), quantile_curve(t, 0.05)};
    auto path = scratch("q.csv").string();
    emit_quantile_csv(cs, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "level,u1,u2");
    std::size_t rows = 0;
    for (std::string line; std::getline(in, line);) rows += !line.empty();
    CHECK(rows == cs[0].vertices.size() + cs[1].vertices.size());

    std::string svg = quantile_svg(cs, 6.3, 6.3);
    CHECK(svg.rfind("<svg", 0) == 0);
    std::size_t paths = 0;
    for (auto p = svg.find("<path"); p != std::string::npos; p = svg.find("<path", p + 1)) ++paths;
    CHECK(paths == 2);
    std::string heat = heatmap_svg(t.values, t.spec);
    CHECK(heat.find("<rect") != std::string::npos);
}

TEST_CASE("malformed CSV is rejected") {
    std::istringstream bad("u1\\u2,0,0.1\n0,1\n");
    CHECK_THROWS_AS(parse_grid_csv(bad), Error);
    std::istringstream junk("u1\\u2,0,0.1\n0,abc,1\n");
    CHECK_THROWS_AS(parse_grid_csv(junk), Error);
}
