#include <doctest.h>

#include <random>

#include "biruin/error.hpp"
#include "biruin/wienerhopf.hpp"
#include "helpers.hpp"

using namespace biruin;
using testing::Coupling;

namespace {

Complex random_right(std::mt19937& rng, double lo = 0.01) {
    std::uniform_real_distribution<double> re(lo, 4.0), im(-6.0, 6.0);
    return {re(rng), im(rng)};
}

struct Example1Closed {
    double v0 = testing::cubic_real_root();
    double atom = 1.0 / (4.0 * v0);  // |v1|^2 / 36 with |v1|^2 = 9 / v0
    Complex v1;

    Example1Closed() {
        // the complex pair solves s^2 + (4 + v0) s + 9/v0 = 0
        Complex b = 4.0 + v0, disc = std::sqrt(Complex(b * b - 36.0 / v0));
        v1 = (-b + disc) / 2.0;
    }

    Complex kpr(Complex s) const {
        return (s * s + 4.0 * s + 1.0) * (s - v1) * (s - std::conj(v1)) / (std::pow(s + 2.0, 2) * std::pow(s + 3.0, 2));
    }

    Complex psi(Complex s1, Complex s2) const {
        auto v = testing::example1_zeros(s1);
        Complex ratio = (s1 - v[0]) * (s1 - v[1]) / ((s1 + s2 - v[0]) * (s1 + s2 - v[1]));
        return ratio * std::pow(s1 + s2 + 2.0, 2) / std::pow(s1 + 2.0, 2) * atom / kpr(s1);
    }
};

// Model whose first line is line 2 of m: H'(q0,q1,q2) = H(q0, 0, q1).
ModelSpec line2_as_line1(const ModelSpec& m) {
    std::vector<MultiPoly> sub = {MultiPoly::variable(3, 0), MultiPoly(3), MultiPoly::variable(3, 1)};
    RationalLST3 H{poly_compose_affine(m.H.num, sub), poly_compose_affine(m.H.den, sub)};
    return model_from_raw(H, m.c2, m.c2);
}

}  // namespace

TEST_CASE("Example 1 projected factorization") {
    Example1Closed ex;
    ProjectedFactorization pf = projected_factorization(build_kernel(testing::example1()));
    CHECK(pf.atom == doctest::Approx(ex.atom).epsilon(1e-12));
    CHECK(pf.atom == doctest::Approx(0.2048).epsilon(1e-3));
    CHECK(RootSplit::count(pf.zeros_neg) == 4);
    CHECK(RootSplit::count(pf.poles_neg) == 4);
    std::mt19937 rng(31);
    for (int t = 0; t < 20; ++t) {
        Complex s = random_right(rng, 0.0);
        CHECK(std::abs(pf.plus(s) - ex.kpr(s)) < 1e-10 * std::max(1.0, std::abs(ex.kpr(s))));
    }
    CHECK(std::abs(pf.plus(0.0) - pf.atom) < 1e-14);
}

TEST_CASE("Example 1 transform against the closed form") {
    Example1Closed ex;
    TransformEvaluator ev(build_kernel(testing::example1()));
    std::mt19937 rng(32);
    for (int t = 0; t < 40; ++t) {
        Complex s1 = random_right(rng), s2 = random_right(rng, 0.0);
        Complex want = ex.psi(s1, s2);
        CHECK(std::abs(ev.psi(s1, s2) - want) < 1e-10);
        Complex m = ex.atom * std::pow(2.0 + s1, 2) * std::pow(3.0 + s1, 2) /
                    ((s1 * s1 + 4.0 * s1 + 1.0) * (s1 - ex.v1) * (s1 - std::conj(ex.v1)));
        CHECK(std::abs(ev.psi_line1(s1) - m) < 1e-10);
    }
    CHECK(ev.psi(1.0, 0.0).real() == doctest::Approx(0.361586).epsilon(1e-5));
}

TEST_CASE("Example 1 marginal of line 2") {
    TransformEvaluator ev(build_kernel(testing::example1()));
    const double r13 = std::sqrt(13.0);
    std::mt19937 rng(33);
    for (int t = 0; t < 20; ++t) {
        Complex s2 = random_right(rng);
        // K+_0(z) = (z + 1)(z - v3(0)) / (z + 2)^2 with v3(0) = -(1 + sqrt 13)/2
        Complex want = (1.0 + r13) / 8.0 * std::pow(s2 + 2.0, 2) / ((s2 + 1.0) * (s2 + (1.0 + r13) / 2.0));
        CHECK(std::abs(ev.psi_line2(s2) - want) < 1e-10);
    }
    double p_w2_zero = wh_plus(ev.kernel(), 0.0, 0.0).real();
    CHECK(p_w2_zero == doctest::Approx((1.0 + r13) / 8.0).epsilon(1e-12));
    CHECK(p_w2_zero == doctest::Approx(0.575).epsilon(2e-3));
    CHECK(1.0 - p_w2_zero == doctest::Approx(0.424).epsilon(2e-3));
}

TEST_CASE("Example 2 joint tail at the origin") {
    TransformEvaluator ev(build_kernel(testing::example2()));
    double p_w2_zero = wh_plus(ev.kernel(), 0.0, 0.0).real();
    CHECK(std::abs(1.0 - p_w2_zero - 0.37) <= 0.01);
}

TEST_CASE("line 2 atom agrees with a one-dimensional factorization") {
    std::vector<ModelSpec> models = {testing::example1(), testing::example2(), testing::example3(Coupling::Positive),
                                     testing::example3(Coupling::Negative)};
    for (const auto& m : models) {
        TransformEvaluator ev(build_kernel(m));
        ProjectedFactorization pf2 = projected_factorization(build_kernel(line2_as_line1(m)));
        CHECK(wh_plus(ev.kernel(), 0.0, 0.0).real() == doctest::Approx(pf2.atom).epsilon(1e-9));
        std::mt19937 rng(34);
        for (int t = 0; t < 10; ++t) {
            Complex s = random_right(rng);
            CHECK(std::abs(ev.psi_line2(s) - pf2.atom / pf2.plus(s)) < 1e-9);
        }
    }
}

TEST_CASE("transform identities") {
    for (auto m : {testing::example1(), testing::example2(), testing::example3(Coupling::Independent)}) {
        TransformEvaluator ev(build_kernel(m));
        CHECK(std::abs(ev.psi(0.0, 0.0) - 1.0) < 1e-12);
        std::mt19937 rng(35);
        for (int t = 0; t < 20; ++t) {
            Complex s1 = random_right(rng), s2 = random_right(rng);
            Complex p = ev.psi(s1, s2);
            CHECK(std::abs(p) <= 1.0 + kBoundTol);
            CHECK(std::abs(ev.psi(s1, 0.0) - ev.psi_line1(s1)) < 1e-12);
            CHECK(std::abs(ev.slice(s1)(s2) - p) < 1e-12);
            Complex tail = (1.0 - ev.psi_line1(s1) - ev.psi_line2(s2) + p) / (s1 * s2);
            CHECK(std::abs(ev.tail(s1, s2) - tail) < 1e-10 * std::max(1.0, std::abs(tail)));
            // conjugate symmetry of a transform of a real measure
            CHECK(std::abs(ev.psi(std::conj(s1), std::conj(s2)) - std::conj(p)) < 1e-10);
        }
    }
}

TEST_CASE("property: psi decreases along the real diagonal") {
    TransformEvaluator ev(build_kernel(testing::example2()));
    double prev = 1.0;
    for (double x = 0.05; x < 20.0; x *= 1.5) {
        double v = ev.psi(x, x).real();
        CHECK(v <= prev + 1e-12);
        CHECK(v > 0.0);
        CHECK(std::abs(ev.psi(x, x).imag()) < 1e-12);
        prev = v;
    }
    // W1 >= W2 makes psi(s, 0) <= psi(0, s) for real s
    for (double x = 0.1; x < 10.0; x += 0.7) CHECK(ev.psi_line1(x).real() <= ev.psi_line2(x).real() + 1e-12);
}

TEST_CASE("bound and domain errors") {
    try {
        check_bound(1.1, 1.0, 1.0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BoundFailure);
    }
    CHECK_NOTHROW(check_bound(1.0 + 0.5 * kBoundTol, 1.0, 1.0));
    TransformEvaluator ev(build_kernel(testing::example1()));
    CHECK_THROWS_AS(ev.tail(0.0, 1.0), Error);
    CHECK_THROWS_AS(ev.psi(1.0, -1.0), Error);
}
