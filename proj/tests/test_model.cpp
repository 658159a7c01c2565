#include <doctest.h>

#include <random>

#include "biruin/error.hpp"
#include "biruin/model.hpp"
#include "helpers.hpp"

using namespace biruin;
using testing::Coupling;

namespace {

Complex erlang_lst(unsigned k, double rate, Complex q) { return std::pow(rate / (rate + q), double(k)); }

// Independent closed form for the mixture examples with unit incomes.
Complex mixture_H(unsigned n, Complex q0, Complex q1, Complex q2) {
    Complex s = 0.0;
    for (unsigned k = 1; k <= n; ++k)
        s += erlang_lst(k, 1, q0) * erlang_lst(k, 3, q1) * erlang_lst(k, 2, q1 + q2);
    return s / double(n);
}

Complex random_q(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 2.0), v(-3.0, 3.0);
    return {u(rng), v(rng)};
}

}  // namespace

TEST_CASE("mixture H matches the closed form") {
    std::mt19937 rng(1);
    for (unsigned n : {2u, 3u}) {
        ModelSpec m = testing::mixture_example(n);
        for (int t = 0; t < 50; ++t) {
            Complex q0 = random_q(rng), q1 = random_q(rng), q2 = random_q(rng);
            Complex want = mixture_H(n, q0, q1, q2);
            CHECK(std::abs(m.H(q0, q1, q2) - want) < 1e-12);
        }
        const Rational zero[3] = {0, 0, 0};
        CHECK(m.H.num.eval_exact(zero) == m.H.den.eval_exact(zero));
        CHECK(m.ordering_certified);
    }
}

TEST_CASE("Example 1 moments") {
    Moments mo = moments(testing::example1());
    CHECK(mo.EA == frac(3, 2));
    CHECK(mo.EB1 == frac(5, 4));
    CHECK(mo.EB2 == frac(3, 4));
    CHECK(mo.ED == frac(1, 2));
    CHECK(mo.rho1 == frac(5, 6));
    CHECK(mo.rho2 == frac(1, 2));
}

TEST_CASE("Example 3 moments do not depend on the coupling") {
    for (auto c : {Coupling::Positive, Coupling::Independent, Coupling::Negative}) {
        Moments mo = moments(testing::example3(c));
        CHECK(mo.EA == 2);
        CHECK(mo.EB1 == frac(3, 2));
        CHECK(mo.EB2 == frac(1, 2));
        CHECK(mo.rho1 == frac(3, 4));
        CHECK(mo.rho2 == frac(1, 4));
        CHECK(mo.ED == 1);
    }
}

TEST_CASE("proportional H matches the closed form") {
    std::mt19937 rng(2);
    for (auto c : {Coupling::Positive, Coupling::Negative}) {
        ModelSpec m = testing::example3(c);
        for (int t = 0; t < 30; ++t) {
            Complex q0 = random_q(rng), q1 = random_q(rng), q2 = random_q(rng);
            Complex want = 0.0;
            for (unsigned i = 1; i <= 3; ++i) {
                unsigned j = c == Coupling::Positive ? i : 4 - i;
                want += erlang_lst(i, 1, q0) * erlang_lst(j, 1, 0.75 * q1 + 0.25 * q2) / 3.0;
            }
            CHECK(std::abs(m.H(q0, q1, q2) - want) < 1e-12);
        }
    }
}

TEST_CASE("proportional with alpha = 1 equals a mixture with no B2") {
    ProportionalSpec p;
    p.alpha = 1;
    p.c1 = 2;
    p.outcomes = {{frac(1, 3), {1, 1}, {2, 5}}, {frac(2, 3), {2, 3}, {1, 4}}};
    MixtureSpec m;
    m.c1 = 2;
    // B1 = c1 D, so D ~ Erlang(k, rate * c1 / alpha)
    m.outcomes = {{frac(1, 3), {1, 1}, {2, 10}, {0, 1}}, {frac(2, 3), {2, 3}, {1, 8}, {0, 1}}};
    ModelSpec a = build_H_proportional(p), b = build_H_mixture(m);
    std::mt19937 rng(3);
    for (int t = 0; t < 30; ++t) {
        Complex q0 = random_q(rng), q1 = random_q(rng), q2 = random_q(rng);
        CHECK(std::abs(a.H(q0, q1, q2) - b.H(q0, q1, q2)) < 1e-12);
    }
    Moments ma = moments(a), mb = moments(b);
    CHECK(ma.rho1 == mb.rho1);
    CHECK(ma.EB2 == 0);
}

TEST_CASE("proportional with alpha = 1/2 equals a mixture with no D") {
    ProportionalSpec p;
    p.alpha = frac(1, 2);
    p.outcomes = {{frac(1, 2), {1, 1}, {1, 1}}, {frac(1, 2), {3, 2}, {2, 1}}};
    MixtureSpec m;
    m.outcomes = {{frac(1, 2), {1, 1}, {0, 1}, {1, 2}}, {frac(1, 2), {3, 2}, {0, 1}, {2, 2}}};
    ModelSpec a = build_H_proportional(p), b = build_H_mixture(m);
    std::mt19937 rng(4);
    for (int t = 0; t < 30; ++t) {
        Complex q0 = random_q(rng), q1 = random_q(rng), q2 = random_q(rng);
        CHECK(std::abs(a.H(q0, q1, q2) - b.H(q0, q1, q2)) < 1e-12);
    }
    CHECK(moments(a).ED == 0);
}

TEST_CASE("check_model flags instability") {
    MixtureSpec m;
    m.outcomes = {{1, {1, 1}, {1, frac(1, 2)}, {1, 2}}};  // E B1 = 2.5 > E A
    ModelSpec spec = build_H_mixture(m);
    ValidationReport r = check_model(spec);
    CHECK(r.fatal());
    CHECK_THROWS_AS(require_valid(spec), Error);
    try {
        require_valid(spec);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotStable);
    }

    ValidationReport ok = check_model(testing::example1());
    CHECK_FALSE(ok.fatal());
    CHECK_FALSE(ok.has_warning());
    REQUIRE(ok.moments.has_value());
    CHECK(ok.moments->rho1 == frac(5, 6));
}

TEST_CASE("raw models warn about ordering") {
    ModelSpec ex = testing::example1();
    ModelSpec raw = model_from_raw(ex.H, 1, 1);
    ValidationReport r = check_model(raw);
    CHECK_FALSE(r.fatal());
    CHECK(r.has_warning());
    CHECK_NOTHROW(require_valid(raw));
    CHECK(moments(raw).rho1 == frac(5, 6));
}

TEST_CASE("q0 degree violation") {
    // H = (1 + q0) / (1 + q0): not a proper rational function in q0
    RationalLST3 H;
    H.num = MultiPoly::affine(1, {1, 0, 0});
    H.den = H.num;
    ValidationReport r = check_model(model_from_raw(H, 1, 1));
    CHECK(r.fatal());
    try {
        require_valid(model_from_raw(H, 1, 1));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegreeViolation);
    }
}

TEST_CASE("invalid specs are rejected") {
    MixtureSpec m;
    m.outcomes = {{frac(1, 2), {1, 1}, {1, 3}, {1, 2}}};
    CHECK_THROWS_AS(build_H_mixture(m), Error);  // weights do not sum to 1
    m.outcomes = {{1, {0, 1}, {1, 3}, {1, 2}}};
    CHECK_THROWS_AS(build_H_mixture(m), Error);  // A cannot be a point mass
    m.outcomes = {{1, {1, 1}, {1, 0}, {1, 2}}};
    CHECK_THROWS_AS(build_H_mixture(m), Error);  // rate must be positive

    ProportionalSpec p;
    p.alpha = frac(1, 3);
    p.outcomes = {{1, {1, 1}, {1, 1}}};
    CHECK_THROWS_AS(build_H_proportional(p), Error);
    p.alpha = frac(3, 4);
    p.c2 = frac(1, 8);  // alpha/c1 < (1-alpha)/c2
    CHECK_THROWS_AS(build_H_proportional(p), Error);
}

TEST_CASE("property: H(0,0,0) = 1 and moments are linear in the mixture weights") {
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> k(1, 3), r(1, 6);
    for (int t = 0; t < 25; ++t) {
        MixtureSpec a, b, ab;
        MixtureOutcome oa{1, {unsigned(k(rng)), r(rng)}, {unsigned(k(rng)), r(rng)}, {unsigned(k(rng)), r(rng)}};
        MixtureOutcome ob{1, {unsigned(k(rng)), r(rng)}, {unsigned(k(rng)), r(rng)}, {unsigned(k(rng)), r(rng)}};
        a.outcomes = {oa};
        b.outcomes = {ob};
        oa.weight = ob.weight = frac(1, 2);
        ab.outcomes = {oa, ob};
        Moments ma = moments(build_H_mixture(a)), mb = moments(build_H_mixture(b)),
                mab = moments(build_H_mixture(ab));
        CHECK(mab.EA == (ma.EA + mb.EA) / 2);
        CHECK(mab.EB1 == (ma.EB1 + mb.EB1) / 2);
        CHECK(mab.EB2 == (ma.EB2 + mb.EB2) / 2);
        ModelSpec s = build_H_mixture(ab);
        CHECK(std::abs(s.H(0.0, 0.0, 0.0) - 1.0) < 1e-14);
    }
}
