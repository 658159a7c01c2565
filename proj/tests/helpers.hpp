#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <random>

#include "biruin/model.hpp"

namespace testing {

using biruin::Erlang;
using biruin::Rational;

// N uniform on {1..n}; A ~ Erlang(N,1), D ~ Erlang(N,3), B2 ~ Erlang(N,2), unit income.
inline biruin::ModelSpec mixture_example(unsigned n) {
    biruin::MixtureSpec m;
    for (unsigned k = 1; k <= n; ++k) m.outcomes.push_back({Rational(1, n), {k, 1}, {k, 3}, {k, 2}});
    return biruin::build_H_mixture(m);
}

inline biruin::ModelSpec example1() { return mixture_example(2); }
inline biruin::ModelSpec example2() { return mixture_example(3); }

// Example 1 with the three orders drawn independently.
inline biruin::ModelSpec example1_decoupled() {
    biruin::MixtureSpec m;
    for (unsigned i = 1; i <= 2; ++i)
        for (unsigned j = 1; j <= 2; ++j)
            for (unsigned k = 1; k <= 2; ++k) m.outcomes.push_back({Rational(1, 8), {i, 1}, {j, 3}, {k, 2}});
    return biruin::build_H_mixture(m);
}

enum class Coupling { Positive, Independent, Negative };

// N uniform on {1,2,3}, lambda = mu = 1, alpha = 3/4, unit income.
inline biruin::ModelSpec example3(Coupling c) {
    biruin::ProportionalSpec p;
    p.alpha = Rational(3, 4);
    if (c == Coupling::Independent) {
        for (unsigned i = 1; i <= 3; ++i)
            for (unsigned j = 1; j <= 3; ++j) p.outcomes.push_back({Rational(1, 9), {i, 1}, {j, 1}});
    } else {
        for (unsigned i = 1; i <= 3; ++i)
            p.outcomes.push_back({Rational(1, 3), {i, 1}, {c == Coupling::Positive ? i : 4 - i, 1}});
    }
    return biruin::build_H_proportional(p);
}

// Zeros of g - f for Example 1, Re s1 > 0: g - f = (P - 6)(P + 3) with P = (s1+3)(1-z)(2+z).
// The first two have negative real part.
inline std::array<std::complex<double>, 4> example1_zeros(std::complex<double> s1) {
    using C = std::complex<double>;
    C a = std::sqrt(C(3.0)) * std::sqrt((s1 + 3.0) * (1.0 + 3.0 * s1));
    C b = std::sqrt(C(3.0)) * std::sqrt((s1 + 3.0) * (3.0 * s1 + 13.0));
    C d = 2.0 * (3.0 + s1);
    return {(-s1 - 3.0 - a) / d, (-s1 - 3.0 - b) / d, (-s1 - 3.0 + a) / d, (-s1 - 3.0 + b) / d};
}

// Plain bisection on [lo, hi] for a sign change.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi), fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Real root of s^3 + 4 s^2 + s - 9 and the squared modulus 9/v0 of the complex pair.
inline double cubic_real_root() {
    return bisect([](double s) { return s * s * s + 4 * s * s + s - 9; }, 0.0, 2.0);
}

}  // namespace testing
