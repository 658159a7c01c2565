#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace biruin {

using Rational = mpq_class;
using Complex = std::complex<double>;
using Monomial = std::array<unsigned, 3>;

// a/b in canonical form (mpq_class(a, b) alone does not reduce).
inline Rational frac(long a, long b) {
    Rational r(a, b);
    r.canonicalize();
    return r;
}

// Sparse multivariate polynomial with exact rational coefficients, 1 to 3 variables.
// Exponents of unused variables are always 0; zero coefficients are never stored.
class MultiPoly {
public:
    explicit MultiPoly(std::size_t nvars = 1);

    static MultiPoly constant(std::size_t nvars, const Rational& c);
    static MultiPoly variable(std::size_t nvars, std::size_t index);
    // c0 + sum_i coeffs[i] * x_i
    static MultiPoly affine(const Rational& c0, const std::vector<Rational>& coeffs);

    std::size_t nvars() const { return nvars_; }
    const std::map<Monomial, Rational>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    unsigned total_degree() const;
    unsigned degree_in(std::size_t var) const;
    Rational coefficient(const Monomial& m) const;
    Rational constant_term() const { return coefficient({0, 0, 0}); }

    void add_term(const Monomial& m, const Rational& c);

    MultiPoly operator-() const;
    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    MultiPoly& operator*=(const Rational& c);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
    friend MultiPoly operator*(const Rational& c, MultiPoly a) { return a *= c; }
    friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    friend bool operator<(const MultiPoly& a, const MultiPoly& b) {
        if (a.nvars_ != b.nvars_) return a.nvars_ < b.nvars_;
        return a.terms_ < b.terms_;
    }

    MultiPoly pow(unsigned e) const;
    Rational eval_exact(std::span<const Rational> point) const;

    std::string to_string(const std::vector<std::string>& names = {}) const;

private:
    void check_same(const MultiPoly& o) const;

    std::size_t nvars_;
    std::map<Monomial, Rational> terms_;
};

Complex poly_eval(const MultiPoly& p, std::span<const Complex> point);

MultiPoly poly_diff(const MultiPoly& p, std::size_t var);

// sub[i] is the polynomial (normally affine) substituted for variable i of p;
// all entries of sub must share the same variable count.
MultiPoly poly_compose_affine(const MultiPoly& p, const std::vector<MultiPoly>& sub);

// Coefficients of p as a polynomial in variable `var`, ascending powers.
std::vector<MultiPoly> coefficients_in(const MultiPoly& p, std::size_t var);

inline constexpr double kDegeneracyTol = 1e-12;
inline constexpr double kRootResidualTol = 1e-9;
inline constexpr double kClusterRadius = 1e-7;

// Univariate complex polynomial, ascending coefficients, trailing coefficients with
// modulus <= tau * max modulus are trimmed on construction.
class UniPolyC {
public:
    UniPolyC() = default;
    explicit UniPolyC(std::vector<Complex> coeffs, double tau = kDegeneracyTol);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Complex>& coeffs() const { return coeffs_; }
    Complex lead() const { return coeffs_.back(); }
    Complex operator()(Complex z) const;
    UniPolyC derivative() const;
    // sum |a_k| |z|^k, the natural scale of a rounding error in p(z)
    double abs_eval(double r) const;

private:
    std::vector<Complex> coeffs_;
};

struct Root {
    Complex value;
    unsigned multiplicity = 1;
};

struct RootList {
    std::vector<Root> roots;
    // max over roots of |p(r)| / sum_k |a_k||r|^k, i.e. relative backward error
    double residual = 0.0;
    unsigned total_multiplicity() const;
};

RootList roots_univariate(const UniPolyC& p);

// Exact univariate polynomial (single variable) into doubles.
UniPolyC to_unipoly(const MultiPoly& p, double tau = kDegeneracyTol);

}  // namespace biruin
