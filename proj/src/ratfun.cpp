#include "biruin/ratfun.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biruin/error.hpp"

namespace biruin {

MultiPoly::MultiPoly(std::size_t nvars) : nvars_(nvars) {
    if (nvars < 1 || nvars > 3)
        throw Error(ErrorCode::ArityMismatch, "MultiPoly supports 1 to 3 variables");
}

MultiPoly MultiPoly::constant(std::size_t nvars, const Rational& c) {
    MultiPoly p(nvars);
    p.add_term({0, 0, 0}, c);
    return p;
}

MultiPoly MultiPoly::variable(std::size_t nvars, std::size_t index) {
    MultiPoly p(nvars);
    if (index >= nvars) throw Error(ErrorCode::ArityMismatch, "variable index out of range");
    Monomial m{0, 0, 0};
    m[index] = 1;
    p.add_term(m, 1);
    return p;
}

MultiPoly MultiPoly::affine(const Rational& c0, const std::vector<Rational>& coeffs) {
    MultiPoly p = constant(coeffs.size(), c0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        Monomial m{0, 0, 0};
        m[i] = 1;
        p.add_term(m, coeffs[i]);
    }
    return p;
}

unsigned MultiPoly::total_degree() const {
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[0] + m[1] + m[2]);
    return d;
}

unsigned MultiPoly::degree_in(std::size_t var) const {
    if (var >= nvars_) throw Error(ErrorCode::ArityMismatch, "variable index out of range");
    unsigned d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
    return d;
}

Rational MultiPoly::coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
}

void MultiPoly::add_term(const Monomial& m, const Rational& c) {
    for (std::size_t i = nvars_; i < 3; ++i)
        if (m[i] != 0) throw Error(ErrorCode::ArityMismatch, "exponent on unused variable");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void MultiPoly::check_same(const MultiPoly& o) const {
    if (o.nvars_ != nvars_) throw Error(ErrorCode::ArityMismatch, "variable counts differ");
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, v] : terms_) v *= c;
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_same(b);
    MultiPoly r(a.nvars_);
    for (const auto& [ma, ca] : a.terms_)
        for (const auto& [mb, cb] : b.terms_) {
            Monomial m{ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]};
            r.add_term(m, ca * cb);
        }
    return r;
}

MultiPoly MultiPoly::pow(unsigned e) const {
    MultiPoly result = constant(nvars_, 1);
    MultiPoly base = *this;
    while (e) {
        if (e & 1u) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

Rational MultiPoly::eval_exact(std::span<const Rational> point) const {
    if (point.size() != nvars_) throw Error(ErrorCode::ArityMismatch, "point arity");
    Rational sum = 0;
    for (const auto& [m, c] : terms_) {
        Rational t = c;
        for (std::size_t i = 0; i < nvars_; ++i) {
            Rational x = point[i];
            for (unsigned k = 0; k < m[i]; ++k) t *= x;
        }
        sum += t;
    }
    return sum;
}

std::string MultiPoly::to_string(const std::vector<std::string>& names) const {
    if (terms_.empty()) return "0";
    static const char* defaults[] = {"x0", "x1", "x2"};
    std::ostringstream out;
    bool first = true;
    // highest total degree first reads more naturally
    std::vector<std::pair<Monomial, Rational>> ts(terms_.begin(), terms_.end());
    std::stable_sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) {
        return a.first[0] + a.first[1] + a.first[2] > b.first[0] + b.first[1] + b.first[2];
    });
    for (const auto& [m, c] : ts) {
        Rational a = abs(c);
        out << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
        first = false;
        bool mono = m[0] + m[1] + m[2] > 0;
        if (!mono || a != 1) out << a.get_str() << (mono ? "*" : "");
        bool sep = false;
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (!m[i]) continue;
            out << (sep ? "*" : "") << (i < names.size() ? names[i] : defaults[i]);
            if (m[i] > 1) out << '^' << m[i];
            sep = true;
        }
    }
    return out.str();
}

Complex poly_eval(const MultiPoly& p, std::span<const Complex> point) {
    if (point.size() != p.nvars()) throw Error(ErrorCode::ArityMismatch, "point arity");
    std::array<std::vector<Complex>, 3> powers;
    for (std::size_t i = 0; i < p.nvars(); ++i) {
        unsigned d = p.degree_in(i);
        powers[i].resize(d + 1);
        powers[i][0] = 1.0;
        for (unsigned k = 1; k <= d; ++k) powers[i][k] = powers[i][k - 1] * point[i];
    }
    Complex sum = 0.0;
    for (const auto& [m, c] : p.terms()) {
        Complex t = c.get_d();
        for (std::size_t i = 0; i < p.nvars(); ++i) t *= powers[i][m[i]];
        sum += t;
    }
    return sum;
}

MultiPoly poly_diff(const MultiPoly& p, std::size_t var) {
    if (var >= p.nvars()) throw Error(ErrorCode::ArityMismatch, "variable index out of range");
    MultiPoly r(p.nvars());
    for (const auto& [m, c] : p.terms()) {
        if (m[var] == 0) continue;
        Monomial d = m;
        d[var] -= 1;
        r.add_term(d, c * m[var]);
    }
    return r;
}

MultiPoly poly_compose_affine(const MultiPoly& p, const std::vector<MultiPoly>& sub) {
    if (sub.size() != p.nvars()) throw Error(ErrorCode::ArityMismatch, "one substitution per variable required");
    std::size_t nv = sub.front().nvars();
    for (const auto& s : sub)
        if (s.nvars() != nv) throw Error(ErrorCode::ArityMismatch, "substitutions must share variables");
    std::array<std::vector<MultiPoly>, 3> powers;
    for (std::size_t i = 0; i < p.nvars(); ++i) {
        unsigned d = p.degree_in(i);
        powers[i].reserve(d + 1);
        powers[i].push_back(MultiPoly::constant(nv, 1));
        for (unsigned k = 1; k <= d; ++k) powers[i].push_back(powers[i].back() * sub[i]);
    }
    MultiPoly r(nv);
    for (const auto& [m, c] : p.terms()) {
        MultiPoly t = MultiPoly::constant(nv, c);
        for (std::size_t i = 0; i < p.nvars(); ++i)
            if (m[i]) t = t * powers[i][m[i]];
        r += t;
    }
    return r;
}

std::vector<MultiPoly> coefficients_in(const MultiPoly& p, std::size_t var) {
    std::vector<MultiPoly> out(p.degree_in(var) + 1, MultiPoly(p.nvars()));
    for (const auto& [m, c] : p.terms()) {
        Monomial r = m;
        r[var] = 0;
        out[m[var]].add_term(r, c);
    }
    return out;
}

UniPolyC::UniPolyC(std::vector<Complex> coeffs, double tau) : coeffs_(std::move(coeffs)) {
    double big = 0.0;
    for (const auto& c : coeffs_) big = std::max(big, std::abs(c));
    while (!coeffs_.empty() && std::abs(coeffs_.back()) <= tau * big) coeffs_.pop_back();
    if (coeffs_.empty()) coeffs_.push_back(0.0);
}

Complex UniPolyC::operator()(Complex z) const {
    Complex r = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * z + *it;
    return r;
}

double UniPolyC::abs_eval(double x) const {
    double r = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * x + std::abs(*it);
    return r;
}

UniPolyC UniPolyC::derivative() const {
    if (coeffs_.size() <= 1) return UniPolyC({0.0});
    std::vector<Complex> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
    return UniPolyC(std::move(d), 0.0);
}

unsigned RootList::total_multiplicity() const {
    unsigned n = 0;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
}

UniPolyC to_unipoly(const MultiPoly& p, double tau) {
    if (p.nvars() != 1) throw Error(ErrorCode::ArityMismatch, "univariate polynomial expected");
    std::vector<Complex> c(p.degree_in(0) + 1, 0.0);
    for (const auto& [m, v] : p.terms()) c[m[0]] = v.get_d();
    return UniPolyC(std::move(c), tau);
}

}  // namespace biruin
