#include "biruin/model.hpp"

#include <map>
#include <sstream>

#include "biruin/error.hpp"

namespace biruin {
namespace {

// Erlang(n, rate) LST factor (rate / L)^n with L = rate + linear form in q.
struct Factor {
    MultiPoly L;
    Rational rate;
    unsigned n;
};

struct Term {
    Rational weight;
    std::vector<Factor> factors;
};

MultiPoly q(std::size_t i) { return MultiPoly::variable(3, i); }
MultiPoly k(const Rational& c) { return MultiPoly::constant(3, c); }

// Sum of weighted products over a common denominator: the product of every
// distinct linear factor raised to its largest exponent.
RationalLST3 assemble(const std::vector<Term>& terms) {
    std::map<MultiPoly, unsigned> top;
    std::vector<std::map<MultiPoly, std::pair<unsigned, Rational>>> merged;
    for (const auto& t : terms) {
        std::map<MultiPoly, std::pair<unsigned, Rational>> m;
        for (const auto& f : t.factors) {
            if (f.n == 0) continue;
            auto& e = m.try_emplace(f.L, 0u, f.rate).first->second;
            e.first += f.n;
        }
        for (const auto& [L, e] : m) top[L] = std::max(top[L], e.first);
        merged.push_back(std::move(m));
    }
    RationalLST3 H;
    H.den = k(1);
    for (const auto& [L, e] : top) H.den = H.den * L.pow(e);
    H.num = MultiPoly(3);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        MultiPoly t = k(terms[i].weight);
        for (const auto& [L, e] : top) {
            auto it = merged[i].find(L);
            unsigned used = it == merged[i].end() ? 0 : it->second.first;
            if (used) {
                Rational r = 1;
                for (unsigned j = 0; j < used; ++j) r *= it->second.second;
                t *= r;
            }
            t = t * L.pow(e - used);
        }
        H.num += t;
    }
    return H;
}

void check_weights(const std::vector<Rational>& w) {
    if (w.empty()) throw Error(ErrorCode::InvalidSpec, "at least one outcome is required");
    Rational sum = 0;
    for (const auto& x : w) {
        if (x < 0 || x > 1) throw Error(ErrorCode::InvalidSpec, "weights must lie in [0,1]");
        sum += x;
    }
    if (sum != 1) throw Error(ErrorCode::InvalidSpec, "weights must sum to 1, got " + sum.get_str());
}

void check_erlang(const Erlang& e, bool allow_zero, const char* what) {
    if (e.rate <= 0) throw Error(ErrorCode::InvalidSpec, std::string(what) + " rate must be positive");
    if (e.order == 0 && !allow_zero) throw Error(ErrorCode::InvalidSpec, std::string(what) + " order must be >= 1");
}

void check_rates(const Rational& c1, const Rational& c2) {
    if (c1 <= 0 || c2 <= 0) throw Error(ErrorCode::InvalidSpec, "income rates must be positive");
}

}  // namespace

Complex RationalLST3::operator()(Complex q0, Complex q1, Complex q2) const {
    const Complex pt[3] = {q0, q1, q2};
    return poly_eval(num, pt) / poly_eval(den, pt);
}

ModelSpec build_H_mixture(const MixtureSpec& m) {
    check_rates(m.c1, m.c2);
    std::vector<Rational> w;
    std::vector<Term> terms;
    for (const auto& o : m.outcomes) {
        check_erlang(o.a, false, "A");
        check_erlang(o.d, true, "D");
        check_erlang(o.b2, true, "B2");
        w.push_back(o.weight);
        // exponent -q0 A - q1 c1 D - (q1 c1/c2 + q2) B2
        terms.push_back({o.weight,
                         {{k(o.a.rate) + q(0), o.a.rate, o.a.order},
                          {k(o.d.rate) + Rational(m.c1) * q(1), o.d.rate, o.d.order},
                          {k(o.b2.rate) + Rational(m.c1 / m.c2) * q(1) + q(2), o.b2.rate, o.b2.order}}});
    }
    check_weights(w);
    ModelSpec out;
    out.H = assemble(terms);
    out.c1 = m.c1;
    out.c2 = m.c2;
    out.ordering_certified = true;
    out.structure = m;
    return out;
}

ModelSpec build_H_proportional(const ProportionalSpec& p) {
    check_rates(p.c1, p.c2);
    if (p.alpha < Rational(1, 2) || p.alpha > 1) throw Error(ErrorCode::InvalidSpec, "alpha must lie in [1/2, 1]");
    if (p.alpha / p.c1 < (1 - p.alpha) / p.c2)
        throw Error(ErrorCode::InvalidSpec, "alpha/c1 >= (1-alpha)/c2 is required for ordered claims");
    std::vector<Rational> w;
    std::vector<Term> terms;
    for (const auto& o : p.outcomes) {
        check_erlang(o.a, false, "A");
        check_erlang(o.b, false, "B");
        w.push_back(o.weight);
        terms.push_back({o.weight,
                         {{k(o.a.rate) + q(0), o.a.rate, o.a.order},
                          {k(o.b.rate) + Rational(p.alpha) * q(1) + Rational(1 - p.alpha) * q(2), o.b.rate,
                           o.b.order}}});
    }
    check_weights(w);
    ModelSpec out;
    out.H = assemble(terms);
    out.c1 = p.c1;
    out.c2 = p.c2;
    out.ordering_certified = true;
    out.structure = p;
    return out;
}

ModelSpec model_from_raw(RationalLST3 H, const Rational& c1, const Rational& c2) {
    check_rates(c1, c2);
    if (H.num.nvars() != 3 || H.den.nvars() != 3) throw Error(ErrorCode::ArityMismatch, "H must be trivariate");
    ModelSpec out;
    out.H = std::move(H);
    out.c1 = c1;
    out.c2 = c2;
    out.ordering_certified = false;
    return out;
}

Moments moments(const ModelSpec& m) {
    const Rational zero[3] = {0, 0, 0};
    Rational N0 = m.H.num.eval_exact(zero), D0 = m.H.den.eval_exact(zero);
    if (D0 == 0) throw Error(ErrorCode::InvalidSpec, "den(0,0,0) = 0");
    auto mean = [&](std::size_t i) {
        Rational Ni = poly_diff(m.H.num, i).eval_exact(zero);
        Rational Di = poly_diff(m.H.den, i).eval_exact(zero);
        return Rational(-(Ni * D0 - N0 * Di) / (D0 * D0));
    };
    Moments r;
    r.EA = mean(0);
    r.EB1 = mean(1);
    r.EB2 = mean(2);
    r.ED = r.EB1 / m.c1 - r.EB2 / m.c2;
    if (r.EA == 0) throw Error(ErrorCode::InvalidSpec, "E A = 0");
    r.rho1 = r.EB1 / (m.c1 * r.EA);
    r.rho2 = r.EB2 / (m.c2 * r.EA);
    return r;
}

bool ValidationReport::fatal() const {
    for (const auto& i : items)
        if (i.severity == Severity::Fatal) return true;
    return false;
}

bool ValidationReport::has_warning() const {
    for (const auto& i : items)
        if (i.severity == Severity::Warning) return true;
    return false;
}

std::string ValidationReport::to_string() const {
    std::ostringstream out;
    for (const auto& i : items) {
        const char* tag = i.severity == Severity::Pass ? "PASS" : i.severity == Severity::Warning ? "WARN" : "FAIL";
        out << tag << "  " << i.name;
        if (!i.detail.empty()) out << "  (" << i.detail << ")";
        out << '\n';
    }
    return out.str();
}

ValidationReport check_model(const ModelSpec& m) {
    ValidationReport rep;
    auto add = [&](std::string name, bool ok, Severity bad, std::string detail = {}) {
        rep.items.push_back({std::move(name), ok ? Severity::Pass : bad, std::move(detail)});
    };
    const Rational zero[3] = {0, 0, 0};
    Rational N0 = m.H.num.eval_exact(zero), D0 = m.H.den.eval_exact(zero);
    add("rational structure", D0 != 0 && N0 == D0, Severity::Fatal,
        D0 == 0 ? "den(0,0,0) = 0" : (N0 != D0 ? "H(0,0,0) != 1" : ""));
    unsigned dn = m.H.num.degree_in(0), dd = m.H.den.degree_in(0);
    add("q0 degree", dn < dd, Severity::Fatal,
        "deg_q0 num = " + std::to_string(dn) + ", deg_q0 den = " + std::to_string(dd));
    if (D0 == 0) return rep;

    Moments mo;
    try {
        mo = moments(m);
    } catch (const Error& e) {
        add("E A > 0", false, Severity::Fatal, e.what());
        return rep;
    }
    rep.moments = mo;
    add("E A > 0", mo.EA > 0, Severity::Fatal, "E A = " + mo.EA.get_str());
    add("rho1 < 1", mo.rho1 < 1, Severity::Fatal, "rho1 = " + mo.rho1.get_str());
    add("rho2 < 1", mo.rho2 < 1, Severity::Fatal, "rho2 = " + mo.rho2.get_str());
    add("E D >= 0", mo.ED >= 0, Severity::Fatal, "E D = " + mo.ED.get_str());
    add("ordering certified", m.ordering_certified, Severity::Warning,
        m.ordering_certified ? "" : "B1/c1 >= B2/c2 cannot be verified from H alone");
    return rep;
}

void require_valid(const ModelSpec& m) {
    ValidationReport rep = check_model(m);
    for (const auto& i : rep.items) {
        if (i.severity != Severity::Fatal) continue;
        ErrorCode code = ErrorCode::InvalidSpec;
        if (i.name == "q0 degree") code = ErrorCode::DegreeViolation;
        if (i.name.rfind("rho", 0) == 0) code = ErrorCode::NotStable;
        throw Error(code, i.name + ": " + i.detail);
    }
}

}  // namespace biruin
