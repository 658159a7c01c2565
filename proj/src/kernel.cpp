#include "biruin/kernel.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>

#include "biruin/error.hpp"

namespace biruin {
namespace {

std::vector<std::vector<double>> table(const MultiPoly& p) {
    std::vector<std::vector<double>> t(p.degree_in(1) + 1);
    unsigned ds = p.degree_in(0);
    for (auto& row : t) row.assign(ds + 1, 0.0);
    for (const auto& [m, c] : p.terms()) t[m[1]][m[0]] = c.get_d();
    return t;
}

UniPolyC specialize(const std::vector<std::vector<double>>& t, Complex s1) {
    std::vector<Complex> c(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        Complex v = 0.0;
        for (auto it = t[k].rbegin(); it != t[k].rend(); ++it) v = v * s1 + *it;
        c[k] = v;
    }
    return UniPolyC(std::move(c));
}

// Rescale f and g by one rational so that together they have coprime integer
// coefficients and g(0,0) > 0.
void make_primitive(MultiPoly& f, MultiPoly& g) {
    mpz_class l = 1, d = 0;
    for (const MultiPoly* p : {&f, &g})
        for (const auto& [m, c] : p->terms()) l = lcm(l, c.get_den());
    for (const MultiPoly* p : {&f, &g})
        for (const auto& [m, c] : p->terms()) {
            mpz_class n = c.get_num() * (l / c.get_den());
            d = gcd(d, n);
        }
    Rational scale(l, d);
    scale.canonicalize();
    if (g.constant_term() < 0) scale = -scale;
    f *= scale;
    g *= scale;
}

bool near_axis(Complex r) { return std::abs(r.real()) <= kAxisTol; }

}  // namespace

Complex KernelRep::eval(Complex s1, Complex z) const {
    const Complex pt[2] = {s1, z};
    return 1.0 - poly_eval(f, pt) / poly_eval(g, pt);
}

UniPolyC KernelRep::g_at(Complex s1) const { return specialize(gtab, s1); }
UniPolyC KernelRep::gf_at(Complex s1) const { return specialize(htab, s1); }

std::string KernelRep::hash() const {
    std::string s = f.to_string() + "|" + g.to_string() + "|" + c1.get_str() + "|" + c2.get_str();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

KernelRep build_kernel(const ModelSpec& m) {
    require_valid(m);
    KernelRep K;
    K.c1 = m.c1;
    K.c2 = m.c2;
    // q0 <- -z, q1 <- s1/c1, q2 <- (z - s1)/c2
    std::vector<MultiPoly> sub = {
        MultiPoly::affine(0, {0, -1}),
        MultiPoly::affine(0, {Rational(1 / m.c1), 0}),
        MultiPoly::affine(0, {Rational(-1 / m.c2), Rational(1 / m.c2)}),
    };
    K.f = poly_compose_affine(m.H.num, sub);
    K.g = poly_compose_affine(m.H.den, sub);
    make_primitive(K.f, K.g);
    K.deg_z_f = K.f.is_zero() ? 0 : K.f.degree_in(1);
    K.deg_z_g = K.g.degree_in(1);
    if (!K.f.is_zero() && K.deg_z_f >= K.deg_z_g)
        throw Error(ErrorCode::DegreeViolation, "deg_z f = " + std::to_string(K.deg_z_f) +
                                                    " is not below deg_z g = " + std::to_string(K.deg_z_g));
    if (K.f.constant_term() != K.g.constant_term() || K.g.constant_term() == 0)
        throw Error(ErrorCode::InvalidSpec, "kernel does not vanish at the origin");
    K.gtab = table(K.g);
    K.htab = table(K.g - K.f);
    return K;
}

unsigned RootSplit::count(const std::vector<Root>& r) {
    unsigned n = 0;
    for (const auto& x : r) n += x.multiplicity;
    return n;
}

RootSplit roots_in_z(const KernelRep& K, Complex s1) {
    if (s1.real() < 0.0 || (s1.real() == 0.0 && s1.imag() != 0.0))
        throw Error(ErrorCode::InvalidArgument, "roots_in_z needs Re s1 > 0 or s1 = 0");
    const bool origin = s1 == 0.0;
    RootSplit rs;
    rs.s1 = s1;
    rs.axis_margin = INFINITY;

    auto classify = [&](const UniPolyC& p, std::vector<Root>& neg, std::vector<Root>& nonneg, bool boundary_ok) {
        if (p.degree() < 1) return;
        for (const auto& r : roots_univariate(p).roots) {
            if (near_axis(r.value)) {
                if (boundary_ok && std::abs(r.value) <= kAxisTol) {
                    nonneg.push_back(r);
                    continue;
                }
                throw Error(ErrorCode::RootOnAxis, "root near the imaginary axis at s1 = (" +
                                                       std::to_string(s1.real()) + "," + std::to_string(s1.imag()) + ")");
            }
            rs.axis_margin = std::min(rs.axis_margin, std::abs(r.value.real()));
            (r.value.real() < 0.0 ? neg : nonneg).push_back(r);
        }
    };

    UniPolyC g = K.g_at(s1), h = K.gf_at(s1);
    rs.deg_g = g.degree();
    rs.deg_gf = h.degree();
    classify(g, rs.poles_neg, rs.poles_nonneg, false);
    classify(h, rs.zeros_neg, rs.zeros_nonneg, origin);
    return rs;
}

int contour_zero_count(const UniPolyC& p, double left, double R) {
    const double pi = std::numbers::pi;
    auto seg = [&](auto&& self, Complex a, Complex b, Complex pa, Complex pb, int depth) -> double {
        Complex m = 0.5 * (a + b);
        Complex pm = p(m);
        if (pm == 0.0) throw Error(ErrorCode::RootOnAxis, "zero on the counting contour");
        double d = std::arg(pb / pa);
        double d1 = std::arg(pm / pa), d2 = std::arg(pb / pm);
        if (depth > 60 || (std::abs(d) < pi / 8 && std::abs(d1 + d2 - d) < 1e-9)) return d1 + d2;
        return self(self, a, m, pa, pm, depth + 1) + self(self, m, b, pm, pb, depth + 1);
    };
    const Complex corners[5] = {{left, -R}, {R, -R}, {R, R}, {left, R}, {left, -R}};
    const int pieces = 64;
    double total = 0.0;
    for (int e = 0; e < 4; ++e)
        for (int k = 0; k < pieces; ++k) {
            Complex a = corners[e] + (corners[e + 1] - corners[e]) * (double(k) / pieces);
            Complex b = corners[e] + (corners[e + 1] - corners[e]) * (double(k + 1) / pieces);
            Complex pa = p(a), pb = p(b);
            if (pa == 0.0 || pb == 0.0) throw Error(ErrorCode::RootOnAxis, "zero on the counting contour");
            total += seg(seg, a, b, pa, pb, 0);
        }
    return static_cast<int>(std::lround(total / (2.0 * pi)));
}

RoucheResult rouche_check(const KernelRep& K, Complex s1, bool contour_recount) {
    if (!(s1.real() > 0.0)) throw Error(ErrorCode::InvalidArgument, "rouche_check needs Re s1 > 0");
    RootSplit rs = roots_in_z(K, s1);
    RoucheResult r;
    r.zeros_nonneg = RootSplit::count(rs.zeros_nonneg);
    r.poles_nonneg = RootSplit::count(rs.poles_nonneg);
    r.ok = r.zeros_nonneg == r.poles_nonneg;
    if (contour_recount) {
        UniPolyC h = K.gf_at(s1);
        double R = 1.0;
        for (const auto& z : rs.zeros_neg) R = std::max(R, std::abs(z.value));
        for (const auto& z : rs.zeros_nonneg) R = std::max(R, std::abs(z.value));
        r.contour_count = contour_zero_count(h, -kAxisTol / 2, 2.0 * R + 1.0);
        r.ok = r.ok && r.contour_count == static_cast<int>(r.zeros_nonneg);
    }
    return r;
}

void assert_rouche(const KernelRep& K, Complex s1, bool contour_recount) {
    RoucheResult r = rouche_check(K, s1, contour_recount);
    if (!r)
        throw Error(ErrorCode::CountMismatch, "zeros in Re z >= 0: " + std::to_string(r.zeros_nonneg) +
                                                  ", poles: " + std::to_string(r.poles_nonneg) +
                                                  (r.contour_count >= 0 ? ", contour: " + std::to_string(r.contour_count) : ""));
}

}  // namespace biruin
