#include "biruin/wienerhopf.hpp"

#include <cmath>
#include <string>

#include "biruin/error.hpp"

namespace biruin {
namespace {

Complex root_product(const std::vector<Root>& roots, Complex z) {
    Complex p = 1.0;
    for (const auto& r : roots)
        for (unsigned k = 0; k < r.multiplicity; ++k) p *= z - r.value;
    return p;
}

std::string point_str(Complex s1, Complex s2) {
    return "(" + std::to_string(s1.real()) + "," + std::to_string(s1.imag()) + "; " + std::to_string(s2.real()) + "," +
           std::to_string(s2.imag()) + ")";
}

std::vector<Root> negative_roots(const UniPolyC& p) {
    std::vector<Root> out;
    if (p.degree() < 1) return out;
    for (const auto& r : roots_univariate(p).roots) {
        if (std::abs(r.value.real()) <= kAxisTol)
            throw Error(ErrorCode::RootOnAxis, "projected kernel has a root on the imaginary axis");
        if (r.value.real() < 0.0) out.push_back(r);
    }
    return out;
}

}  // namespace

Complex ProjectedFactorization::plus(Complex s) const {
    return root_product(zeros_neg, s) / root_product(poles_neg, s);
}

ProjectedFactorization projected_factorization(const KernelRep& K) {
    // s1 <- s, z <- s
    std::vector<MultiPoly> diag = {MultiPoly::variable(1, 0), MultiPoly::variable(1, 0)};
    MultiPoly num = poly_compose_affine(K.g - K.f, diag);
    MultiPoly den = poly_compose_affine(K.g, diag);
    if (num.constant_term() != 0) throw Error(ErrorCode::InvalidSpec, "projected kernel does not vanish at 0");
    // Drop exactly one factor s; a second one means zero drift.
    MultiPoly reduced(1);
    for (const auto& [m, c] : num.terms()) reduced.add_term({m[0] - 1, 0, 0}, c);
    if (reduced.constant_term() == 0) throw Error(ErrorCode::NotStable, "projected kernel has a multiple root at 0");

    ProjectedFactorization pf;
    pf.zeros_neg = negative_roots(to_unipoly(reduced));
    pf.poles_neg = negative_roots(to_unipoly(den));
    Complex a = pf.plus(0.0);
    if (std::abs(a.imag()) > 1e-9 * std::abs(a) || !(a.real() > 0.0) || a.real() > 1.0 + 1e-9)
        throw Error(ErrorCode::BoundFailure, "atom outside (0,1]: " + std::to_string(a.real()));
    pf.atom = std::min(a.real(), 1.0);
    return pf;
}

Complex wh_plus(const RootSplit& rs, Complex z) { return root_product(rs.zeros_neg, z) / root_product(rs.poles_neg, z); }

Complex wh_plus(const KernelRep& K, Complex s1, Complex z) { return wh_plus(roots_in_z(K, s1), z); }

Complex C_eval(const KernelRep& K, const ProjectedFactorization& PF, Complex s1) {
    RootSplit rs = roots_in_z(K, s1);
    return PF.atom / PF.plus(s1) * wh_plus(rs, s1);
}

void check_bound(Complex value, Complex s1, Complex s2) {
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
        throw Error(ErrorCode::BoundFailure, "non-finite transform at " + point_str(s1, s2));
    if (std::abs(value) > 1.0 + kBoundTol)
        throw Error(ErrorCode::BoundFailure, "|psi| = " + std::to_string(std::abs(value)) + " at " + point_str(s1, s2));
}

PsiSlice::PsiSlice(const KernelRep& K, const ProjectedFactorization& PF, Complex s1) : split_(roots_in_z(K, s1)) {
    Complex proj = s1 == 0.0 ? Complex(1.0) : PF.atom / PF.plus(s1);
    pref_ = proj * wh_plus(split_, s1);
    marginal_ = proj;
}

Complex PsiSlice::operator()(Complex s2) const {
    Complex s1 = split_.s1;
    if (s2 == 0.0) return marginal_;
    return pref_ / wh_plus(split_, s1 + s2);
}

TransformPoint psi(const KernelRep& K, const ProjectedFactorization& PF, Complex s1, Complex s2) {
    if (s2.real() < 0.0) throw Error(ErrorCode::InvalidArgument, "psi needs Re s2 >= 0");
    PsiSlice sl(K, PF, s1);
    TransformPoint tp{s1, s2, sl(s2), sl.split()};
    check_bound(tp.value, s1, s2);
    return tp;
}

Complex tail_transform(const KernelRep& K, const ProjectedFactorization& PF, Complex s1, Complex s2) {
    if (!(s1.real() > 0.0) || !(s2.real() > 0.0))
        throw Error(ErrorCode::InvalidArgument, "tail transform needs Re s1 > 0 and Re s2 > 0");
    Complex p12 = psi(K, PF, s1, s2).value;
    Complex p1 = psi(K, PF, s1, 0.0).value;
    Complex p2 = psi(K, PF, 0.0, s2).value;
    return (1.0 - p1 - p2 + p12) / (s1 * s2);
}

TransformEvaluator::TransformEvaluator(KernelRep K)
    : K_(std::move(K)), pf_(projected_factorization(K_)), origin_(K_, pf_, 0.0) {}

Complex TransformEvaluator::psi(Complex s1, Complex s2) const {
    if (s2.real() < 0.0) throw Error(ErrorCode::InvalidArgument, "psi needs Re s2 >= 0");
    Complex v = s1 == 0.0 ? origin_(s2) : slice(s1)(s2);
    check_bound(v, s1, s2);
    return v;
}

Complex TransformEvaluator::psi_line1(Complex s1) const {
    Complex v = s1 == 0.0 ? Complex(1.0) : pf_.atom / pf_.plus(s1);
    check_bound(v, s1, 0.0);
    return v;
}

Complex TransformEvaluator::psi_line2(Complex s2) const {
    if (s2.real() < 0.0) throw Error(ErrorCode::InvalidArgument, "psi needs Re s2 >= 0");
    Complex v = origin_(s2);
    check_bound(v, 0.0, s2);
    return v;
}

Complex TransformEvaluator::tail(Complex s1, Complex s2) const {
    if (!(s1.real() > 0.0) || !(s2.real() > 0.0))
        throw Error(ErrorCode::InvalidArgument, "tail transform needs Re s1 > 0 and Re s2 > 0");
    return (1.0 - psi_line1(s1) - psi_line2(s2) + psi(s1, s2)) / (s1 * s2);
}

}  // namespace biruin
