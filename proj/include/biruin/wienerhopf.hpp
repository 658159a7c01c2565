#pragma once

#include <vector>

#include "biruin/kernel.hpp"

namespace biruin {

inline constexpr double kBoundTol = 1e-6;

// Factorization of the projected kernel K(s,0) = Ktilde(s,s) of the marginal queue of line 1.
struct ProjectedFactorization {
    std::vector<Root> zeros_neg;  // zeros of g(s,s)-f(s,s) with Re < 0, the root at 0 removed
    std::vector<Root> poles_neg;  // zeros of g(s,s) with Re < 0
    double atom = 0.0;            // K+_pr(0) = P(W1 = 0)

    // K+_pr(s) = prod (s - zero) / prod (s - pole)
    Complex plus(Complex s) const;
};

ProjectedFactorization projected_factorization(const KernelRep& K);

// Ktilde+_{s1}(z) = prod_{Re v<0} (z - v) / prod_{Re xi<0} (z - xi)
Complex wh_plus(const RootSplit& rs, Complex z);
Complex wh_plus(const KernelRep& K, Complex s1, Complex z);

Complex C_eval(const KernelRep& K, const ProjectedFactorization& PF, Complex s1);

struct TransformPoint {
    Complex s1, s2, value;
    RootSplit split;
};

TransformPoint psi(const KernelRep& K, const ProjectedFactorization& PF, Complex s1, Complex s2);

// Transform of (u1,u2) -> P(W1 > u1, W2 > u2); needs Re s1 > 0 and Re s2 > 0.
Complex tail_transform(const KernelRep& K, const ProjectedFactorization& PF, Complex s1, Complex s2);

// psi(s1, .) with the roots at s1 solved once.
class PsiSlice {
public:
    PsiSlice(const KernelRep& K, const ProjectedFactorization& PF, Complex s1);

    Complex s1() const { return split_.s1; }
    Complex operator()(Complex s2) const;
    Complex marginal() const { return marginal_; }  // psi(s1, 0)
    const RootSplit& split() const { return split_; }

private:
    RootSplit split_;
    Complex pref_;
    Complex marginal_;
};

// Shared, immutable evaluation context for one model; safe for concurrent use.
class TransformEvaluator {
public:
    explicit TransformEvaluator(KernelRep K);

    const KernelRep& kernel() const { return K_; }
    const ProjectedFactorization& pf() const { return pf_; }
    const PsiSlice& origin() const { return origin_; }

    PsiSlice slice(Complex s1) const { return PsiSlice(K_, pf_, s1); }
    Complex psi(Complex s1, Complex s2) const;
    Complex psi_line1(Complex s1) const;  // psi(s1, 0)
    Complex psi_line2(Complex s2) const;  // psi(0, s2)
    Complex tail(Complex s1, Complex s2) const;

private:
    KernelRep K_;
    ProjectedFactorization pf_;
    PsiSlice origin_;
};

void check_bound(Complex value, Complex s1, Complex s2);

}  // namespace biruin
