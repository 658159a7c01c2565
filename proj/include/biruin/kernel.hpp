#pragma once

#include <string>
#include <vector>

#include "biruin/model.hpp"
#include "biruin/ratfun.hpp"

namespace biruin {

inline constexpr double kAxisTol = 1e-9;

// Ktilde(s1,z) = 1 - f/g = 1 - H(-z, s1/c1, (z-s1)/c2); variables ordered (s1, z).
struct KernelRep {
    MultiPoly f{2}, g{2};
    unsigned deg_z_f = 0, deg_z_g = 0;
    Rational c1 = 1, c2 = 1;

    Complex eval(Complex s1, Complex z) const;
    // g and g - f specialized at s1, as polynomials in z
    UniPolyC g_at(Complex s1) const;
    UniPolyC gf_at(Complex s1) const;
    std::string hash() const;

    // numeric tables [power of z][power of s1]
    std::vector<std::vector<double>> gtab, htab;
};

KernelRep build_kernel(const ModelSpec& m);

struct RootSplit {
    Complex s1;
    std::vector<Root> poles_neg, poles_nonneg, zeros_neg, zeros_nonneg;
    double axis_margin = 0.0;
    int deg_g = 0, deg_gf = 0;  // effective degrees after trimming

    static unsigned count(const std::vector<Root>& r);
};

// Classifies the zeros of g and g - f at s1 by the sign of their real part.
// Re s1 > 0 is the regular case. s1 = 0 exactly is accepted as a limit point:
// the root of g - f at z = 0 is then counted as nonnegative. Any other root
// with |Re| <= kAxisTol raises RootOnAxis.
RootSplit roots_in_z(const KernelRep& K, Complex s1);

struct RoucheResult {
    bool ok = false;
    unsigned zeros_nonneg = 0, poles_nonneg = 0;
    int contour_count = -1;  // -1 when the contour recount was not requested
    explicit operator bool() const { return ok; }
};

RoucheResult rouche_check(const KernelRep& K, Complex s1, bool contour_recount = false);
// Throws CountMismatch when rouche_check fails.
void assert_rouche(const KernelRep& K, Complex s1, bool contour_recount = false);

// Zeros of p inside the rectangle [left, R] x [-R, R], by accumulating the change of
// arg p along the boundary with adaptive refinement.
int contour_zero_count(const UniPolyC& p, double left, double R);

}  // namespace biruin
