#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "biruin/ratfun.hpp"

namespace biruin {

// H(q0,q1,q2) = E exp(-q0 A - q1 B1 - q2 B2) = num/den.
struct RationalLST3 {
    MultiPoly num{3};
    MultiPoly den{3};

    Complex operator()(Complex q0, Complex q1, Complex q2) const;
};

struct Erlang {
    unsigned order = 1;  // 0 means a point mass at zero
    Rational rate = 1;
};

// One outcome of the latent index N: A, D and B2 independent Erlangs,
// B1 = c1 (D + B2/c2).
struct MixtureOutcome {
    Rational weight;
    Erlang a, d, b2;
};

struct MixtureSpec {
    std::vector<MixtureOutcome> outcomes;
    Rational c1 = 1, c2 = 1;
};

// One outcome over (A, B); line 1 receives alpha*B, line 2 (1-alpha)*B.
struct ProportionalOutcome {
    Rational weight;
    Erlang a, b;
};

struct ProportionalSpec {
    std::vector<ProportionalOutcome> outcomes;
    Rational alpha = 1;
    Rational c1 = 1, c2 = 1;
};

using Structure = std::variant<MixtureSpec, ProportionalSpec>;

struct ModelSpec {
    RationalLST3 H;
    Rational c1 = 1, c2 = 1;
    bool ordering_certified = false;
    std::optional<Structure> structure;  // present only for builder output
};

ModelSpec build_H_mixture(const MixtureSpec& m);
ModelSpec build_H_proportional(const ProportionalSpec& p);
// Raw rational H; ordering cannot be certified.
ModelSpec model_from_raw(RationalLST3 H, const Rational& c1, const Rational& c2);

struct Moments {
    Rational EA, EB1, EB2, ED, rho1, rho2;
};

Moments moments(const ModelSpec& m);

enum class Severity { Pass, Warning, Fatal };

struct CheckItem {
    std::string name;
    Severity severity;
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckItem> items;
    std::optional<Moments> moments;

    bool fatal() const;
    bool has_warning() const;
    std::string to_string() const;
};

ValidationReport check_model(const ModelSpec& m);

// Throws NotStable / InvalidSpec / DegreeViolation on the first fatal item.
void require_valid(const ModelSpec& m);

}  // namespace biruin
