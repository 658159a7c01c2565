#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "biruin/error.hpp"
#include "biruin/ratfun.hpp"

namespace biruin {
namespace {

using CMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

// Parlett-Reinsch diagonal balancing, radix 2.
void balance(CMat& a) {
    const Eigen::Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / 2.0, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while (c > g) {
                f /= 2.0;
                c /= 4.0;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

std::vector<Complex> companion_roots(const std::vector<Complex>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    if (n == 1) return {-c[0] / c[1]};
    CMat a = CMat::Zero(n, n);
    for (int i = 1; i < n; ++i) a(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) a(i, n - 1) = -c[i] / c[n];
    balance(a);
    Eigen::ComplexEigenSolver<CMat> es(a, false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::NonConvergent, "companion eigenvalue iteration failed");
    std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
    return out;
}

Complex polish(const UniPolyC& p, const UniPolyC& dp, Complex z) {
    double best = std::abs(p(z));
    for (int it = 0; it < 8 && best > 0.0; ++it) {
        Complex d = dp(z);
        if (d == 0.0) break;
        Complex next = z - p(z) / d;
        double v = std::abs(p(next));
        if (!(v < best)) break;
        z = next;
        best = v;
    }
    return z;
}

// Scale of the j-th Taylor coefficient of p at c: sum_k C(k,j) |a_k| |c|^(k-j).
double taylor_scale(const UniPolyC& p, double r, int j) {
    const auto& a = p.coeffs();
    double s = 0.0;
    for (int k = j; k <= p.degree(); ++k) {
        double binom = 1.0;
        for (int i = 0; i < j; ++i) binom = binom * (k - i) / (i + 1);
        s += binom * std::abs(a[k]) * std::pow(r, k - j);
    }
    return s;
}

// p^(j)(c)/j! for all j < m are negligible: c is a root of multiplicity >= m.
bool is_multiple_root(const UniPolyC& p, Complex c, unsigned m) {
    UniPolyC d = p;
    double fact = 1.0;
    for (unsigned j = 0; j < m; ++j) {
        if (j > 0) {
            d = d.derivative();
            fact *= j;
        }
        double scale = taylor_scale(p, std::abs(c), static_cast<int>(j));
        if (std::abs(d(c)) / fact > 1e-9 * scale) return false;
    }
    return true;
}

std::vector<Root> merge_within(std::vector<Root> in, double radius, bool check, const UniPolyC& p) {
    const std::size_t n = in.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double scale = std::max({1.0, std::abs(in[i].value), std::abs(in[j].value)});
            if (std::abs(in[i].value - in[j].value) <= radius * scale) parent[find(i)] = find(j);
        }
    std::vector<std::vector<std::size_t>> groups(n);
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);
    std::vector<Root> out;
    for (const auto& g : groups) {
        if (g.empty()) continue;
        if (g.size() == 1) {
            out.push_back(in[g[0]]);
            continue;
        }
        Complex centre = 0.0;
        unsigned mult = 0;
        for (auto i : g) {
            centre += in[i].value * static_cast<double>(in[i].multiplicity);
            mult += in[i].multiplicity;
        }
        centre /= static_cast<double>(mult);
        if (check && !is_multiple_root(p, centre, mult)) {
            for (auto i : g) out.push_back(in[i]);
            continue;
        }
        out.push_back({centre, mult});
    }
    return out;
}

// A root of multiplicity m is a simple root of p^(m-1); polish it there.
Complex polish_multiple(const UniPolyC& p, Complex z, unsigned m) {
    UniPolyC d = p;
    for (unsigned j = 1; j < m; ++j) d = d.derivative();
    return polish(d, d.derivative(), z);
}

}  // namespace

RootList roots_univariate(const UniPolyC& p) {
    if (p.degree() < 1) throw Error(ErrorCode::InvalidArgument, "root finding needs degree >= 1");
    std::vector<Complex> c = p.coeffs();
    unsigned zero_mult = 0;
    while (c.size() > 1 && c.front() == 0.0) {
        c.erase(c.begin());
        ++zero_mult;
    }

    std::vector<Root> cand;
    if (c.size() > 1)
        for (Complex z : companion_roots(c)) cand.push_back({z, 1});
    // A root of multiplicity m spreads by about eps^(1/m); the mean of the raw
    // eigenvalues of such a cluster stays accurate, Newton steps on p do not.
    cand = merge_within(std::move(cand), 1e-4, true, p);
    const UniPolyC dp = p.derivative();
    for (auto& r : cand) r.value = r.multiplicity == 1 ? polish(p, dp, r.value) : polish_multiple(p, r.value, r.multiplicity);
    cand = merge_within(std::move(cand), kClusterRadius, false, p);
    if (zero_mult) cand.push_back({0.0, zero_mult});

    RootList out;
    out.roots = std::move(cand);
    for (const auto& r : out.roots) {
        double scale = p.abs_eval(std::abs(r.value));
        double res = scale > 0.0 ? std::abs(p(r.value)) / scale : 0.0;
        out.residual = std::max(out.residual, res);
    }
    std::sort(out.roots.begin(), out.roots.end(), [](const Root& a, const Root& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() < b.value.imag();
    });
    if (!(out.residual <= kRootResidualTol))
        throw Error(ErrorCode::NonConvergent, "root residual " + std::to_string(out.residual));
    return out;
}

}  // namespace biruin
