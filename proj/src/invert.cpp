#include "biruin/invert.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "biruin/error.hpp"
#include "biruin/parallel.hpp"

namespace biruin {
namespace {

// Gaussian quadrature rule of den Iseger for the Poisson-summation formula, 16 points
// folded into 8 conjugate pairs.
constexpr int kNodes = 8;
constexpr double kLambda[kNodes] = {4.44089209850063e-16, 6.28318530717958, 12.5663706962589, 18.8502914166954,
                                    25.2872172156717,     34.2969716635260, 56.1725527716607, 170.533131190126};
constexpr double kBeta[kNodes] = {1.00000000000000, 1.00000000000004, 1.00000015116847, 1.00081841700481,
                                  1.09580332705189, 2.00687652338724, 5.94277512934943, 54.9537264520382};

bool power_of_two(std::size_t n) { return n && !(n & (n - 1)); }

// Folds the N+1 spectral values and sums the damped cosine series for l < M.
template <class T>
std::vector<T> cosine_sum(std::vector<T> fk, std::size_t M, std::size_t N, double A, const std::vector<double>& cos_tab) {
    fk[0] = (fk[0] + fk[N]) * 0.5;
    const double a = A / double(N);
    std::vector<T> out(M);
    for (std::size_t l = 0; l < M; ++l) {
        T acc = T(0);
        const double* c = &cos_tab[l * N];
        for (std::size_t k = 0; k < N; ++k) acc += c[k] * fk[k];
        out[l] = acc * (2.0 * std::exp(a * double(l)) / double(N));
    }
    return out;
}

std::vector<double> cos_table(std::size_t M, std::size_t N) {
    std::vector<double> t(M * N);
    for (std::size_t l = 0; l < M; ++l)
        for (std::size_t k = 0; k < N; ++k)
            t[l * N + k] = std::cos(2.0 * std::numbers::pi * double((k * l) % N) / double(N));
    return t;
}

void check_terms(std::size_t terms, std::size_t M) {
    if (!power_of_two(terms) || terms < 64)
        throw Error(ErrorCode::InvalidArgument, "node counts must be powers of two >= 64");
    if (terms < 2 * M) throw Error(ErrorCode::InvalidArgument, "node count must be at least twice the grid size");
}

class TailTransform : public Transform2D {
public:
    explicit TailTransform(const TransformEvaluator& ev) : ev_(ev) {}

    void prepare(std::span<const Complex> s2) override {
        line2_.resize(s2.size());
        for (std::size_t i = 0; i < s2.size(); ++i) line2_[i] = ev_.psi_line2(s2[i]);
    }

    void row(Complex s1, std::span<const Complex> s2, std::span<Complex> out) const override {
        PsiSlice sl = ev_.slice(s1);
        const Complex m1 = sl.marginal();
        check_bound(m1, s1, 0.0);
        for (std::size_t i = 0; i < s2.size(); ++i) {
            Complex v = sl(s2[i]);
            check_bound(v, s1, s2[i]);
            out[i] = (1.0 - m1 - line2_[i] + v) / (s1 * s2[i]);
        }
    }

private:
    const TransformEvaluator& ev_;
    std::vector<Complex> line2_;
};

TailGrid finish(Matrix raw, const GridSpec& grid, const InvParams& p, const std::string& hash) {
    TailGrid t;
    t.spec = grid;
    t.params = p;
    t.model_hash = hash;
    t.raw_min = *std::min_element(raw.data.begin(), raw.data.end());
    t.raw_max = *std::max_element(raw.data.begin(), raw.data.end());
    for (double v : raw.data)
        if (!std::isfinite(v) || v < -kInversionTol || v > 1.0 + kInversionTol)
            throw Error(ErrorCode::InversionNonConvergent,
                        "inverted tail outside [0,1]: min " + std::to_string(t.raw_min) + ", max " + std::to_string(t.raw_max));
    for (double& v : raw.data) v = std::clamp(v, 0.0, 1.0);
    t.values = std::move(raw);
    return t;
}

}  // namespace

// Contour nodes (a + i lambda_j + 2 pi i k / N)/delta, index j*(N+1) + k.
std::vector<Complex> contour_nodes(std::size_t N, double delta, double A) {
    const double a = A / double(N);
    std::vector<Complex> s(kNodes * (N + 1));
    for (int j = 0; j < kNodes; ++j)
        for (std::size_t k = 0; k <= N; ++k)
            s[j * (N + 1) + k] = Complex(a, kLambda[j] + 2.0 * std::numbers::pi * double(k) / double(N)) / delta;
    return s;
}

void GridSpec::validate() const {
    if (M1 < 2 || M2 < 2) throw Error(ErrorCode::InvalidArgument, "grid needs M1, M2 >= 2");
    if (!(delta1 > 0.0) || !(delta2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid spacings must be positive");
}

void InvParams::validate() const {
    if (!(A1 > 0.0) || !(A2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "damping exponents must be positive");
    if (!power_of_two(terms1) || !power_of_two(terms2) || terms1 < 64 || terms2 < 64)
        throw Error(ErrorCode::InvalidArgument, "node counts must be powers of two >= 64");
    if (accel != kNodes) throw Error(ErrorCode::InvalidArgument, "only the 8-pair quadrature rule is tabulated");
    if (!(contour_nudge > 0.0)) throw Error(ErrorCode::InvalidArgument, "contour_nudge must be positive");
}

void FunctionTransform2D::row(Complex s1, std::span<const Complex> s2, std::span<Complex> out) const {
    for (std::size_t i = 0; i < s2.size(); ++i) out[i] = f_(s1, s2[i]);
}

std::vector<double> invert_1d(const std::function<Complex(Complex)>& F, std::size_t M, double delta, double A,
                              std::size_t terms) {
    check_terms(terms, M);
    const std::size_t N = terms;
    std::vector<Complex> s = contour_nodes(N, delta, A);
    std::vector<double> fk(N + 1, 0.0);
    for (int j = 0; j < kNodes; ++j)
        for (std::size_t k = 0; k <= N; ++k) fk[k] += 2.0 / delta * kBeta[j] * F(s[j * (N + 1) + k]).real();
    return cosine_sum(std::move(fk), M, N, A, cos_table(M, N));
}

Matrix invert_2d(Transform2D& F, const GridSpec& grid, const InvParams& p) {
    grid.validate();
    p.validate();
    check_terms(p.terms1, grid.M1);
    check_terms(p.terms2, grid.M2);
    const std::size_t N1 = p.terms1, N2 = p.terms2, M1 = grid.M1, M2 = grid.M2;
    std::vector<Complex> s1 = contour_nodes(N1, grid.delta1, p.A1);
    std::vector<Complex> base2 = contour_nodes(N2, grid.delta2, p.A2);
    // s2 list: every node followed by its conjugate
    std::vector<Complex> s2(2 * base2.size());
    for (std::size_t i = 0; i < base2.size(); ++i) {
        s2[2 * i] = base2[i];
        s2[2 * i + 1] = std::conj(base2[i]);
    }
    F.prepare(s2);
    const std::vector<double> cos2 = cos_table(M2, N2), cos1 = cos_table(M1, N1);

    // inverse in s2 for every s1 node: G[i][l2]
    std::vector<Complex> G(s1.size() * M2);
    parallel_for(
        s1.size(),
        [&](std::size_t i) {
            std::vector<Complex> vals(s2.size());
            F.row(s1[i], s2, vals);
            std::vector<Complex> fk(N2 + 1, 0.0);
            for (int j = 0; j < kNodes; ++j)
                for (std::size_t k = 0; k <= N2; ++k) {
                    std::size_t idx = 2 * (j * (N2 + 1) + k);
                    fk[k] += (2.0 / grid.delta2) * kBeta[j] * 0.5 * (vals[idx] + vals[idx + 1]);
                }
            std::vector<Complex> g = cosine_sum(std::move(fk), M2, N2, p.A2, cos2);
            std::copy(g.begin(), g.end(), G.begin() + i * M2);
        },
        p.workers);

    Matrix out(M1, M2);
    for (std::size_t l2 = 0; l2 < M2; ++l2) {
        std::vector<double> fk(N1 + 1, 0.0);
        for (int j = 0; j < kNodes; ++j)
            for (std::size_t k = 0; k <= N1; ++k)
                fk[k] += (2.0 / grid.delta1) * kBeta[j] * G[(j * (N1 + 1) + k) * M2 + l2].real();
        std::vector<double> col = cosine_sum(std::move(fk), M1, N1, p.A1, cos1);
        for (std::size_t l1 = 0; l1 < M1; ++l1) out(l1, l2) = col[l1];
    }
    return out;
}

TailGrid invert_tail_grid(const TransformEvaluator& ev, const GridSpec& grid, const InvParams& p) {
    TailTransform T(ev);
    try {
        return finish(invert_2d(T, grid, p), grid, p, ev.kernel().hash());
    } catch (const Error& e) {
        if (e.code() != ErrorCode::RootOnAxis) throw;
    }
    InvParams q = p;
    q.A1 += p.contour_nudge;
    q.A2 += p.contour_nudge;
    TailGrid t = finish(invert_2d(T, grid, q), grid, q, ev.kernel().hash());
    t.nudged = true;
    return t;
}

std::vector<double> marginal_tail(const TransformEvaluator& ev, int which, std::span<const double> points,
                                  const InvParams& p) {
    if (which != 1 && which != 2) throw Error(ErrorCode::InvalidArgument, "line index must be 1 or 2");
    p.validate();
    const double A = which == 1 ? p.A1 : p.A2;
    const std::size_t terms = which == 1 ? p.terms1 : p.terms2;
    auto F = [&](Complex s) {
        Complex psi = which == 1 ? ev.psi_line1(s) : ev.psi_line2(s);
        return (1.0 - psi) / s;
    };
    auto clamp_all = [](std::vector<double> v) {
        for (double& x : v) {
            if (!std::isfinite(x) || x < -kInversionTol || x > 1.0 + kInversionTol)
                throw Error(ErrorCode::InversionNonConvergent, "marginal tail outside [0,1]: " + std::to_string(x));
            x = std::clamp(x, 0.0, 1.0);
        }
        return v;
    };
    if (points.empty()) return {};

    // A regular grid starting at 0 is done in one pass.
    const std::size_t n = points.size();
    if (n >= 2 && points[0] == 0.0 && points[1] > 0.0 && 2 * n <= terms) {
        const double d = points[1];
        bool regular = true;
        for (std::size_t i = 0; i < n && regular; ++i) regular = std::abs(points[i] - double(i) * d) <= 1e-12 * (1.0 + points[i]);
        if (regular) return clamp_all(invert_1d(F, n, d, A, terms));
    }
    std::vector<double> out(n);
    const std::size_t slot = 8;
    for (std::size_t i = 0; i < n; ++i) {
        if (points[i] < 0.0) throw Error(ErrorCode::InvalidArgument, "tail points must be nonnegative");
        if (points[i] == 0.0)
            out[i] = invert_1d(F, 2, 1.0, A, terms)[0];
        else
            out[i] = invert_1d(F, 2 * slot, points[i] / double(slot), A, terms)[slot];
    }
    return clamp_all(std::move(out));
}

Matrix survival_grid(const TailGrid& tail, std::span<const double> m1, std::span<const double> m2) {
    const Matrix& t = tail.values;
    if (m1.size() != t.rows || m2.size() != t.cols) throw Error(ErrorCode::ShapeMismatch, "marginals do not match the grid");
    Matrix fs(t.rows, t.cols);
    for (std::size_t i = 0; i < t.rows; ++i)
        for (std::size_t j = 0; j < t.cols; ++j) fs(i, j) = std::clamp(1.0 - m1[i] - m2[j] + t(i, j), 0.0, 1.0);
    return fs;
}

}  // namespace biruin
