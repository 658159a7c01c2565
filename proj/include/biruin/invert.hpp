#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "biruin/wienerhopf.hpp"

namespace biruin {

struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double v = 0.0) : rows(r), cols(c), data(r * c, v) {}
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct GridSpec {
    std::size_t M1 = 64, M2 = 64;
    double delta1 = 0.1, delta2 = 0.1;

    void validate() const;
    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// Gaussian-quadrature Fourier inversion (den Iseger). accel is the number of
// quadrature node pairs per contour point; 8 is the tabulated rule.
struct InvParams {
    double A1 = 18.4, A2 = 18.4;
    std::size_t terms1 = 1024, terms2 = 1024;
    unsigned accel = 8;
    double contour_nudge = 1e-3;
    unsigned workers = 0;  // 0 = hardware concurrency

    void validate() const;
};

inline constexpr double kInversionTol = 1e-3;

struct TailGrid {
    Matrix values;  // values(k,l) = P(W1 > k delta1, W2 > l delta2), clamped to [0,1]
    GridSpec spec;
    std::string model_hash;
    InvParams params;
    double raw_min = 0.0, raw_max = 0.0;
    bool nudged = false;
};

// A transform of two variables evaluated one s1 at a time.
class Transform2D {
public:
    virtual ~Transform2D() = default;
    // Called once with every s2 node before any row() call.
    virtual void prepare(std::span<const Complex> /*s2*/) {}
    virtual void row(Complex s1, std::span<const Complex> s2, std::span<Complex> out) const = 0;
};

class FunctionTransform2D : public Transform2D {
public:
    explicit FunctionTransform2D(std::function<Complex(Complex, Complex)> f) : f_(std::move(f)) {}
    void row(Complex s1, std::span<const Complex> s2, std::span<Complex> out) const override;

private:
    std::function<Complex(Complex, Complex)> f_;
};

// Contour points (a + i lambda_j + 2 pi i k/N)/delta, a = A/N, stored at j*(N+1) + k.
std::vector<Complex> contour_nodes(std::size_t terms, double delta, double A);

// f(l delta), l < M, from its Laplace transform F.
std::vector<double> invert_1d(const std::function<Complex(Complex)>& F, std::size_t M, double delta, double A,
                              std::size_t terms);

// f(k delta1, l delta2) on the grid, raw (no clamping).
Matrix invert_2d(Transform2D& F, const GridSpec& grid, const InvParams& p);

TailGrid invert_tail_grid(const TransformEvaluator& ev, const GridSpec& grid, const InvParams& p = {});

// P(W_which > x) for each x; which is 1 or 2.
std::vector<double> marginal_tail(const TransformEvaluator& ev, int which, std::span<const double> points,
                                  const InvParams& p = {});

// F^s = 1 - m1 - m2 + tail with m_i the marginal tails on the grid axes.
Matrix survival_grid(const TailGrid& tail, std::span<const double> m1, std::span<const double> m2);

}  // namespace biruin
