#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "biruin/invert.hpp"
#include "biruin/model.hpp"

namespace biruin {

using Rng = std::mt19937_64;

// Independent reproducible stream for (seed, stream).
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

struct Increment {
    double a = 0.0, b1 = 0.0, b2 = 0.0;
    double y1 = 0.0, y2 = 0.0;  // scaled claims b1/c1, b2/c2; y1 >= y2 exactly
};

class IncrementSampler {
public:
    // Throws UnsampleableModel when the model has no structural description.
    explicit IncrementSampler(const ModelSpec& m);
    Increment operator()(Rng& rng) const;

private:
    struct Outcome {
        unsigned na, nd, nb;
        double ra, rd, rb;
    };
    bool proportional_ = false;
    std::vector<double> cum_;
    std::vector<Outcome> out_;
    double c1_ = 1, c2_ = 1, alpha_ = 1, k1_ = 1, k2_ = 0;
};

Increment sample_increment(const ModelSpec& m, Rng& rng);

struct SimParams {
    std::uint64_t seed = 1;
    std::uint64_t burn_in = 100000;
    std::uint64_t steps = 10000000;  // per replication, burn-in included
    unsigned replications = 16;
    GridSpec grid;
    unsigned workers = 0;

    void validate() const;
};

struct SimEstimate {
    GridSpec grid;
    Matrix tail, se;
    double atom00 = 0.0, atom00_se = 0.0;  // P(W = (0,0))
    double atom1 = 0.0, atom1_se = 0.0;    // P(W1 = 0)
    double atom2 = 0.0, atom2_se = 0.0;    // P(W2 = 0)
    std::uint64_t null_events = 0;         // steps with W1 = 0 < W2
    std::uint64_t order_violations = 0;    // steps with W1 < W2
    std::uint64_t recorded_steps = 0;
    std::vector<std::string> warnings;
};

SimEstimate run_reflected(const ModelSpec& m, const SimParams& p);

// n steps of the random walk S = sum(-X) and its running maximum, one pair per path.
std::vector<std::pair<double, double>> sample_walk_maximum(const ModelSpec& m, unsigned n, std::size_t paths,
                                                           std::uint64_t seed, std::uint64_t stream);
// W_n from W_0 = 0 by the reflected recursion, one pair per path.
std::vector<std::pair<double, double>> sample_reflected(const ModelSpec& m, unsigned n, std::size_t paths,
                                                        std::uint64_t seed, std::uint64_t stream);

double ks_distance(std::vector<double> a, std::vector<double> b);
// sup over a grid of pooled quantile points of |F_a(u) - F_b(u)| for the joint ecdfs
double joint_ecdf_distance(const std::vector<std::pair<double, double>>& a,
                           const std::vector<std::pair<double, double>>& b, std::size_t cuts = 32);

struct DualityReport {
    unsigned n = 0;
    std::size_t paths = 0;
    double ks1 = 0.0, ks2 = 0.0, joint = 0.0;
    double band_marginal = 0.0, band_joint = 0.0;
    bool passed = false;
};

DualityReport duality_check(const ModelSpec& m, unsigned n, std::size_t paths, std::uint64_t seed);

}  // namespace biruin
