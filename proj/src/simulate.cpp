#include "biruin/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "biruin/error.hpp"
#include "biruin/parallel.hpp"

namespace biruin {
namespace {

// Uniform on (0,1].
inline double unit(Rng& rng) { return 1.0 - double(rng() >> 11) * 0x1.0p-53; }

inline double erlang(unsigned n, double rate, Rng& rng) {
    if (n == 0) return 0.0;
    if (n <= 16) {
        double prod = 1.0;
        for (unsigned i = 0; i < n; ++i) prod *= unit(rng);
        return -std::log(prod) / rate;
    }
    double s = 0.0;
    for (unsigned i = 0; i < n; ++i) s -= std::log(unit(rng));
    return s / rate;
}

inline std::size_t bin(double w, double delta, std::size_t M) {
    if (!(w > 0.0)) return 0;
    double b = std::ceil(w / delta);
    return b >= double(M) ? M : std::size_t(b);
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream), std::uint32_t(stream >> 32),
                      0x5eedu};
    return Rng(seq);
}

IncrementSampler::IncrementSampler(const ModelSpec& m) {
    if (!m.structure) throw Error(ErrorCode::UnsampleableModel, "a model given only by its transform cannot be sampled");
    double acc = 0.0;
    if (const auto* mx = std::get_if<MixtureSpec>(&*m.structure)) {
        c1_ = mx->c1.get_d();
        c2_ = mx->c2.get_d();
        for (const auto& o : mx->outcomes) {
            acc += o.weight.get_d();
            cum_.push_back(acc);
            out_.push_back({o.a.order, o.d.order, o.b2.order, o.a.rate.get_d(), o.d.rate.get_d(), o.b2.rate.get_d()});
        }
    } else {
        const auto& pr = std::get<ProportionalSpec>(*m.structure);
        proportional_ = true;
        c1_ = pr.c1.get_d();
        c2_ = pr.c2.get_d();
        alpha_ = pr.alpha.get_d();
        k1_ = Rational(pr.alpha / pr.c1).get_d();
        k2_ = Rational((1 - pr.alpha) / pr.c2).get_d();
        for (const auto& o : pr.outcomes) {
            acc += o.weight.get_d();
            cum_.push_back(acc);
            out_.push_back({o.a.order, 0, o.b.order, o.a.rate.get_d(), 1.0, o.b.rate.get_d()});
        }
    }
    cum_.back() = 1.0;
}

Increment IncrementSampler::operator()(Rng& rng) const {
    double u = unit(rng);
    std::size_t k = 0;
    while (k + 1 < cum_.size() && u > cum_[k]) ++k;
    const Outcome& o = out_[k];
    Increment x;
    x.a = erlang(o.na, o.ra, rng);
    if (proportional_) {
        double b = erlang(o.nb, o.rb, rng);
        x.y1 = b * k1_;
        x.y2 = b * k2_;
        x.b1 = alpha_ * b;
        x.b2 = (1.0 - alpha_) * b;
    } else {
        double d = erlang(o.nd, o.rd, rng);
        double b2 = erlang(o.nb, o.rb, rng);
        x.y2 = b2 / c2_;
        x.y1 = d + x.y2;
        x.b1 = c1_ * x.y1;
        x.b2 = b2;
    }
    return x;
}

Increment sample_increment(const ModelSpec& m, Rng& rng) { return IncrementSampler(m)(rng); }

void SimParams::validate() const {
    if (steps <= burn_in) throw Error(ErrorCode::InvalidArgument, "steps must exceed burn_in");
    if (replications < 1) throw Error(ErrorCode::InvalidArgument, "at least one replication is required");
    grid.validate();
}

SimEstimate run_reflected(const ModelSpec& m, const SimParams& p) {
    p.validate();
    IncrementSampler draw(m);
    SimEstimate est;
    est.grid = p.grid;
    if (m.H.den.eval_exact(std::vector<Rational>{0, 0, 0}) != 0 && moments(m).rho1 >= 1)
        est.warnings.push_back("rho1 >= 1: the reflected walk has no stationary regime");

    const std::size_t M1 = p.grid.M1, M2 = p.grid.M2;
    struct Rep {
        std::vector<std::uint64_t> hist;
        std::uint64_t zero00 = 0, zero1 = 0, zero2 = 0, null_events = 0, violations = 0;
    };
    std::vector<Rep> reps(p.replications);
    parallel_for(
        p.replications,
        [&](std::size_t r) {
            Rng rng = make_rng(p.seed, r);
            Rep& rep = reps[r];
            rep.hist.assign((M1 + 1) * (M2 + 1), 0);
            double w1 = 0.0, w2 = 0.0;
            for (std::uint64_t step = 1; step <= p.steps; ++step) {
                Increment x = draw(rng);
                w1 = std::max(w1 - (x.a - x.y1), 0.0);
                w2 = std::max(w2 - (x.a - x.y2), 0.0);
                if (step <= p.burn_in) continue;
                rep.hist[bin(w1, p.grid.delta1, M1) * (M2 + 1) + bin(w2, p.grid.delta2, M2)]++;
                bool z1 = w1 == 0.0, z2 = w2 == 0.0;
                rep.zero1 += z1;
                rep.zero2 += z2;
                rep.zero00 += z1 && z2;
                rep.null_events += z1 && !z2;
                rep.violations += w1 < w2;
            }
        },
        p.workers);

    const double n = double(p.steps - p.burn_in);
    const double R = double(p.replications);
    est.tail = Matrix(M1, M2);
    est.se = Matrix(M1, M2);
    Matrix sq(M1, M2);
    double s00 = 0, q00 = 0, s1 = 0, q1 = 0, s2 = 0, q2 = 0;
    for (const Rep& rep : reps) {
        // suffix sums over both bin indices: count{b1 > k, b2 > l}
        std::vector<double> suf((M1 + 2) * (M2 + 2), 0.0);
        auto at = [&](std::size_t i, std::size_t j) -> double& { return suf[i * (M2 + 2) + j]; };
        for (std::size_t i = M1 + 1; i-- > 0;)
            for (std::size_t j = M2 + 1; j-- > 0;)
                at(i, j) = double(rep.hist[i * (M2 + 1) + j]) + at(i + 1, j) + at(i, j + 1) - at(i + 1, j + 1);
        for (std::size_t k = 0; k < M1; ++k)
            for (std::size_t l = 0; l < M2; ++l) {
                double v = at(k + 1, l + 1) / n;
                est.tail(k, l) += v;
                sq(k, l) += v * v;
            }
        double a = rep.zero00 / n, b = rep.zero1 / n, c = rep.zero2 / n;
        s00 += a, q00 += a * a, s1 += b, q1 += b * b, s2 += c, q2 += c * c;
        est.null_events += rep.null_events;
        est.order_violations += rep.violations;
    }
    auto se = [&](double s, double q) {
        if (R < 2) return 0.0;
        double mean = s / R;
        return std::sqrt(std::max(0.0, (q - R * mean * mean) / (R - 1)) / R);
    };
    for (std::size_t i = 0; i < est.tail.data.size(); ++i) {
        est.se.data[i] = se(est.tail.data[i], sq.data[i]);
        est.tail.data[i] /= R;
    }
    est.atom00 = s00 / R, est.atom00_se = se(s00, q00);
    est.atom1 = s1 / R, est.atom1_se = se(s1, q1);
    est.atom2 = s2 / R, est.atom2_se = se(s2, q2);
    est.recorded_steps = std::uint64_t(n) * p.replications;
    return est;
}

std::vector<std::pair<double, double>> sample_walk_maximum(const ModelSpec& m, unsigned n, std::size_t paths,
                                                           std::uint64_t seed, std::uint64_t stream) {
    IncrementSampler draw(m);
    Rng rng = make_rng(seed, stream);
    std::vector<std::pair<double, double>> out(paths);
    for (auto& o : out) {
        double s1 = 0, s2 = 0, m1 = 0, m2 = 0;
        for (unsigned i = 0; i < n; ++i) {
            Increment x = draw(rng);
            s1 += x.y1 - x.a;
            s2 += x.y2 - x.a;
            m1 = std::max(m1, s1);
            m2 = std::max(m2, s2);
        }
        o = {m1, m2};
    }
    return out;
}

std::vector<std::pair<double, double>> sample_reflected(const ModelSpec& m, unsigned n, std::size_t paths,
                                                        std::uint64_t seed, std::uint64_t stream) {
    IncrementSampler draw(m);
    Rng rng = make_rng(seed, stream);
    std::vector<std::pair<double, double>> out(paths);
    for (auto& o : out) {
        double w1 = 0, w2 = 0;
        for (unsigned i = 0; i < n; ++i) {
            Increment x = draw(rng);
            w1 = std::max(w1 - (x.a - x.y1), 0.0);
            w2 = std::max(w2 - (x.a - x.y2), 0.0);
        }
        o = {w1, w2};
    }
    return out;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidArgument, "empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

double joint_ecdf_distance(const std::vector<std::pair<double, double>>& a,
                           const std::vector<std::pair<double, double>>& b, std::size_t cuts) {
    auto quantile_cuts = [&](bool first) {
        std::vector<double> pool;
        pool.reserve(a.size() + b.size());
        for (const auto& v : a) pool.push_back(first ? v.first : v.second);
        for (const auto& v : b) pool.push_back(first ? v.first : v.second);
        std::sort(pool.begin(), pool.end());
        std::vector<double> c;
        for (std::size_t k = 1; k <= cuts; ++k) c.push_back(pool[std::min(pool.size() - 1, k * pool.size() / (cuts + 1))]);
        c.erase(std::unique(c.begin(), c.end()), c.end());
        return c;
    };
    const std::vector<double> c1 = quantile_cuts(true), c2 = quantile_cuts(false);
    auto ecdf = [&](const std::vector<std::pair<double, double>>& s) {
        const std::size_t K1 = c1.size(), K2 = c2.size();
        std::vector<double> h((K1 + 1) * (K2 + 1), 0.0);
        for (const auto& v : s) {
            std::size_t i = std::lower_bound(c1.begin(), c1.end(), v.first) - c1.begin();
            std::size_t j = std::lower_bound(c2.begin(), c2.end(), v.second) - c2.begin();
            h[i * (K2 + 1) + j] += 1.0;
        }
        std::vector<double> F(K1 * K2, 0.0);
        for (std::size_t i = 0; i < K1; ++i)
            for (std::size_t j = 0; j < K2; ++j) {
                double v = h[i * (K2 + 1) + j];
                if (i) v += F[(i - 1) * K2 + j];
                if (j) v += F[i * K2 + j - 1];
                if (i && j) v -= F[(i - 1) * K2 + j - 1];
                F[i * K2 + j] = v;
            }
        for (double& v : F) v /= double(s.size());
        return F;
    };
    std::vector<double> Fa = ecdf(a), Fb = ecdf(b);
    double d = 0.0;
    for (std::size_t i = 0; i < Fa.size(); ++i) d = std::max(d, std::abs(Fa[i] - Fb[i]));
    return d;
}

DualityReport duality_check(const ModelSpec& m, unsigned n, std::size_t paths, std::uint64_t seed) {
    if (paths < 2) throw Error(ErrorCode::InvalidArgument, "duality check needs at least two paths");
    DualityReport r;
    r.n = n;
    r.paths = paths;
    auto M = sample_walk_maximum(m, n, paths, seed, 0x4d41u);
    auto W = sample_reflected(m, n, paths, seed, 0x5752u);
    std::vector<double> m1, m2, w1, w2;
    for (const auto& v : M) m1.push_back(v.first), m2.push_back(v.second);
    for (const auto& v : W) w1.push_back(v.first), w2.push_back(v.second);
    r.ks1 = ks_distance(m1, w1);
    r.ks2 = ks_distance(m2, w2);
    r.joint = joint_ecdf_distance(M, W);
    // two-sample KS critical values at level 1e-3; the joint band adds a margin for the grid sup
    const double scale = std::sqrt(2.0 / double(paths));
    r.band_marginal = 1.95 * scale;
    r.band_joint = 2.23 * scale;
    r.passed = r.ks1 <= r.band_marginal && r.ks2 <= r.band_marginal && r.joint <= r.band_joint;
    return r;
}

}  // namespace biruin
