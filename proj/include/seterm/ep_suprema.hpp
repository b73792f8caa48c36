#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "seterm/closure.hpp"
#include "seterm/convex.hpp"
#include "seterm/erm.hpp"
#include "seterm/point_cloud.hpp"
#include "seterm/poset.hpp"
#include "seterm/rng.hpp"
#include "seterm/set_class.hpp"

namespace seterm {

enum class MultiplierKind { Rademacher, Gaussian };

inline double draw_multiplier(MultiplierKind kind, RngStream& rng) {
    switch (kind) {
        case MultiplierKind::Rademacher: return static_cast<double>(rng.rademacher());
        case MultiplierKind::Gaussian: return rng.normal();
    }
    return 0.0;
}

// P(|xi| > t) for the supported laws.
inline double multiplier_tail(MultiplierKind kind, double t) {
    switch (kind) {
        case MultiplierKind::Rademacher: return t < 1.0 ? 1.0 : 0.0;
        case MultiplierKind::Gaussian: return std::erfc(t / std::sqrt(2.0));
    }
    return 0.0;
}

struct SupEstimate {
    std::size_t n = 0;
    SetClassDescriptor cls{SetClassKind::LowerSets, 2, 1.0};
    double sigma = 1.0;
    std::size_t replications = 0;
    double mean_sup = 0.0;
    double std_error = 0.0;
};

namespace detail {

// sup over the class of sum_i w_i 1_C(X_i), empty set allowed (>= 0).
inline double one_sided_sup(const PointCloud& cloud, const DominancePoset* poset,
                            const SetClassDescriptor& cls, const std::vector<double>& w) {
    return run_set_oracle(cloud, poset, w, cls).objective_value;
}

} // namespace detail

// sup_{C in class} |sum_i xi_i 1_C(X_i)| / sqrt(n), from two oracle calls.
inline double symmetrized_sup(const PointCloud& cloud, const DominancePoset* poset,
                              const SetClassDescriptor& cls, const std::vector<double>& mult) {
    if (mult.size() != cloud.size())
        throw std::invalid_argument("symmetrized_sup: multiplier count mismatch");
    double a = 0.0, b = 0.0;
    if (cls.kind == SetClassKind::ConvexBodies2D) {
        auto [plus, minus] = max_weight_convex_subset_2d_pm(cloud, mult);
        a = plus.objective_value;
        b = minus.objective_value;
    } else {
        std::vector<double> neg(mult.size());
        for (std::size_t i = 0; i < mult.size(); ++i) neg[i] = -mult[i];
        a = detail::one_sided_sup(cloud, poset, cls, mult);
        b = detail::one_sided_sup(cloud, poset, cls, neg);
    }
    return std::max(a, b) / std::sqrt(static_cast<double>(cloud.size()));
}

// Mean of R independent replicates of the symmetrized supremum on fresh
// uniform clouds with fresh multipliers.
inline SupEstimate estimate_sup_expectation(const SetClassDescriptor& cls, std::size_t n,
                                            std::size_t R, MultiplierKind law,
                                            const SeedPolicy& seeds) {
    if (R < 2) throw std::invalid_argument("estimate_sup_expectation: R >= 2 required");
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t rep = 0; rep < R; ++rep) {
        RngStream crng = seeds.stream(rep, "epsup-cloud");
        PointCloud cloud = PointCloud::uniform(n, cls.dim, crng);
        RngStream mrng = seeds.stream(rep, "epsup-mult");
        std::vector<double> mult(n);
        for (double& m : mult) m = draw_multiplier(law, mrng);
        DominancePoset poset;
        const DominancePoset* pptr = nullptr;
        if (cls.kind != SetClassKind::ConvexBodies2D) {
            poset = build_dominance_poset(cloud);
            pptr = &poset;
        }
        double s = symmetrized_sup(cloud, pptr, cls, mult);
        sum += s;
        sum2 += s * s;
    }
    SupEstimate est;
    est.n = n;
    est.cls = cls;
    est.sigma = 1.0;
    est.replications = R;
    est.mean_sup = sum / static_cast<double>(R);
    double var = std::max(sum2 / static_cast<double>(R) - est.mean_sup * est.mean_sup, 0.0);
    est.std_error = std::sqrt(var / static_cast<double>(R));
    return est;
}

struct LagrangePoint {
    double lambda = 0.0;
    std::size_t size = 0; // #(C n sample)
    double value = 0.0;   // sum of multipliers over the selected samples
};

// For each lambda solves max_C sum xi_i 1_C(X_i) - lambda #(C n sample).
// Each supported size s carries the exact constrained supremum over
// {C : #(C n sample) <= s}.
inline std::vector<LagrangePoint> localized_sup_lagrangian(
    const PointCloud& cloud, const DominancePoset* poset, const SetClassDescriptor& cls,
    const std::vector<double>& mult, const std::vector<double>& lambda_grid) {
    for (std::size_t i = 1; i < lambda_grid.size(); ++i)
        if (lambda_grid[i] < lambda_grid[i - 1])
            throw std::invalid_argument("localized_sup_lagrangian: lambda grid must be sorted");
    std::vector<LagrangePoint> env;
    std::vector<double> w(mult.size());
    for (double lambda : lambda_grid) {
        if (lambda < 0.0) throw std::invalid_argument("localized_sup_lagrangian: lambda >= 0");
        for (std::size_t i = 0; i < mult.size(); ++i) w[i] = mult[i] - lambda;
        SetSelection sel = detail::run_set_oracle(cloud, poset, w, cls);
        std::size_t size = 0;
        double value = 0.0;
        if (cls.kind == SetClassKind::ConvexBodies2D) {
            size = sel.indices.size();
            for (int i : sel.indices) value += mult[i];
        } else {
            for (int v : sel.indices) {
                for (int i : poset->members()[v]) {
                    value += mult[i];
                    ++size;
                }
            }
        }
        env.push_back({lambda, size, value});
    }
    return env;
}

// ---- empirical entropy probe ----------------------------------------------

struct EntropyProbe {
    std::vector<double> eps;
    std::vector<std::size_t> packing_counts;
    double alpha_hat = 0.0;
};

namespace detail {

// Random class members as indicator vectors on the cloud.
inline std::vector<std::uint64_t> random_member_labels(const SetClassDescriptor& cls,
                                                       const PointCloud& cloud, RngStream& rng,
                                                       std::size_t words) {
    const std::size_t n = cloud.size();
    const std::size_t d = cloud.dim();
    std::vector<std::uint64_t> bits(words, 0);
    if (cls.kind == SetClassKind::ConvexBodies2D) {
        std::size_t k = 3 + rng.below(10);
        std::vector<geo::IPt> vs;
        for (std::size_t j = 0; j < k; ++j)
            vs.push_back(geo::snap(rng.uniform(), rng.uniform()));
        auto hull = geo::convex_hull(std::move(vs));
        for (std::size_t i = 0; i < n; ++i) {
            geo::IPt p = geo::snap(cloud.coord(i, 0), cloud.coord(i, 1));
            if (geo::hull_contains(hull, p)) bits[i >> 6] |= 1ull << (i & 63);
        }
        return bits;
    }
    // random staircase: union of orthants below random corners
    std::size_t k = 1 + rng.below(14);
    std::vector<std::vector<double>> corners(k, std::vector<double>(d));
    for (auto& c : corners)
        for (double& v : c) v = rng.uniform();
    const bool lower = cls.kind == SetClassKind::LowerSets;
    for (std::size_t i = 0; i < n; ++i) {
        bool in = false;
        for (const auto& c : corners) {
            bool dom = true;
            for (std::size_t kk = 0; kk < d; ++kk) {
                bool ok = lower ? cloud.coord(i, kk) <= c[kk] : cloud.coord(i, kk) >= c[kk];
                if (!ok) { dom = false; break; }
            }
            if (dom) { in = true; break; }
        }
        if (in) bits[i >> 6] |= 1ull << (i & 63);
    }
    return bits;
}

} // namespace detail

// Greedy eps-packing of random class members in L2(P_n); the log-count slope
// against log(1/eps) estimates 2 alpha (the eps^{-2 alpha} parametrization).
inline EntropyProbe greedy_packing_entropy(const SetClassDescriptor& cls, const PointCloud& cloud,
                                           const std::vector<double>& eps_grid,
                                           std::size_t family_size, std::uint64_t seed) {
    if (eps_grid.size() < 2) throw std::invalid_argument("greedy_packing_entropy: degenerate grid");
    for (double e : eps_grid)
        if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("greedy_packing_entropy: eps in (0,1)");
    const std::size_t n = cloud.size();
    const std::size_t words = (n + 63) / 64;

    RngStream rng(seed);
    std::vector<std::vector<std::uint64_t>> family;
    family.reserve(family_size);
    for (std::size_t t = 0; t < family_size; ++t)
        family.push_back(detail::random_member_labels(cls, cloud, rng, words));

    EntropyProbe probe;
    probe.eps = eps_grid;
    for (double eps : eps_grid) {
        // packing in L2(P_n): dist^2 = hamming / n
        const double thresh = eps * eps * static_cast<double>(n);
        std::vector<const std::vector<std::uint64_t>*> kept;
        for (const auto& cand : family) {
            bool ok = true;
            for (const auto* k : kept) {
                std::size_t ham = 0;
                for (std::size_t w = 0; w < words; ++w)
                    ham += static_cast<std::size_t>(__builtin_popcountll(cand[w] ^ (*k)[w]));
                if (static_cast<double>(ham) <= thresh) { ok = false; break; }
            }
            if (ok) kept.push_back(&cand);
        }
        probe.packing_counts.push_back(kept.size());
    }

    // log N(eps) ~ eps^{-2 alpha}, so regress log(log N) on log(1/eps);
    // grid points whose packing degenerates (N < 2) carry no signal
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double k = 0.0;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (probe.packing_counts[i] < 2) continue;
        double x = std::log(1.0 / eps_grid[i]);
        double y = std::log(std::log(static_cast<double>(probe.packing_counts[i])));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        k += 1.0;
    }
    if (k < 2.0) {
        probe.alpha_hat = 0.0;
        return probe;
    }
    double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    probe.alpha_hat = slope / 2.0;
    return probe;
}

// ---- multiplier inequality checks ------------------------------------------

struct MultiplierCheckReport {
    double lhs = 0.0, lhs_se = 0.0;          // E sup |sum xi_i 1_C(X_i)|
    double rhs_tail = 0.0;                    // 4 int psi(n P(|xi|>t)) dt
    double rhs_order = 0.0, rhs_order_se = 0.0; // order-statistic interpolation bound
    int violations = 0;
    double max_slack = 0.0; // max over the two inequalities of lhs - rhs
};

namespace detail {

// Least concave majorant of {(0,0),(1,m1),...,(n,mn)} evaluated by linear
// interpolation between hull knots.
struct ConcaveMajorant {
    std::vector<double> xs, ys;

    static ConcaveMajorant fit(const std::vector<double>& m) {
        ConcaveMajorant c;
        std::vector<double> px{0.0}, py{0.0};
        for (std::size_t k = 0; k < m.size(); ++k) {
            px.push_back(static_cast<double>(k + 1));
            py.push_back(m[k]);
        }
        // upper hull, x strictly increasing
        for (std::size_t i = 0; i < px.size(); ++i) {
            while (c.xs.size() >= 2) {
                std::size_t a = c.xs.size() - 2, b = c.xs.size() - 1;
                double cr = (c.xs[b] - c.xs[a]) * (py[i] - c.ys[a]) -
                            (c.ys[b] - c.ys[a]) * (px[i] - c.xs[a]);
                if (cr >= 0.0)
                    c.xs.pop_back(), c.ys.pop_back();
                else
                    break;
            }
            c.xs.push_back(px[i]);
            c.ys.push_back(py[i]);
        }
        return c;
    }

    double operator()(double x) const {
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t b = static_cast<std::size_t>(it - xs.begin());
        std::size_t a = b - 1;
        double t = (x - xs[a]) / (xs[b] - xs[a]);
        return ys[a] + t * (ys[b] - ys[a]);
    }
};

} // namespace detail

// Checks both multiplier inequalities on one configuration:
//   (tail)  E sup|sum_{i<=n} xi_i 1_C| <= 4 int_0^inf psi(n P(|xi|>t)) dt
//   (order) E sup|sum_{i<=n} xi_i 1_C| <= E sum_k (|xi|_(k)-|xi|_(k+1)) m(k)
// with psi the concave majorant of k -> m(k) = E sup|sum_{i<=k} eps_i 1_C|.
inline MultiplierCheckReport multiplier_inequality_check(
    const SetClassDescriptor& cls, std::size_t n, MultiplierKind law, const SeedPolicy& seeds,
    std::size_t reps_m = 30, std::size_t reps_lhs = 60, std::size_t reps_order = 200,
    double t_step = 1e-3, double t_max = 8.0) {
    // m(k) table from Rademacher multipliers
    std::vector<double> m(n, 0.0), m_se(n, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t rep = 0; rep < reps_m; ++rep) {
            std::uint64_t tag = k * 1000003ull + rep;
            RngStream crng = seeds.stream(tag, "mcheck-cloud");
            PointCloud cloud = PointCloud::uniform(k, cls.dim, crng);
            RngStream mrng = seeds.stream(tag, "mcheck-eps");
            std::vector<double> eps(k);
            for (double& e : eps) e = static_cast<double>(mrng.rademacher());
            DominancePoset poset;
            const DominancePoset* pp = nullptr;
            if (cls.kind != SetClassKind::ConvexBodies2D) {
                poset = build_dominance_poset(cloud);
                pp = &poset;
            }
            double s = symmetrized_sup(cloud, pp, cls, eps) * std::sqrt(static_cast<double>(k));
            sum += s;
            sum2 += s * s;
        }
        m[k - 1] = sum / static_cast<double>(reps_m);
        double var = std::max(sum2 / static_cast<double>(reps_m) - m[k - 1] * m[k - 1], 0.0);
        m_se[k - 1] = std::sqrt(var / static_cast<double>(reps_m));
    }
    detail::ConcaveMajorant psi = detail::ConcaveMajorant::fit(m);

    MultiplierCheckReport rep;

    // LHS with the requested multiplier law
    {
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t r = 0; r < reps_lhs; ++r) {
            RngStream crng = seeds.stream(r, "mcheck-lhs-cloud");
            PointCloud cloud = PointCloud::uniform(n, cls.dim, crng);
            RngStream xrng = seeds.stream(r, "mcheck-lhs-xi");
            std::vector<double> xi(n);
            for (double& x : xi) x = draw_multiplier(law, xrng);
            DominancePoset poset;
            const DominancePoset* pp = nullptr;
            if (cls.kind != SetClassKind::ConvexBodies2D) {
                poset = build_dominance_poset(cloud);
                pp = &poset;
            }
            double s = symmetrized_sup(cloud, pp, cls, xi) * std::sqrt(static_cast<double>(n));
            sum += s;
            sum2 += s * s;
        }
        rep.lhs = sum / static_cast<double>(reps_lhs);
        double var = std::max(sum2 / static_cast<double>(reps_lhs) - rep.lhs * rep.lhs, 0.0);
        rep.lhs_se = std::sqrt(var / static_cast<double>(reps_lhs));
    }

    // tail-integral bound
    {
        double integral = 0.0;
        for (double t = 0.0; t < t_max; t += t_step) {
            double a = psi(static_cast<double>(n) * multiplier_tail(law, t));
            double b = psi(static_cast<double>(n) * multiplier_tail(law, t + t_step));
            integral += 0.5 * (a + b) * t_step;
        }
        rep.rhs_tail = 4.0 * integral;
    }

    // order-statistic bound, Monte Carlo over the multiplier order statistics
    {
        double sum = 0.0, sum2 = 0.0;
        std::vector<double> mean_gap(n, 0.0);
        for (std::size_t r = 0; r < reps_order; ++r) {
            RngStream xrng = seeds.stream(r, "mcheck-order-xi");
            std::vector<double> a(n);
            for (double& x : a) x = std::fabs(draw_multiplier(law, xrng));
            std::sort(a.begin(), a.end(), std::greater<>());
            double v = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                double gap = a[k] - (k + 1 < n ? a[k + 1] : 0.0);
                mean_gap[k] += gap;
                v += gap * m[k];
            }
            sum += v;
            sum2 += v * v;
        }
        double mean = sum / static_cast<double>(reps_order);
        double var = std::max(sum2 / static_cast<double>(reps_order) - mean * mean, 0.0);
        // m-table noise enters linearly via the mean gaps
        double coef2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double g = mean_gap[k] / static_cast<double>(reps_order);
            coef2 += g * g * m_se[k] * m_se[k];
        }
        rep.rhs_order = mean;
        rep.rhs_order_se = std::sqrt(var / static_cast<double>(reps_order) + coef2);
    }

    auto check = [&](double rhs, double rhs_se) {
        double slack = rep.lhs - rhs;
        rep.max_slack = std::max(rep.max_slack, slack);
        double joint = 3.0 * std::sqrt(rep.lhs_se * rep.lhs_se + rhs_se * rhs_se);
        if (slack > joint) ++rep.violations;
    };
    check(rep.rhs_tail, 0.0);
    check(rep.rhs_order, rep.rhs_order_se);
    return rep;
}

} // namespace seterm
