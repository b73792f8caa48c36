#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "seterm/closure.hpp"
#include "seterm/max_flow.hpp"
#include "seterm/point_cloud.hpp"
#include "seterm/poset.hpp"
#include "seterm/rng.hpp"

namespace seterm {

struct IsotonicFit {
    std::vector<std::vector<int>> blocks; // node indices per level set
    std::vector<double> block_values;
    std::vector<double> fitted;           // per node
    double certificate_slack = 0.0;
};

namespace detail {

// Max-weight upper set of the suborder induced on `nodes` (values may be
// negative; empty set allowed). Arcs cover every comparable pair unless the
// caller passes the reduced edge list.
inline std::pair<double, std::vector<int>> induced_upper_subset(
    const DominancePoset& p, const std::vector<int>& nodes, const std::vector<double>& w,
    bool use_reduced_edges) {
    const int m = static_cast<int>(nodes.size());
    const int s = m, t = m + 1;
    FlowNetwork net(m + 2, s, t);

    double total_abs = 0.0;
    for (double v : w) total_abs += std::fabs(v);
    const double scale = static_cast<double>(std::int64_t{1} << 61) / std::max(total_abs, 1e-9);
    for (int i = 0; i < m; ++i) {
        auto cap = static_cast<std::int64_t>(std::llround(std::fabs(w[i]) * scale));
        if (cap == 0) continue;
        if (w[i] > 0)
            net.add_edge(s, i, cap);
        else
            net.add_edge(i, t, cap);
    }
    if (use_reduced_edges) {
        std::vector<int> local(p.node_count(), -1);
        for (int i = 0; i < m; ++i) local[nodes[i]] = i;
        for (auto [a, b] : p.edges())
            if (local[a] >= 0 && local[b] >= 0) net.add_edge(local[a], local[b], FlowNetwork::kInfCapacity);
    } else {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (i != j && nodes[i] != nodes[j] && p.reachable(nodes[i], nodes[j]))
                    net.add_edge(i, j, FlowNetwork::kInfCapacity);
    }
    MaxFlowResult r = net.solve();
    std::vector<int> sel;
    double val = 0.0;
    for (int i = 0; i < m; ++i)
        if (r.source_side[i]) {
            sel.push_back(nodes[i]);
            val += w[i];
        }
    return {val, std::move(sel)};
}

} // namespace detail

// Exact L2 projection of the responses onto the monotone cone of the poset.
// Recursive partition: each block with mean mu splits along the max-weight
// upper set of the residuals Y - mu, until no upper set improves.
inline IsotonicFit isotonic_fit(const DominancePoset& poset, const std::vector<double>& responses) {
    if (responses.size() != poset.sample_count())
        throw std::invalid_argument("isotonic_fit: response count != sample count");
    for (double y : responses)
        if (!std::isfinite(y)) throw std::invalid_argument("isotonic_fit: non-finite response");
    const std::size_t m = poset.node_count();

    // per-node multiplicity and response sum (merged duplicates pool samples)
    std::vector<double> node_sum(m, 0.0), node_cnt(m, 0.0);
    for (std::size_t i = 0; i < responses.size(); ++i) {
        node_sum[poset.node_of_sample(i)] += responses[i];
        node_cnt[poset.node_of_sample(i)] += 1.0;
    }

    IsotonicFit fit;
    fit.fitted.assign(m, 0.0);

    struct Task {
        std::vector<int> nodes;
        bool whole;
    };
    std::vector<Task> stack;
    {
        std::vector<int> all(m);
        std::iota(all.begin(), all.end(), 0);
        stack.push_back({std::move(all), true});
    }
    std::vector<double> w;
    while (!stack.empty()) {
        Task task = std::move(stack.back());
        stack.pop_back();
        double sum = 0.0, cnt = 0.0;
        for (int v : task.nodes) {
            sum += node_sum[v];
            cnt += node_cnt[v];
        }
        const double mu = sum / cnt;
        w.clear();
        double resid_abs = 0.0;
        for (int v : task.nodes) {
            w.push_back(node_sum[v] - mu * node_cnt[v]);
            resid_abs += std::fabs(w.back());
        }
        auto [val, upper] = detail::induced_upper_subset(poset, task.nodes, w, task.whole);
        const double eps = 1e-12 * (1.0 + resid_abs);
        if (val <= eps || upper.empty() || upper.size() == task.nodes.size()) {
            fit.blocks.push_back(task.nodes);
            fit.block_values.push_back(mu);
            for (int v : task.nodes) fit.fitted[v] = mu;
            continue;
        }
        std::vector<char> in_upper(m, 0);
        for (int v : upper) in_upper[v] = 1;
        std::vector<int> rest;
        for (int v : task.nodes)
            if (!in_upper[v]) rest.push_back(v);
        stack.push_back({std::move(upper), false});
        stack.push_back({std::move(rest), false});
    }

    // collapse float-dust order violations between near-equal blocks
    bool merged = true;
    while (merged && fit.blocks.size() > 1) {
        merged = false;
        const std::size_t nb = fit.blocks.size();
        for (std::size_t a = 0; a < nb && !merged; ++a) {
            for (std::size_t b = 0; b < nb && !merged; ++b) {
                if (a == b || fit.block_values[a] <= fit.block_values[b]) continue;
                bool below = false; // some node of a below some node of b
                for (int u : fit.blocks[a]) {
                    for (int v : fit.blocks[b])
                        if (u != v && poset.reachable(u, v)) { below = true; break; }
                    if (below) break;
                }
                if (!below) continue;
                if (fit.block_values[a] - fit.block_values[b] > 1e-9)
                    throw std::logic_error("isotonic_fit: non-trivial monotonicity violation");
                double s = 0.0, c = 0.0;
                for (int v : fit.blocks[a]) { s += node_sum[v]; c += node_cnt[v]; }
                for (int v : fit.blocks[b]) { s += node_sum[v]; c += node_cnt[v]; }
                double mu = s / c;
                fit.blocks[a].insert(fit.blocks[a].end(), fit.blocks[b].begin(), fit.blocks[b].end());
                fit.block_values[a] = mu;
                for (int v : fit.blocks[a]) fit.fitted[v] = mu;
                fit.blocks.erase(fit.blocks.begin() + static_cast<std::ptrdiff_t>(b));
                fit.block_values.erase(fit.block_values.begin() + static_cast<std::ptrdiff_t>(b));
                merged = true;
            }
        }
    }
    for (auto& blk : fit.blocks) std::sort(blk.begin(), blk.end());

    return fit;
}

// Certificate: max over upper sets U of the residual sum over U (0 for the
// exact projection), combined with the worst per-block residual imbalance.
// Rejects non-monotone fitted vectors.
inline double certify_optimality(const DominancePoset& poset, const std::vector<double>& responses,
                                 const IsotonicFit& fit) {
    const std::size_t m = poset.node_count();
    if (fit.fitted.size() != m) throw std::invalid_argument("certify_optimality: fit size mismatch");
    for (auto [i, j] : poset.edges())
        if (fit.fitted[i] > fit.fitted[j])
            throw std::invalid_argument("certify_optimality: fit is not monotone");

    std::vector<double> resid(m, 0.0);
    for (std::size_t i = 0; i < responses.size(); ++i) {
        int v = poset.node_of_sample(i);
        resid[v] += responses[i] - fit.fitted[v];
    }
    WeightedInstance inst(poset, resid);
    SetSelection sel = max_weight_up_set(inst, /*allow_empty=*/true);
    double slack = std::max(sel.objective_value, 0.0);
    for (std::size_t b = 0; b < fit.blocks.size(); ++b) {
        double s = 0.0;
        for (int v : fit.blocks[b]) s += resid[v];
        slack = std::max(slack, std::fabs(s));
    }
    return slack;
}

// Pool adjacent violators on a chain (nodes ordered 0 <= 1 <= ... <= n-1).
inline IsotonicFit pava_chain(const std::vector<double>& responses) {
    const std::size_t n = responses.size();
    if (n == 0) throw std::invalid_argument("pava_chain: empty input");
    struct Pool {
        double sum;
        std::size_t count;
        std::size_t first;
    };
    std::vector<Pool> pools;
    for (std::size_t i = 0; i < n; ++i) {
        pools.push_back({responses[i], 1, i});
        while (pools.size() > 1) {
            auto& b = pools[pools.size() - 2];
            auto& t = pools.back();
            if (b.sum / static_cast<double>(b.count) <= t.sum / static_cast<double>(t.count)) break;
            b.sum += t.sum;
            b.count += t.count;
            pools.pop_back();
        }
    }
    IsotonicFit fit;
    fit.fitted.assign(n, 0.0);
    for (const auto& p : pools) {
        double mu = p.sum / static_cast<double>(p.count);
        std::vector<int> blk;
        for (std::size_t i = p.first; i < p.first + p.count; ++i) {
            fit.fitted[i] = mu;
            blk.push_back(static_cast<int>(i));
        }
        fit.blocks.push_back(std::move(blk));
        fit.block_values.push_back(mu);
    }
    return fit;
}

// Minimal monotone extension off the design points:
// f(x) = max{fitted_v : point_v <= x}, min fitted when nothing is dominated.
inline double predict(const IsotonicFit& fit, const DominancePoset& poset, const PointCloud& cloud,
                      std::span<const double> x) {
    double lo = *std::min_element(fit.fitted.begin(), fit.fitted.end());
    double best = lo;
    const std::size_t d = cloud.dim();
    for (std::size_t v = 0; v < poset.node_count(); ++v) {
        int i = poset.members()[v].front();
        bool dom = true;
        for (std::size_t k = 0; k < d; ++k)
            if (cloud.coord(i, k) > x[k]) { dom = false; break; }
        if (dom) best = std::max(best, fit.fitted[v]);
    }
    return best;
}

namespace detail {

// Bulk evaluation; d = 2 uses a Fenwick prefix-max sweep, otherwise scans.
inline std::vector<double> predict_many(const IsotonicFit& fit, const DominancePoset& poset,
                                        const PointCloud& cloud,
                                        const std::vector<std::vector<double>>& xs) {
    const std::size_t d = cloud.dim();
    const std::size_t m = poset.node_count();
    std::vector<double> out(xs.size());
    double lo = *std::min_element(fit.fitted.begin(), fit.fitted.end());
    if (d != 2) {
        for (std::size_t q = 0; q < xs.size(); ++q)
            out[q] = predict(fit, poset, cloud, xs[q]);
        return out;
    }
    std::vector<double> node_x(m), node_y(m);
    for (std::size_t v = 0; v < m; ++v) {
        int i = poset.members()[v].front();
        node_x[v] = cloud.coord(i, 0);
        node_y[v] = cloud.coord(i, 1);
    }
    std::vector<double> ys = node_y;
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    auto rank = [&](double y) {
        return static_cast<std::size_t>(std::upper_bound(ys.begin(), ys.end(), y) - ys.begin());
    };
    std::vector<double> bit(ys.size() + 1, -std::numeric_limits<double>::infinity());
    auto update = [&](std::size_t r, double val) {
        for (; r <= ys.size(); r += r & (~r + 1)) bit[r] = std::max(bit[r], val);
    };
    auto query = [&](std::size_t r) { // max over ranks 1..r
        double v = -std::numeric_limits<double>::infinity();
        for (; r > 0; r -= r & (~r + 1)) v = std::max(v, bit[r]);
        return v;
    };
    std::vector<int> norder(m);
    std::iota(norder.begin(), norder.end(), 0);
    std::sort(norder.begin(), norder.end(), [&](int a, int b) { return node_x[a] < node_x[b]; });
    std::vector<int> qorder(xs.size());
    std::iota(qorder.begin(), qorder.end(), 0);
    std::sort(qorder.begin(), qorder.end(), [&](int a, int b) { return xs[a][0] < xs[b][0]; });
    std::size_t next = 0;
    for (int q : qorder) {
        while (next < m && node_x[norder[next]] <= xs[q][0]) {
            int v = norder[next++];
            update(rank(node_y[v]), fit.fitted[v]);
        }
        double best = query(rank(xs[q][1]));
        out[q] = std::max(best, lo);
    }
    return out;
}

} // namespace detail

inline std::function<double(std::span<const double>)> default_monotone_truth(std::size_t d) {
    return [d](std::span<const double> x) {
        double s = -static_cast<double>(d) / 2.0;
        for (double v : x) s += v;
        return std::clamp(s, -1.0, 1.0);
    };
}

struct L2RiskEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Monte Carlo estimate of int (fhat - f0)^2 over the uniform law. When the
// truth is known to lie in L_inf(B), truncating the extension to [-B, B]
// never increases the pointwise error; pass clip_lo/clip_hi to do so.
inline L2RiskEstimate l2_risk(const IsotonicFit& fit, const DominancePoset& poset,
                              const PointCloud& cloud,
                              const std::function<double(std::span<const double>)>& f0,
                              std::size_t mc_points, std::uint64_t seed,
                              double clip_lo = -std::numeric_limits<double>::infinity(),
                              double clip_hi = std::numeric_limits<double>::infinity()) {
    if (mc_points < 2) throw std::invalid_argument("l2_risk: need N >= 2");
    RngStream rng(seed);
    const std::size_t d = cloud.dim();
    std::vector<std::vector<double>> xs(mc_points, std::vector<double>(d));
    for (auto& x : xs)
        for (double& v : x) v = rng.uniform();
    std::vector<double> pred = detail::predict_many(fit, poset, cloud, xs);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < mc_points; ++i) {
        double r = std::clamp(pred[i], clip_lo, clip_hi) - f0(xs[i]);
        double sq = r * r;
        sum += sq;
        sum2 += sq * sq;
    }
    double mean = sum / static_cast<double>(mc_points);
    double var = std::max(sum2 / static_cast<double>(mc_points) - mean * mean, 0.0);
    return {mean, std::sqrt(var / static_cast<double>(mc_points))};
}

} // namespace seterm
