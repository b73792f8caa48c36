#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "seterm/point_cloud.hpp"

namespace seterm {

// Componentwise-dominance DAG of a point cloud, transitively reduced.
// Duplicate coordinates are merged into one node carrying the index list, so
// the order is antisymmetric. Nodes are numbered by smallest member index.
class DominancePoset {
  public:
    std::size_t node_count() const { return members_.size(); }
    std::size_t sample_count() const { return sample_to_node_.size(); }

    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<std::vector<int>>& members() const { return members_; }
    int node_of_sample(std::size_t i) const { return sample_to_node_[i]; }
    int multiplicity(int node) const { return static_cast<int>(members_[node].size()); }

    // reachable(i,j): node_i <= node_j in the partial order (reflexive).
    bool reachable(int i, int j) const {
        if (i == j) return true;
        return (reach_[static_cast<std::size_t>(j) * words_ + (i >> 6)] >> (i & 63)) & 1u;
    }

    // Predecessor set of node j as a bitset row (excludes j itself).
    const std::uint64_t* below_row(int j) const { return reach_.data() + static_cast<std::size_t>(j) * words_; }
    std::size_t words() const { return words_; }

    const std::vector<int>& immediate_predecessors(int j) const { return preds_[j]; }
    const std::vector<int>& immediate_successors(int i) const { return succs_[i]; }

    friend DominancePoset build_dominance_poset(const PointCloud& cloud);
    friend DominancePoset reverse_poset(const DominancePoset& p);

  private:
    std::size_t words_ = 0;
    std::vector<int> sample_to_node_;
    std::vector<std::vector<int>> members_;
    std::vector<std::pair<int, int>> edges_; // (i,j): node_i < node_j, transitively reduced
    std::vector<std::vector<int>> preds_, succs_;
    std::vector<std::uint64_t> reach_; // row j = bitset of nodes < j
};

inline DominancePoset build_dominance_poset(const PointCloud& cloud) {
    const std::size_t n = cloud.size();
    const std::size_t d = cloud.dim();

    auto coord_less = [&](int a, int b) {
        for (std::size_t k = 0; k < d; ++k)
            if (cloud.coord(a, k) != cloud.coord(b, k)) return cloud.coord(a, k) < cloud.coord(b, k);
        return false;
    };
    auto coord_eq = [&](int a, int b) {
        for (std::size_t k = 0; k < d; ++k)
            if (cloud.coord(a, k) != cloud.coord(b, k)) return false;
        return true;
    };

    // Merge exact duplicates into groups, numbered by smallest member index.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return coord_less(a, b) || (!coord_less(b, a) && a < b);
    });
    std::vector<std::vector<int>> groups;
    for (std::size_t t = 0; t < n; ++t) {
        if (t == 0 || !coord_eq(order[t], order[t - 1])) groups.emplace_back();
        groups.back().push_back(order[t]);
    }
    for (auto& g : groups) std::sort(g.begin(), g.end());
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    DominancePoset p;
    p.members_ = std::move(groups);
    p.sample_to_node_.assign(n, -1);
    for (std::size_t v = 0; v < p.members_.size(); ++v)
        for (int i : p.members_[v]) p.sample_to_node_[i] = static_cast<int>(v);

    const std::size_t m = p.members_.size();
    p.preds_.assign(m, {});
    p.succs_.assign(m, {});

    // Topological order by coordinate sum (strict dominance between distinct
    // points implies a strictly smaller sum).
    std::vector<double> sum(m, 0.0);
    for (std::size_t v = 0; v < m; ++v) {
        int i = p.members_[v].front();
        for (std::size_t k = 0; k < d; ++k) sum[v] += cloud.coord(i, k);
    }
    std::vector<int> topo(m);
    std::iota(topo.begin(), topo.end(), 0);
    std::sort(topo.begin(), topo.end(), [&](int a, int b) {
        if (sum[a] != sum[b]) return sum[a] < sum[b];
        return a < b;
    });

    auto dominated = [&](int a, int b) { // node_a <= node_b componentwise
        return cloud.dominates(p.members_[b].front(), p.members_[a].front());
    };

    // Transitive reduction: walk candidates in topological order; j is an
    // immediate successor of i unless covered by an earlier immediate.
    for (std::size_t ti = 0; ti < m; ++ti) {
        int i = topo[ti];
        std::vector<int>& imm = p.succs_[i];
        for (std::size_t tj = ti + 1; tj < m; ++tj) {
            int j = topo[tj];
            if (!dominated(i, j)) continue;
            bool covered = false;
            for (int k : imm)
                if (dominated(k, j)) { covered = true; break; }
            if (!covered) imm.push_back(j);
        }
        for (int j : imm) {
            p.preds_[j].push_back(i);
            p.edges_.emplace_back(i, j);
        }
    }
    std::sort(p.edges_.begin(), p.edges_.end());

    // Reachability rows via bitset DP over the topological order.
    p.words_ = (m + 63) / 64;
    p.reach_.assign(m * p.words_, 0);
    for (std::size_t t = 0; t < m; ++t) {
        int j = topo[t];
        std::uint64_t* row = p.reach_.data() + static_cast<std::size_t>(j) * p.words_;
        for (int i : p.preds_[j]) {
            const std::uint64_t* prow = p.reach_.data() + static_cast<std::size_t>(i) * p.words_;
            for (std::size_t w = 0; w < p.words_; ++w) row[w] |= prow[w];
            row[i >> 6] |= 1ull << (i & 63);
        }
    }
    return p;
}

// Order dual: up-sets of the original are down-sets of the reverse.
inline DominancePoset reverse_poset(const DominancePoset& p) {
    DominancePoset r = p;
    const std::size_t m = p.node_count();
    r.edges_.clear();
    for (auto [i, j] : p.edges_) r.edges_.emplace_back(j, i);
    std::sort(r.edges_.begin(), r.edges_.end());
    std::swap(r.preds_, r.succs_);

    std::fill(r.reach_.begin(), r.reach_.end(), 0);
    std::vector<int> indeg(m, 0);
    for (auto& [i, j] : r.edges_) { (void)i; ++indeg[j]; }
    std::vector<int> q;
    q.reserve(m);
    for (std::size_t v = 0; v < m; ++v)
        if (!indeg[v]) q.push_back(static_cast<int>(v));
    for (std::size_t h = 0; h < q.size(); ++h) {
        int u = q[h];
        for (int w : r.succs_[u]) {
            std::uint64_t* row = r.reach_.data() + static_cast<std::size_t>(w) * r.words_;
            const std::uint64_t* urow = r.reach_.data() + static_cast<std::size_t>(u) * r.words_;
            for (std::size_t x = 0; x < r.words_; ++x) row[x] |= urow[x];
            row[u >> 6] |= 1ull << (u & 63);
            if (--indeg[w] == 0) q.push_back(w);
        }
    }
    return r;
}

} // namespace seterm
