#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "seterm/max_flow.hpp"
#include "seterm/poset.hpp"

namespace seterm {

// Node weights on a dominance poset; merged nodes carry summed weights.
struct WeightedInstance {
    const DominancePoset* poset;
    std::vector<double> weights; // per node

    WeightedInstance(const DominancePoset& p, std::vector<double> node_weights)
        : poset(&p), weights(std::move(node_weights)) {
        if (weights.size() != p.node_count())
            throw std::invalid_argument("WeightedInstance: weight count != node count");
        for (double w : weights)
            if (!std::isfinite(w)) throw std::invalid_argument("WeightedInstance: non-finite weight");
    }

    static WeightedInstance from_samples(const DominancePoset& p, const std::vector<double>& sample_weights) {
        if (sample_weights.size() != p.sample_count())
            throw std::invalid_argument("WeightedInstance: sample weight count mismatch");
        std::vector<double> w(p.node_count(), 0.0);
        for (std::size_t i = 0; i < sample_weights.size(); ++i)
            w[p.node_of_sample(i)] += sample_weights[i];
        return WeightedInstance(p, std::move(w));
    }
};

enum class SelectionKind { DownSet, UpSet, ConvexPosition };

struct SetSelection {
    std::vector<int> indices; // sorted node indices (convex: sample indices)
    SelectionKind kind = SelectionKind::DownSet;
    double objective_value = 0.0;

    bool contains(int i) const { return std::binary_search(indices.begin(), indices.end(), i); }
};

namespace detail {

inline double index_order_sum(const std::vector<double>& w, const std::vector<int>& idx) {
    double s = 0.0;
    for (int i : idx) s += w[i];
    return s;
}

// Picard closure network. down=true enforces closure under predecessors
// (j selected => every i <= j selected); down=false the dual.
inline FlowNetwork closure_network(const WeightedInstance& inst, bool down) {
    const auto& p = *inst.poset;
    const int m = static_cast<int>(p.node_count());
    const int s = m, t = m + 1;
    FlowNetwork net(m + 2, s, t);

    double total_abs = 0.0;
    for (double w : inst.weights) total_abs += std::fabs(w);
    // Quantum total_abs / 2^61: far below double resolution of the weights
    // themselves at every instance size this library targets.
    const double scale = static_cast<double>(std::int64_t{1} << 61) / std::max(total_abs, 1e-9);

    for (int i = 0; i < m; ++i) {
        const double w = inst.weights[i];
        const auto cap = static_cast<std::int64_t>(std::llround(std::fabs(w) * scale));
        if (cap == 0) continue;
        if (w > 0)
            net.add_edge(s, i, cap);
        else
            net.add_edge(i, t, cap);
    }
    for (auto [i, j] : p.edges()) {
        if (down)
            net.add_edge(j, i, FlowNetwork::kInfCapacity);
        else
            net.add_edge(i, j, FlowNetwork::kInfCapacity);
    }
    return net;
}

inline void check_closed(const DominancePoset& p, const std::vector<char>& in, bool down) {
    for (auto [i, j] : p.edges()) {
        bool bad = down ? (in[j] && !in[i]) : (in[i] && !in[j]);
        if (bad) throw std::logic_error("closure solver returned a non-closed set");
    }
}

inline SetSelection solve_closure(const WeightedInstance& inst, bool down, bool allow_empty) {
    const auto& p = *inst.poset;
    const int m = static_cast<int>(p.node_count());

    auto run = [&](int forced) {
        FlowNetwork net = closure_network(inst, down);
        if (forced >= 0) net.add_edge(m, forced, FlowNetwork::kInfCapacity);
        MaxFlowResult r = net.solve();
        std::vector<char> in(m, 0);
        for (int i = 0; i < m; ++i) in[i] = r.source_side[i];
        check_closed(p, in, down);
        return in;
    };

    std::vector<char> best = run(-1);
    SetSelection sel;
    sel.kind = down ? SelectionKind::DownSet : SelectionKind::UpSet;
    for (int i = 0; i < m; ++i)
        if (best[i]) sel.indices.push_back(i);

    if (sel.indices.empty() && !allow_empty) {
        // Optimum is empty: force each minimal (dual: maximal) element in turn
        // and keep the best forced solution.
        bool have = false;
        double best_val = 0.0;
        std::vector<int> best_idx;
        for (int v = 0; v < m; ++v) {
            const auto& gate = down ? p.immediate_predecessors(v) : p.immediate_successors(v);
            if (!gate.empty()) continue;
            std::vector<char> in = run(v);
            std::vector<int> idx;
            for (int i = 0; i < m; ++i)
                if (in[i]) idx.push_back(i);
            double val = index_order_sum(inst.weights, idx);
            if (!have || val > best_val) {
                have = true;
                best_val = val;
                best_idx = std::move(idx);
            }
        }
        if (!have) throw std::logic_error("closure solver: no forceable element");
        sel.indices = std::move(best_idx);
    }

    sel.objective_value = index_order_sum(inst.weights, sel.indices);
    return sel;
}

} // namespace detail

// Canonical minimal argmax: source side of the source-minimal min cut.
inline SetSelection max_weight_down_set(const WeightedInstance& inst, bool allow_empty = true) {
    return detail::solve_closure(inst, /*down=*/true, allow_empty);
}

inline SetSelection max_weight_up_set(const WeightedInstance& inst, bool allow_empty = true) {
    return detail::solve_closure(inst, /*down=*/false, allow_empty);
}

// Exhaustive oracle over all 2^m node subsets filtered by closure.
inline SetSelection brute_force_down_set(const WeightedInstance& inst, bool allow_empty = true,
                                         bool down = true) {
    const auto& p = *inst.poset;
    const int m = static_cast<int>(p.node_count());
    if (m > 22) throw std::invalid_argument("brute_force_down_set: n > 22");

    // pred_mask[j] = nodes that must accompany j.
    std::vector<std::uint32_t> need(m, 0);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
            if (i != j && (down ? p.reachable(i, j) : p.reachable(j, i)))
                need[j] |= (1u << i);

    bool have = false;
    double best = 0.0;
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        if (mask == 0 && !allow_empty) continue;
        bool closed = true;
        for (int j = 0; j < m && closed; ++j)
            if ((mask >> j) & 1u)
                if ((need[j] & mask) != need[j]) closed = false;
        if (!closed) continue;
        double v = 0.0;
        for (int j = 0; j < m; ++j)
            if ((mask >> j) & 1u) v += inst.weights[j];
        if (!have || v > best || (v == best && __builtin_popcount(mask) < __builtin_popcount(best_mask))) {
            have = true;
            best = v;
            best_mask = mask;
        }
    }
    SetSelection sel;
    sel.kind = down ? SelectionKind::DownSet : SelectionKind::UpSet;
    for (int j = 0; j < m; ++j)
        if ((best_mask >> j) & 1u) sel.indices.push_back(j);
    sel.objective_value = detail::index_order_sum(inst.weights, sel.indices);
    return sel;
}

inline SetSelection brute_force_up_set(const WeightedInstance& inst, bool allow_empty = true) {
    return brute_force_down_set(inst, allow_empty, /*down=*/false);
}

// Debug dump of the down-set closure network in DIMACS max-flow format.
inline void dump_closure_dimacs(const WeightedInstance& inst, bool down, std::ostream& os) {
    detail::closure_network(inst, down).write_dimacs(os);
}

} // namespace seterm
