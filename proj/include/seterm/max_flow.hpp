#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace seterm {

struct MaxFlowResult {
    std::int64_t flow = 0;
    std::int64_t cut_capacity = 0;
    std::vector<char> source_side; // canonical minimal cut: residual-reachable from s
};

// FIFO push-relabel with the gap heuristic, 64-bit integer capacities.
// kInfCapacity marks uncuttable arcs; an all-infinite s-t path is rejected.
class FlowNetwork {
  public:
    static constexpr std::int64_t kInfCapacity = std::int64_t{1} << 62;

    FlowNetwork(int node_count, int source, int sink)
        : n_(node_count), s_(source), t_(sink), head_(node_count, -1) {
        if (source == sink || source < 0 || sink < 0 || source >= node_count || sink >= node_count)
            throw std::invalid_argument("FlowNetwork: bad source/sink");
    }

    void add_edge(int u, int v, std::int64_t cap) {
        if (cap < 0) throw std::invalid_argument("FlowNetwork: negative capacity");
        if (cap > kInfCapacity) throw std::invalid_argument("FlowNetwork: capacity above kInfCapacity");
        push_raw(u, v, cap);
        push_raw(v, u, 0);
    }

    int node_count() const { return n_; }
    int source() const { return s_; }
    int sink() const { return t_; }

    MaxFlowResult solve() {
        reject_infinite_path();
        const int n = n_;
        std::vector<std::int64_t> res(cap_.begin(), cap_.end());
        std::vector<unsigned __int128> excess(n, 0);
        std::vector<int> height(n, 0), cur(n), counts(2 * n + 1, 0);
        std::vector<int> fifo;
        fifo.reserve(n);
        std::size_t qh = 0;
        std::vector<char> active(n, 0);

        height[s_] = n;
        counts[0] = n - 1;
        counts[n] = 1;
        cur = head_;

        auto enqueue = [&](int v) {
            if (!active[v] && v != s_ && v != t_ && excess[v] > 0) {
                active[v] = 1;
                fifo.push_back(v);
            }
        };

        for (int e = head_[s_]; e != -1; e = next_[e]) {
            std::int64_t d = res[e];
            if (d > 0) {
                res[e] = 0;
                res[e ^ 1] += d;
                excess[to_[e]] += static_cast<unsigned __int128>(d);
                enqueue(to_[e]);
            }
        }

        while (qh < fifo.size()) {
            int u = fifo[qh++];
            active[u] = 0;
            if (qh > fifo.size() / 2 && qh > 4096) { // compact the queue
                fifo.erase(fifo.begin(), fifo.begin() + static_cast<std::ptrdiff_t>(qh));
                qh = 0;
            }
            // discharge u
            while (excess[u] > 0) {
                if (cur[u] == -1) {
                    // relabel
                    int old = height[u];
                    int h = 2 * n;
                    for (int e = head_[u]; e != -1; e = next_[e])
                        if (res[e] > 0 && height[to_[e]] + 1 < h) h = height[to_[e]] + 1;
                    if (--counts[old] == 0 && old < n) {
                        // gap: lift every node above the gap out of play
                        for (int v = 0; v < n; ++v)
                            if (v != s_ && height[v] > old && height[v] <= n) {
                                --counts[height[v]];
                                height[v] = n + 1;
                                ++counts[n + 1];
                            }
                    }
                    height[u] = h;
                    ++counts[h];
                    cur[u] = head_[u];
                    if (h >= 2 * n) break;
                    continue;
                }
                int e = cur[u];
                int v = to_[e];
                if (res[e] > 0 && height[u] == height[v] + 1) {
                    std::int64_t d = res[e];
                    if (static_cast<unsigned __int128>(d) > excess[u])
                        d = static_cast<std::int64_t>(excess[u]);
                    res[e] -= d;
                    res[e ^ 1] += d;
                    excess[u] -= static_cast<unsigned __int128>(d);
                    excess[v] += static_cast<unsigned __int128>(d);
                    enqueue(v);
                } else {
                    cur[u] = next_[e];
                }
            }
        }

        MaxFlowResult out;
        out.flow = static_cast<std::int64_t>(excess[t_]);
        out.source_side = residual_reachable(res);
        // duality check against the cut the solver produced
        unsigned __int128 cut = 0;
        for (std::size_t e = 0; e < to_.size(); e += 2) {
            int u = from_[e / 2], v = to_[e];
            if (out.source_side[u] && !out.source_side[v]) cut += static_cast<unsigned __int128>(cap_[e]);
        }
        if (cut != static_cast<unsigned __int128>(out.flow))
            throw std::logic_error("FlowNetwork: max-flow / min-cut mismatch");
        out.cut_capacity = static_cast<std::int64_t>(cut);
        return out;
    }

    // DIMACS max-flow text format, 1-indexed.
    void write_dimacs(std::ostream& os) const {
        os << "p max " << n_ << ' ' << to_.size() / 2 << '\n';
        os << "n " << s_ + 1 << " s\n";
        os << "n " << t_ + 1 << " t\n";
        for (std::size_t e = 0; e < to_.size(); e += 2)
            os << "a " << from_[e / 2] + 1 << ' ' << to_[e] + 1 << ' ' << cap_[e] << '\n';
    }

  private:
    void push_raw(int u, int v, std::int64_t cap) {
        if (u < 0 || v < 0 || u >= n_ || v >= n_)
            throw std::invalid_argument("FlowNetwork: edge endpoint out of range");
        if (to_.size() % 2 == 0) from_.push_back(u);
        to_.push_back(v);
        cap_.push_back(cap);
        next_.push_back(head_[u]);
        head_[u] = static_cast<int>(to_.size()) - 1;
    }

    std::vector<char> residual_reachable(const std::vector<std::int64_t>& res) const {
        std::vector<char> vis(n_, 0);
        std::vector<int> stack{s_};
        vis[s_] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int e = head_[u]; e != -1; e = next_[e])
                if (res[e] > 0 && !vis[to_[e]]) {
                    vis[to_[e]] = 1;
                    stack.push_back(to_[e]);
                }
        }
        if (vis[t_]) throw std::logic_error("FlowNetwork: sink residual-reachable after max flow");
        return vis;
    }

    void reject_infinite_path() const {
        std::vector<char> vis(n_, 0);
        std::vector<int> stack{s_};
        vis[s_] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int e = head_[u]; e != -1; e = next_[e])
                if (cap_[e] >= kInfCapacity && !vis[to_[e]]) {
                    vis[to_[e]] = 1;
                    stack.push_back(to_[e]);
                }
        }
        if (vis[t_]) throw std::invalid_argument("FlowNetwork: infinite-capacity s-t path");
    }

    int n_, s_, t_;
    std::vector<int> head_, next_, to_, from_;
    std::vector<std::int64_t> cap_;
};

} // namespace seterm
