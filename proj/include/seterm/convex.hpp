#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "seterm/closure.hpp"
#include "seterm/point_cloud.hpp"

namespace seterm {

// Exact planar geometry on coordinates snapped to a 2^-40 grid. All
// predicates are integer; cross products need 128 bits.
namespace geo {

using i64 = std::int64_t;
using i128 = __int128;

constexpr double kSnapScale = 1099511627776.0; // 2^40

struct IPt {
    i64 x = 0, y = 0;
    friend bool operator==(const IPt& a, const IPt& b) { return a.x == b.x && a.y == b.y; }
};

inline IPt snap(double x, double y) {
    return {static_cast<i64>(std::llround(x * kSnapScale)),
            static_cast<i64>(std::llround(y * kSnapScale))};
}

inline i128 cross(const IPt& o, const IPt& a, const IPt& b) {
    return static_cast<i128>(a.x - o.x) * (b.y - o.y) -
           static_cast<i128>(a.y - o.y) * (b.x - o.x);
}

inline int orient(const IPt& o, const IPt& a, const IPt& b) {
    i128 c = cross(o, a, b);
    return (c > 0) - (c < 0);
}

// x-order with y tiebreak; an infinitesimal shear that removes vertical
// edges without moving any orientation.
inline bool lex_x(const IPt& a, const IPt& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}
// y-order with x tiebreak; picks the unique bottom anchor of a polygon.
inline bool lex_y(const IPt& a, const IPt& b) {
    return a.y < b.y || (a.y == b.y && a.x < b.x);
}

inline bool on_segment(const IPt& a, const IPt& b, const IPt& p, bool strict) {
    if (a == b) return !strict && p == a;
    if (orient(a, b, p) != 0) return false;
    i128 d = static_cast<i128>(p.x - a.x) * (b.x - a.x) +
             static_cast<i128>(p.y - a.y) * (b.y - a.y);
    i128 len2 = static_cast<i128>(b.x - a.x) * (b.x - a.x) +
                static_cast<i128>(b.y - a.y) * (b.y - a.y);
    if (strict) return d > 0 && d < len2;
    return d >= 0 && d <= len2;
}

inline std::vector<IPt> convex_hull(std::vector<IPt> pts) {
    std::sort(pts.begin(), pts.end(), lex_x);
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<IPt> h(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && orient(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    for (std::size_t i = n - 1, lo = k + 1; i-- > 0;) {
        while (k >= lo && orient(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1); // last point == first
    return h;
}

// Closed membership: vertices, edges and interior all count.
inline bool hull_contains(const std::vector<IPt>& hull, const IPt& p) {
    if (hull.empty()) return false;
    if (hull.size() == 1) return hull[0] == p;
    if (hull.size() == 2) return on_segment(hull[0], hull[1], p, /*strict=*/false);
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const IPt& a = hull[i];
        const IPt& b = hull[(i + 1) % hull.size()];
        if (orient(a, b, p) < 0) return false;
    }
    return true;
}

} // namespace geo

// S is feasible iff conv(S) contains no sample point outside S (boundary
// inclusive: a point on an edge of conv(S) must belong to S).
inline bool is_feasible_convex(const std::vector<int>& subset, const PointCloud& cloud) {
    if (cloud.dim() != 2) throw std::invalid_argument("is_feasible_convex: dim must be 2");
    const std::size_t n = cloud.size();
    std::vector<char> sel(n, 0);
    std::vector<geo::IPt> pts;
    pts.reserve(subset.size());
    for (int i : subset) {
        sel[i] = 1;
        pts.push_back(geo::snap(cloud.coord(i, 0), cloud.coord(i, 1)));
    }
    if (pts.empty()) return true;
    auto hull = geo::convex_hull(std::move(pts));
    for (std::size_t i = 0; i < n; ++i) {
        if (sel[i]) continue;
        if (geo::hull_contains(hull, geo::snap(cloud.coord(i, 0), cloud.coord(i, 1))))
            return false;
    }
    return true;
}

namespace detail {

struct ConvexGroups {
    std::vector<geo::IPt> pt;            // distinct snapped points
    std::vector<double> w;               // summed weights
    std::vector<std::vector<int>> members; // sample indices per group
};

inline ConvexGroups convex_groups(const PointCloud& cloud, const std::vector<double>& weights) {
    const std::size_t n = cloud.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<geo::IPt> snapped(n);
    for (std::size_t i = 0; i < n; ++i)
        snapped[i] = geo::snap(cloud.coord(i, 0), cloud.coord(i, 1));
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (!(snapped[a] == snapped[b])) return geo::lex_x(snapped[a], snapped[b]);
        return a < b;
    });
    ConvexGroups g;
    for (std::size_t t = 0; t < n; ++t) {
        int i = order[t];
        if (t == 0 || !(snapped[i] == snapped[order[t - 1]])) {
            g.pt.push_back(snapped[i]);
            g.w.push_back(0.0);
            g.members.emplace_back();
        }
        g.w.back() += weights[i];
        g.members.back().push_back(i);
    }
    for (auto& m : g.members) std::sort(m.begin(), m.end());
    return g;
}

// Direction comparator over [0, 2pi): first by half-plane, then by cross.
struct DirLess {
    bool operator()(const geo::IPt& a, const geo::IPt& b) const {
        int ha = half(a), hb = half(b);
        if (ha != hb) return ha < hb;
        auto c = static_cast<geo::i128>(a.x) * b.y - static_cast<geo::i128>(a.y) * b.x;
        return c > 0;
    }
    static int half(const geo::IPt& d) {
        return (d.y > 0 || (d.y == 0 && d.x > 0)) ? 0 : 1;
    }
};

// Strip tables: below[p][q] (p lex_x-before q) sums weights of points
// strictly below segment (p,q) whose lex_x position lies in (p, q];
// onseg[p][q] sums weights strictly inside segment (p,q).
struct StripTables {
    int g = 0;
    std::vector<double> below, onseg;
    double& B(int p, int q) { return below[static_cast<std::size_t>(p) * g + q]; }
    double& O(int p, int q) { return onseg[static_cast<std::size_t>(p) * g + q]; }
    double B(int p, int q) const { return below[static_cast<std::size_t>(p) * g + q]; }
    double O(int p, int q) const { return onseg[static_cast<std::size_t>(p) * g + q]; }
};

inline StripTables build_strip_tables(const ConvexGroups& gr) {
    const int g = static_cast<int>(gr.pt.size());
    StripTables t;
    t.g = g;
    t.below.assign(static_cast<std::size_t>(g) * g, 0.0);
    t.onseg.assign(static_cast<std::size_t>(g) * g, 0.0);
    // groups are built in lex_x order, so the index is the lex_x rank
    for (int p = 0; p < g; ++p) {
        const geo::IPt P = gr.pt[p];
        for (int q = p + 1; q < g; ++q) {
            const geo::IPt Q = gr.pt[q];
            const geo::i64 ux = Q.x - P.x, uy = Q.y - P.y;
            double bsum = 0.0, osum = 0.0;
            for (int r = p + 1; r <= q; ++r) {
                if (r == q) continue;
                const geo::IPt R = gr.pt[r];
                auto c = static_cast<geo::i128>(ux) * (R.y - P.y) -
                         static_cast<geo::i128>(uy) * (R.x - P.x);
                if (c < 0)
                    bsum += gr.w[r];
                else if (c == 0)
                    osum += gr.w[r]; // strictly between p and q in lex order
            }
            t.B(p, q) = bsum;
            t.O(p, q) = osum;
            t.O(q, p) = osum;
        }
    }
    return t;
}

// Total weight inside-or-on the (counterclockwise) triangle (a,b,c).
// Group indices are lex_x ranks, so ordering them is integer comparison.
inline double closed_triangle_weight(const ConvexGroups& gr, const StripTables& t,
                                     int a, int b, int c) {
    int lo = std::min({a, b, c});
    int hi = std::max({a, b, c});
    int mid = a + b + c - lo - hi;
    int side = geo::orient(gr.pt[lo], gr.pt[hi], gr.pt[mid]);
    if (side > 0) {
        // middle vertex above the long edge: top chain (lo,mid),(mid,hi)
        double interior = t.B(lo, mid) + t.B(mid, hi) - t.B(lo, hi);
        return interior + t.O(lo, mid) + t.O(mid, hi) +
               gr.w[lo] + gr.w[hi] + gr.w[mid];
    }
    // middle vertex below: the strip difference already counts it and the
    // bottom on-segment points
    double s = t.B(lo, hi) - t.B(lo, mid) - t.B(mid, hi);
    return s + t.O(lo, hi) + gr.w[lo] + gr.w[hi];
}

struct ConvexDpResult {
    double value = 0.0;
    std::vector<int> hull_groups; // chain b,p1,...,pk; empty for the empty set
};

// Max-weight island: every polygon is scanned as a fan around its unique
// lex_y-lowest vertex, chains keep strictly increasing edge direction, and
// each transition pays the freshly covered triangle weight.
inline ConvexDpResult convex_dp(const ConvexGroups& gr, const StripTables& tab) {
    const int g = static_cast<int>(gr.pt.size());
    ConvexDpResult best; // empty set, value 0

    auto consider = [&](double v, std::vector<int> chain) {
        if (v > best.value) {
            best.value = v;
            best.hull_groups = std::move(chain);
        }
    };

    for (int i = 0; i < g; ++i)
        consider(gr.w[i], {i});

    // Global angular order around every point (directions in [0, 2pi)).
    std::vector<std::vector<int>> around(g);
    for (int u = 0; u < g; ++u) {
        auto& a = around[u];
        a.reserve(g - 1);
        for (int v = 0; v < g; ++v)
            if (v != u) a.push_back(v);
        std::sort(a.begin(), a.end(), [&](int p, int q) {
            geo::IPt dp{gr.pt[p].x - gr.pt[u].x, gr.pt[p].y - gr.pt[u].y};
            geo::IPt dq{gr.pt[q].x - gr.pt[u].x, gr.pt[q].y - gr.pt[u].y};
            DirLess less;
            if (less(dp, dq)) return true;
            if (less(dq, dp)) return false;
            return p < q;
        });
    }

    std::vector<int> brank(g, -1);       // angular rank around current anchor
    std::vector<double> dp(static_cast<std::size_t>(g) * g,
                           -std::numeric_limits<double>::infinity());
    std::vector<int> parent(static_cast<std::size_t>(g) * g, -2);

    std::vector<int> cand, ins, outs;
    for (int b = 0; b < g; ++b) {
        cand.clear();
        for (int v = 0; v < g; ++v)
            if (v != b && geo::lex_y(gr.pt[b], gr.pt[v])) cand.push_back(v);
        if (cand.empty()) continue;
        std::sort(cand.begin(), cand.end(), [&](int p, int q) {
            int o = geo::orient(gr.pt[b], gr.pt[p], gr.pt[q]);
            if (o != 0) return o > 0;
            // same ray: nearer first (never both vertices of one chain)
            auto d2 = [&](int i) {
                return static_cast<geo::i128>(gr.pt[i].x - gr.pt[b].x) * (gr.pt[i].x - gr.pt[b].x) +
                       static_cast<geo::i128>(gr.pt[i].y - gr.pt[b].y) * (gr.pt[i].y - gr.pt[b].y);
            };
            return d2(p) < d2(q);
        });
        std::fill(brank.begin(), brank.end(), -1);
        // rays group same-angle candidates; filters below reduce to rank tests
        int ray = 0;
        for (std::size_t r = 0; r < cand.size(); ++r) {
            if (r > 0 && geo::orient(gr.pt[b], gr.pt[cand[r - 1]], gr.pt[cand[r]]) != 0) ++ray;
            brank[cand[r]] = ray;
        }

        auto dir = [&](int from, int to) {
            return geo::IPt{gr.pt[to].x - gr.pt[from].x, gr.pt[to].y - gr.pt[from].y};
        };
        auto dstart = [&](int u) { return gr.w[b] + gr.w[u] + tab.O(b, u); };

        for (int u : cand) {
            // chains b -> u (segment polygons) close unconditionally
            consider(dstart(u), {b, u});

            // incoming directions u-t sorted over [0,2pi): walk the global
            // order of (t-u) starting from the theta >= pi half
            ins.clear();
            outs.clear();
            const auto& au = around[u];
            const std::size_t asz = au.size();
            std::size_t split = 0;
            while (split < asz && DirLess::half(dir(u, au[split])) == 0) ++split;
            const int ru = brank[u];
            for (std::size_t k = split; k < asz; ++k) {
                int x = au[k];
                if (brank[x] >= 0 && brank[x] < ru) ins.push_back(x);
            }
            for (std::size_t k = 0; k < split; ++k) {
                int x = au[k];
                if (brank[x] >= 0 && brank[x] < ru) ins.push_back(x);
            }
            for (int x : au)
                if (brank[x] > ru) outs.push_back(x);
            if (outs.empty()) continue;

            // sliding window over incoming directions: admissible
            // predecessors of edge (u,v) satisfy cross(u-t, v-u) > 0
            std::deque<std::size_t> win; // indices into ins, dp decreasing
            std::size_t hi = 0;
            DirLess less;
            for (int v : outs) {
                geo::IPt dout = dir(u, v);
                while (hi < ins.size()) {
                    geo::IPt din = dir(ins[hi], u);
                    if (!less(din, dout)) break; // theta_in >= theta_out
                    double val = dp[static_cast<std::size_t>(ins[hi]) * g + u];
                    while (!win.empty() &&
                           dp[static_cast<std::size_t>(ins[win.back()]) * g + u] <= val)
                        win.pop_back();
                    win.push_back(hi);
                    ++hi;
                }
                while (!win.empty()) {
                    geo::IPt din = dir(ins[win.front()], u);
                    auto c = static_cast<geo::i128>(din.x) * dout.y -
                             static_cast<geo::i128>(din.y) * dout.x;
                    if (c > 0) break;
                    win.pop_front();
                }
                double base = dstart(u);
                int par = -1; // -1 = chain starts at b
                if (!win.empty()) {
                    double wv = dp[static_cast<std::size_t>(ins[win.front()]) * g + u];
                    if (wv > base) {
                        base = wv;
                        par = ins[win.front()];
                    }
                }
                double tri = closed_triangle_weight(gr, tab, b, u, v) -
                             (gr.w[b] + gr.w[u] + tab.O(b, u));
                dp[static_cast<std::size_t>(u) * g + v] = base + tri;
                parent[static_cast<std::size_t>(u) * g + v] = par;

                // close the polygon at v if the last turn stays convex
                geo::IPt db{gr.pt[b].x - gr.pt[v].x, gr.pt[b].y - gr.pt[v].y};
                auto cc = static_cast<geo::i128>(dout.x) * db.y -
                          static_cast<geo::i128>(dout.y) * db.x;
                if (cc > 0 && base + tri > best.value) {
                    std::vector<int> chain{v, u};
                    int cu = u, cv = v;
                    while (true) {
                        int t = parent[static_cast<std::size_t>(cu) * g + cv];
                        if (t < 0) break;
                        chain.push_back(t);
                        cv = cu;
                        cu = t;
                    }
                    chain.push_back(b);
                    std::reverse(chain.begin(), chain.end());
                    consider(base + tri, std::move(chain));
                }
            }
        }
        for (int u : cand)
            for (int v : cand) {
                dp[static_cast<std::size_t>(u) * g + v] =
                    -std::numeric_limits<double>::infinity();
                parent[static_cast<std::size_t>(u) * g + v] = -2;
            }
    }
    return best;
}

} // namespace detail

namespace detail {

inline SetSelection selection_from_dp(const ConvexGroups& gr, const ConvexDpResult& r,
                                      const std::vector<double>& weights) {
    SetSelection sel;
    sel.kind = SelectionKind::ConvexPosition;
    if (!r.hull_groups.empty()) {
        std::vector<geo::IPt> poly;
        poly.reserve(r.hull_groups.size());
        for (int gidx : r.hull_groups) poly.push_back(gr.pt[gidx]);
        for (std::size_t gi = 0; gi < gr.pt.size(); ++gi) {
            bool in = false;
            if (poly.size() == 1)
                in = (gr.pt[gi] == poly[0]);
            else if (poly.size() == 2)
                in = geo::on_segment(poly[0], poly[1], gr.pt[gi], /*strict=*/false);
            else
                in = geo::hull_contains(poly, gr.pt[gi]);
            if (in)
                for (int i : gr.members[gi]) sel.indices.push_back(i);
        }
        std::sort(sel.indices.begin(), sel.indices.end());
    }
    sel.objective_value = 0.0;
    for (int i : sel.indices) sel.objective_value += weights[i];
    return sel;
}

} // namespace detail

// Exact maximum-weight subset realizable as conv(S) n sample, d=2 only.
inline SetSelection max_weight_convex_subset_2d(const PointCloud& cloud,
                                                const std::vector<double>& weights) {
    if (cloud.dim() != 2)
        throw std::invalid_argument("max_weight_convex_subset_2d: dim must be 2");
    if (weights.size() != cloud.size())
        throw std::invalid_argument("max_weight_convex_subset_2d: weight count mismatch");

    detail::ConvexGroups gr = detail::convex_groups(cloud, weights);
    detail::StripTables tab = detail::build_strip_tables(gr);
    detail::ConvexDpResult r = detail::convex_dp(gr, tab);
    return detail::selection_from_dp(gr, r, weights);
}

// Solves for +w and -w sharing one geometry pass (the strip tables are
// linear in the weights).
inline std::pair<SetSelection, SetSelection> max_weight_convex_subset_2d_pm(
    const PointCloud& cloud, const std::vector<double>& weights) {
    if (cloud.dim() != 2)
        throw std::invalid_argument("max_weight_convex_subset_2d_pm: dim must be 2");
    detail::ConvexGroups gr = detail::convex_groups(cloud, weights);
    detail::StripTables tab = detail::build_strip_tables(gr);
    detail::ConvexDpResult rp = detail::convex_dp(gr, tab);
    SetSelection plus = detail::selection_from_dp(gr, rp, weights);

    for (double& w : gr.w) w = -w;
    for (double& v : tab.below) v = -v;
    for (double& v : tab.onseg) v = -v;
    std::vector<double> neg(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) neg[i] = -weights[i];
    detail::ConvexDpResult rm = detail::convex_dp(gr, tab);
    SetSelection minus = detail::selection_from_dp(gr, rm, neg);
    return {std::move(plus), std::move(minus)};
}

// Exhaustive oracle: all subsets filtered by the island property.
inline SetSelection brute_force_convex_subset(const PointCloud& cloud,
                                              const std::vector<double>& weights) {
    const std::size_t n = cloud.size();
    if (cloud.dim() != 2)
        throw std::invalid_argument("brute_force_convex_subset: dim must be 2");
    if (n > 12) throw std::invalid_argument("brute_force_convex_subset: n > 12");

    SetSelection best;
    best.kind = SelectionKind::ConvexPosition;
    best.objective_value = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> idx;
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1u) {
                idx.push_back(static_cast<int>(i));
                v += weights[i];
            }
        if (v <= best.objective_value) continue;
        if (!is_feasible_convex(idx, cloud)) continue;
        best.indices = std::move(idx);
        best.objective_value = v;
    }
    return best;
}

} // namespace seterm
