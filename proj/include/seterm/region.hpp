#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "seterm/rng.hpp"

namespace seterm {

enum class StairOrientation { Lower, Upper };

// Union of corner orthants: [0,c] per corner when Lower, [c,1] when Upper.
// Corners form an antichain (dominated corners are pruned on construction).
struct Staircase {
    std::size_t dim = 0;
    StairOrientation orientation = StairOrientation::Lower;
    std::vector<std::vector<double>> corners;

    static Staircase make(std::size_t dim, StairOrientation o,
                          std::vector<std::vector<double>> corners) {
        Staircase st;
        st.dim = dim;
        st.orientation = o;
        for (const auto& c : corners)
            if (c.size() != dim) throw std::invalid_argument("Staircase: corner dim mismatch");
        // keep only maximal (Lower) / minimal (Upper) corners
        for (std::size_t i = 0; i < corners.size(); ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < corners.size() && !dominated; ++j) {
                if (i == j) continue;
                bool le = true, eq = true;
                for (std::size_t k = 0; k < dim; ++k) {
                    double a = corners[i][k], b = corners[j][k];
                    if (o == StairOrientation::Upper) std::swap(a, b);
                    if (a > b) { le = false; break; }
                    if (a != b) eq = false;
                }
                if (le && (!eq || j < i)) dominated = true;
            }
            if (!dominated) st.corners.push_back(corners[i]);
        }
        return st;
    }

    bool contains(std::span<const double> x) const {
        for (const auto& c : corners) {
            bool in = true;
            for (std::size_t k = 0; k < dim; ++k) {
                bool ok = orientation == StairOrientation::Lower ? x[k] <= c[k] : x[k] >= c[k];
                if (!ok) { in = false; break; }
            }
            if (in) return true;
        }
        return false;
    }
};

namespace detail {

// 2D union area of [0,cx]x[0,cy] rectangles.
inline double staircase_area_2d(std::vector<std::array<double, 2>> cs) {
    if (cs.empty()) return 0.0;
    std::sort(cs.begin(), cs.end());
    // keep the strictly y-decreasing staircase of maxima
    std::vector<std::array<double, 2>> st;
    for (auto it = cs.rbegin(); it != cs.rend(); ++it) {
        if (st.empty() || (*it)[1] > st.back()[1]) st.push_back(*it);
    }
    std::reverse(st.begin(), st.end()); // x ascending, y descending
    double area = 0.0, x_prev = 0.0;
    for (const auto& c : st) {
        area += (c[0] - x_prev) * c[1];
        x_prev = c[0];
    }
    return area;
}

} // namespace detail

// Exact Lebesgue volume of the staircase region, d <= 3.
inline double staircase_volume(const Staircase& st) {
    std::vector<std::vector<double>> cs = st.corners;
    if (st.orientation == StairOrientation::Upper)
        for (auto& c : cs)
            for (double& v : c) v = 1.0 - v;
    if (cs.empty()) return 0.0;
    if (st.dim == 1) {
        double m = 0.0;
        for (const auto& c : cs) m = std::max(m, c[0]);
        return m;
    }
    if (st.dim == 2) {
        std::vector<std::array<double, 2>> c2;
        for (const auto& c : cs) c2.push_back({c[0], c[1]});
        return detail::staircase_area_2d(std::move(c2));
    }
    if (st.dim == 3) {
        std::sort(cs.begin(), cs.end(),
                  [](const auto& a, const auto& b) { return a[2] > b[2]; });
        double vol = 0.0;
        std::vector<std::array<double, 2>> prefix;
        for (std::size_t k = 0; k < cs.size(); ++k) {
            prefix.push_back({cs[k][0], cs[k][1]});
            double z_hi = cs[k][2];
            double z_lo = k + 1 < cs.size() ? cs[k + 1][2] : 0.0;
            if (z_hi > z_lo) vol += (z_hi - z_lo) * detail::staircase_area_2d(prefix);
        }
        return vol;
    }
    throw std::invalid_argument("staircase_volume: exact path requires d <= 3");
}

// Lebesgue volume of {x in [0,1]^d : sum x_j <= t} (Irwin-Hall CDF).
inline double simplex_cut_volume(std::size_t d, double t) {
    if (t <= 0.0) return 0.0;
    if (t >= static_cast<double>(d)) return 1.0;
    double fact = 1.0;
    for (std::size_t k = 2; k <= d; ++k) fact *= static_cast<double>(k);
    double vol = 0.0, binom = 1.0;
    for (std::size_t k = 0; k <= d; ++k) {
        double u = t - static_cast<double>(k);
        if (u > 0.0) vol += (k % 2 ? -1.0 : 1.0) * binom * std::pow(u, static_cast<double>(d));
        binom = binom * static_cast<double>(d - k) / static_cast<double>(k + 1);
    }
    return vol / fact;
}

namespace detail {

// int int over [a1,b1]x[a2,b2] of (t - x - y)_+.
inline double rect_plane_integral(double a1, double b1, double a2, double b2, double t) {
    auto cube = [](double s) { return s > 0.0 ? s * s * s / 6.0 : 0.0; };
    return cube(t - a1 - a2) - cube(t - b1 - a2) - cube(t - a1 - b2) + cube(t - b1 - b2);
}

// Exact vol(lower staircase  n  {sum x <= t}) for d <= 3.
inline double lower_stair_cap_halfspace(const std::vector<std::vector<double>>& cs,
                                        std::size_t d, double t) {
    if (cs.empty() || t <= 0.0) return 0.0;
    if (d == 1) {
        double m = 0.0;
        for (const auto& c : cs) m = std::max(m, c[0]);
        return std::min(m, t);
    }
    if (d == 2) {
        std::vector<std::array<double, 2>> c2;
        for (const auto& c : cs) c2.push_back({c[0], c[1]});
        std::sort(c2.begin(), c2.end());
        std::vector<std::array<double, 2>> st;
        for (auto it = c2.rbegin(); it != c2.rend(); ++it)
            if (st.empty() || (*it)[1] > st.back()[1]) st.push_back(*it);
        std::reverse(st.begin(), st.end());
        // per step [x0,x1] with height h: int min(h, (t-x)_+) dx,
        // split at t-h (min switches branch) and at t (plane hits zero)
        auto seg = [&](double x0, double x1, double h) {
            double cuts[4] = {x0, std::clamp(t - h, x0, x1), std::clamp(t, x0, x1), x1};
            std::sort(cuts, cuts + 4);
            double total = 0.0;
            for (int s = 0; s < 3; ++s) {
                double lo = cuts[s], hi = cuts[s + 1];
                if (hi <= lo) continue;
                double mid = 0.5 * (lo + hi);
                double v = std::min(h, std::max(t - mid, 0.0));
                if (v >= h)
                    total += h * (hi - lo);
                else if (v > 0.0)
                    total += t * (hi - lo) - 0.5 * (hi * hi - lo * lo);
            }
            return total;
        };
        double vol = 0.0, x_prev = 0.0;
        for (const auto& c : st) {
            vol += seg(x_prev, c[0], c[1]);
            x_prev = c[0];
        }
        return vol;
    }
    if (d == 3) {
        // height map H(x,y) = max{cz : cx >= x, cy >= y}, constant per grid cell
        std::vector<double> xs{0.0}, ys{0.0};
        for (const auto& c : cs) { xs.push_back(c[0]); ys.push_back(c[1]); }
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::sort(ys.begin(), ys.end());
        ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
        double vol = 0.0;
        for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
            for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
                double h = 0.0;
                for (const auto& c : cs)
                    if (c[0] >= xs[i + 1] && c[1] >= ys[j + 1]) h = std::max(h, c[2]);
                if (h <= 0.0) continue;
                vol += rect_plane_integral(xs[i], xs[i + 1], ys[j], ys[j + 1], t) -
                       rect_plane_integral(xs[i], xs[i + 1], ys[j], ys[j + 1], t - h);
            }
        }
        return vol;
    }
    throw std::invalid_argument("exact staircase/halfspace risk requires d <= 3");
}

} // namespace detail

// A population set usable in risk integrals under uniform P on [0,1]^d.
struct Region {
    enum class Type { Stair, Polygon, LowerHalfSpace };
    Type type = Type::Stair;
    Staircase stair;                              // Type::Stair
    std::vector<std::array<double, 2>> polygon;   // Type::Polygon, CCW, possibly empty
    std::size_t dim = 0;
    double threshold = 0.0;                       // Type::LowerHalfSpace: sum x <= threshold

    static Region staircase(Staircase st) {
        Region r;
        r.type = Type::Stair;
        r.dim = st.dim;
        r.stair = std::move(st);
        return r;
    }
    static Region convex_polygon(std::vector<std::array<double, 2>> vs) {
        Region r;
        r.type = Type::Polygon;
        r.dim = 2;
        r.polygon = std::move(vs);
        return r;
    }
    static Region half_space(std::size_t dim, double threshold) {
        Region r;
        r.type = Type::LowerHalfSpace;
        r.dim = dim;
        r.threshold = threshold;
        return r;
    }

    bool contains(std::span<const double> x) const {
        switch (type) {
            case Type::Stair: return stair.contains(x);
            case Type::LowerHalfSpace: {
                double s = 0.0;
                for (double v : x) s += v;
                return s <= threshold;
            }
            case Type::Polygon: {
                if (polygon.size() < 3) return false;
                for (std::size_t i = 0; i < polygon.size(); ++i) {
                    const auto& a = polygon[i];
                    const auto& b = polygon[(i + 1) % polygon.size()];
                    double cr = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]);
                    if (cr < 0.0) return false;
                }
                return true;
            }
        }
        return false;
    }
};

namespace detail {

inline double polygon_area(const std::vector<std::array<double, 2>>& p) {
    if (p.size() < 3) return 0.0;
    double a = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& u = p[i];
        const auto& v = p[(i + 1) % p.size()];
        a += u[0] * v[1] - u[1] * v[0];
    }
    return 0.5 * a;
}

// Sutherland-Hodgman clip of a convex CCW polygon by a*x + b*y <= c.
inline std::vector<std::array<double, 2>> clip_halfplane(
    const std::vector<std::array<double, 2>>& poly, double a, double b, double c) {
    std::vector<std::array<double, 2>> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = poly[i];
        const auto& q = poly[(i + 1) % n];
        double fp = a * p[0] + b * p[1] - c;
        double fq = a * q[0] + b * q[1] - c;
        if (fp <= 0.0) out.push_back(p);
        if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
            double s = fp / (fp - fq);
            out.push_back({p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])});
        }
    }
    return out;
}

inline std::vector<std::array<double, 2>> clip_convex(
    std::vector<std::array<double, 2>> poly, const std::vector<std::array<double, 2>>& clip) {
    for (std::size_t i = 0; i < clip.size() && !poly.empty(); ++i) {
        const auto& a = clip[i];
        const auto& b = clip[(i + 1) % clip.size()];
        // inside = left of a->b
        poly = clip_halfplane(poly, -(b[1] - a[1]), b[0] - a[0],
                              -(b[1] - a[1]) * a[0] + (b[0] - a[0]) * a[1]);
    }
    return poly;
}

inline std::vector<std::vector<double>> reflected_corners(const Staircase& st) {
    std::vector<std::vector<double>> cs = st.corners;
    for (auto& c : cs)
        for (double& v : c) v = 1.0 - v;
    return cs;
}

// P(region), exact where a formula exists.
inline double region_volume(const Region& r) {
    switch (r.type) {
        case Region::Type::Stair: return staircase_volume(r.stair);
        case Region::Type::LowerHalfSpace: return simplex_cut_volume(r.dim, r.threshold);
        case Region::Type::Polygon: return polygon_area(r.polygon);
    }
    return 0.0;
}

// vol(A n B) for the exactly supported type pairs; throws otherwise.
inline double region_cap_volume(const Region& A, const Region& B) {
    using T = Region::Type;
    if (A.dim != B.dim) throw std::invalid_argument("region_cap_volume: dim mismatch");
    const std::size_t d = A.dim;
    if (A.type == T::LowerHalfSpace && B.type == T::LowerHalfSpace)
        return simplex_cut_volume(d, std::min(A.threshold, B.threshold));
    if (B.type == T::LowerHalfSpace && A.type != T::LowerHalfSpace)
        return region_cap_volume(B, A);
    if (A.type == T::LowerHalfSpace && B.type == T::Stair) {
        if (B.stair.orientation == StairOrientation::Lower)
            return lower_stair_cap_halfspace(B.stair.corners, d, A.threshold);
        // reflect x -> 1-x: upper stair -> lower stair, halfspace flips side
        auto cs = reflected_corners(B.stair);
        double stair_vol = 0.0;
        {
            Staircase tmp;
            tmp.dim = d;
            tmp.orientation = StairOrientation::Lower;
            tmp.corners = cs;
            stair_vol = staircase_volume(tmp);
        }
        return stair_vol -
               lower_stair_cap_halfspace(cs, d, static_cast<double>(d) - A.threshold);
    }
    if (A.type == T::LowerHalfSpace && B.type == T::Polygon) {
        auto clipped = clip_halfplane(B.polygon, 1.0, 1.0, A.threshold);
        return polygon_area(clipped);
    }
    if (A.type == T::Polygon && B.type == T::Polygon)
        return polygon_area(clip_convex(A.polygon, B.polygon));
    if (A.type == T::Stair && B.type == T::Stair &&
        A.stair.orientation == B.stair.orientation) {
        // orthant unions intersect corner-by-corner at componentwise min/max
        std::vector<std::vector<double>> cs;
        for (const auto& a : A.stair.corners)
            for (const auto& b : B.stair.corners) {
                std::vector<double> c(d);
                for (std::size_t k = 0; k < d; ++k)
                    c[k] = A.stair.orientation == StairOrientation::Lower
                               ? std::min(a[k], b[k])
                               : std::max(a[k], b[k]);
                cs.push_back(std::move(c));
            }
        return staircase_volume(Staircase::make(d, A.stair.orientation, std::move(cs)));
    }
    throw std::invalid_argument("region_cap_volume: no exact formula for this pair");
}

} // namespace detail

struct RiskEstimate {
    double value = 0.0;
    double std_error = 0.0; // 0 on the exact path
};

struct RiskMode {
    bool exact = true;
    std::size_t mc_points = 0;
    std::uint64_t seed = 0;

    static RiskMode exact_mode() { return {true, 0, 0}; }
    static RiskMode monte_carlo(std::size_t n, std::uint64_t seed) { return {false, n, seed}; }
};

// P|A delta B| under uniform P on [0,1]^d.
inline RiskEstimate symmetric_difference_risk(const Region& A, const Region& B,
                                              const RiskMode& mode = RiskMode::exact_mode()) {
    if (A.dim != B.dim) throw std::invalid_argument("symmetric_difference_risk: dim mismatch");
    if (mode.exact) {
        double cap = detail::region_cap_volume(A, B);
        return {detail::region_volume(A) + detail::region_volume(B) - 2.0 * cap, 0.0};
    }
    if (mode.mc_points < 2) throw std::invalid_argument("monte carlo risk: need N >= 2");
    RngStream rng(mode.seed);
    std::vector<double> x(A.dim);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < mode.mc_points; ++i) {
        for (double& v : x) v = rng.uniform();
        if (A.contains(x) != B.contains(x)) ++hits;
    }
    double p = static_cast<double>(hits) / static_cast<double>(mode.mc_points);
    double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(mode.mc_points));
    return {p, se};
}

} // namespace seterm
