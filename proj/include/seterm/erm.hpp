#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "seterm/closure.hpp"
#include "seterm/convex.hpp"
#include "seterm/point_cloud.hpp"
#include "seterm/poset.hpp"
#include "seterm/region.hpp"
#include "seterm/set_class.hpp"

namespace seterm {

enum class ModelTag { Image, Edge, Classification };

struct RegressionSample {
    PointCloud cloud;
    std::vector<double> responses;
    ModelTag model = ModelTag::Image;
    double edge_a = 0.25;   // Edge: P(eta = 1) = 1/2 + a
    double margin_b = 0.2;  // Classification: eta(x) = 1/2 +- b

    RegressionSample(PointCloud c, std::vector<double> y, ModelTag m)
        : cloud(std::move(c)), responses(std::move(y)), model(m) {
        if (responses.size() != cloud.size())
            throw std::invalid_argument("RegressionSample: response count mismatch");
        if (m == ModelTag::Edge)
            for (double v : responses)
                if (v != 1.0 && v != -1.0)
                    throw std::invalid_argument("edge responses must be +-1");
        if (m == ModelTag::Classification)
            for (double v : responses)
                if (v != 0.0 && v != 1.0)
                    throw std::invalid_argument("classification responses must be 0/1");
    }
};

namespace detail {

inline SetSelection run_set_oracle(const PointCloud& cloud, const DominancePoset* poset,
                                   const std::vector<double>& sample_weights,
                                   const SetClassDescriptor& cls) {
    switch (cls.kind) {
        case SetClassKind::LowerSets: {
            WeightedInstance inst = WeightedInstance::from_samples(*poset, sample_weights);
            return max_weight_down_set(inst, /*allow_empty=*/true);
        }
        case SetClassKind::UpperSets: {
            WeightedInstance inst = WeightedInstance::from_samples(*poset, sample_weights);
            return max_weight_up_set(inst, /*allow_empty=*/true);
        }
        case SetClassKind::ConvexBodies2D:
            if (cloud.dim() != 2)
                throw std::invalid_argument("convex class requires d = 2");
            return max_weight_convex_subset_2d(cloud, sample_weights);
    }
    throw std::logic_error("run_set_oracle: unreachable");
}

} // namespace detail

// LSE for Y = 1_C0(X) + noise: argmin sum (Y_i - 1_C(X_i))^2. Exact via the
// identity argmin = argmax_C sum (2 Y_i - 1) 1_C(X_i).
inline SetSelection image_lse(const RegressionSample& sample, const DominancePoset* poset,
                              const SetClassDescriptor& cls) {
    if (sample.model != ModelTag::Image)
        throw std::invalid_argument("image_lse: sample model is not image");
    if (cls.dim != sample.cloud.dim())
        throw std::invalid_argument("image_lse: class/cloud dim mismatch");
    std::vector<double> w(sample.responses.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 2.0 * sample.responses[i] - 1.0;
    return detail::run_set_oracle(sample.cloud, poset, w, cls);
}

// LSE for Y = 2a f_C0(X) + xi with f_C = 2*1_C - 1: the minimizer does not
// depend on a; argmin = argmax_C sum Y_i 1_C(X_i).
inline SetSelection edge_lse(const RegressionSample& sample, const DominancePoset* poset,
                             const SetClassDescriptor& cls) {
    if (sample.model != ModelTag::Edge)
        throw std::invalid_argument("edge_lse: sample model is not edge");
    if (cls.dim != sample.cloud.dim())
        throw std::invalid_argument("edge_lse: class/cloud dim mismatch");
    return detail::run_set_oracle(sample.cloud, poset, sample.responses, cls);
}

// Empirical 0/1-loss minimizer over g = 1_C: argmax_C sum (2 Y_i - 1) 1_C.
inline SetSelection classification_erm(const RegressionSample& sample, const DominancePoset* poset,
                                       const SetClassDescriptor& cls) {
    if (sample.model != ModelTag::Classification)
        throw std::invalid_argument("classification_erm: sample model is not classification");
    if (cls.dim != sample.cloud.dim())
        throw std::invalid_argument("classification_erm: class/cloud dim mismatch");
    std::vector<double> w(sample.responses.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 2.0 * sample.responses[i] - 1.0;
    return detail::run_set_oracle(sample.cloud, poset, w, cls);
}

// Squared loss of 1_C against the sample responses.
inline double indicator_squared_loss(const RegressionSample& sample, const DominancePoset& poset,
                                     const SetSelection& sel) {
    double loss = 0.0;
    for (std::size_t i = 0; i < sample.responses.size(); ++i) {
        double ind = sel.contains(poset.node_of_sample(i)) ? 1.0 : 0.0;
        double r = sample.responses[i] - ind;
        loss += r * r;
    }
    return loss;
}

// Minimal lower (resp. upper) set containing the selected sample points:
// the antichain of maximal (resp. minimal) selected nodes.
inline Staircase canonical_extension(const SetSelection& sel, const PointCloud& cloud,
                                     const DominancePoset& poset) {
    if (sel.kind == SelectionKind::ConvexPosition)
        throw std::invalid_argument("canonical_extension: selection must be a down- or up-set");
    const bool lower = sel.kind == SelectionKind::DownSet;
    std::vector<std::vector<double>> corners;
    for (int v : sel.indices) {
        bool extreme = true;
        for (int u : sel.indices) {
            if (u == v) continue;
            bool covers = lower ? poset.reachable(v, u) : poset.reachable(u, v);
            if (covers) { extreme = false; break; }
        }
        if (extreme) {
            int i = poset.members()[v].front();
            corners.emplace_back(cloud.point(i), cloud.point(i) + cloud.dim());
        }
    }
    return Staircase::make(cloud.dim(), lower ? StairOrientation::Lower : StairOrientation::Upper,
                           std::move(corners));
}

// Population representative of a fitted selection: minimal staircase
// extension for order classes, hull of the selected points for convex.
inline Region region_from_selection(const SetSelection& sel, const PointCloud& cloud,
                                    const DominancePoset* poset) {
    if (sel.kind == SelectionKind::ConvexPosition) {
        std::vector<geo::IPt> pts;
        for (int i : sel.indices)
            pts.push_back(geo::snap(cloud.coord(i, 0), cloud.coord(i, 1)));
        auto hull = geo::convex_hull(std::move(pts));
        std::vector<std::array<double, 2>> poly;
        for (const auto& p : hull) {
            // report the original coordinates of the matching sample point
            std::array<double, 2> v{static_cast<double>(p.x) / geo::kSnapScale,
                                    static_cast<double>(p.y) / geo::kSnapScale};
            for (int i : sel.indices)
                if (geo::snap(cloud.coord(i, 0), cloud.coord(i, 1)) == p) {
                    v = {cloud.coord(i, 0), cloud.coord(i, 1)};
                    break;
                }
            poly.push_back(v);
        }
        return Region::convex_polygon(std::move(poly));
    }
    return Region::staircase(canonical_extension(sel, cloud, *poset));
}

} // namespace seterm
