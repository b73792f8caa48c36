#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seterm {

enum class SetClassKind { LowerSets, UpperSets, ConvexBodies2D };

// A set class together with its entropy exponent alpha:
// alpha = d-1 for lower/upper sets, (d-1)/2 for convex bodies.
struct SetClassDescriptor {
    SetClassKind kind;
    std::size_t dim;
    double alpha;

    static SetClassDescriptor make(SetClassKind kind, std::size_t dim) {
        if (dim == 0) throw std::invalid_argument("SetClassDescriptor: dim must be positive");
        double alpha = 0.0;
        switch (kind) {
            case SetClassKind::LowerSets:
            case SetClassKind::UpperSets:
                alpha = static_cast<double>(dim) - 1.0;
                break;
            case SetClassKind::ConvexBodies2D:
                if (dim != 2)
                    throw std::invalid_argument("ConvexBodies2D requires dim == 2");
                alpha = (static_cast<double>(dim) - 1.0) / 2.0;
                break;
        }
        if (!(alpha > 0.0))
            throw std::invalid_argument("SetClassDescriptor: alpha must be positive (dim >= 2)");
        return {kind, dim, alpha};
    }

    static SetClassDescriptor parse(const std::string& name, std::size_t dim) {
        if (name == "lower") return make(SetClassKind::LowerSets, dim);
        if (name == "upper") return make(SetClassKind::UpperSets, dim);
        if (name == "convex") return make(SetClassKind::ConvexBodies2D, dim);
        throw std::invalid_argument("unknown set class: " + name);
    }

    std::string name() const {
        switch (kind) {
            case SetClassKind::LowerSets: return "lower";
            case SetClassKind::UpperSets: return "upper";
            case SetClassKind::ConvexBodies2D: return "convex";
        }
        return "?";
    }
};

} // namespace seterm
