#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace seterm::theory {

// Entropy-integral upper rate vs minimax lower rate for the risk r_n under
// an eps^{-2 alpha} L2 entropy. Exponents of n; log_flag marks the boundary
// alpha = 1 where the upper rate carries a sqrt(log n) factor.
struct GapRates {
    double lower_exponent = 0.0;
    double upper_exponent = 0.0;
    bool log_flag = false;
};

inline GapRates classical_gap_rates(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("classical_gap_rates: alpha > 0");
    GapRates r;
    r.lower_exponent = -1.0 / (2.0 * (1.0 + alpha));
    r.upper_exponent = std::max(r.lower_exponent, -1.0 / (4.0 * alpha));
    r.log_flag = alpha == 1.0;
    return r;
}

// Growth exponents of E sup |G_n| from generic entropy bounds alone:
// n^{(alpha-1)/2(alpha+1)} below, n^{(alpha-1)/2 alpha} above.
struct EpBounds {
    double lower_exponent = 0.0;
    double upper_exponent = 0.0;
};

inline EpBounds generic_ep_bounds(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("generic_ep_bounds: alpha > 0");
    return {(alpha - 1.0) / (2.0 * (alpha + 1.0)), (alpha - 1.0) / (2.0 * alpha)};
}

// L_p bracketing chaining bound for E sup |G_n| over an L_infinity(1) class
// with envelope sigma:
//   alpha < p^2:  sigma^{(p^2 - alpha)/2} + n^{-1/2} sigma^{-alpha}
//   alpha > p^2:  n^{(alpha-p^2)/(2(alpha+2-p^2))} + sigma^{-(alpha-p^2)/2}
//                 + n^{-1/2} sigma^{-alpha}
// where p^2 is shorthand for min(p,2).
inline double chaining_bound(double alpha, double p, double sigma, double n) {
    if (!(alpha > 0.0) || !(p >= 1.0)) throw std::invalid_argument("chaining_bound: alpha > 0, p >= 1");
    if (!(sigma > 0.0 && sigma <= 1.0)) throw std::invalid_argument("chaining_bound: sigma in (0,1]");
    if (!(n >= 1.0)) throw std::invalid_argument("chaining_bound: n >= 1");
    const double q = std::min(p, 2.0);
    if (alpha == q)
        throw std::invalid_argument(
            "chaining_bound: boundary alpha == min(p,2) is only bracketed between a "
            "constant and log n; no point value");
    const double residual = std::pow(n, -0.5) * std::pow(sigma, -alpha);
    if (alpha < q) return std::pow(sigma, (q - alpha) / 2.0) + residual;
    return std::pow(n, (alpha - q) / (2.0 * (alpha + 2.0 - q))) +
           std::pow(sigma, -(alpha - q) / 2.0) + residual;
}

// Sharp two-sided rate for set-indexed suprema: max{sigma^{1-alpha},
// n^{(alpha-1)/2(alpha+1)}} for alpha != 1.
inline double set_sup_rate(double alpha, double sigma, double n) {
    if (!(alpha > 0.0)) throw std::invalid_argument("set_sup_rate: alpha > 0");
    if (!(sigma > 0.0 && sigma <= 1.0)) throw std::invalid_argument("set_sup_rate: sigma in (0,1]");
    if (!(n >= 1.0)) throw std::invalid_argument("set_sup_rate: n >= 1");
    return std::max(std::pow(sigma, 1.0 - alpha),
                    std::pow(n, (alpha - 1.0) / (2.0 * (alpha + 1.0))));
}

enum class RiskModel { Image, Edge, Classification, IsotonicL2, SConcaveHellinger };

// Exponent-level risk prediction; the evaluator is normalized to pass
// through a reference point since the constants are unknown.
struct RatePrediction {
    RiskModel model = RiskModel::Image;
    double exponent = 0.0;   // of n
    double log_power = 0.0;  // gamma
    double reference_n = 1.0;
    double reference_value = 1.0;

    double evaluate(double n) const {
        double base = std::pow(n / reference_n, exponent);
        double logs = std::pow(std::log(std::max(n, 3.0)) / std::log(std::max(reference_n, 3.0)),
                               log_power);
        return reference_value * base * logs;
    }
};

// model parameter: alpha for the set models, the dimension d for isotonic
// and s-concave.
inline RatePrediction risk_rate(RiskModel model, double param) {
    RatePrediction r;
    r.model = model;
    switch (model) {
        case RiskModel::Image:
        case RiskModel::Edge:
        case RiskModel::Classification: {
            double alpha = param;
            if (!(alpha > 0.0)) throw std::invalid_argument("risk_rate: alpha > 0");
            r.exponent = -1.0 / (alpha + 1.0);
            r.log_power = 0.0;
            break;
        }
        case RiskModel::IsotonicL2: {
            auto d = static_cast<int>(param);
            if (d < 2) throw std::invalid_argument("risk_rate: isotonic needs d >= 2");
            r.exponent = -1.0 / static_cast<double>(d);
            r.log_power = d == 2 ? 2.0 : 1.0;
            break;
        }
        case RiskModel::SConcaveHellinger: {
            auto d = static_cast<int>(param);
            if (d < 2) throw std::invalid_argument("risk_rate: s-concave needs d >= 2");
            r.exponent = -2.0 / (static_cast<double>(d) + 1.0);
            r.log_power = d == 2 ? 2.0 / 3.0 : (d == 3 ? 2.0 : 1.0);
            break;
        }
    }
    return r;
}

} // namespace seterm::theory
