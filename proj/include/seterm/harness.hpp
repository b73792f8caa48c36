#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "seterm/ep_suprema.hpp"
#include "seterm/erm.hpp"
#include "seterm/isotonic.hpp"
#include "seterm/point_cloud.hpp"
#include "seterm/region.hpp"
#include "seterm/rng.hpp"
#include "seterm/set_class.hpp"
#include "seterm/theory.hpp"

namespace seterm {

struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CertificateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { Image, Edge, Classification, Isotonic, EpSup, Entropy, MultiplierCheck };

inline std::string kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Image: return "image";
        case ExperimentKind::Edge: return "edge";
        case ExperimentKind::Classification: return "classification";
        case ExperimentKind::Isotonic: return "isotonic";
        case ExperimentKind::EpSup: return "ep_sup";
        case ExperimentKind::Entropy: return "entropy";
        case ExperimentKind::MultiplierCheck: return "multiplier_check";
    }
    return "?";
}

inline ExperimentKind parse_kind(const std::string& s) {
    if (s == "image") return ExperimentKind::Image;
    if (s == "edge") return ExperimentKind::Edge;
    if (s == "classification") return ExperimentKind::Classification;
    if (s == "isotonic") return ExperimentKind::Isotonic;
    if (s == "ep_sup" || s == "ep-sup") return ExperimentKind::EpSup;
    if (s == "entropy") return ExperimentKind::Entropy;
    if (s == "multiplier_check" || s == "check-multiplier") return ExperimentKind::MultiplierCheck;
    throw SpecError("unknown experiment kind: " + s);
}

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Image;
    SetClassDescriptor cls = SetClassDescriptor::make(SetClassKind::LowerSets, 2);
    std::vector<std::size_t> n_grid;
    std::size_t base_replications = 100; // R at the smallest n; R(n) = max(30, R0 n0 / n)
    double noise_sd = 1.0;
    double edge_a = 0.25;
    double margin_b = 0.2;
    std::uint64_t master_seed = 1;
    std::size_t threads = 1;
    // entropy probe knobs (calibrated on lower sets d=2)
    std::vector<double> eps_grid{0.48, 0.41, 0.35, 0.30, 0.25};
    std::size_t entropy_family = 16000;
    // mc risk points per sample point
    std::size_t risk_points_per_n = 200;

    void validate() const {
        if (n_grid.empty()) throw SpecError("spec: empty n grid");
        for (std::size_t i = 1; i < n_grid.size(); ++i)
            if (n_grid[i] <= n_grid[i - 1]) throw SpecError("spec: n grid must be strictly increasing");
        if (kind != ExperimentKind::EpSup && base_replications < 30)
            throw SpecError("spec: replications >= 30 required");
        if (base_replications < 2) throw SpecError("spec: replications >= 2 required");
        if (cls.kind == SetClassKind::ConvexBodies2D && cls.dim != 2)
            throw SpecError("spec: convex class requires d = 2");
        if (!(edge_a > 0.0 && edge_a < 0.5)) throw SpecError("spec: edge a in (0, 1/2)");
        if (!(margin_b > 0.0 && margin_b <= 0.5)) throw SpecError("spec: margin b in (0, 1/2]");
        if (!(noise_sd >= 0.0)) throw SpecError("spec: noise sd >= 0");
    }

    std::size_t replications_at(std::size_t n) const {
        double r0 = static_cast<double>(base_replications);
        double n0 = static_cast<double>(n_grid.front());
        double r = std::ceil(r0 * n0 / static_cast<double>(n));
        return static_cast<std::size_t>(std::max(30.0, r));
    }

    // the one truth serving all classes: {x : sum x_j <= d/2}
    Region truth_region() const { return Region::half_space(cls.dim, static_cast<double>(cls.dim) / 2.0); }
};

// ---- data generators --------------------------------------------------------

namespace detail {

inline bool in_truth(const Region& truth, const PointCloud& cloud, std::size_t i) {
    return truth.contains(std::span<const double>(cloud.point(i), cloud.dim()));
}

} // namespace detail

inline RegressionSample generate_image_data(const ExperimentSpec& spec, std::size_t n,
                                            std::uint64_t replicate) {
    SeedPolicy pol{spec.master_seed};
    std::string tag = std::to_string(n);
    RngStream crng = pol.stream(replicate, "image-cloud-" + tag);
    PointCloud cloud = PointCloud::uniform(n, spec.cls.dim, crng);
    RngStream nrng = pol.stream(replicate, "image-noise-" + tag);
    Region truth = spec.truth_region();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = (detail::in_truth(truth, cloud, i) ? 1.0 : 0.0) + spec.noise_sd * nrng.normal();
    return {std::move(cloud), std::move(y), ModelTag::Image};
}

inline RegressionSample generate_edge_data(const ExperimentSpec& spec, std::size_t n,
                                           std::uint64_t replicate) {
    SeedPolicy pol{spec.master_seed};
    std::string tag = std::to_string(n);
    RngStream crng = pol.stream(replicate, "edge-cloud-" + tag);
    PointCloud cloud = PointCloud::uniform(n, spec.cls.dim, crng);
    RngStream nrng = pol.stream(replicate, "edge-eta-" + tag);
    Region truth = spec.truth_region();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double f = detail::in_truth(truth, cloud, i) ? 1.0 : -1.0;
        double eta = nrng.bernoulli(0.5 + spec.edge_a) ? 1.0 : -1.0;
        y[i] = f * eta;
    }
    RegressionSample s(std::move(cloud), std::move(y), ModelTag::Edge);
    s.edge_a = spec.edge_a;
    return s;
}

inline RegressionSample generate_classification_data(const ExperimentSpec& spec, std::size_t n,
                                                     std::uint64_t replicate) {
    SeedPolicy pol{spec.master_seed};
    std::string tag = std::to_string(n);
    RngStream crng = pol.stream(replicate, "cls-cloud-" + tag);
    PointCloud cloud = PointCloud::uniform(n, spec.cls.dim, crng);
    RngStream nrng = pol.stream(replicate, "cls-label-" + tag);
    Region truth = spec.truth_region();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double eta = 0.5 + spec.margin_b * (detail::in_truth(truth, cloud, i) ? 1.0 : -1.0);
        y[i] = nrng.bernoulli(eta) ? 1.0 : 0.0;
    }
    RegressionSample s(std::move(cloud), std::move(y), ModelTag::Classification);
    s.margin_b = spec.margin_b;
    return s;
}

struct IsotonicData {
    PointCloud cloud;
    std::vector<double> responses;
};

inline IsotonicData generate_isotonic_data(const ExperimentSpec& spec, std::size_t n,
                                           std::uint64_t replicate) {
    SeedPolicy pol{spec.master_seed};
    std::string tag = std::to_string(n);
    RngStream crng = pol.stream(replicate, "iso-cloud-" + tag);
    PointCloud cloud = PointCloud::uniform(n, spec.cls.dim, crng);
    RngStream nrng = pol.stream(replicate, "iso-noise-" + tag);
    auto f0 = default_monotone_truth(spec.cls.dim);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = f0(std::span<const double>(cloud.point(i), cloud.dim())) +
               spec.noise_sd * nrng.normal();
    return {std::move(cloud), std::move(y)};
}

// ---- rate fitting -----------------------------------------------------------

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    std::vector<std::size_t> n_grid;
    std::vector<double> means, ses;
};

// Weighted least squares of log(mean) on log(n); delta-method weights from
// the per-n standard errors, plain OLS when any are unavailable.
inline RateFit fit_rate(const std::vector<std::size_t>& n_grid, const std::vector<double>& means,
                        const std::vector<double>& ses) {
    const std::size_t k = n_grid.size();
    if (k < 2 || means.size() != k || ses.size() != k)
        throw std::invalid_argument("fit_rate: need matching grids with >= 2 points");
    for (double m : means)
        if (!(m > 0.0)) throw std::invalid_argument("fit_rate: means must be positive");
    bool weighted = true;
    for (double s : ses)
        if (!(s > 0.0)) weighted = false;

    std::vector<double> x(k), y(k), w(k, 1.0);
    for (std::size_t i = 0; i < k; ++i) {
        x[i] = std::log(static_cast<double>(n_grid[i]));
        y[i] = std::log(means[i]);
        if (weighted) {
            double sl = ses[i] / means[i]; // se of log mean
            w[i] = 1.0 / (sl * sl);
        }
    }
    double sw = 0.0, swx = 0.0, swy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
    }
    double xbar = swx / sw, ybar = swy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    if (weighted) {
        fit.slope_se = std::sqrt(1.0 / sxx);
    } else {
        double rss = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += r * r;
        }
        double dof = k > 2 ? static_cast<double>(k - 2) : 1.0;
        fit.slope_se = std::max(std::sqrt(rss / dof / sxx), 1e-15);
    }
    fit.n_grid = n_grid;
    fit.means = means;
    fit.ses = ses;
    return fit;
}

// ---- experiment runner ------------------------------------------------------

struct ResultRow {
    std::string kind, cls;
    std::size_t d = 0;
    double alpha = 0.0;
    std::size_t n = 0;
    std::uint64_t replicate = 0;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0.0;
};

struct AggregateRow {
    std::string kind, cls;
    std::size_t d = 0;
    double alpha = 0.0;
    std::size_t n = 0;
    double location = 0.0; // mean (median for classification)
    double std_error = 0.0;
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<ResultRow> rows;
    std::vector<AggregateRow> aggregates;
    RateFit fit;
    double predicted_exponent = 0.0;
    double predicted_log_power = 0.0;
    bool has_fit = false;
};

namespace detail {

inline double format_sensitive_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t k = v.size();
    return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

// One replicate of a set-model experiment; returns (metric value, seed tag).
inline double set_model_replicate(const ExperimentSpec& spec, std::size_t n, std::uint64_t rep) {
    const SetClassDescriptor& cls = spec.cls;
    Region truth = spec.truth_region();

    RegressionSample sample = [&] {
        switch (spec.kind) {
            case ExperimentKind::Image: return generate_image_data(spec, n, rep);
            case ExperimentKind::Edge: return generate_edge_data(spec, n, rep);
            case ExperimentKind::Classification: return generate_classification_data(spec, n, rep);
            default: throw SpecError("set_model_replicate: not a set model");
        }
    }();

    DominancePoset poset;
    const DominancePoset* pp = nullptr;
    if (cls.kind != SetClassKind::ConvexBodies2D) {
        poset = build_dominance_poset(sample.cloud);
        pp = &poset;
    }
    SetSelection sel = [&] {
        switch (spec.kind) {
            case ExperimentKind::Image: return image_lse(sample, pp, cls);
            case ExperimentKind::Edge: return edge_lse(sample, pp, cls);
            default: return classification_erm(sample, pp, cls);
        }
    }();
    Region est = region_from_selection(sel, sample.cloud, pp);

    RiskEstimate risk;
    if (cls.kind == SetClassKind::ConvexBodies2D || cls.dim <= 3) {
        risk = symmetric_difference_risk(est, truth, RiskMode::exact_mode());
    } else {
        SeedPolicy pol{spec.master_seed};
        std::uint64_t rseed = pol.derive(rep, "risk-" + std::to_string(n));
        risk = symmetric_difference_risk(
            est, truth, RiskMode::monte_carlo(spec.risk_points_per_n * n, rseed));
    }
    if (spec.kind == ExperimentKind::Classification)
        return 2.0 * spec.margin_b * risk.value; // excess risk under the margin law
    return risk.value;
}

inline double isotonic_replicate(const ExperimentSpec& spec, std::size_t n, std::uint64_t rep) {
    IsotonicData data = generate_isotonic_data(spec, n, rep);
    DominancePoset poset = build_dominance_poset(data.cloud);
    IsotonicFit fit = isotonic_fit(poset, data.responses);
    double slack = certify_optimality(poset, data.responses, fit);
    fit.certificate_slack = slack;
    if (slack > 1e-8)
        throw CertificateError("isotonic certificate slack " + std::to_string(slack) +
                               " above 1e-8 tolerance");
    SeedPolicy pol{spec.master_seed};
    std::uint64_t rseed = pol.derive(rep, "iso-risk-" + std::to_string(n));
    auto f0 = default_monotone_truth(spec.cls.dim);
    // truth lies in L_inf(1): evaluate the truncated extension
    return l2_risk(fit, poset, data.cloud, f0, spec.risk_points_per_n * n, rseed, -1.0, 1.0).value;
}

inline double ep_sup_replicate(const ExperimentSpec& spec, std::size_t n, std::uint64_t rep) {
    SeedPolicy pol{spec.master_seed};
    std::string tag = std::to_string(n);
    RngStream crng = pol.stream(rep, "epsup-cloud-" + tag);
    PointCloud cloud = PointCloud::uniform(n, spec.cls.dim, crng);
    RngStream mrng = pol.stream(rep, "epsup-mult-" + tag);
    std::vector<double> mult(n);
    for (double& m : mult) m = static_cast<double>(mrng.rademacher());
    DominancePoset poset;
    const DominancePoset* pp = nullptr;
    if (spec.cls.kind != SetClassKind::ConvexBodies2D) {
        poset = build_dominance_poset(cloud);
        pp = &poset;
    }
    return symmetrized_sup(cloud, pp, spec.cls, mult);
}

inline void run_pool(std::size_t threads, std::size_t tasks,
                     const std::function<void(std::size_t)>& work) {
    if (threads <= 1 || tasks <= 1) {
        for (std::size_t t = 0; t < tasks; ++t) work(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            while (true) {
                std::size_t t = next.fetch_add(1);
                if (t >= tasks) break;
                try {
                    work(t);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace detail

inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentResult out;
    out.spec = spec;
    SeedPolicy pol{spec.master_seed};

    const bool rate_kind =
        spec.kind == ExperimentKind::Image || spec.kind == ExperimentKind::Edge ||
        spec.kind == ExperimentKind::Classification || spec.kind == ExperimentKind::Isotonic ||
        spec.kind == ExperimentKind::EpSup;

    if (rate_kind) {
        struct Task {
            std::size_t n;
            std::uint64_t rep;
        };
        std::vector<Task> tasks;
        for (std::size_t n : spec.n_grid) {
            std::size_t R = spec.kind == ExperimentKind::EpSup
                                ? std::max<std::size_t>(spec.base_replications, 2)
                                : spec.replications_at(n);
            for (std::uint64_t r = 0; r < R; ++r) tasks.push_back({n, r});
        }
        std::vector<double> values(tasks.size());
        detail::run_pool(spec.threads, tasks.size(), [&](std::size_t t) {
            const Task& task = tasks[t];
            switch (spec.kind) {
                case ExperimentKind::Isotonic:
                    values[t] = detail::isotonic_replicate(spec, task.n, task.rep);
                    break;
                case ExperimentKind::EpSup:
                    values[t] = detail::ep_sup_replicate(spec, task.n, task.rep);
                    break;
                default:
                    values[t] = detail::set_model_replicate(spec, task.n, task.rep);
                    break;
            }
        });
        std::string metric = spec.kind == ExperimentKind::EpSup ? "sym_sup"
                             : spec.kind == ExperimentKind::Isotonic ? "l2_risk"
                             : spec.kind == ExperimentKind::Classification ? "excess_risk"
                                                                           : "sym_diff_risk";
        for (std::size_t t = 0; t < tasks.size(); ++t) {
            ResultRow row;
            row.kind = kind_name(spec.kind);
            row.cls = spec.cls.name();
            row.d = spec.cls.dim;
            row.alpha = spec.cls.alpha;
            row.n = tasks[t].n;
            row.replicate = tasks[t].rep;
            row.seed = pol.derive(tasks[t].rep, kind_name(spec.kind) + "-" + std::to_string(tasks[t].n));
            row.metric = metric;
            row.value = values[t];
            out.rows.push_back(row);
        }
        // aggregate per n
        std::vector<double> means, ses;
        std::size_t offset = 0;
        for (std::size_t n : spec.n_grid) {
            std::size_t R = spec.kind == ExperimentKind::EpSup
                                ? std::max<std::size_t>(spec.base_replications, 2)
                                : spec.replications_at(n);
            std::vector<double> v(values.begin() + static_cast<std::ptrdiff_t>(offset),
                                  values.begin() + static_cast<std::ptrdiff_t>(offset + R));
            offset += R;
            double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(R);
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            var /= static_cast<double>(R);
            double se = std::sqrt(var / static_cast<double>(R));
            double loc = mean;
            if (spec.kind == ExperimentKind::Classification) {
                loc = detail::format_sensitive_median(v);
                se = 1.2533 * se; // large-sample se of the median
            }
            AggregateRow agg;
            agg.kind = kind_name(spec.kind);
            agg.cls = spec.cls.name();
            agg.d = spec.cls.dim;
            agg.alpha = spec.cls.alpha;
            agg.n = n;
            agg.location = loc;
            agg.std_error = se;
            out.aggregates.push_back(agg);
            means.push_back(loc);
            ses.push_back(se);
        }
        if (spec.n_grid.size() >= 2) {
            out.fit = fit_rate(spec.n_grid, means, ses);
            out.has_fit = true;
        }
        switch (spec.kind) {
            case ExperimentKind::Image:
                out.predicted_exponent = theory::risk_rate(theory::RiskModel::Image, spec.cls.alpha).exponent;
                break;
            case ExperimentKind::Edge:
                out.predicted_exponent = theory::risk_rate(theory::RiskModel::Edge, spec.cls.alpha).exponent;
                break;
            case ExperimentKind::Classification:
                out.predicted_exponent =
                    theory::risk_rate(theory::RiskModel::Classification, spec.cls.alpha).exponent;
                break;
            case ExperimentKind::Isotonic: {
                auto p = theory::risk_rate(theory::RiskModel::IsotonicL2,
                                           static_cast<double>(spec.cls.dim));
                out.predicted_exponent = p.exponent;
                out.predicted_log_power = p.log_power;
                break;
            }
            case ExperimentKind::EpSup:
                out.predicted_exponent =
                    spec.cls.alpha == 1.0
                        ? 0.0
                        : (spec.cls.alpha - 1.0) / (2.0 * (spec.cls.alpha + 1.0));
                break;
            default: break;
        }
        return out;
    }

    if (spec.kind == ExperimentKind::Entropy) {
        for (std::size_t n : spec.n_grid) {
            RngStream crng = pol.stream(0, "entropy-cloud-" + std::to_string(n));
            PointCloud cloud = PointCloud::uniform(n, spec.cls.dim, crng);
            EntropyProbe probe = greedy_packing_entropy(
                spec.cls, cloud, spec.eps_grid, spec.entropy_family,
                pol.derive(0, "entropy-family-" + std::to_string(n)));
            ResultRow row;
            row.kind = kind_name(spec.kind);
            row.cls = spec.cls.name();
            row.d = spec.cls.dim;
            row.alpha = spec.cls.alpha;
            row.n = n;
            row.replicate = 0;
            row.seed = pol.derive(0, "entropy-family-" + std::to_string(n));
            row.metric = "alpha_hat";
            row.value = probe.alpha_hat;
            out.rows.push_back(row);
        }
        return out;
    }

    // multiplier check: one configuration per (n, replicate)
    {
        struct Cfg {
            std::size_t n;
            std::uint64_t rep;
        };
        std::vector<Cfg> cfgs;
        for (std::size_t n : spec.n_grid)
            for (std::uint64_t rep = 0; rep < spec.base_replications; ++rep) cfgs.push_back({n, rep});
        std::vector<MultiplierCheckReport> reports(cfgs.size());
        detail::run_pool(spec.threads, cfgs.size(), [&](std::size_t t) {
            SeedPolicy sub{pol.derive(cfgs[t].rep, "mcheck-config-" + std::to_string(cfgs[t].n))};
            reports[t] = multiplier_inequality_check(spec.cls, cfgs[t].n, MultiplierKind::Gaussian, sub);
        });
        for (std::size_t t = 0; t < cfgs.size(); ++t) {
            ResultRow row;
            row.kind = kind_name(spec.kind);
            row.cls = spec.cls.name();
            row.d = spec.cls.dim;
            row.alpha = spec.cls.alpha;
            row.n = cfgs[t].n;
            row.replicate = cfgs[t].rep;
            row.seed = pol.derive(cfgs[t].rep, "mcheck-config-" + std::to_string(cfgs[t].n));
            row.metric = "violations";
            row.value = static_cast<double>(reports[t].violations);
            out.rows.push_back(row);
            row.metric = "max_slack";
            row.value = reports[t].max_slack;
            out.rows.push_back(row);
        }
    }
    return out;
}

// ---- CSV --------------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline void write_rows_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
    os << "kind,class,d,alpha,n,replicate,seed,metric,value\n";
    for (const auto& r : rows)
        os << r.kind << ',' << r.cls << ',' << r.d << ',' << detail::fmt_double(r.alpha) << ','
           << r.n << ',' << r.replicate << ',' << r.seed << ',' << r.metric << ','
           << detail::fmt_double(r.value) << '\n';
}

inline void write_aggregates_csv(const std::vector<AggregateRow>& rows, std::ostream& os) {
    os << "kind,class,d,alpha,n,mean,stderr\n";
    for (const auto& r : rows)
        os << r.kind << ',' << r.cls << ',' << r.d << ',' << detail::fmt_double(r.alpha) << ','
           << r.n << ',' << detail::fmt_double(r.location) << ','
           << detail::fmt_double(r.std_error) << '\n';
}

// ep_suprema external interface: class,d,alpha,n,sigma,R,mean_sup,stderr,seed
inline void append_sup_csv(const SupEstimate& est, std::uint64_t seed, std::ostream& os) {
    os << est.cls.name() << ',' << est.cls.dim << ',' << detail::fmt_double(est.cls.alpha) << ','
       << est.n << ',' << detail::fmt_double(est.sigma) << ',' << est.replications << ','
       << detail::fmt_double(est.mean_sup) << ',' << detail::fmt_double(est.std_error) << ','
       << seed << '\n';
}

// gnuplot-ready overlay: n, measured, se, fitted line, theory curve
inline void write_overlay_table(const ExperimentResult& res, std::ostream& os) {
    if (!res.has_fit) return;
    os << "# n measured stderr fitted theory\n";
    const RateFit& f = res.fit;
    double ref_n = static_cast<double>(f.n_grid.front());
    double ref_v = f.means.front();
    for (std::size_t i = 0; i < f.n_grid.size(); ++i) {
        auto n = static_cast<double>(f.n_grid[i]);
        double fitted = std::exp(f.intercept + f.slope * std::log(n));
        double theory_curve = ref_v * std::pow(n / ref_n, res.predicted_exponent);
        if (res.predicted_log_power != 0.0)
            theory_curve *= std::pow(std::log(n) / std::log(ref_n), res.predicted_log_power);
        os << f.n_grid[i] << ' ' << detail::fmt_double(f.means[i]) << ' '
           << detail::fmt_double(f.ses[i]) << ' ' << detail::fmt_double(fitted) << ' '
           << detail::fmt_double(theory_curve) << '\n';
    }
}

// ---- spec file parsing (key = value lines) -----------------------------------

inline ExperimentSpec parse_spec(std::istream& is) {
    ExperimentSpec spec;
    spec.n_grid.clear();
    std::string line;
    std::map<std::string, std::string> kv;
    while (std::getline(is, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto get = [&](const std::string& k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    try {
        std::size_t d = 2;
        std::string cls_name = "lower";
        if (const auto* v = get("kind")) spec.kind = parse_kind(*v);
        if (const auto* v = get("d")) d = std::stoul(*v);
        if (const auto* v = get("class")) cls_name = *v;
        spec.cls = SetClassDescriptor::parse(cls_name, d);
        if (const auto* v = get("n_grid")) {
            std::stringstream ss(*v);
            std::string cell;
            while (std::getline(ss, cell, ',')) spec.n_grid.push_back(std::stoul(cell));
        }
        if (const auto* v = get("replications")) spec.base_replications = std::stoul(*v);
        if (const auto* v = get("noise_sd")) spec.noise_sd = std::stod(*v);
        if (const auto* v = get("edge_a")) spec.edge_a = std::stod(*v);
        if (const auto* v = get("margin_b")) spec.margin_b = std::stod(*v);
        if (const auto* v = get("seed")) spec.master_seed = std::stoull(*v);
        if (const auto* v = get("threads")) spec.threads = std::stoul(*v);
        if (const auto* v = get("entropy_family")) spec.entropy_family = std::stoul(*v);
        if (const auto* v = get("risk_points_per_n")) spec.risk_points_per_n = std::stoul(*v);
        if (const auto* v = get("eps_grid")) {
            spec.eps_grid.clear();
            std::stringstream ss(*v);
            std::string cell;
            while (std::getline(ss, cell, ',')) spec.eps_grid.push_back(std::stod(cell));
        }
    } catch (const SpecError&) {
        throw;
    } catch (const std::exception& e) {
        throw SpecError(std::string("spec parse error: ") + e.what());
    }
    spec.validate();
    return spec;
}

} // namespace seterm
