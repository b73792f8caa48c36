// Batch driver for the solver library: one-shot oracles on CSV inputs,
// declarative Monte Carlo sweeps, rate fits with theory overlays.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "seterm/seterm.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace seterm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSpecError = 2;
constexpr int kExitCertificateError = 3;

struct CommonOpts {
    std::string spec_file;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::optional<std::size_t> threads;
    std::string format = "csv";
};

ExperimentSpec load_spec(const CommonOpts& opts) {
    ExperimentSpec spec;
    if (!opts.spec_file.empty()) {
        std::ifstream f(opts.spec_file);
        if (!f) throw SpecError("cannot open spec file " + opts.spec_file);
        spec = parse_spec(f);
    }
    if (opts.seed) spec.master_seed = *opts.seed;
    if (opts.threads) spec.threads = *opts.threads;
    spec.validate();
    return spec;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--spec", opts.spec_file, "declarative spec file (key = value lines)");
    cmd->add_option("--seed", opts.seed, "master seed override");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--threads", opts.threads, "worker threads");
    cmd->add_option("--format", opts.format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
}

json selection_to_json(const SetSelection& sel, const PointCloud& cloud,
                       const DominancePoset* poset) {
    json j;
    j["objective_value"] = sel.objective_value;
    j["kind"] = sel.kind == SelectionKind::DownSet    ? "down-set"
                : sel.kind == SelectionKind::UpSet    ? "up-set"
                                                      : "convex-position";
    j["indices"] = sel.indices;
    if (sel.kind == SelectionKind::ConvexPosition) {
        Region r = region_from_selection(sel, cloud, nullptr);
        json verts = json::array();
        for (const auto& v : r.polygon) verts.push_back({v[0], v[1]});
        j["polygon_vertices"] = verts;
    } else if (poset != nullptr) {
        Staircase st = canonical_extension(sel, cloud, *poset);
        json corners = json::array();
        for (const auto& c : st.corners) corners.push_back(c);
        j["staircase_corners"] = corners;
    }
    return j;
}

json fit_to_json(const IsotonicFit& fit) {
    json j;
    j["blocks"] = fit.blocks;
    j["block_values"] = fit.block_values;
    j["fitted"] = fit.fitted;
    j["certificate_slack"] = fit.certificate_slack;
    return j;
}

void write_experiment_outputs(const ExperimentResult& res, const CommonOpts& opts,
                              const std::string& stem) {
    fs::create_directories(opts.out_dir);
    {
        std::ofstream rows(fs::path(opts.out_dir) / (stem + "_rows.csv"));
        write_rows_csv(res.rows, rows);
    }
    if (!res.aggregates.empty()) {
        std::ofstream agg(fs::path(opts.out_dir) / (stem + "_agg.csv"));
        write_aggregates_csv(res.aggregates, agg);
    }
    if (res.has_fit) {
        std::ofstream overlay(fs::path(opts.out_dir) / (stem + "_overlay.dat"));
        write_overlay_table(res, overlay);
    }
    if (res.has_fit) {
        std::cout << "slope " << res.fit.slope << "  se " << res.fit.slope_se
                  << "  predicted_exponent " << res.predicted_exponent;
        if (res.predicted_log_power != 0.0)
            std::cout << "  (log power " << res.predicted_log_power << " not fitted)";
        std::cout << '\n';
    }
    std::cout << "wrote " << stem << "_rows.csv (" << res.rows.size() << " rows) to "
              << opts.out_dir << '\n';
}

int cmd_solve(const std::string& input, const std::string& oracle,
              const std::string& weights_file) {
    PointCloud cloud = PointCloud::read_csv_file(input);
    std::vector<double> values;
    {
        std::ifstream wf(weights_file);
        if (!wf) throw SpecError("cannot open weights/responses file " + weights_file);
        double v;
        while (wf >> v) values.push_back(v);
    }
    if (values.size() != cloud.size())
        throw SpecError("weights/responses count does not match the point count");

    json out;
    if (oracle == "down" || oracle == "up") {
        DominancePoset poset = build_dominance_poset(cloud);
        WeightedInstance inst = WeightedInstance::from_samples(poset, values);
        SetSelection sel = oracle == "down" ? max_weight_down_set(inst) : max_weight_up_set(inst);
        out = selection_to_json(sel, cloud, &poset);
    } else if (oracle == "convex") {
        SetSelection sel = max_weight_convex_subset_2d(cloud, values);
        out = selection_to_json(sel, cloud, nullptr);
    } else if (oracle == "image-lse" || oracle == "edge-lse" || oracle == "classify") {
        ModelTag tag = oracle == "image-lse"  ? ModelTag::Image
                       : oracle == "edge-lse" ? ModelTag::Edge
                                              : ModelTag::Classification;
        RegressionSample sample(cloud, values, tag);
        DominancePoset poset = build_dominance_poset(cloud);
        auto cls = SetClassDescriptor::make(SetClassKind::LowerSets, cloud.dim());
        SetSelection sel = tag == ModelTag::Image  ? image_lse(sample, &poset, cls)
                           : tag == ModelTag::Edge ? edge_lse(sample, &poset, cls)
                                                   : classification_erm(sample, &poset, cls);
        out = selection_to_json(sel, cloud, &poset);
    } else if (oracle == "isotonic") {
        DominancePoset poset = build_dominance_poset(cloud);
        IsotonicFit fit = isotonic_fit(poset, values);
        fit.certificate_slack = certify_optimality(poset, values, fit);
        if (fit.certificate_slack > 1e-8)
            throw CertificateError("isotonic certificate slack above tolerance");
        out = fit_to_json(fit);
    } else {
        throw SpecError("unknown oracle: " + oracle);
    }
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"set-structured ERM solvers and rate-verification harness"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* solve = app.add_subcommand("solve", "run one oracle / estimator on CSV input");
    std::string solve_points, solve_oracle = "down", solve_weights;
    add_common(solve, opts);
    solve->add_option("--points", solve_points, "point cloud CSV (x1,...,xd per row)")->required();
    solve->add_option("--values", solve_weights, "whitespace-separated weights/responses")->required();
    solve->add_option("--oracle", solve_oracle,
                      "down|up|convex|image-lse|edge-lse|classify|isotonic");

    auto* simulate = app.add_subcommand("simulate", "run an experiment spec");
    add_common(simulate, opts);

    auto* rates = app.add_subcommand("rates", "fit a rate to an aggregate CSV and overlay theory");
    std::string rates_input;
    double rates_exponent = 0.0;
    add_common(rates, opts);
    rates->add_option("--agg", rates_input, "aggregate CSV from simulate")->required();
    rates->add_option("--predicted-exponent", rates_exponent, "theory exponent for the overlay");

    auto* epsup = app.add_subcommand("ep-sup", "symmetrized empirical-process suprema sweep");
    add_common(epsup, opts);

    auto* entropy = app.add_subcommand("entropy", "empirical bracketing-entropy exponent probe");
    add_common(entropy, opts);

    auto* mcheck = app.add_subcommand("check-multiplier", "multiplier inequality checks");
    add_common(mcheck, opts);

    try {
        app.parse(argc, argv);

        if (solve->parsed())
            return cmd_solve(solve_points, solve_oracle, solve_weights);

        ExperimentSpec spec = load_spec(opts);
        if (epsup->parsed()) spec.kind = ExperimentKind::EpSup;
        if (entropy->parsed()) spec.kind = ExperimentKind::Entropy;
        if (mcheck->parsed()) spec.kind = ExperimentKind::MultiplierCheck;

        if (rates->parsed()) {
            std::ifstream f(rates_input);
            if (!f) throw SpecError("cannot open " + rates_input);
            std::string line;
            std::getline(f, line); // header
            std::vector<std::size_t> ns;
            std::vector<double> means, ses;
            while (std::getline(f, line)) {
                std::stringstream ss(line);
                std::string cell;
                std::vector<std::string> cells;
                while (std::getline(ss, cell, ',')) cells.push_back(cell);
                if (cells.size() != 7) continue;
                ns.push_back(std::stoul(cells[4]));
                means.push_back(std::stod(cells[5]));
                ses.push_back(std::stod(cells[6]));
            }
            if (ns.size() < 2) throw SpecError("aggregate CSV has fewer than two n rows");
            RateFit fit = fit_rate(ns, means, ses);
            std::cout << "slope " << fit.slope << "  se " << fit.slope_se << '\n';
            if (rates_exponent != 0.0)
                std::cout << "predicted exponent " << rates_exponent << "  gap "
                          << fit.slope - rates_exponent << '\n';
            fs::create_directories(opts.out_dir);
            std::ofstream overlay(fs::path(opts.out_dir) / "rates_overlay.dat");
            overlay << "# n measured stderr fitted theory\n";
            double ref_v = means.front();
            double ref_n = static_cast<double>(ns.front());
            for (std::size_t i = 0; i < ns.size(); ++i) {
                double nn = static_cast<double>(ns[i]);
                double fitted = std::exp(fit.intercept + fit.slope * std::log(nn));
                double theory = ref_v * std::pow(nn / ref_n, rates_exponent);
                overlay << ns[i] << ' ' << means[i] << ' ' << ses[i] << ' ' << fitted << ' '
                        << theory << '\n';
            }
            return kExitOk;
        }

        ExperimentResult res = run_experiment(spec);
        write_experiment_outputs(res, opts, kind_name(spec.kind));
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const CertificateError& e) {
        std::cerr << "certificate failure: " << e.what() << '\n';
        return kExitCertificateError;
    } catch (const SpecError& e) {
        std::cerr << "spec error: " << e.what() << '\n';
        return kExitSpecError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "spec error: " << e.what() << '\n';
        return kExitSpecError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
