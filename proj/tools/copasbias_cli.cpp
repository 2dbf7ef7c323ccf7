#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "copasbias/comparators.hpp"
#include "copasbias/estimation.hpp"
#include "copasbias/io.hpp"
#include "copasbias/normal.hpp"
#include "copasbias/scoretest.hpp"
#include "copasbias/sim.hpp"

namespace cb = copasbias;
using nlohmann::ordered_json;

namespace {

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw cb::data_error("cannot write output file: " + path);
}

// Reports print to stdout and, when requested, to a file; both get the same
// bytes so reruns can be compared with cmp/diff.
void emit_report(const ordered_json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!out_path.empty()) write_text_file(out_path, text);
}

ordered_json null_fit_json(const cb::estimation::NullFit& nf) {
    ordered_json j;
    j["mu_hat"] = nf.mu_hat;
    j["tau2_hat"] = nf.tau2_hat;
    j["loglik"] = nf.loglik;
    j["converged"] = nf.converged;
    j["iterations"] = nf.iterations;
    return j;
}

ordered_json grid_json(const cb::scoretest::GridSpec& grid,
                       const std::vector<cb::scoretest::GridPoint>& points) {
    ordered_json j;
    j["gamma0_range"] = {grid.gamma0_lo, grid.gamma0_hi};
    j["gamma1_range"] = {grid.gamma1_lo, grid.gamma1_hi};
    j["n_gamma0"] = grid.n_gamma0;
    j["n_gamma1"] = grid.n_gamma1;
    j["n_points_used"] = grid.n_points_used;
    j["seed"] = grid.seed;
    j["gamma1_fallback"] = grid.gamma1_fallback;
    ordered_json pts = ordered_json::array();
    for (const auto& p : points) pts.push_back({p.gamma0, p.gamma1});
    j["points"] = pts;
    return j;
}

ordered_json comparator_json(const cb::comparators::ComparatorResult& r) {
    ordered_json j;
    j["statistic"] = r.statistic;
    j["p_value"] = r.p_value;
    for (const auto& [key, value] : r.extras) j[key] = value;
    return j;
}

ordered_json sensitivity_json(const cb::estimation::SensitivityFit& fit) {
    ordered_json j;
    j["gamma0"] = fit.gamma0;
    j["gamma1"] = fit.gamma1;
    j["mu_adj"] = fit.mu_adj;
    j["tau2_adj"] = fit.tau2_adj;
    j["rho_hat"] = fit.rho_hat;
    j["loglik"] = fit.loglik;
    j["mu_se"] = fit.mu_se;
    j["mu_ci"] = {fit.mu_ci[0], fit.mu_ci[1]};
    j["converged"] = fit.converged;
    j["rho_at_boundary"] = fit.rho_at_boundary;
    return j;
}

struct TestArgs {
    std::string input;
    std::string out;
    int grid_points = 9;
    int b_boot = 200;
    std::uint64_t seed = 0;
    std::vector<double> gamma0_range;
    std::vector<double> gamma1_range;
    std::vector<std::string> comparators{"egger", "tf", "naive"};
    unsigned threads = 0;
};

int run_test(const TestArgs& args) {
    const auto records = cb::io::read_study_csv_file(args.input);
    const cb::Dataset data = cb::io::to_dataset(records);

    cb::scoretest::GridSpec grid = cb::scoretest::default_grid(data);
    if (!args.gamma0_range.empty()) {
        grid.gamma0_lo = args.gamma0_range[0];
        grid.gamma0_hi = args.gamma0_range[1];
    }
    if (!args.gamma1_range.empty()) {
        grid.gamma1_lo = args.gamma1_range[0];
        grid.gamma1_hi = args.gamma1_range[1];
        grid.gamma1_fallback = false;
    }
    grid.n_points_used = args.grid_points;
    grid.seed = args.seed;

    const auto res =
        cb::scoretest::bootstrap_pvalue(data, grid, args.b_boot, args.seed, args.threads);

    ordered_json j;
    j["schema"] = 1;
    j["command"] = "test";
    j["input"] = args.input;
    j["seed"] = args.seed;
    j["null_fit"] = null_fit_json(res.null_fit);
    j["grid"] = grid_json(grid, res.points);
    j["t_stat"] = res.t_stat;
    j["z_values"] = res.z_values;
    j["argmax_point"] = {res.argmax_point.gamma0, res.argmax_point.gamma1};
    j["p_value"] = res.p_value;
    j["b_boot"] = res.b_boot;
    j["n_dropped"] = res.n_dropped;
    j["n_grid_failed"] = res.n_grid_failed;
    j["boot_t"] = res.boot_t;

    ordered_json comps;
    for (const auto& name : args.comparators) {
        if (name.empty()) continue;
        const cb::sim::TestKind kind = cb::sim::test_from_name(name);
        if (kind == cb::sim::TestKind::score_test)
            throw cb::data_error("--comparators accepts egger, tf, naive");
        const std::string label = cb::sim::test_name(kind);
        try {
            switch (kind) {
                case cb::sim::TestKind::egger:
                    comps[label] = comparator_json(cb::comparators::egger_test(data));
                    break;
                case cb::sim::TestKind::trim_fill:
                    comps[label] = comparator_json(cb::comparators::trim_and_fill(data));
                    break;
                default:
                    comps[label] = comparator_json(cb::comparators::copas_naive_test(data));
                    break;
            }
        } catch (const cb::error& e) {
            comps[label] = ordered_json{{"error", e.what()}};
        }
    }
    j["comparators"] = comps;
    j["warnings"] = res.warnings;
    emit_report(j, args.out);
    return 0;
}

struct SensitivityArgs {
    std::string input;
    std::string out;
    double gamma0 = 0.0;
    double gamma1 = 0.0;
    bool gamma0_set = false;
    bool gamma1_set = false;
    bool sweep = false;
    int sweep_steps = 5;
    std::vector<double> gamma0_range;
    std::vector<double> gamma1_range;
};

int run_sensitivity(const SensitivityArgs& args) {
    const auto records = cb::io::read_study_csv_file(args.input);
    const cb::Dataset data = cb::io::to_dataset(records);

    std::vector<cb::scoretest::GridPoint> targets;
    if (args.sweep) {
        cb::scoretest::GridSpec defaults = cb::scoretest::default_grid(data);
        double g0_lo = defaults.gamma0_lo, g0_hi = defaults.gamma0_hi;
        double g1_lo = defaults.gamma1_lo, g1_hi = defaults.gamma1_hi;
        if (!args.gamma0_range.empty()) {
            g0_lo = args.gamma0_range[0];
            g0_hi = args.gamma0_range[1];
        }
        if (!args.gamma1_range.empty()) {
            g1_lo = args.gamma1_range[0];
            g1_hi = args.gamma1_range[1];
        }
        const int steps = std::max(1, args.sweep_steps);
        for (int i = 0; i < steps; ++i)
            for (int k = 0; k < steps; ++k) {
                const double f0 = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
                const double f1 = steps == 1 ? 0.0 : static_cast<double>(k) / (steps - 1);
                targets.push_back({g0_lo + f0 * (g0_hi - g0_lo), g1_lo + f1 * (g1_hi - g1_lo)});
            }
    } else {
        if (!args.gamma0_set || !args.gamma1_set)
            throw cb::data_error("pass --gamma0 and --gamma1, or --sweep");
        targets.push_back({args.gamma0, args.gamma1});
    }

    const cb::estimation::NullFit null_fit = cb::estimation::fit_null(data);
    ordered_json fits = ordered_json::array();
    for (const auto& pt : targets)
        fits.push_back(sensitivity_json(cb::estimation::fit_sensitivity(data, pt.gamma0,
                                                                        pt.gamma1)));

    ordered_json j;
    j["schema"] = 1;
    j["command"] = "sensitivity";
    j["input"] = args.input;
    j["null_fit"] = null_fit_json(null_fit);
    j["fits"] = fits;
    emit_report(j, args.out);
    return 0;
}

struct SimulateArgs {
    cb::sim::SimConfig cfg;
    std::string model = "copas";
    std::string config_path;
    int replicates = 100;
    int b_boot = 200;
    int grid_points = 9;
    std::vector<std::string> tests{"score_test", "egger", "tf", "naive"};
    std::vector<double> alphas{0.05, 0.10};
    std::string out;
    std::string csv;
    unsigned threads = 0;
};

int run_simulate(SimulateArgs& args, const std::vector<CLI::Option*>& flag_opts,
                 const std::vector<const char*>& flag_keys) {
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw cb::data_error("cannot open config file: " + args.config_path);
        nlohmann::json file;
        try {
            in >> file;
        } catch (const nlohmann::json::exception& e) {
            throw cb::data_error("config file is not valid JSON: " + std::string(e.what()));
        }
        // Explicit command-line flags beat config-file values.
        auto overridden = [&](const char* key) {
            for (std::size_t i = 0; i < flag_keys.size(); ++i)
                if (std::string(flag_keys[i]) == key) return flag_opts[i]->count() > 0;
            return false;
        };
        try {
            if (file.contains("n") && !overridden("n")) args.cfg.n = file["n"];
            if (file.contains("mu") && !overridden("mu")) args.cfg.mu = file["mu"];
            if (file.contains("tau2") && !overridden("tau2")) args.cfg.tau2 = file["tau2"];
            if (file.contains("rho") && !overridden("rho")) args.cfg.rho = file["rho"];
            if (file.contains("gamma0") && !overridden("gamma0")) args.cfg.gamma0 = file["gamma0"];
            if (file.contains("gamma1") && !overridden("gamma1")) args.cfg.gamma1 = file["gamma1"];
            if (file.contains("model") && !overridden("model")) args.model = file["model"];
            if (file.contains("c") && !overridden("c")) args.cfg.c = file["c"];
            if (file.contains("s_loc") && !overridden("s_loc")) args.cfg.s_loc = file["s_loc"];
            if (file.contains("s_scale") && !overridden("s_scale"))
                args.cfg.s_scale = file["s_scale"];
            if (file.contains("zscore_noise") && !overridden("zscore_noise"))
                args.cfg.zscore_noise = file["zscore_noise"];
            if (file.contains("seed") && !overridden("seed")) args.cfg.seed = file["seed"];
        } catch (const nlohmann::json::exception& e) {
            throw cb::data_error("config file field has wrong type: " + std::string(e.what()));
        }
    }
    args.cfg.model = cb::sim::model_from_name(args.model);

    std::vector<cb::sim::TestKind> tests;
    for (const auto& name : args.tests)
        if (!name.empty()) tests.push_back(cb::sim::test_from_name(name));

    const cb::sim::PowerReport report = cb::sim::run_power_study(
        args.cfg, args.replicates, tests, args.alphas, args.b_boot, args.grid_points,
        args.threads);

    const std::string text = cb::sim::report_json(report);
    std::cout << text;
    if (!args.out.empty()) write_text_file(args.out, text);
    if (!args.csv.empty()) write_text_file(args.csv, cb::sim::report_csv(report));
    std::fprintf(stderr, "mean runtime per replicate: %.3f s\n", report.mean_runtime_seconds);
    return 0;
}

struct FunnelArgs {
    std::string input;
    std::string out;
    std::string csv_out;
    std::vector<double> contours{0.90, 0.95, 0.99};
};

std::string fmt2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

int run_funnel(const FunnelArgs& args) {
    const auto records = cb::io::read_study_csv_file(args.input);
    const cb::Dataset data = cb::io::to_dataset(records);
    std::vector<double> contours = args.contours;
    std::sort(contours.begin(), contours.end());
    for (double c : contours)
        if (!(c > 0.0 && c < 1.0)) throw cb::data_error("contour levels must lie in (0,1)");

    std::vector<double> zs;
    for (double c : contours) zs.push_back(cb::norm_ppf(0.5 * (1.0 + c)));
    const double z_max = zs.empty() ? 2.0 : zs.back();

    const double s_bot = data.max_s() * 1.05;
    double y_lo = data[0].y, y_hi = data[0].y;
    for (const auto& st : data.studies()) {
        y_lo = std::min(y_lo, st.y);
        y_hi = std::max(y_hi, st.y);
    }
    double x_lo = std::min(y_lo, -z_max * s_bot);
    double x_hi = std::max(y_hi, z_max * s_bot);
    const double pad = 0.05 * (x_hi - x_lo + 1e-12);
    x_lo -= pad;
    x_hi += pad;

    double sw = 0.0, swy = 0.0;
    for (const auto& st : data.studies()) {
        sw += 1.0 / (st.s * st.s);
        swy += st.y / (st.s * st.s);
    }
    const double fe_mean = swy / sw;

    const double width = 640, height = 480;
    const double ml = 64, mr = 20, mt = 20, mb = 52;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto py = [&](double s) { return mt + s / s_bot * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"#ffffff\"/>\n";

    // Significance bands: one wedge per contour, widest first so narrower
    // (less significant) regions paint on top in darker shades.
    const char* shades[] = {"#ededed", "#d9d9d9", "#c4c4c4", "#b0b0b0"};
    for (std::size_t k = zs.size(); k-- > 0;) {
        const double z = zs[k];
        const std::size_t shade = std::min(zs.size() - 1 - k, std::size_t{3});
        svg += "<polygon class=\"contour\" data-level=\"" + fmt_tick(contours[k]) + "\" points=\"";
        svg += fmt2(px(0.0)) + "," + fmt2(py(0.0)) + " ";
        svg += fmt2(px(-z * s_bot)) + "," + fmt2(py(s_bot)) + " ";
        svg += fmt2(px(z * s_bot)) + "," + fmt2(py(s_bot));
        svg += "\" fill=\"" + std::string(shades[shade]) + "\"/>\n";
    }

    // Axes with end-point ticks.
    svg += "<line x1=\"" + fmt2(ml) + "\" y1=\"" + fmt2(mt) + "\" x2=\"" + fmt2(ml) + "\" y2=\"" +
           fmt2(mt + ph) + "\" stroke=\"#333333\"/>\n";
    svg += "<line x1=\"" + fmt2(ml) + "\" y1=\"" + fmt2(mt + ph) + "\" x2=\"" + fmt2(ml + pw) +
           "\" y2=\"" + fmt2(mt + ph) + "\" stroke=\"#333333\"/>\n";
    const double x_ticks[] = {x_lo, 0.5 * (x_lo + x_hi), x_hi};
    for (double t : x_ticks) {
        svg += "<line x1=\"" + fmt2(px(t)) + "\" y1=\"" + fmt2(mt + ph) + "\" x2=\"" +
               fmt2(px(t)) + "\" y2=\"" + fmt2(mt + ph + 5) + "\" stroke=\"#333333\"/>\n";
        svg += "<text x=\"" + fmt2(px(t)) + "\" y=\"" + fmt2(mt + ph + 18) +
               "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333333\">" + fmt_tick(t) +
               "</text>\n";
    }
    const double s_ticks[] = {0.0, 0.5 * s_bot, s_bot};
    for (double t : s_ticks) {
        svg += "<line x1=\"" + fmt2(ml - 5) + "\" y1=\"" + fmt2(py(t)) + "\" x2=\"" + fmt2(ml) +
               "\" y2=\"" + fmt2(py(t)) + "\" stroke=\"#333333\"/>\n";
        svg += "<text x=\"" + fmt2(ml - 8) + "\" y=\"" + fmt2(py(t) + 4) +
               "\" font-size=\"11\" text-anchor=\"end\" fill=\"#333333\">" + fmt_tick(t) +
               "</text>\n";
    }
    svg += "<text x=\"" + fmt2(ml + pw / 2) + "\" y=\"" + fmt2(height - 12) +
           "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#333333\">effect size</text>\n";
    svg += "<text x=\"14\" y=\"" + fmt2(mt + ph / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#333333\" transform=\"rotate(-90 14 " +
           fmt2(mt + ph / 2) + ")\">standard error</text>\n";

    // Pooled fixed-effect mean as a dashed reference line.
    svg += "<line class=\"center\" x1=\"" + fmt2(px(fe_mean)) + "\" y1=\"" + fmt2(mt) +
           "\" x2=\"" + fmt2(px(fe_mean)) + "\" y2=\"" + fmt2(mt + ph) +
           "\" stroke=\"#b03a2e\" stroke-dasharray=\"4 3\"/>\n";

    // Study markers: exactly one circle per study.
    std::string csv = "study_id,y,s,svg_x,svg_y\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const double cx = px(records[i].y), cy = py(records[i].s);
        svg += "<circle class=\"study\" cx=\"" + fmt2(cx) + "\" cy=\"" + fmt2(cy) +
               "\" r=\"3.5\" fill=\"#1f6fb2\" stroke=\"#ffffff\" stroke-width=\"0.8\"/>\n";
        csv += records[i].study_id + "," + nlohmann::json(records[i].y).dump() + "," +
               nlohmann::json(records[i].s).dump() + "," + fmt2(cx) + "," + fmt2(cy) + "\n";
    }
    svg += "</svg>\n";

    write_text_file(args.out, svg);
    std::string csv_path = args.csv_out;
    if (csv_path.empty()) {
        csv_path = args.out;
        const std::size_t dot = csv_path.rfind(".svg");
        if (dot != std::string::npos && dot == csv_path.size() - 4)
            csv_path = csv_path.substr(0, dot);
        csv_path += ".csv";
    }
    write_text_file(csv_path, csv);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Publication-bias diagnostics for meta-analysis under a selection model"};
    app.require_subcommand(1);

    TestArgs test_args;
    CLI::App* test_cmd = app.add_subcommand(
        "test", "Sup-score test for publication bias with a parametric-bootstrap p-value");
    test_cmd->add_option("input", test_args.input, "Study CSV (study_id,y,s)")->required();
    test_cmd->add_option("--grid-points", test_args.grid_points,
                         "Number of (gamma0, gamma1) points drawn from the lattice");
    test_cmd->add_option("--b-boot", test_args.b_boot, "Bootstrap replicates");
    test_cmd->add_option("--seed", test_args.seed, "RNG seed for grid subsampling and bootstrap");
    test_cmd->add_option("--gamma0-range", test_args.gamma0_range, "gamma0 lattice range lo hi")
        ->expected(2)
        ->delimiter(',');
    test_cmd->add_option("--gamma1-range", test_args.gamma1_range, "gamma1 lattice range lo hi")
        ->expected(2)
        ->delimiter(',');
    test_cmd
        ->add_option("--comparators", test_args.comparators,
                     "Comparator tests to run (egger, tf, naive)")
        ->delimiter(',');
    test_cmd->add_option("--threads", test_args.threads,
                         "Worker threads (0 = COPAS_BIAS_THREADS or all cores)");
    test_cmd->add_option("--out", test_args.out, "Write the JSON report here too");

    SensitivityArgs sens_args;
    CLI::App* sens_cmd =
        app.add_subcommand("sensitivity", "Selection-model fits at fixed (gamma0, gamma1)");
    sens_cmd->add_option("input", sens_args.input, "Study CSV (study_id,y,s)")->required();
    CLI::Option* g0_opt = sens_cmd->add_option("--gamma0", sens_args.gamma0, "Selection intercept");
    CLI::Option* g1_opt = sens_cmd->add_option("--gamma1", sens_args.gamma1, "Selection slope");
    sens_cmd->add_flag("--sweep", sens_args.sweep, "Tabulate fits over a (gamma0, gamma1) grid");
    sens_cmd->add_option("--sweep-steps", sens_args.sweep_steps, "Grid steps per axis");
    sens_cmd->add_option("--gamma0-range", sens_args.gamma0_range, "Sweep range lo hi")
        ->expected(2)
        ->delimiter(',');
    sens_cmd->add_option("--gamma1-range", sens_args.gamma1_range, "Sweep range lo hi")
        ->expected(2)
        ->delimiter(',');
    sens_cmd->add_option("--out", sens_args.out, "Write the JSON report here too");

    SimulateArgs sim_args;
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "Monte-Carlo rejection rates for the score test and comparators");
    std::vector<CLI::Option*> sim_flag_opts;
    std::vector<const char*> sim_flag_keys;
    auto track = [&](CLI::Option* opt, const char* key) {
        sim_flag_opts.push_back(opt);
        sim_flag_keys.push_back(key);
    };
    track(sim_cmd->add_option("--n", sim_args.cfg.n, "Studies per replicate"), "n");
    track(sim_cmd->add_option("--mu", sim_args.cfg.mu, "True overall effect"), "mu");
    track(sim_cmd->add_option("--tau2", sim_args.cfg.tau2, "True between-study variance"), "tau2");
    track(sim_cmd->add_option("--rho", sim_args.cfg.rho, "Outcome-selection correlation"), "rho");
    track(sim_cmd->add_option("--gamma0", sim_args.cfg.gamma0, "Selection intercept"), "gamma0");
    track(sim_cmd->add_option("--gamma1", sim_args.cfg.gamma1, "Selection slope"), "gamma1");
    track(sim_cmd->add_option("--model", sim_args.model,
                              "Generator: copas, alt_inv_s2, alt_zscore"),
          "model");
    track(sim_cmd->add_option("--c", sim_args.cfg.c, "z-score link scaling"), "c");
    track(sim_cmd->add_option("--s-loc", sim_args.cfg.s_loc, "Folded-normal location"), "s_loc");
    track(sim_cmd->add_option("--s-scale", sim_args.cfg.s_scale, "Folded-normal sd"), "s_scale");
    track(sim_cmd->add_flag("--zscore-noise", sim_args.cfg.zscore_noise,
                            "Add N(0,1) noise to the z-score link"),
          "zscore_noise");
    track(sim_cmd->add_option("--seed", sim_args.cfg.seed, "Master RNG seed"), "seed");
    sim_cmd->add_option("--config", sim_args.config_path, "JSON config file (flags override)");
    sim_cmd->add_option("--replicates", sim_args.replicates, "Monte-Carlo replicates");
    sim_cmd->add_option("--b-boot", sim_args.b_boot, "Bootstrap replicates per score test");
    sim_cmd->add_option("--grid-points", sim_args.grid_points, "Grid points per score test");
    sim_cmd
        ->add_option("--tests", sim_args.tests,
                     "Tests to run (score_test, egger, tf, naive)")
        ->delimiter(',');
    sim_cmd->add_option("--alpha", sim_args.alphas, "Rejection levels")->delimiter(',');
    sim_cmd->add_option("--threads", sim_args.threads,
                        "Worker threads (0 = COPAS_BIAS_THREADS or all cores)");
    sim_cmd->add_option("--out", sim_args.out, "Write the JSON report here too");
    sim_cmd->add_option("--csv", sim_args.csv, "Write the flat CSV report here");

    FunnelArgs funnel_args;
    CLI::App* funnel_cmd =
        app.add_subcommand("funnel", "Contour-enhanced funnel plot as SVG plus coordinates CSV");
    funnel_cmd->add_option("input", funnel_args.input, "Study CSV (study_id,y,s)")->required();
    funnel_cmd->add_option("--out", funnel_args.out, "SVG output path")->required();
    funnel_cmd->add_option("--csv-out", funnel_args.csv_out,
                           "Coordinates CSV path (default: SVG path with .csv)");
    funnel_cmd->add_option("--contours", funnel_args.contours, "Significance levels")
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    }

    sens_args.gamma0_set = g0_opt->count() > 0;
    sens_args.gamma1_set = g1_opt->count() > 0;

    try {
        if (test_cmd->parsed()) return run_test(test_args);
        if (sens_cmd->parsed()) return run_sensitivity(sens_args);
        if (sim_cmd->parsed()) return run_simulate(sim_args, sim_flag_opts, sim_flag_keys);
        if (funnel_cmd->parsed()) return run_funnel(funnel_args);
    } catch (const cb::data_error& e) {
        std::cerr << "error: data: " << e.what() << "\n";
        return 2;
    } catch (const cb::error& e) {
        std::cerr << "error: numeric: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
