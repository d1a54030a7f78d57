#pragma once

// Command-line front end. Kept header-only so tests can drive run_cli()
// in-process; tools/ldvdd.cpp is a thin main().

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ldvdd/design.hpp"
#include "ldvdd/effects.hpp"
#include "ldvdd/errors.hpp"
#include "ldvdd/estimators.hpp"
#include "ldvdd/io/csv.hpp"
#include "ldvdd/io/json_io.hpp"
#include "ldvdd/simulate.hpp"

namespace ldvdd::cli {

using io::json;

enum class OutputFormat { text, json };

/// Everything a command needs, after flags and config file are merged.
struct RunConfig {
    std::string command;
    std::string input_path;
    std::string output_path;
    OutputFormat format = OutputFormat::text;

    // estimate / summarize
    std::string family = "poisson";
    io::ColumnBindings columns;
    std::vector<std::string> heterogeneous;
    int post_period = -1;
    int num_periods = 0;
    int base_period = 0;
    bool trend = false;
    bool no_period_dummies = false;
    bool cluster_correction = false;
    int max_iterations = 100;
    double gradient_tolerance = 1e-8;

    // simulate
    std::string sim_family = "positive";
    int n = 1000;
    int reps = 1000;
    std::uint64_t seed = 42;
    double beta_qtau = 0.0;
    double beta_d = 0.0;
    double beta_q = 0.5;
    std::vector<double> betas_t{-2.0, -2.0, -1.0, -1.0};
    bool table = false;
    std::vector<int> table_ns{250, 1000};
    bool count_first_intercept = false;
    bool censored_from_zero = false;
    std::string ybar = "observed";
    int threads = 1;

    // effect
    double beta = 0.0;
    double se = 0.0;
    std::string kind = "proportional";
};

namespace detail {

inline std::string fmt(double v, int decimals) {
    if (!std::isfinite(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

inline std::string lpad(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

inline double num(const json& j) { return j.is_null() ? NAN : j.get<double>(); }

inline int default_threads() {
    if (const char* env = std::getenv("LDVDD_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (...) {
        }
    }
    return 1;
}

/// Flat `key = value` config: lines starting with '#' are comments; keys are
/// long flag names without the dashes. Returns argv with file values
/// appended for every key not already given on the command line.
inline std::vector<std::string> merge_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open '" + path + "'");
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    auto given = [&](const std::string& key) {
        for (const auto& a : args) {
            if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
        }
        return false;
    };
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw CLI::ValidationError("--config", "expected key = value, got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (key == "config" || given(key)) continue;
        if (value == "true") {
            args.push_back("--" + key);
        } else if (value != "false") {
            args.push_back("--" + key);
            args.push_back(value);
        }
    }
    return args;
}

inline std::string family_title(const std::string& family) {
    if (family == "positive") return "Positive Y";
    if (family == "count") return "Count Y";
    if (family == "censored") return "Censored Y";
    if (family == "binary") return "Binary Y";
    return "Multinomial Y";
}

inline std::string row_label(const json& row) {
    const std::string est = row["estimator"];
    const std::string par = row["parameter"];
    const int c = row["class"];
    if (est == "lin_dd_transform") return "DD beta_d/Ybar11";
    std::string label = est == "qmle"     ? "QMLE "
                        : est == "logit"  ? "Logit "
                        : est == "mlogit" ? "MLogit "
                                          : "DD ";
    label += par;
    if (c > 0) label += "[" + std::to_string(c) + "]";
    return label;
}

inline std::string cell_text(const json& row) {
    return fmt(num(row["abs_bias"]), 2) + " " + fmt(num(row["sd"]), 2) + " (" +
           fmt(num(row["rmse"]), 2) + ")";
}

inline std::string render_simulate_text(const json& results) {
    std::ostringstream os;
    const auto& sums = results["summaries"];
    if (sums.empty()) return "";
    const std::string family = sums[0]["scenario"]["family"];
    os << family_title(family) << ": |Bias|, SD and (RMSE)\n";
    // Group summaries by n, keeping first-seen order.
    std::vector<int> ns;
    for (const auto& s : sums) {
        const int n = s["scenario"]["n"];
        if (std::find(ns.begin(), ns.end(), n) == ns.end()) ns.push_back(n);
    }
    for (int n : ns) {
        std::vector<const json*> cols;
        for (const auto& s : sums) {
            if (s["scenario"]["n"].get<int>() == n) cols.push_back(&s);
        }
        std::string header = pad("N=" + std::to_string(n), 20);
        for (const json* s : cols) {
            header += lpad("bqtau,bd: " + fmt(num((*s)["scenario"]["beta_qtau"]), 1) + ", " +
                               fmt(num((*s)["scenario"]["beta_d"]), 1),
                           20);
        }
        os << header << "\n";
        const auto& rows0 = (*cols[0])["rows"];
        for (std::size_t r = 0; r < rows0.size(); ++r) {
            std::string line = pad(row_label(rows0[r]), 20);
            for (const json* s : cols) line += lpad(cell_text((*s)["rows"][r]), 20);
            os << line << "\n";
        }
        std::string foot = pad("redraws/failed", 20);
        for (const json* s : cols) {
            foot += lpad(std::to_string((*s)["redraw_count"].get<int>()) + "/" +
                             std::to_string((*s)["failed_repetitions"].get<int>()),
                         20);
        }
        os << foot << "\n";
    }
    return os.str();
}

inline std::string render_estimate_text(const json& results) {
    std::ostringstream os;
    const auto& fit = results["fit"];
    os << "family: " << fit["family"].get<std::string>()
       << "   n = " << fit["nobs"].get<std::size_t>()
       << "   vcov: " << fit["vcov_kind"].get<std::string>()
       << "   converged: " << (fit["converged"].get<bool>() ? "yes" : "no") << "\n";
    os << pad("coefficient", 22) << lpad("estimate", 12) << lpad("robust se", 12)
       << lpad("t", 10) << "\n";
    const int classes = fit["num_classes"];
    for (const auto& c : fit["coefficients"]) {
        std::string name = c["name"];
        if (classes > 1) name += "[" + std::to_string(c["class"].get<int>()) + "]";
        os << pad(name, 22) << lpad(fmt(num(c["estimate"]), 3), 12)
           << lpad(fmt(num(c["se"]), 3), 12) << lpad(fmt(num(c["t"]), 2), 10) << "\n";
    }
    if (results.contains("trend_test")) {
        for (const auto& t : results["trend_test"]) {
            os << "trend test (tQ" << (classes > 1 ? "[" + std::to_string(t["class"].get<int>()) + "]" : "")
               << "): estimate " << fmt(num(t["estimate"]), 3) << ", se "
               << fmt(num(t["se"]), 3) << ", t " << fmt(num(t["t"]), 2) << "\n";
        }
    }
    if (results.contains("effects")) {
        for (const auto& e : results["effects"]) {
            os << e["kind"].get<std::string>();
            if (classes > 1) os << " (class " << e["class"].get<int>() << ")";
            os << " effect exp(beta_d)-1 = " << fmt(num(e["effect"]), 3) << " (se "
               << fmt(num(e["se_effect"]), 3) << "), beta_d t = " << fmt(num(e["t_value"]), 2);
            if (!e["rare_event_note"].is_null() && e["rare_event_note"].get<bool>()) {
                os << "  [rare event: reads as a relative risk]";
            }
            os << "\n";
        }
    }
    if (results.contains("lin_dd")) {
        const auto& l = results["lin_dd"];
        os << "Lin-DD: beta_d " << fmt(num(l["beta_d"]), 3) << ", Ybar11 "
           << fmt(num(l["ybar_11"]), 3) << ", ln(beta_d/Ybar11 + 1) = "
           << (l["transformed"].is_null() ? std::string("undefined")
                                          : fmt(num(l["transformed"]), 3))
           << "\n";
    }
    return os.str();
}

inline std::string render_effect_text(const json& e) {
    std::ostringstream os;
    os << "kind: " << e["kind"].get<std::string>() << "\n"
       << "beta " << fmt(num(e["beta"]), 3) << "  se " << fmt(num(e["se_beta"]), 3) << "  t "
       << fmt(num(e["t_value"]), 2) << "\n"
       << "effect exp(beta)-1 = " << fmt(num(e["effect"]), 3) << "  se "
       << fmt(num(e["se_effect"]), 3) << "\n";
    return os.str();
}

inline std::string render_summarize_text(const json& results) {
    std::ostringstream os;
    os << pad("group", 8) << pad("period", 8) << lpad("count", 8) << lpad("mean", 12)
       << lpad("sd", 12) << "\n";
    for (const auto& c : results["cells"]) {
        os << pad(std::to_string(c["q"].get<int>()), 8) << pad(c["period"].get<std::string>(), 8)
           << lpad(std::to_string(c["count"].get<std::size_t>()), 8)
           << lpad(fmt(num(c["mean"]), 3), 12) << lpad(fmt(num(c["sd"]), 3), 12) << "\n";
    }
    return os.str();
}

inline SimFamily parse_sim_family(const std::string& s) {
    if (s == "positive") return SimFamily::positive;
    if (s == "count") return SimFamily::count;
    if (s == "censored") return SimFamily::censored;
    if (s == "binary") return SimFamily::binary;
    return SimFamily::multinomial;
}

inline EstimatorFamily parse_estimator(const std::string& s) {
    if (s == "ols") return EstimatorFamily::ols;
    if (s == "poisson") return EstimatorFamily::poisson_qmle;
    if (s == "logit") return EstimatorFamily::logit_qmle;
    return EstimatorFamily::multinomial_logit;
}

inline Scenario scenario_from(const RunConfig& c) {
    Scenario s;
    s.family = parse_sim_family(c.sim_family);
    s.betas_t = c.betas_t;
    s.beta_q = c.beta_q;
    s.beta_qtau = c.beta_qtau;
    s.beta_d = c.beta_d;
    s.n = c.n;
    s.repetitions = c.reps;
    s.seed = c.seed;
    s.count_uses_first_intercept = c.count_first_intercept;
    s.censored_sum_from_zero = c.censored_from_zero;
    s.ybar_reference = c.ybar == "counterfactual" ? YbarReference::counterfactual
                                                  : YbarReference::observed;
    return s;
}

inline json run_simulate(const RunConfig& c, json& echo) {
    echo = {{"family", c.sim_family}, {"betas_t", c.betas_t}, {"beta_q", c.beta_q},
            {"reps", c.reps}, {"seed", c.seed}, {"ybar", c.ybar},
            {"count_first_intercept", c.count_first_intercept},
            {"censored_from_zero", c.censored_from_zero}, {"table", c.table}};
    json sums = json::array();
    if (c.table) {
        echo["ns"] = c.table_ns;
        for (int n : c.table_ns) {
            for (double bt : {0.0, 0.5}) {
                for (double bd : {0.0, 0.5}) {
                    RunConfig cell = c;
                    cell.n = n;
                    cell.beta_qtau = bt;
                    cell.beta_d = bd;
                    sums.push_back(io::to_json(run_monte_carlo(scenario_from(cell), c.threads)));
                }
            }
        }
    } else {
        echo["n"] = c.n;
        echo["beta_qtau"] = c.beta_qtau;
        echo["beta_d"] = c.beta_d;
        sums.push_back(io::to_json(run_monte_carlo(scenario_from(c), c.threads)));
    }
    return {{"summaries", std::move(sums)}};
}

inline json bindings_echo(const RunConfig& c) {
    json j = {{"csv", c.input_path},          {"outcome", c.columns.outcome},
              {"group", c.columns.group},     {"period", c.columns.period},
              {"weights", c.columns.weight},  {"cluster", c.columns.cluster},
              {"covariates", c.columns.covariates}};
    if (c.post_period >= 0) j["post"] = c.post_period;
    return j;
}

inline RcsDataset load(const RunConfig& c) {
    std::optional<int> periods;
    if (c.num_periods > 0) periods = c.num_periods;
    return io::to_dataset(io::read_csv_file(c.input_path), c.columns, periods);
}

inline json run_estimate(const RunConfig& c, json& echo) {
    echo = bindings_echo(c);
    echo["family"] = c.family;
    echo["trend"] = c.trend;
    echo["hetero"] = c.heterogeneous;
    echo["period_dummies"] = !c.no_period_dummies;
    echo["base_period"] = c.base_period;
    echo["cluster_correction"] = c.cluster_correction;

    const RcsDataset data = load(c);
    const EstimatorFamily family = parse_estimator(c.family);
    switch (family) {
        case EstimatorFamily::poisson_qmle: data.validate_outcome(OutcomeKind::censored); break;
        case EstimatorFamily::logit_qmle: data.validate_outcome(OutcomeKind::fractional); break;
        case EstimatorFamily::multinomial_logit:
            data.validate_outcome(OutcomeKind::multinomial);
            break;
        case EstimatorFamily::ols: break;
    }
    DesignSpec spec;
    spec.post_period = c.post_period >= 0 ? c.post_period : data.num_periods() - 1;
    spec.include_group_trend = c.trend;
    spec.include_period_dummies = !c.no_period_dummies;
    spec.base_period = c.base_period;
    spec.heterogeneous_covariates = c.heterogeneous;
    FitOptions options;
    options.cluster_correction = c.cluster_correction;
    options.max_iterations = c.max_iterations;
    options.gradient_tolerance = c.gradient_tolerance;

    const FitResult fit = fit_dataset(family, data, spec, options);
    json results;
    results["fit"] = io::to_json(fit);
    results["design"] = {{"columns", fit.column_names}, {"post_period", spec.post_period}};

    if (c.trend) {
        json tt = json::array();
        for (int k = 1; k <= fit.num_classes; ++k) {
            const double est = fit.coefficient("tQ", k);
            const double se = fit.std_error("tQ", k);
            tt.push_back({{"class", k}, {"estimate", est}, {"se", se}, {"t", est / se}});
        }
        results["trend_test"] = std::move(tt);
    }
    if (family == EstimatorFamily::ols) {
        const auto cells = summarize_cells(data, spec.post_period);
        const double bd = fit.coefficient("D");
        json l = {{"beta_d", bd}, {"ybar_11", cells[3].mean ? json(*cells[3].mean) : json(nullptr)},
                  {"transformed", nullptr}};
        if (cells[3].mean) {
            try {
                l["transformed"] = lin_dd_proportional(bd, *cells[3].mean);
            } catch (const Error&) {
            }
        }
        results["lin_dd"] = std::move(l);
    } else if (fit.converged) {
        json effects = json::array();
        for (int k = 1; k <= fit.num_classes; ++k) {
            EffectReport e = proportional_effect(fit, "D", k);
            if (e.kind != EffectKind::proportional) {
                bool binary_like = true;
                for (const auto& r : data.rows()) binary_like = binary_like && r.y == std::floor(r.y);
                if (binary_like) e.rare_event_note = rare_event_holds(data, spec.post_period);
            }
            effects.push_back(io::to_json(e));
        }
        results["effects"] = std::move(effects);
    }
    if (!fit.converged) {
        throw Error("estimation did not converge after " + std::to_string(fit.iterations) +
                    " iterations (max |score| " + std::to_string(fit.score_norm) + ")");
    }
    return results;
}

inline json run_effect(const RunConfig& c, json& echo) {
    echo = {{"beta", c.beta}, {"se", c.se}, {"kind", c.kind}};
    const EffectKind kind = c.kind == "proportional_odds" ? EffectKind::proportional_odds
                            : c.kind == "class_c_proportional_odds"
                                ? EffectKind::class_c_proportional_odds
                                : EffectKind::proportional;
    return io::to_json(make_effect(c.beta, c.se, kind));
}

inline json run_summarize(const RunConfig& c, json& echo) {
    echo = bindings_echo(c);
    const RcsDataset data = load(c);
    const int post = c.post_period >= 0 ? c.post_period : data.num_periods() - 1;
    json cells = json::array();
    for (const auto& cell : summarize_cells(data, post)) cells.push_back(io::to_json(cell));
    return {{"cells", std::move(cells)}, {"post_period", post}};
}

}  // namespace detail

/// Parses argv, runs one command and writes the report. Returns 0 on
/// success, 1 on data/runtime errors, 2 on usage errors.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    cfg.threads = detail::default_threads();
    std::string format = "text";

    CLI::App app{"Ratio-in-ratios and ratio-in-odds-ratios difference-in-differences", "ldvdd"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("--output,-o", cfg.output_path, "Write the report to this file");
    app.add_option("--config", "Flat key = value file mirroring the flags")->expected(1);

    auto add_bindings = [&](CLI::App* sub) {
        sub->add_option("--csv", cfg.input_path, "Input CSV (header row required)")->required();
        sub->add_option("--outcome", cfg.columns.outcome, "Outcome column")->capture_default_str();
        sub->add_option("--group", cfg.columns.group, "Group dummy column (0/1)")
            ->capture_default_str();
        sub->add_option("--period", cfg.columns.period, "Integer period column")
            ->capture_default_str();
        sub->add_option("--weights", cfg.columns.weight, "Sampling weight column");
        sub->add_option("--cluster", cfg.columns.cluster, "Cluster id column");
        sub->add_option("--covariates", cfg.columns.covariates, "Covariate columns")
            ->delimiter(',');
        sub->add_option("--post", cfg.post_period, "Treatment (post) period; default last");
        sub->add_option("--periods", cfg.num_periods, "Number of periods; default max(t)+1");
    };

    auto* sim = app.add_subcommand("simulate", "Monte Carlo |Bias|/SD/RMSE for one DGP");
    sim->add_option("--family", cfg.sim_family)
        ->check(CLI::IsMember({"positive", "count", "censored", "binary", "multinomial"}))
        ->capture_default_str();
    auto* opt_n = sim->add_option("--n", cfg.n, "Sample size")->check(CLI::PositiveNumber);
    sim->add_option("--reps", cfg.reps, "Repetitions")->check(CLI::PositiveNumber);
    sim->add_option("--seed", cfg.seed, "Base seed");
    auto* opt_bt = sim->add_option("--beta-qtau", cfg.beta_qtau, "Group-trend coefficient");
    auto* opt_bd = sim->add_option("--beta-d", cfg.beta_d, "Treatment coefficient");
    sim->add_option("--beta-q", cfg.beta_q, "Group coefficient");
    sim->add_option("--betas-t", cfg.betas_t, "Period intercepts")->delimiter(',');
    auto* opt_table = sim->add_flag("--table", cfg.table,
                                    "Run the (beta_qtau, beta_d) in {0,0.5}^2 grid");
    auto* opt_ns = sim->add_option("--ns", cfg.table_ns, "Sample sizes for --table")
                       ->delimiter(',');
    opt_table->excludes(opt_n)->excludes(opt_bt)->excludes(opt_bd);
    opt_ns->needs(opt_table);
    sim->add_flag("--count-first-intercept", cfg.count_first_intercept,
                  "Count rate uses the period-0 intercept throughout");
    sim->add_flag("--censored-from-zero", cfg.censored_from_zero,
                  "Censored compound sum has M+1 terms");
    sim->add_option("--ybar", cfg.ybar, "Lin-DD transform denominator")
        ->check(CLI::IsMember({"observed", "counterfactual"}));
    sim->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* est = app.add_subcommand("estimate", "Fit a DD model to CSV data");
    est->add_option("--family", cfg.family)
        ->check(CLI::IsMember({"ols", "poisson", "logit", "multinomial"}))
        ->capture_default_str();
    add_bindings(est);
    est->add_option("--hetero", cfg.heterogeneous, "Covariates interacted with D")
        ->delimiter(',');
    est->add_flag("--trend", cfg.trend, "Add the t*Q group-trend regressor");
    est->add_flag("--no-period-dummies", cfg.no_period_dummies,
                  "Single post indicator instead of period dummies");
    est->add_option("--base-period", cfg.base_period, "Omitted period dummy");
    est->add_flag("--cluster-correction", cfg.cluster_correction,
                  "Finite-sample factor on the cluster sandwich");
    est->add_option("--max-iter", cfg.max_iterations)->check(CLI::PositiveNumber);
    est->add_option("--tol", cfg.gradient_tolerance)->check(CLI::PositiveNumber);

    auto* eff = app.add_subcommand("effect", "exp(beta)-1 with delta-method SE");
    eff->add_option("--beta", cfg.beta)->required();
    eff->add_option("--se", cfg.se)->required()->check(CLI::NonNegativeNumber);
    eff->add_option("--kind", cfg.kind)
        ->check(CLI::IsMember({"proportional", "proportional_odds", "class_c_proportional_odds"}));

    auto* sum = app.add_subcommand("summarize", "Weighted cell means and SDs");
    add_bindings(sum);

    try {
        args = detail::merge_config(std::move(args));
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    }
    cfg.format = format == "json" ? OutputFormat::json : OutputFormat::text;
    cfg.command = app.get_subcommands().front()->get_name();

    json doc = {{"command", cfg.command}, {"config_echo", json::object()},
                {"results", nullptr}, {"errors", json::array()}};
    int code = 0;
    try {
        json echo;
        json results;
        if (cfg.command == "simulate") results = detail::run_simulate(cfg, echo);
        if (cfg.command == "estimate") results = detail::run_estimate(cfg, echo);
        if (cfg.command == "effect") results = detail::run_effect(cfg, echo);
        if (cfg.command == "summarize") results = detail::run_summarize(cfg, echo);
        doc["config_echo"] = std::move(echo);
        doc["results"] = std::move(results);
    } catch (const std::exception& e) {
        code = 1;
        std::string type = "error";
        if (dynamic_cast<const DataError*>(&e)) type = "data_error";
        if (dynamic_cast<const SingularDesignError*>(&e)) type = "singular_design";
        if (dynamic_cast<const OverflowGuardError*>(&e)) type = "overflow_guard";
        if (dynamic_cast<const SeparationError*>(&e)) type = "separation";
        doc["errors"].push_back({{"type", type}, {"message", e.what()}});
        if (cfg.format == OutputFormat::text) {
            err << "error: " << e.what() << "\n";
            return code;
        }
    }

    std::string report;
    if (cfg.format == OutputFormat::json) {
        report = io::dump_canonical(doc) + "\n";
    } else if (cfg.command == "simulate") {
        report = detail::render_simulate_text(doc["results"]);
    } else if (cfg.command == "estimate") {
        report = detail::render_estimate_text(doc["results"]);
    } else if (cfg.command == "effect") {
        report = detail::render_effect_text(doc["results"]);
    } else {
        report = detail::render_summarize_text(doc["results"]);
    }
    if (cfg.output_path.empty()) {
        out << report;
    } else {
        std::ofstream f(cfg.output_path);
        if (!f) {
            err << "error: cannot write '" << cfg.output_path << "'\n";
            return 1;
        }
        f << report;
    }
    return code;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(std::move(args), out, err);
}

}  // namespace ldvdd::cli
