#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "ldvdd/dataset.hpp"
#include "ldvdd/design.hpp"
#include "ldvdd/effects.hpp"
#include "ldvdd/errors.hpp"
#include "ldvdd/estimators.hpp"
#include "ldvdd/rng.hpp"

namespace ldvdd {

enum class SimFamily { positive, count, censored, binary, multinomial };

inline std::string_view to_string(SimFamily f) {
    switch (f) {
        case SimFamily::positive: return "positive";
        case SimFamily::count: return "count";
        case SimFamily::censored: return "censored";
        case SimFamily::binary: return "binary";
        case SimFamily::multinomial: return "multinomial";
    }
    return "unknown";
}

inline bool is_exponential(SimFamily f) {
    return f == SimFamily::positive || f == SimFamily::count || f == SimFamily::censored;
}

/// Utility parameters of one non-base alternative; the base class 0 is
/// normalized to zero.
struct ClassParams {
    std::vector<double> betas_t;
    double beta_q = 0.0;
    double beta_qtau = 0.0;
    double beta_d = 0.0;
};

/// A data-generating process and Monte Carlo budget. Periods are
/// 0..betas_t.size()-1 and treatment starts in the last one.
struct Scenario {
    SimFamily family = SimFamily::positive;
    std::vector<double> betas_t{-2.0, -2.0, -1.0, -1.0};
    double beta_q = 0.5;
    double beta_qtau = 0.0;
    double beta_d = 0.0;
    int n = 1000;
    int repetitions = 1000;
    std::uint64_t seed = 42;
    /// Classes 1..C for the multinomial family; defaults are filled in from
    /// beta_qtau and beta_d when empty.
    std::vector<ClassParams> multinomial_extras;

    /// Count rate uses the period-0 intercept in every period instead of beta_t.
    bool count_uses_first_intercept = false;
    /// Censored compound sum starts at j = 0 (M + 1 terms) instead of j = 1.
    bool censored_sum_from_zero = false;
    YbarReference ybar_reference = YbarReference::observed;

    /// Testing switches.
    bool suppress_noise = false;
    std::optional<int> forced_period;

    int num_periods() const { return static_cast<int>(betas_t.size()); }
    int post_period() const { return num_periods() - 1; }

    void validate() const {
        if (n <= 0) throw Error("scenario: n must be positive");
        if (repetitions <= 0) throw Error("scenario: repetitions must be positive");
        if (betas_t.size() < 2) throw Error("scenario: need at least two period intercepts");
        if (forced_period && (*forced_period < 0 || *forced_period >= num_periods())) {
            throw Error("scenario: forced period out of range");
        }
        for (const auto& c : multinomial_extras) {
            if (c.betas_t.size() != betas_t.size()) {
                throw Error("scenario: class intercepts must cover every period");
            }
        }
    }
};

inline std::vector<ClassParams> default_multinomial_classes(double beta_qtau, double beta_d) {
    return {
        ClassParams{{-1.0, -1.0, -0.5, -0.5}, 0.3, beta_qtau, beta_d},
        ClassParams{{-1.5, -1.2, -1.0, -0.8}, -0.2, beta_qtau, beta_d},
    };
}

inline std::vector<ClassParams> resolved_classes(const Scenario& s) {
    if (!s.multinomial_extras.empty()) return s.multinomial_extras;
    auto classes = default_multinomial_classes(s.beta_qtau, s.beta_d);
    for (auto& c : classes) c.betas_t.resize(s.betas_t.size(), c.betas_t.back());
    return classes;
}

/// Latent panel: Y(i, t) for every period plus the group dummy.
struct Panel {
    std::vector<int> q;
    Eigen::MatrixXd y;
};

namespace detail {

inline double latent_index(const Scenario& s, int q, int t) {
    const int d = (q == 1 && t == s.post_period()) ? 1 : 0;
    return s.betas_t[static_cast<std::size_t>(t)] + s.beta_q * q + s.beta_qtau * t * q +
           s.beta_d * d;
}

inline double class_index(const ClassParams& c, int q, int t, int post) {
    const int d = (q == 1 && t == post) ? 1 : 0;
    return c.betas_t[static_cast<std::size_t>(t)] + c.beta_q * q + c.beta_qtau * t * q +
           c.beta_d * d;
}

}  // namespace detail

/// Draws the latent panel from the scenario's DGP using `eng`.
inline Panel draw_panel(const Scenario& s, Engine& eng) {
    const int T = s.num_periods();
    Panel p;
    p.q.resize(static_cast<std::size_t>(s.n));
    p.y.resize(s.n, T);
    std::bernoulli_distribution coin(0.5);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::poisson_distribution<int> days(1.0);
    const auto classes = s.family == SimFamily::multinomial ? resolved_classes(s)
                                                            : std::vector<ClassParams>{};
    auto open_unit = [&] {
        double u;
        do { u = unif(eng); } while (u <= 0.0);
        return u;
    };
    for (int i = 0; i < s.n; ++i) {
        const int q = coin(eng) ? 1 : 0;
        p.q[static_cast<std::size_t>(i)] = q;
        const int m = s.family == SimFamily::censored ? days(eng) : 0;
        for (int t = 0; t < T; ++t) {
            const double idx = detail::latent_index(s, q, t);
            double y = 0.0;
            switch (s.family) {
                case SimFamily::positive:
                    y = std::exp(idx + (s.suppress_noise ? 0.0 : normal(eng)));
                    break;
                case SimFamily::count: {
                    const double rate_idx =
                        s.count_uses_first_intercept ? idx - s.betas_t[static_cast<std::size_t>(t)] + s.betas_t[0]
                                                     : idx;
                    std::poisson_distribution<int> pois(std::exp(rate_idx));
                    y = pois(eng);
                    break;
                }
                case SimFamily::censored: {
                    const int terms = s.censored_sum_from_zero ? m + 1 : m;
                    for (int j = 0; j < terms; ++j) {
                        y += std::exp(idx + (s.suppress_noise ? 0.0 : normal(eng)));
                    }
                    break;
                }
                case SimFamily::binary: {
                    const double u = open_unit();
                    const double logistic = s.suppress_noise ? 0.0 : std::log(u / (1.0 - u));
                    y = (idx + logistic > 0.0) ? 1.0 : 0.0;
                    break;
                }
                case SimFamily::multinomial: {
                    auto gumbel = [&] {
                        return s.suppress_noise ? 0.0 : -std::log(-std::log(open_unit()));
                    };
                    double best = gumbel();
                    int choice = 0;
                    for (std::size_t c = 0; c < classes.size(); ++c) {
                        const double u = detail::class_index(classes[c], q, t, s.post_period()) + gumbel();
                        if (u > best) {
                            best = u;
                            choice = static_cast<int>(c) + 1;
                        }
                    }
                    y = choice;
                    break;
                }
            }
            if (!std::isfinite(y)) throw Error("non-finite draw; scenario parameters overflow");
            p.y(i, t) = y;
        }
    }
    return p;
}

/// Samples each subject in exactly one period (uniform over periods) and
/// keeps the panel outcome of that period.
inline RcsDataset sample_rcs(const Panel& panel, const Scenario& s, Engine& eng) {
    std::uniform_int_distribution<int> period(0, s.num_periods() - 1);
    std::vector<Record> rows;
    rows.reserve(panel.q.size());
    for (std::size_t i = 0; i < panel.q.size(); ++i) {
        const int t = s.forced_period ? *s.forced_period : period(eng);
        Record r;
        r.q = panel.q[i];
        r.t = t;
        r.y = panel.y(static_cast<Eigen::Index>(i), t);
        rows.push_back(std::move(r));
    }
    return RcsDataset(std::move(rows), s.num_periods());
}

/// Panel for one replication, deterministic in (seed, replication_index).
inline Panel dgp_draw(const Scenario& s, std::uint64_t replication_index) {
    s.validate();
    Engine eng = make_stream(s.seed, replication_index);
    return draw_panel(s, eng);
}

inline RcsDataset panel_to_rcs(const Panel& panel, const Scenario& s,
                               std::uint64_t replication_index) {
    s.validate();
    Engine eng = make_stream(s.seed, replication_index, 1);
    return sample_rcs(panel, s, eng);
}

/// One summary row: an estimator's |Bias|, SD and RMSE for one parameter.
struct McRow {
    std::string estimator;  ///< "qmle", "logit", "mlogit", "lin_dd", "lin_dd_transform"
    std::string parameter;  ///< "beta_qtau" or "beta_d"
    int class_c = 0;        ///< multinomial class, 0 otherwise
    double truth = 0.0;
    double mean = 0.0;
    double abs_bias = 0.0;
    double sd = 0.0;
    double rmse = 0.0;
};

struct McSummary {
    Scenario scenario;
    std::vector<McRow> rows;
    int redraw_count = 0;
    int failed_repetitions = 0;
    int effective_repetitions = 0;

    const McRow& row(std::string_view estimator, std::string_view parameter,
                     int class_c = 0) const {
        for (const auto& r : rows) {
            if (r.estimator == estimator && r.parameter == parameter && r.class_c == class_c) {
                return r;
            }
        }
        throw Error("no summary row " + std::string(estimator) + "/" + std::string(parameter));
    }
};

namespace detail {

struct RowSpec {
    std::string estimator;
    std::string parameter;
    int class_c;
    double truth;
};

inline std::vector<RowSpec> row_layout(const Scenario& s) {
    std::vector<RowSpec> rows;
    if (s.family == SimFamily::multinomial) {
        const auto classes = resolved_classes(s);
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const int cc = static_cast<int>(c) + 1;
            rows.push_back({"mlogit", "beta_qtau", cc, classes[c].beta_qtau});
            rows.push_back({"mlogit", "beta_d", cc, classes[c].beta_d});
        }
        return rows;
    }
    const std::string main = is_exponential(s.family) ? "qmle" : "logit";
    rows.push_back({main, "beta_qtau", 0, s.beta_qtau});
    rows.push_back({main, "beta_d", 0, s.beta_d});
    rows.push_back({"lin_dd", "beta_qtau", 0, s.beta_qtau});
    rows.push_back({"lin_dd", "beta_d", 0, s.beta_d});
    if (is_exponential(s.family)) rows.push_back({"lin_dd_transform", "beta_d", 0, s.beta_d});
    return rows;
}

struct ReplicationOutcome {
    std::vector<double> values;
    int redraws = 0;
    bool failed = false;
};

inline constexpr int kMaxRedraws = 1000;

inline ReplicationOutcome run_replication(const Scenario& s, std::uint64_t index,
                                          const FitOptions& options) {
    ReplicationOutcome out;
    Engine eng = make_stream(s.seed, index);
    DesignSpec spec;
    spec.post_period = s.post_period();
    spec.include_group_trend = true;
    for (;;) {
        const Panel panel = draw_panel(s, eng);
        const RcsDataset data = sample_rcs(panel, s, eng);
        const DesignMatrix X = build_design(data, spec);
        const Eigen::VectorXd y = outcome_vector(data);
        const Eigen::VectorXd w = weight_vector(data);
        const auto d = static_cast<Eigen::Index>(X.treatment_column);
        const auto tq = static_cast<Eigen::Index>(*X.trend_column);
        try {
            if (s.family == SimFamily::multinomial) {
                const FitResult fit = fit_multinomial_logit(X, y, w, {}, options);
                if (!fit.converged) { out.failed = true; return out; }
                for (int c = 1; c <= fit.num_classes; ++c) {
                    out.values.push_back(fit.coefficient("tQ", c));
                    out.values.push_back(fit.coefficient("D", c));
                }
                return out;
            }
            const FitResult ols = fit_ols(X, y, w, {}, options);
            double transformed = 0.0;
            if (is_exponential(s.family)) {
                const auto cells = summarize_cells(data, s.post_period());
                const auto& treated_post = cells[3];
                if (!treated_post.mean || !(*treated_post.mean > 0)) {
                    if (++out.redraws > kMaxRedraws) { out.failed = true; return out; }
                    continue;
                }
                try {
                    transformed = lin_dd_proportional(ols.coefficients(d), *treated_post.mean,
                                                      s.ybar_reference);
                } catch (const RedrawRequired&) {
                    if (++out.redraws > kMaxRedraws) { out.failed = true; return out; }
                    continue;
                } catch (const DataError&) {
                    if (++out.redraws > kMaxRedraws) { out.failed = true; return out; }
                    continue;
                }
            }
            const FitResult fit = is_exponential(s.family)
                                      ? fit_poisson_qmle(X, y, w, {}, options)
                                      : fit_logit_qmle(X, y, w, {}, options);
            if (!fit.converged) { out.failed = true; return out; }
            out.values = {fit.coefficients(tq), fit.coefficients(d), ols.coefficients(tq),
                          ols.coefficients(d)};
            if (is_exponential(s.family)) out.values.push_back(transformed);
            return out;
        } catch (const Error&) {
            out.failed = true;
            out.values.clear();
            return out;
        }
    }
}

}  // namespace detail

/// Runs the scenario's replications on `threads` workers. Results depend only
/// on the scenario (seed included), never on the thread count.
inline McSummary run_monte_carlo(const Scenario& s, int threads = 1,
                                 const FitOptions& options = {}) {
    s.validate();
    const auto layout = detail::row_layout(s);
    const auto R = static_cast<std::size_t>(s.repetitions);
    std::vector<detail::ReplicationOutcome> outcomes(R);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> stop{false};
    auto worker = [&] {
        try {
            for (;;) {
                if (stop.load()) return;
                const std::size_t i = next.fetch_add(1);
                if (i >= R) return;
                outcomes[i] = detail::run_replication(s, i, options);
            }
        } catch (...) {
            stop = true;
            error = std::current_exception();
        }
    };
    const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(R)));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(nthreads));
        for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    McSummary summary;
    summary.scenario = s;
    const std::size_t k = layout.size();
    std::vector<double> sum(k, 0.0);
    for (const auto& o : outcomes) {
        summary.redraw_count += o.redraws;
        if (o.failed) {
            summary.failed_repetitions += 1;
            continue;
        }
        summary.effective_repetitions += 1;
        for (std::size_t j = 0; j < k; ++j) sum[j] += o.values[j];
    }
    if (summary.failed_repetitions * 20 > s.repetitions) {
        throw Error("Monte Carlo aborted: " + std::to_string(summary.failed_repetitions) +
                    " of " + std::to_string(s.repetitions) + " replications failed (>5%)");
    }
    const double reps = summary.effective_repetitions;
    for (std::size_t j = 0; j < k; ++j) {
        McRow row;
        row.estimator = layout[j].estimator;
        row.parameter = layout[j].parameter;
        row.class_c = layout[j].class_c;
        row.truth = layout[j].truth;
        row.mean = sum[j] / reps;
        double dev2 = 0.0, err2 = 0.0;
        for (const auto& o : outcomes) {
            if (o.failed) continue;
            const double v = o.values[j];
            dev2 += (v - row.mean) * (v - row.mean);
            err2 += (v - row.truth) * (v - row.truth);
        }
        row.abs_bias = std::abs(row.mean - row.truth);
        row.sd = std::sqrt(dev2 / reps);
        row.rmse = std::sqrt(err2 / reps);
        summary.rows.push_back(std::move(row));
    }
    return summary;
}

enum class TrendModel { exponential, logit, multinomial };

/// Parameters of the untreated process for the population trend check.
/// For the multinomial model `classes` holds all alternatives 0..C, base
/// included, each with its own parameters.
struct TrendCheckParams {
    std::vector<double> betas_t{-2.0, -2.0, -1.0, -1.0};
    double beta_q = 0.5;
    double beta_qtau = 0.0;
    std::vector<ClassParams> classes;
    int class_c = 1;
    int pre_period = 2;
    int post_period = 3;
};

/// Population RR (exponential), ROR (logit) or class-c ROR (multinomial) of
/// the untreated process between pre_period and post_period, evaluated from
/// the model's means and probabilities. Equals exp(beta_qtau * (post - pre)).
inline double analytic_trend_check(TrendModel model, const TrendCheckParams& p) {
    auto cell_ratio = [&](auto&& measure) {
        return (measure(1, p.post_period) / measure(1, p.pre_period)) /
               (measure(0, p.post_period) / measure(0, p.pre_period));
    };
    switch (model) {
        case TrendModel::exponential:
            return cell_ratio([&](int q, int t) {
                return std::exp(p.betas_t[static_cast<std::size_t>(t)] + p.beta_q * q +
                                p.beta_qtau * t * q + 0.5);
            });
        case TrendModel::logit:
            return cell_ratio([&](int q, int t) {
                const double eta =
                    p.betas_t[static_cast<std::size_t>(t)] + p.beta_q * q + p.beta_qtau * t * q;
                const double p1 = 1.0 / (1.0 + std::exp(-eta));
                const double p0 = 1.0 / (1.0 + std::exp(eta));
                return p1 / p0;
            });
        case TrendModel::multinomial: {
            if (p.class_c < 1 || p.class_c >= static_cast<int>(p.classes.size())) {
                throw Error("class index out of range");
            }
            return cell_ratio([&](int q, int t) {
                std::vector<double> u(p.classes.size());
                double m = -INFINITY;
                for (std::size_t c = 0; c < u.size(); ++c) {
                    const auto& k = p.classes[c];
                    u[c] = k.betas_t[static_cast<std::size_t>(t)] + k.beta_q * q +
                           k.beta_qtau * t * q;
                    m = std::max(m, u[c]);
                }
                double denom = 0.0;
                for (double v : u) denom += std::exp(v - m);
                const double pc = std::exp(u[static_cast<std::size_t>(p.class_c)] - m) / denom;
                const double p0 = std::exp(u[0] - m) / denom;
                return pc / p0;
            });
        }
    }
    throw Error("unknown model");
}

}  // namespace ldvdd
