#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "ldvdd/dataset.hpp"
#include "ldvdd/errors.hpp"
#include "ldvdd/estimators.hpp"

namespace ldvdd {

enum class EffectKind { proportional, proportional_odds, class_c_proportional_odds };

inline std::string_view to_string(EffectKind k) {
    switch (k) {
        case EffectKind::proportional: return "proportional";
        case EffectKind::proportional_odds: return "proportional_odds";
        case EffectKind::class_c_proportional_odds: return "class_c_proportional_odds";
    }
    return "unknown";
}

/// A coefficient on the log scale transformed to exp(beta) - 1 with a
/// delta-method standard error. t_value stays on the beta scale.
struct EffectReport {
    double beta = 0.0;
    double se_beta = 0.0;
    double effect = 0.0;
    double se_effect = 0.0;
    double t_value = 0.0;
    EffectKind kind = EffectKind::proportional;
    int class_c = 1;
    std::optional<bool> rare_event_note;
};

inline EffectReport make_effect(double beta, double se_beta, EffectKind kind, int class_c = 1) {
    EffectReport r;
    r.beta = beta;
    r.se_beta = se_beta;
    r.effect = std::exp(beta) - 1.0;
    r.se_effect = std::exp(beta) * se_beta;
    r.t_value = beta / se_beta;
    r.kind = kind;
    r.class_c = class_c;
    return r;
}

inline EffectKind effect_kind_for(const FitResult& fit) {
    switch (fit.family) {
        case EstimatorFamily::poisson_qmle: return EffectKind::proportional;
        case EstimatorFamily::logit_qmle: return EffectKind::proportional_odds;
        case EstimatorFamily::multinomial_logit:
            return fit.num_classes > 1 ? EffectKind::class_c_proportional_odds
                                       : EffectKind::proportional_odds;
        case EstimatorFamily::ols: break;
    }
    throw Error("OLS coefficients are not on a log scale; use lin_dd_proportional");
}

/// Effect of the linear combination c'beta over the flat coefficient vector,
/// with se = sqrt(c' V c).
inline EffectReport proportional_effect(const FitResult& fit, const Eigen::VectorXd& combination,
                                        int class_c = 1) {
    if (!fit.converged) throw Error("fit did not converge");
    if (combination.size() != fit.coefficients.size()) {
        throw Error("combination length does not match the coefficient vector");
    }
    const double beta = combination.dot(fit.coefficients);
    const double var = combination.dot(fit.vcov * combination);
    return make_effect(beta, std::sqrt(std::max(var, 0.0)), effect_kind_for(fit), class_c);
}

inline EffectReport proportional_effect(const FitResult& fit, const std::string& name = "D",
                                        int class_c = 1) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(fit.coefficients.size());
    c(fit.require_index(name, class_c)) = 1.0;
    return proportional_effect(fit, c, class_c);
}

/// Heterogeneous effect beta_d(w) = beta_D + sum_k beta_{D:k} w_k.
inline EffectReport proportional_effect_at(const FitResult& fit,
                                           const std::map<std::string, double>& w,
                                           int class_c = 1) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(fit.coefficients.size());
    c(fit.require_index("D", class_c)) = 1.0;
    for (const auto& [name, value] : w) c(fit.require_index("D:" + name, class_c)) = value;
    return proportional_effect(fit, c, class_c);
}

/// Which sample average normalizes the Lin-DD coefficient.
enum class YbarReference {
    observed,        ///< treated-group post-period cell average
    counterfactual,  ///< that average minus the DD coefficient
};

/// ln(beta_d / ybar + 1), the Lin-DD coefficient mapped to the log scale.
/// Throws RedrawRequired when the argument of the log is not positive.
inline double lin_dd_proportional(double beta_d, double ybar_11,
                                  YbarReference ref = YbarReference::observed) {
    const double base = ref == YbarReference::observed ? ybar_11 : ybar_11 - beta_d;
    if (!(base > 0)) throw DataError("Lin-DD transform needs a positive cell average");
    const double arg = beta_d / base + 1.0;
    if (!(arg > 0)) throw RedrawRequired("ln(beta_d/ybar + 1) undefined: argument <= 0");
    return std::log(arg);
}

/// Exact-match covariate cell; empty means the whole sample.
using CovariateCell = std::map<std::string, double>;

namespace detail {

template <class Fn>
void for_each_cell_row(const RcsDataset& data, int post_period,
                       const std::optional<CovariateCell>& cell, Fn&& fn) {
    std::vector<std::pair<std::size_t, double>> match;
    if (cell) {
        for (const auto& [name, value] : *cell) {
            auto idx = data.covariate_index(name);
            if (!idx) throw DataError("unknown covariate '" + name + "'");
            match.emplace_back(*idx, value);
        }
    }
    for (const auto& r : data.rows()) {
        if (r.t > post_period) continue;
        bool ok = true;
        for (const auto& [k, v] : match) ok = ok && r.w[k] == v;
        if (!ok) continue;
        fn(r, r.q * 2 + (r.t == post_period ? 1 : 0));
    }
}

/// (c11 / c10) / (c01 / c00) with cells indexed q*2 + post.
inline double double_ratio(const std::array<double, 4>& c) {
    return (c[3] / c[2]) / (c[1] / c[0]);
}

}  // namespace detail

/// Cell-mean ratio in ratios (ybar_11 / ybar_10) / (ybar_01 / ybar_00).
inline double nonparametric_rr(const RcsDataset& data, int post_period,
                               const std::optional<CovariateCell>& cell = std::nullopt) {
    std::array<double, 4> sw{}, swy{};
    detail::for_each_cell_row(data, post_period, cell, [&](const Record& r, int k) {
        sw[k] += r.weight;
        swy[k] += r.weight * r.y;
    });
    std::array<double, 4> mean{};
    for (int k = 0; k < 4; ++k) {
        if (sw[k] == 0) throw EmptyCellError("empty (group, period) cell");
        mean[k] = swy[k] / sw[k];
        if (!(mean[k] > 0)) throw EmptyCellError("zero cell mean in ratio in ratios");
    }
    return detail::double_ratio(mean);
}

/// Ratio in odds ratios for class c against class 0, using weighted cell
/// proportions. For a binary outcome class_c = 1 gives the usual ROR.
inline double nonparametric_ror(const RcsDataset& data, int post_period, int class_c = 1,
                                const std::optional<CovariateCell>& cell = std::nullopt) {
    std::array<double, 4> sw{}, s0{}, sc{};
    detail::for_each_cell_row(data, post_period, cell, [&](const Record& r, int k) {
        sw[k] += r.weight;
        if (r.y == 0.0) s0[k] += r.weight;
        if (r.y == static_cast<double>(class_c)) sc[k] += r.weight;
    });
    std::array<double, 4> odds{};
    for (int k = 0; k < 4; ++k) {
        if (sw[k] == 0) throw EmptyCellError("empty (group, period) cell");
        if (s0[k] == 0 || sc[k] == 0) {
            throw EmptyCellError("zero class proportion in ratio in odds ratios");
        }
        odds[k] = (sc[k] / sw[k]) / (s0[k] / sw[k]);
    }
    return detail::double_ratio(odds);
}

/// Whether every (group, pre/post) cell has a weighted share of y = 0 of at
/// least `threshold`, the regime where odds ratios read as relative risks.
inline bool rare_event_holds(const RcsDataset& data, int post_period, double threshold = 0.9) {
    std::array<double, 4> sw{}, s0{};
    detail::for_each_cell_row(data, post_period, std::nullopt, [&](const Record& r, int k) {
        sw[k] += r.weight;
        if (r.y == 0.0) s0[k] += r.weight;
    });
    for (int k = 0; k < 4; ++k) {
        if (sw[k] == 0 || s0[k] / sw[k] < threshold) return false;
    }
    return true;
}

}  // namespace ldvdd
