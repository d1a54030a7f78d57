#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "ldvdd/design.hpp"
#include "ldvdd/effects.hpp"
#include "ldvdd/estimators.hpp"
#include "ldvdd/simulate.hpp"

namespace ldvdd::io {

using json = nlohmann::json;

namespace detail {

inline void write_string(std::string& out, const std::string& s) {
    out += json(s).dump();
}

inline void write_canonical(std::string& out, const json& j, int indent, int depth) {
    const auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) { out += "{}"; return; }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                write_string(out, it.key());
                out += indent < 0 ? ":" : ": ";
                write_canonical(out, it.value(), indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) { out += "[]"; return; }
            out += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ',';
                newline(depth + 1);
                write_canonical(out, j[i], indent, depth + 1);
            }
            newline(depth);
            out += ']';
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) { out += "null"; return; }
            std::array<char, 40> buf{};
            std::snprintf(buf.data(), buf.size(), "%.17g", v);
            out += buf.data();
            return;
        }
        default:
            out += j.dump();
            return;
    }
}

}  // namespace detail

/// Canonical rendering: keys sorted, floats at 17 significant digits,
/// non-finite numbers as null. Parsing the output and rendering it again
/// yields the same bytes.
inline std::string dump_canonical(const json& j, int indent = 2) {
    std::string out;
    detail::write_canonical(out, j, indent, 0);
    return out;
}

inline json to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const FitResult& f) {
    json coefs = json::array();
    for (Eigen::Index i = 0; i < f.coefficients.size(); ++i) {
        const double est = f.coefficients(i);
        const double se = std::sqrt(f.vcov(i, i));
        const auto p = static_cast<Eigen::Index>(f.column_names.size());
        coefs.push_back({
            {"name", f.column_names[static_cast<std::size_t>(i % p)]},
            {"class", static_cast<int>(i / p) + 1},
            {"estimate", est},
            {"se", se},
            {"t", est / se},
        });
    }
    return {
        {"family", std::string(to_string(f.family))},
        {"coefficients", std::move(coefs)},
        {"num_classes", f.num_classes},
        {"vcov", to_json(f.vcov)},
        {"vcov_kind", std::string(to_string(f.vcov_kind))},
        {"loglik", f.loglik},
        {"iterations", f.iterations},
        {"converged", f.converged},
        {"score_norm", f.score_norm},
        {"nobs", f.nobs},
        {"total_weight", f.total_weight},
    };
}

inline json to_json(const EffectReport& e) {
    json j = {
        {"beta", e.beta},
        {"se_beta", e.se_beta},
        {"effect", e.effect},
        {"se_effect", e.se_effect},
        {"t_value", e.t_value},
        {"kind", std::string(to_string(e.kind))},
        {"class", e.class_c},
    };
    j["rare_event_note"] = e.rare_event_note ? json(*e.rare_event_note) : json(nullptr);
    return j;
}

inline json to_json(const CellSummary& c) {
    return {
        {"q", c.q},
        {"period", c.post ? "post" : "pre"},
        {"count", c.count},
        {"total_weight", c.total_weight},
        {"mean", c.mean ? json(*c.mean) : json(nullptr)},
        {"sd", c.sd ? json(*c.sd) : json(nullptr)},
    };
}

inline json to_json(const Scenario& s) {
    json j = {
        {"family", std::string(to_string(s.family))},
        {"betas_t", s.betas_t},
        {"beta_q", s.beta_q},
        {"beta_qtau", s.beta_qtau},
        {"beta_d", s.beta_d},
        {"n", s.n},
        {"repetitions", s.repetitions},
        {"seed", s.seed},
    };
    if (s.family == SimFamily::multinomial) {
        json classes = json::array();
        for (const auto& c : resolved_classes(s)) {
            classes.push_back({{"betas_t", c.betas_t},
                               {"beta_q", c.beta_q},
                               {"beta_qtau", c.beta_qtau},
                               {"beta_d", c.beta_d}});
        }
        j["classes"] = std::move(classes);
    }
    return j;
}

inline json to_json(const McSummary& m) {
    json rows = json::array();
    for (const auto& r : m.rows) {
        rows.push_back({
            {"estimator", r.estimator},
            {"parameter", r.parameter},
            {"class", r.class_c},
            {"truth", r.truth},
            {"mean", r.mean},
            {"abs_bias", r.abs_bias},
            {"sd", r.sd},
            {"rmse", r.rmse},
        });
    }
    return {
        {"scenario", to_json(m.scenario)},
        {"rows", std::move(rows)},
        {"redraw_count", m.redraw_count},
        {"failed_repetitions", m.failed_repetitions},
        {"effective_repetitions", m.effective_repetitions},
    };
}

}  // namespace ldvdd::io
