#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldvdd/dataset.hpp"
#include "ldvdd/errors.hpp"

namespace ldvdd {

/// Declarative regressor set for a DD design.
struct DesignSpec {
    int post_period = 3;
    bool include_period_dummies = true;
    bool include_group_trend = false;
    std::vector<std::string> heterogeneous_covariates;
    int base_period = 0;
};

/// Numeric design. Column order is fixed:
///   (Intercept), S<t> for t != base, Q, tQ, D, covariates..., D:<w>...
/// When period dummies are disabled a single post indicator "S" replaces them.
struct DesignMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> column_names;
    std::size_t treatment_column = 0;
    std::optional<std::size_t> trend_column;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }

    std::optional<std::size_t> column_index(const std::string& name) const {
        for (std::size_t j = 0; j < column_names.size(); ++j) {
            if (column_names[j] == name) return j;
        }
        return std::nullopt;
    }
};

inline DesignMatrix build_design(const RcsDataset& data, const DesignSpec& spec) {
    const int periods = data.num_periods();
    if (spec.post_period < 0 || spec.post_period >= periods) {
        throw DataError("post period " + std::to_string(spec.post_period) +
                        " outside 0.." + std::to_string(periods - 1));
    }
    if (spec.include_period_dummies &&
        (spec.base_period < 0 || spec.base_period >= periods)) {
        throw DataError("base period " + std::to_string(spec.base_period) +
                        " outside 0.." + std::to_string(periods - 1));
    }
    std::vector<std::size_t> hetero;
    for (const auto& name : spec.heterogeneous_covariates) {
        auto idx = data.covariate_index(name);
        if (!idx) throw DataError("unknown covariate '" + name + "'");
        hetero.push_back(*idx);
    }

    DesignMatrix out;
    auto& names = out.column_names;
    names.emplace_back("(Intercept)");
    std::vector<int> dummy_periods;
    if (spec.include_period_dummies) {
        for (int t = 0; t < periods; ++t) {
            if (t == spec.base_period) continue;
            dummy_periods.push_back(t);
            names.push_back("S" + std::to_string(t));
        }
    } else {
        names.emplace_back("S");
    }
    names.emplace_back("Q");
    if (spec.include_group_trend) {
        out.trend_column = names.size();
        names.emplace_back("tQ");
    }
    out.treatment_column = names.size();
    names.emplace_back("D");
    for (const auto& w : data.covariate_names()) names.push_back(w);
    for (std::size_t k : hetero) names.push_back("D:" + data.covariate_names()[k]);

    const auto n = static_cast<Eigen::Index>(data.size());
    out.values.setZero(n, static_cast<Eigen::Index>(names.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const Record& r = data.rows()[static_cast<std::size_t>(i)];
        const double q = r.q;
        const double d = (r.t == spec.post_period) ? q : 0.0;
        Eigen::Index j = 0;
        out.values(i, j++) = 1.0;
        if (spec.include_period_dummies) {
            for (int t : dummy_periods) out.values(i, j++) = (r.t == t) ? 1.0 : 0.0;
        } else {
            out.values(i, j++) = (r.t == spec.post_period) ? 1.0 : 0.0;
        }
        out.values(i, j++) = q;
        if (spec.include_group_trend) out.values(i, j++) = static_cast<double>(r.t) * q;
        out.values(i, j++) = d;
        for (double w : r.w) out.values(i, j++) = w;
        for (std::size_t k : hetero) out.values(i, j++) = d * r.w[k];
    }
    return out;
}

inline Eigen::VectorXd outcome_vector(const RcsDataset& data) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) y(static_cast<Eigen::Index>(i)) = data.rows()[i].y;
    return y;
}

inline Eigen::VectorXd weight_vector(const RcsDataset& data) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        w(static_cast<Eigen::Index>(i)) = data.rows()[i].weight;
    }
    return w;
}

/// Dense integer cluster ids (first-seen order), or empty when the dataset
/// carries no cluster column.
inline std::vector<std::int64_t> cluster_ids(const RcsDataset& data) {
    std::vector<std::int64_t> ids;
    if (!data.has_clusters()) return ids;
    std::map<std::string, std::int64_t> lookup;
    ids.reserve(data.size());
    for (const auto& r : data.rows()) {
        auto [it, inserted] =
            lookup.emplace(*r.cluster, static_cast<std::int64_t>(lookup.size()));
        ids.push_back(it->second);
    }
    return ids;
}

/// Weighted outcome summary for one (group, pre/post) cell. Mean and SD are
/// empty when the cell has no rows. SD uses the weighted population form
/// sqrt(sum w (y - mean)^2 / sum w).
struct CellSummary {
    int q = 0;
    bool post = false;
    std::size_t count = 0;
    double total_weight = 0.0;
    std::optional<double> mean;
    std::optional<double> sd;
};

/// Four cells in the order (q=0,pre), (q=0,post), (q=1,pre), (q=1,post).
/// Pre pools every period before post_period; periods after it are ignored.
inline std::array<CellSummary, 4> summarize_cells(const RcsDataset& data, int post_period) {
    std::array<CellSummary, 4> cells;
    std::array<double, 4> sum_wy{};
    for (int k = 0; k < 4; ++k) {
        cells[k].q = k / 2;
        cells[k].post = (k % 2) == 1;
    }
    auto cell_of = [&](const Record& r) -> int {
        if (r.t > post_period) return -1;
        return r.q * 2 + (r.t == post_period ? 1 : 0);
    };
    for (const auto& r : data.rows()) {
        const int k = cell_of(r);
        if (k < 0) continue;
        cells[k].count += 1;
        cells[k].total_weight += r.weight;
        sum_wy[k] += r.weight * r.y;
    }
    std::array<double, 4> sum_sq{};
    for (int k = 0; k < 4; ++k) {
        if (cells[k].count > 0) cells[k].mean = sum_wy[k] / cells[k].total_weight;
    }
    for (const auto& r : data.rows()) {
        const int k = cell_of(r);
        if (k < 0) continue;
        const double dev = r.y - *cells[k].mean;
        sum_sq[k] += r.weight * dev * dev;
    }
    for (int k = 0; k < 4; ++k) {
        if (cells[k].count > 0) cells[k].sd = std::sqrt(sum_sq[k] / cells[k].total_weight);
    }
    return cells;
}

}  // namespace ldvdd
