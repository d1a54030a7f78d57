#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ldvdd/errors.hpp"

namespace ldvdd {

/// Support restriction placed on the outcome.
enum class OutcomeKind { positive, count, censored, binary, fractional, multinomial };

inline std::string_view to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::positive: return "positive";
        case OutcomeKind::count: return "count";
        case OutcomeKind::censored: return "censored";
        case OutcomeKind::binary: return "binary";
        case OutcomeKind::fractional: return "fractional";
        case OutcomeKind::multinomial: return "multinomial";
    }
    return "unknown";
}

/// One subject of a repeated cross-section.
struct Record {
    double y = 0.0;
    int q = 0;
    int t = 0;
    std::vector<double> w;
    double weight = 1.0;
    std::optional<std::string> cluster;
};

/// Repeated cross-section: each subject is observed in exactly one period.
/// Periods are indexed 0..num_periods-1.
class RcsDataset {
public:
    RcsDataset() = default;

    RcsDataset(std::vector<Record> rows, int num_periods,
               std::vector<std::string> covariate_names = {})
        : rows_(std::move(rows)),
          covariate_names_(std::move(covariate_names)),
          num_periods_(num_periods) {
        validate_structure();
    }

    const std::vector<Record>& rows() const noexcept { return rows_; }
    const std::vector<std::string>& covariate_names() const noexcept {
        return covariate_names_;
    }
    int num_periods() const noexcept { return num_periods_; }
    std::size_t size() const noexcept { return rows_.size(); }
    bool has_clusters() const {
        return !rows_.empty() && rows_.front().cluster.has_value();
    }

    std::optional<std::size_t> covariate_index(std::string_view name) const {
        auto it = std::find(covariate_names_.begin(), covariate_names_.end(), name);
        if (it == covariate_names_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - covariate_names_.begin());
    }

    /// Checks the outcome support for the given kind. Throws DataError naming
    /// the first offending row (1-based).
    void validate_outcome(OutcomeKind kind) const {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const double y = rows_[i].y;
            bool ok = std::isfinite(y);
            switch (kind) {
                case OutcomeKind::positive:
                case OutcomeKind::count:
                case OutcomeKind::censored: ok = ok && y >= 0.0; break;
                case OutcomeKind::binary: ok = ok && (y == 0.0 || y == 1.0); break;
                case OutcomeKind::fractional: ok = ok && y >= 0.0 && y <= 1.0; break;
                case OutcomeKind::multinomial:
                    ok = ok && y >= 0.0 && y == std::floor(y);
                    break;
            }
            if (!ok) {
                throw DataError("row " + std::to_string(i + 1) + ": outcome " +
                                std::to_string(y) + " outside the support of the " +
                                std::string(to_string(kind)) + " family");
            }
        }
    }

    /// Largest class label (C) of a multinomial outcome.
    int max_class() const {
        double m = 0.0;
        for (const auto& r : rows_) m = std::max(m, r.y);
        return static_cast<int>(m);
    }

private:
    void validate_structure() const {
        if (rows_.empty()) throw DataError("dataset is empty");
        if (num_periods_ < 2) throw DataError("need at least two periods");
        const bool clustered = rows_.front().cluster.has_value();
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const auto& r = rows_[i];
            const std::string where = "row " + std::to_string(i + 1) + ": ";
            if (r.q != 0 && r.q != 1) throw DataError(where + "group must be 0 or 1");
            if (r.t < 0 || r.t >= num_periods_) {
                throw DataError(where + "period " + std::to_string(r.t) +
                                " outside 0.." + std::to_string(num_periods_ - 1));
            }
            if (!(r.weight > 0.0) || !std::isfinite(r.weight)) {
                throw DataError(where + "weight must be strictly positive");
            }
            if (r.w.size() != covariate_names_.size()) {
                throw DataError(where + "expected " +
                                std::to_string(covariate_names_.size()) + " covariates");
            }
            for (double v : r.w) {
                if (!std::isfinite(v)) throw DataError(where + "non-finite covariate");
            }
            if (r.cluster.has_value() != clustered) {
                throw DataError(where + "cluster id missing");
            }
        }
    }

    std::vector<Record> rows_;
    std::vector<std::string> covariate_names_;
    int num_periods_ = 0;
};

}  // namespace ldvdd
