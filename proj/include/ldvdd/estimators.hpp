#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldvdd/design.hpp"
#include "ldvdd/errors.hpp"
#include "ldvdd/families.hpp"
#include "ldvdd/optimize.hpp"
#include "ldvdd/vcov.hpp"

namespace ldvdd {

enum class VcovKind { sandwich, cluster_sandwich, classical_ols };

inline std::string_view to_string(VcovKind k) {
    switch (k) {
        case VcovKind::sandwich: return "sandwich";
        case VcovKind::cluster_sandwich: return "cluster_sandwich";
        case VcovKind::classical_ols: return "classical_ols";
    }
    return "unknown";
}

/// Estimates for one model family. Coefficients are stored flat; for the
/// multinomial family they are stacked by class (class 1 first), each block
/// following `column_names`.
struct FitResult {
    EstimatorFamily family = EstimatorFamily::ols;
    std::vector<std::string> column_names;
    int num_classes = 1;
    Eigen::VectorXd coefficients;
    Eigen::MatrixXd vcov;
    VcovKind vcov_kind = VcovKind::sandwich;
    double loglik = 0.0;
    int iterations = 0;
    bool converged = false;
    double score_norm = 0.0;
    std::size_t nobs = 0;
    double total_weight = 0.0;

    std::optional<Eigen::Index> index(const std::string& name, int class_c = 1) const {
        if (class_c < 1 || class_c > num_classes) return std::nullopt;
        for (std::size_t j = 0; j < column_names.size(); ++j) {
            if (column_names[j] == name) {
                return static_cast<Eigen::Index>((class_c - 1) * column_names.size() + j);
            }
        }
        return std::nullopt;
    }

    Eigen::Index require_index(const std::string& name, int class_c = 1) const {
        auto idx = index(name, class_c);
        if (!idx) {
            throw Error("unknown coefficient '" + name + "' (class " +
                        std::to_string(class_c) + ")");
        }
        return *idx;
    }

    double coefficient(const std::string& name, int class_c = 1) const {
        return coefficients(require_index(name, class_c));
    }

    double std_error(const std::string& name, int class_c = 1) const {
        const auto i = require_index(name, class_c);
        return std::sqrt(vcov(i, i));
    }

    /// "D" for single-index families, "D[c]" for multinomial with C >= 2.
    std::string flat_name(Eigen::Index flat) const {
        const auto p = static_cast<Eigen::Index>(column_names.size());
        const auto& base = column_names[static_cast<std::size_t>(flat % p)];
        if (num_classes == 1) return base;
        return base + "[" + std::to_string(flat / p + 1) + "]";
    }
};

/// Throws SingularDesignError naming the columns a pivoted QR of sqrt(w) X
/// cannot place in its leading full-rank block.
inline void check_full_rank(const DesignMatrix& X, const Eigen::VectorXd& w) {
    Eigen::MatrixXd scaled = X.values.array().colwise() * w.array().sqrt();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    if (rank == X.cols()) return;
    std::vector<std::string> bad;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index j = rank; j < X.cols(); ++j) {
        bad.push_back(X.column_names[static_cast<std::size_t>(perm(j))]);
    }
    throw SingularDesignError(std::move(bad));
}

namespace detail {

inline void check_inputs(const DesignMatrix& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                         std::span<const std::int64_t> clusters) {
    if (X.rows() == 0) throw DataError("no observations");
    if (y.size() != X.rows() || w.size() != X.rows()) {
        throw DataError("outcome/weight length does not match the design");
    }
    if (!clusters.empty() && static_cast<Eigen::Index>(clusters.size()) != X.rows()) {
        throw DataError("cluster id length does not match the design");
    }
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (!(w(i) > 0) || !std::isfinite(w(i))) throw DataError("weights must be positive");
        if (!std::isfinite(y(i))) throw DataError("non-finite outcome");
    }
}

inline FitResult start_result(EstimatorFamily family, const DesignMatrix& X,
                              const Eigen::VectorXd& w,
                              std::span<const std::int64_t> clusters) {
    FitResult r;
    r.family = family;
    r.column_names = X.column_names;
    r.nobs = static_cast<std::size_t>(X.rows());
    r.total_weight = w.sum();
    r.vcov_kind = clusters.empty() ? VcovKind::sandwich : VcovKind::cluster_sandwich;
    return r;
}

template <class Family>
FitResult fit_qmle(EstimatorFamily kind, const Family& f, const DesignMatrix& X,
                   const Eigen::VectorXd& w,
                   std::span<const std::int64_t> clusters, const FitOptions& options,
                   int num_classes) {
    FitResult r = start_result(kind, X, w, clusters);
    r.num_classes = num_classes;
    const Eigen::VectorXd init = Eigen::VectorXd::Zero(f.num_params());
    MaximizeResult m = maximize(f, init, options, 1.0 + r.total_weight);
    if (m.at_optimum.cap_active) {
        if (kind == EstimatorFamily::poisson_qmle) {
            throw OverflowGuardError(
                "linear predictor exceeds the exp() cap at the final iterate; "
                "estimate unreliable");
        }
        throw SeparationError(
            "coefficients diverge (linear predictor at the cap): perfect separation");
    }
    r.coefficients = m.argmax;
    r.loglik = m.at_optimum.value;
    r.iterations = m.iterations;
    r.converged = m.converged;
    r.score_norm = m.score_norm;
    try {
        r.vcov = sandwich(-m.at_optimum.hessian, f.scores(m.argmax), clusters,
                          options.cluster_correction);
    } catch (const SingularHessianError&) {
        if (r.converged) throw;
        r.vcov = Eigen::MatrixXd::Constant(f.num_params(), f.num_params(),
                                           std::numeric_limits<double>::quiet_NaN());
    }
    return r;
}

}  // namespace detail

/// Weighted least squares (the Lin-DD comparator). Robust sandwich covariance
/// by default, cluster-robust when ids are given.
inline FitResult fit_ols(const DesignMatrix& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                         std::span<const std::int64_t> clusters = {},
                         const FitOptions& options = {}) {
    detail::check_inputs(X, y, w, clusters);
    check_full_rank(X, w);
    FitResult r = detail::start_result(EstimatorFamily::ols, X, w, clusters);
    const Eigen::MatrixXd xtwx = detail::weighted_crossprod(X.values, w);
    const Eigen::VectorXd xtwy = X.values.transpose() * w.cwiseProduct(y);
    r.coefficients = xtwx.ldlt().solve(xtwy);
    const Eigen::VectorXd resid = y - X.values * r.coefficients;
    r.loglik = -0.5 * (w.array() * resid.array().square()).sum();
    r.score_norm = (X.values.transpose() * w.cwiseProduct(resid)).cwiseAbs().maxCoeff();
    r.converged = true;
    if (options.classical_ols_vcov) {
        const double dof = static_cast<double>(X.rows() - X.cols());
        const double sigma2 = dof > 0 ? -2.0 * r.loglik / dof : 0.0;
        r.vcov = sigma2 * inverse_bread(xtwx);
        r.vcov_kind = VcovKind::classical_ols;
    } else {
        r.vcov = robust_vcov(EstimatorFamily::ols, X.values, y, w, r.coefficients, clusters,
                             options);
    }
    return r;
}

inline FitResult fit_poisson_qmle(const DesignMatrix& X, const Eigen::VectorXd& y,
                                  const Eigen::VectorXd& w,
                                  std::span<const std::int64_t> clusters = {},
                                  const FitOptions& options = {}) {
    detail::check_inputs(X, y, w, clusters);
    if ((y.array() < 0).any()) throw DataError("Poisson QMLE requires y >= 0");
    check_full_rank(X, w);
    PoissonQuasiLikelihood f(X.values, y, w, options.linear_predictor_cap);
    return detail::fit_qmle(EstimatorFamily::poisson_qmle, f, X, w, clusters, options, 1);
}

/// Logistic QMLE for binary or fractional outcomes in [0,1].
inline FitResult fit_logit_qmle(const DesignMatrix& X, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& w,
                                std::span<const std::int64_t> clusters = {},
                                const FitOptions& options = {}) {
    detail::check_inputs(X, y, w, clusters);
    if ((y.array() < 0).any() || (y.array() > 1).any()) {
        throw DataError("logistic QMLE requires y in [0,1]");
    }
    check_full_rank(X, w);
    LogisticQuasiLikelihood f(X.values, y, w, options.linear_predictor_cap);
    return detail::fit_qmle(EstimatorFamily::logit_qmle, f, X, w, clusters, options, 1);
}

/// Multinomial logit with class 0 as the base; labels must be 0..C with every
/// class present. Coefficients are the class-c contrasts against class 0.
inline FitResult fit_multinomial_logit(const DesignMatrix& X, const Eigen::VectorXd& labels,
                                       const Eigen::VectorXd& w,
                                       std::span<const std::int64_t> clusters = {},
                                       const FitOptions& options = {}) {
    detail::check_inputs(X, labels, w, clusters);
    int max_label = 0;
    for (Eigen::Index i = 0; i < labels.size(); ++i) {
        const double v = labels(i);
        if (v < 0 || v != std::floor(v)) {
            throw DataError("row " + std::to_string(i + 1) + ": class labels must be 0..C");
        }
        max_label = std::max(max_label, static_cast<int>(v));
    }
    if (max_label < 1) throw DataError("multinomial logit needs at least two classes");
    std::vector<int> counts(static_cast<std::size_t>(max_label) + 1, 0);
    for (Eigen::Index i = 0; i < labels.size(); ++i) counts[static_cast<std::size_t>(labels(i))]++;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) throw DataError("class " + std::to_string(c) + " is never observed");
    }
    check_full_rank(X, w);
    MultinomialLikelihood f(X.values, labels, w, max_label, options.linear_predictor_cap);
    return detail::fit_qmle(EstimatorFamily::multinomial_logit, f, X, w, clusters,
                            options, max_label);
}

/// Builds the design from a dataset and dispatches to the family fitter.
inline FitResult fit_dataset(EstimatorFamily family, const RcsDataset& data,
                             const DesignSpec& spec, const FitOptions& options = {}) {
    const DesignMatrix X = build_design(data, spec);
    const Eigen::VectorXd y = outcome_vector(data);
    const Eigen::VectorXd w = weight_vector(data);
    const std::vector<std::int64_t> cl = cluster_ids(data);
    switch (family) {
        case EstimatorFamily::ols: return fit_ols(X, y, w, cl, options);
        case EstimatorFamily::poisson_qmle: return fit_poisson_qmle(X, y, w, cl, options);
        case EstimatorFamily::logit_qmle: return fit_logit_qmle(X, y, w, cl, options);
        case EstimatorFamily::multinomial_logit:
            return fit_multinomial_logit(X, y, w, cl, options);
    }
    throw Error("unknown family");
}

}  // namespace ldvdd
