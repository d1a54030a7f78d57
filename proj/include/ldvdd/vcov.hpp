#pragma once

#include <cstdint>
#include <map>
#include <span>

#include <Eigen/Dense>

#include "ldvdd/errors.hpp"
#include "ldvdd/families.hpp"
#include "ldvdd/optimize.hpp"

namespace ldvdd {

/// Inverse of a symmetric positive definite "bread" matrix. Throws
/// SingularHessianError when the smallest eigenvalue is numerically zero.
inline Eigen::MatrixXd inverse_bread(const Eigen::MatrixXd& bread) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bread);
    if (es.info() != Eigen::Success) throw SingularHessianError("eigendecomposition failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double largest = ev.cwiseAbs().maxCoeff();
    if (!(ev.minCoeff() > largest * 1e-13 * static_cast<double>(ev.size()))) {
        throw SingularHessianError("negative Hessian is singular or indefinite");
    }
    Eigen::MatrixXd inv = es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                          es.eigenvectors().transpose();
    return 0.5 * (inv + inv.transpose());
}

/// Outer product of scores, summed within clusters first when ids are given.
inline Eigen::MatrixXd score_meat(const Eigen::MatrixXd& scores,
                                  std::span<const std::int64_t> clusters = {}) {
    if (clusters.empty()) return scores.transpose() * scores;
    if (static_cast<Eigen::Index>(clusters.size()) != scores.rows()) {
        throw Error("cluster ids do not match the number of observations");
    }
    std::map<std::int64_t, Eigen::Index> slot;
    for (auto id : clusters) slot.emplace(id, 0);
    Eigen::Index g = 0;
    for (auto& [id, s] : slot) s = g++;
    Eigen::MatrixXd summed = Eigen::MatrixXd::Zero(g, scores.cols());
    for (Eigen::Index i = 0; i < scores.rows(); ++i) {
        summed.row(slot.at(clusters[static_cast<std::size_t>(i)])) += scores.row(i);
    }
    return summed.transpose() * summed;
}

inline std::size_t count_clusters(std::span<const std::int64_t> clusters) {
    std::map<std::int64_t, int> seen;
    for (auto id : clusters) seen.emplace(id, 0);
    return seen.size();
}

/// A^{-1} B A^{-1}; `bread` is the negative Hessian A.
inline Eigen::MatrixXd sandwich(const Eigen::MatrixXd& bread, const Eigen::MatrixXd& scores,
                                std::span<const std::int64_t> clusters = {},
                                bool cluster_correction = false) {
    const Eigen::MatrixXd a_inv = inverse_bread(bread);
    Eigen::MatrixXd v = a_inv * score_meat(scores, clusters) * a_inv;
    if (cluster_correction && !clusters.empty()) {
        const double g = static_cast<double>(count_clusters(clusters));
        const double n = static_cast<double>(scores.rows());
        const double k = static_cast<double>(scores.cols());
        if (g > 1 && n > k) v *= g / (g - 1.0) * (n - 1.0) / (n - k);
    }
    return 0.5 * (v + v.transpose());
}

/// Sandwich covariance for any family at a given estimate. For the
/// multinomial family `y` holds class labels and beta is stacked by class.
inline Eigen::MatrixXd robust_vcov(EstimatorFamily family, const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                   const Eigen::VectorXd& beta,
                                   std::span<const std::int64_t> clusters = {},
                                   const FitOptions& options = {}) {
    const double cap = options.linear_predictor_cap;
    switch (family) {
        case EstimatorFamily::ols: {
            const Eigen::VectorXd resid = w.cwiseProduct(y - X * beta);
            const Eigen::MatrixXd scores = X.array().colwise() * resid.array();
            return sandwich(detail::weighted_crossprod(X, w), scores, clusters,
                            options.cluster_correction);
        }
        case EstimatorFamily::poisson_qmle: {
            PoissonQuasiLikelihood f(X, y, w, cap);
            return sandwich(-f(beta).hessian, f.scores(beta), clusters,
                            options.cluster_correction);
        }
        case EstimatorFamily::logit_qmle: {
            LogisticQuasiLikelihood f(X, y, w, cap);
            return sandwich(-f(beta).hessian, f.scores(beta), clusters,
                            options.cluster_correction);
        }
        case EstimatorFamily::multinomial_logit: {
            const auto classes = static_cast<int>(beta.size() / X.cols());
            MultinomialLikelihood f(X, y, w, classes, cap);
            return sandwich(-f(beta).hessian, f.scores(beta), clusters,
                            options.cluster_correction);
        }
    }
    throw Error("unknown family");
}

}  // namespace ldvdd
