#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>

#include <Eigen/Dense>

#include "ldvdd/errors.hpp"
#include "ldvdd/optimize.hpp"

namespace ldvdd {

enum class EstimatorFamily { ols, poisson_qmle, logit_qmle, multinomial_logit };

inline std::string_view to_string(EstimatorFamily f) {
    switch (f) {
        case EstimatorFamily::ols: return "ols";
        case EstimatorFamily::poisson_qmle: return "poisson_qmle";
        case EstimatorFamily::logit_qmle: return "logit_qmle";
        case EstimatorFamily::multinomial_logit: return "multinomial_logit";
    }
    return "unknown";
}

namespace detail {

/// X' diag(d) X
inline Eigen::MatrixXd weighted_crossprod(const Eigen::MatrixXd& X, const Eigen::VectorXd& d) {
    Eigen::MatrixXd scaled = X.array().colwise() * d.array();
    Eigen::MatrixXd out = X.transpose() * scaled;
    return 0.5 * (out + out.transpose());
}

inline double clamp_eta(double eta, double cap, bool& hit) {
    if (eta > cap) { hit = true; return cap; }
    if (eta < -cap) { hit = true; return -cap; }
    return eta;
}

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
    return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace detail

/// Poisson quasi-log-likelihood sum_i w_i {y_i x_i'b - exp(x_i'b)}, with
/// ln(y!) dropped.
class PoissonQuasiLikelihood {
public:
    PoissonQuasiLikelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& w, double cap = 30.0)
        : X_(X), y_(y), w_(w), cap_(cap) {}

    Eigen::Index num_params() const { return X_.cols(); }

    Evaluation operator()(const Eigen::VectorXd& beta) const {
        Evaluation ev;
        const Eigen::VectorXd eta = X_ * beta;
        Eigen::VectorXd mu(eta.size());
        double value = 0.0;
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            mu(i) = std::exp(detail::clamp_eta(eta(i), cap_, ev.cap_active));
            value += w_(i) * (y_(i) * eta(i) - mu(i));
        }
        ev.value = value;
        ev.gradient = X_.transpose() * (w_.array() * (y_ - mu).array()).matrix();
        ev.hessian = -detail::weighted_crossprod(X_, w_.cwiseProduct(mu));
        return ev;
    }

    /// Per-observation weighted scores, n x k.
    Eigen::MatrixXd scores(const Eigen::VectorXd& beta) const {
        const Eigen::VectorXd eta = X_ * beta;
        Eigen::VectorXd r(eta.size());
        bool hit = false;
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            r(i) = w_(i) * (y_(i) - std::exp(detail::clamp_eta(eta(i), cap_, hit)));
        }
        return X_.array().colwise() * r.array();
    }

private:
    const Eigen::MatrixXd& X_;
    const Eigen::VectorXd& y_;
    const Eigen::VectorXd& w_;
    double cap_;
};

/// Bernoulli quasi-log-likelihood for y in [0,1] with a logistic mean.
class LogisticQuasiLikelihood {
public:
    LogisticQuasiLikelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& w, double cap = 30.0)
        : X_(X), y_(y), w_(w), cap_(cap) {}

    Eigen::Index num_params() const { return X_.cols(); }

    Evaluation operator()(const Eigen::VectorXd& beta) const {
        Evaluation ev;
        const Eigen::VectorXd eta = X_ * beta;
        Eigen::VectorXd mu(eta.size()), v(eta.size());
        double value = 0.0;
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            const double e = detail::clamp_eta(eta(i), cap_, ev.cap_active);
            mu(i) = 1.0 / (1.0 + std::exp(-e));
            v(i) = w_(i) * mu(i) * (1.0 - mu(i));
            value += w_(i) * (y_(i) * e - detail::softplus(e));
        }
        ev.value = value;
        ev.gradient = X_.transpose() * (w_.array() * (y_ - mu).array()).matrix();
        ev.hessian = -detail::weighted_crossprod(X_, v);
        return ev;
    }

    Eigen::MatrixXd scores(const Eigen::VectorXd& beta) const {
        const Eigen::VectorXd eta = X_ * beta;
        Eigen::VectorXd r(eta.size());
        bool hit = false;
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            const double e = detail::clamp_eta(eta(i), cap_, hit);
            r(i) = w_(i) * (y_(i) - 1.0 / (1.0 + std::exp(-e)));
        }
        return X_.array().colwise() * r.array();
    }

private:
    const Eigen::MatrixXd& X_;
    const Eigen::VectorXd& y_;
    const Eigen::VectorXd& w_;
    double cap_;
};

/// Multinomial logit log-likelihood with class 0 as the base. Parameters are
/// stacked by class: [beta_1; beta_2; ...; beta_C], each of length p.
class MultinomialLikelihood {
public:
    MultinomialLikelihood(const Eigen::MatrixXd& X, const Eigen::VectorXd& labels,
                          const Eigen::VectorXd& w, int num_classes, double cap = 30.0)
        : X_(X), labels_(labels), w_(w), classes_(num_classes), cap_(cap) {}

    Eigen::Index num_params() const { return X_.cols() * classes_; }
    int num_classes() const { return classes_; }

    Evaluation operator()(const Eigen::VectorXd& beta) const {
        Evaluation ev;
        const Eigen::Index n = X_.rows(), p = X_.cols();
        Eigen::MatrixXd probs;
        Eigen::MatrixXd resid;
        ev.value = probabilities(beta, probs, resid, ev.cap_active);
        ev.gradient.resize(num_params());
        for (int c = 0; c < classes_; ++c) {
            ev.gradient.segment(c * p, p) = X_.transpose() * resid.col(c);
        }
        ev.hessian.resize(num_params(), num_params());
        for (int c = 0; c < classes_; ++c) {
            for (int d = c; d < classes_; ++d) {
                Eigen::VectorXd k(n);
                for (Eigen::Index i = 0; i < n; ++i) {
                    k(i) = w_(i) * probs(i, c) * ((c == d ? 1.0 : 0.0) - probs(i, d));
                }
                Eigen::MatrixXd block = -detail::weighted_crossprod(X_, k);
                ev.hessian.block(c * p, d * p, p, p) = block;
                if (d != c) ev.hessian.block(d * p, c * p, p, p) = block.transpose();
            }
        }
        return ev;
    }

    Eigen::MatrixXd scores(const Eigen::VectorXd& beta) const {
        const Eigen::Index n = X_.rows(), p = X_.cols();
        Eigen::MatrixXd probs, resid;
        bool hit = false;
        probabilities(beta, probs, resid, hit);
        Eigen::MatrixXd s(n, num_params());
        for (int c = 0; c < classes_; ++c) {
            s.middleCols(c * p, p) = X_.array().colwise() * resid.col(c).array();
        }
        return s;
    }

private:
    // Fills class probabilities (n x C, classes 1..C) and weighted residuals
    // w (1[y=c] - p_c); returns the log-likelihood.
    double probabilities(const Eigen::VectorXd& beta, Eigen::MatrixXd& probs,
                         Eigen::MatrixXd& resid, bool& hit) const {
        const Eigen::Index n = X_.rows(), p = X_.cols();
        Eigen::MatrixXd eta(n, classes_);
        for (int c = 0; c < classes_; ++c) eta.col(c) = X_ * beta.segment(c * p, p);
        probs.resize(n, classes_);
        resid.resize(n, classes_);
        double value = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double m = 0.0;
            for (int c = 0; c < classes_; ++c) {
                eta(i, c) = detail::clamp_eta(eta(i, c), cap_, hit);
                m = std::max(m, eta(i, c));
            }
            double denom = std::exp(-m);
            for (int c = 0; c < classes_; ++c) denom += std::exp(eta(i, c) - m);
            const double log_denom = m + std::log(denom);
            const int label = static_cast<int>(labels_(i));
            for (int c = 0; c < classes_; ++c) {
                probs(i, c) = std::exp(eta(i, c) - log_denom);
                resid(i, c) = w_(i) * ((label == c + 1 ? 1.0 : 0.0) - probs(i, c));
            }
            const double chosen = label == 0 ? 0.0 : eta(i, label - 1);
            value += w_(i) * (chosen - log_denom);
        }
        return value;
    }

    const Eigen::MatrixXd& X_;
    const Eigen::VectorXd& labels_;
    const Eigen::VectorXd& w_;
    int classes_;
    double cap_;
};

}  // namespace ldvdd
