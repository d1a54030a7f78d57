#pragma once

#include <cmath>
#include <concepts>

#include <Eigen/Dense>

#include "ldvdd/errors.hpp"

namespace ldvdd {

struct FitOptions {
    /// Max-abs score tolerance; multiplied by (1 + total weight) by the
    /// family fitters.
    double gradient_tolerance = 1e-8;
    int max_iterations = 100;
    int step_halving_max = 30;
    /// Linear predictors are clamped to +-cap inside exp().
    double linear_predictor_cap = 30.0;
    /// Opt-in G/(G-1) * (n-1)/(n-k) factor on the cluster sandwich.
    bool cluster_correction = false;
    /// OLS only: report the classical homoskedastic covariance.
    bool classical_ols_vcov = false;

    void validate() const {
        if (!(gradient_tolerance > 0) || max_iterations <= 0 || step_halving_max <= 0 ||
            !(linear_predictor_cap > 0)) {
            throw Error("fit options must all be positive");
        }
    }
};

/// Value, gradient and Hessian of a maximand at one point. cap_active is set
/// by family objectives when a linear predictor was clamped.
struct Evaluation {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
    bool cap_active = false;
};

template <class F>
concept Maximand = requires(F f, const Eigen::VectorXd& b) {
    { f(b) } -> std::convertible_to<Evaluation>;
};

struct MaximizeResult {
    Eigen::VectorXd argmax;
    Evaluation at_optimum;
    int iterations = 0;
    bool converged = false;
    double score_norm = 0.0;
};

/// Newton-Raphson with step halving.
///
/// Stops when the max-abs gradient is within gradient_tolerance *
/// gradient_scale and the Newton step itself is negligible; that last step is
/// still applied (without counting as an iteration) so that differently
/// ordered but otherwise identical problems land on the same point. A failed
/// line search or a step below 1e-12 ends the loop early, in which case
/// convergence is decided by the gradient alone.
template <Maximand F>
MaximizeResult maximize(F&& objective, Eigen::VectorXd init, const FitOptions& options,
                        double gradient_scale = 1.0) {
    options.validate();
    const double tol = options.gradient_tolerance * gradient_scale;
    constexpr double step_tol = 1e-6;

    MaximizeResult out;
    Eigen::VectorXd beta = std::move(init);
    Evaluation ev = objective(beta);
    if (!std::isfinite(ev.value)) throw Error("objective is not finite at the initial point");

    auto newton_step = [](const Evaluation& e) -> Eigen::VectorXd {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(-e.hessian);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
            throw SingularHessianError("Hessian is not negative definite");
        }
        Eigen::VectorXd step = ldlt.solve(e.gradient);
        if (!step.allFinite()) throw SingularHessianError("Hessian solve failed");
        return step;
    };

    auto finish = [&](bool converged) {
        out.argmax = beta;
        out.score_norm = ev.gradient.size() ? ev.gradient.cwiseAbs().maxCoeff() : 0.0;
        out.converged = converged && out.score_norm <= tol;
        out.at_optimum = std::move(ev);
        return out;
    };

    for (;;) {
        const double gnorm = ev.gradient.size() ? ev.gradient.cwiseAbs().maxCoeff() : 0.0;
        if (gnorm == 0.0) return finish(true);
        Eigen::VectorXd step = newton_step(ev);
        const double smax = step.cwiseAbs().maxCoeff();
        const double bmax = beta.size() ? beta.cwiseAbs().maxCoeff() : 0.0;
        if (gnorm <= tol && smax <= step_tol * (1.0 + bmax)) {
            Evaluation polished = objective(beta + step);
            if (std::isfinite(polished.value) &&
                polished.gradient.cwiseAbs().maxCoeff() <= gnorm) {
                beta += step;
                ev = std::move(polished);
            }
            return finish(true);
        }
        if (out.iterations >= options.max_iterations) return finish(false);

        const double slack = 1e-12 * (1.0 + std::abs(ev.value));
        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h <= options.step_halving_max; ++h) {
            Eigen::VectorXd trial = beta + scale * step;
            Evaluation tev = objective(trial);
            if (std::isfinite(tev.value) && tev.value >= ev.value - slack) {
                beta = std::move(trial);
                ev = std::move(tev);
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        ++out.iterations;
        if (!accepted || scale * smax < 1e-12) return finish(gnorm <= tol);
    }
}

}  // namespace ldvdd
