#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ldvdd/effects.hpp"
#include "ldvdd/estimators.hpp"
#include "oracles.hpp"

using namespace ldvdd;

namespace {

DesignMatrix make_design(Eigen::MatrixXd values, std::vector<std::string> names) {
    DesignMatrix d;
    d.values = std::move(values);
    d.column_names = std::move(names);
    d.treatment_column = d.column_names.size() - 1;
    return d;
}

DesignMatrix intercept_only(Eigen::Index n) {
    return make_design(Eigen::MatrixXd::Ones(n, 1), {"(Intercept)"});
}

// Eight observations, intercept plus one regressor.
DesignMatrix small_design() {
    Eigen::MatrixXd X(8, 2);
    X.col(0).setOnes();
    X.col(1) << -1.0, -0.5, 0.0, 0.3, 0.6, 1.0, 1.4, 2.0;
    return make_design(X, {"(Intercept)", "x"});
}

DesignSpec saturated_spec() {
    DesignSpec s;
    s.post_period = 1;
    return s;
}

struct RandomProblem {
    DesignMatrix X;
    Eigen::VectorXd y, labels, w;
};

RandomProblem random_problem(std::mt19937_64& rng, Eigen::Index n, int classes) {
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd X(n, 3);
    RandomProblem p;
    p.y.resize(n);
    p.labels.resize(n);
    p.w.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = z(rng);
        X(i, 2) = u(rng) < 0.5 ? 1.0 : 0.0;
        p.y(i) = u(rng);
        p.labels(i) = static_cast<double>(i % (classes + 1));
        p.w(i) = 0.5 + u(rng);
    }
    p.X = make_design(X, {"(Intercept)", "x", "D"});
    return p;
}

}  // namespace

TEST(Poisson, InterceptOnlyIsLogMean) {
    Eigen::VectorXd y(4);
    y << 1, 2, 3, 6;
    const auto f = fit_poisson_qmle(intercept_only(4), y, Eigen::VectorXd::Ones(4));
    EXPECT_TRUE(f.converged);
    EXPECT_NEAR(f.coefficients(0), std::log(3.0), 1e-10);
}

TEST(Logit, InterceptOnlyAtHalfIsZero) {
    Eigen::VectorXd y(4);
    y << 0, 1, 0, 1;
    const auto f = fit_logit_qmle(intercept_only(4), y, Eigen::VectorXd::Ones(4));
    EXPECT_TRUE(f.converged);
    EXPECT_NEAR(f.coefficients(0), 0.0, 1e-12);
}

TEST(Poisson, SaturatedTwoByTwo) {
    const auto data = oracle::two_by_two({{{1.0}, {2.0}, {3.0}, {12.0}}});
    const auto f = fit_dataset(EstimatorFamily::poisson_qmle, data, saturated_spec());
    EXPECT_NEAR(f.coefficient("D"), std::log(2.0), 1e-10);
}

TEST(Logit, SaturatedFractionalTwoByTwo) {
    const auto data = oracle::two_by_two({{{0.5}, {0.5}, {0.5}, {0.8}}});
    const auto f = fit_dataset(EstimatorFamily::logit_qmle, data, saturated_spec());
    EXPECT_NEAR(f.coefficient("D"), std::log(4.0), 1e-10);
}

TEST(Poisson, MatchesGridSearch) {
    const auto X = small_design();
    Eigen::VectorXd y(8), w(8);
    y << 0, 1, 1, 2, 1, 4, 3, 9;
    w << 1, 2, 1, 1, 0.5, 1, 2, 1;
    const auto f = fit_poisson_qmle(X, y, w);
    const auto g = oracle::grid_argmax([&](double a, double b) {
        return oracle::poisson_maximand(X.values, y, w, Eigen::Vector2d(a, b));
    });
    EXPECT_NEAR(f.coefficients(0), g[0], 1e-3);
    EXPECT_NEAR(f.coefficients(1), g[1], 1e-3);
}

TEST(Logit, MatchesGridSearch) {
    const auto X = small_design();
    Eigen::VectorXd y(8), w(8);
    y << 0, 0, 1, 0, 0.5, 1, 0, 1;
    w << 1, 2, 1, 1, 0.5, 1, 2, 1;
    const auto f = fit_logit_qmle(X, y, w);
    const auto g = oracle::grid_argmax([&](double a, double b) {
        return oracle::logit_maximand(X.values, y, w, Eigen::Vector2d(a, b));
    });
    EXPECT_NEAR(f.coefficients(0), g[0], 1e-3);
    EXPECT_NEAR(f.coefficients(1), g[1], 1e-3);
}

TEST(Multinomial, OneContrastEqualsBinaryLogit) {
    std::mt19937_64 rng(5);
    auto p = random_problem(rng, 60, 1);
    const auto m = fit_multinomial_logit(p.X, p.labels, p.w);
    const auto l = fit_logit_qmle(p.X, p.labels, p.w);
    ASSERT_EQ(m.coefficients.size(), l.coefficients.size());
    for (Eigen::Index k = 0; k < m.coefficients.size(); ++k) {
        EXPECT_NEAR(m.coefficients(k), l.coefficients(k), 1e-10);
        EXPECT_NEAR(m.vcov(k, k), l.vcov(k, k), 1e-10);
    }
}

TEST(Multinomial, InterceptOnlyIsLogShareRatio) {
    Eigen::VectorXd labels(10);
    labels << 0, 0, 0, 0, 1, 1, 1, 2, 2, 0;
    const auto f = fit_multinomial_logit(intercept_only(10), labels, Eigen::VectorXd::Ones(10));
    EXPECT_EQ(f.num_classes, 2);
    EXPECT_NEAR(f.coefficient("(Intercept)", 1), std::log(3.0 / 5.0), 1e-10);
    EXPECT_NEAR(f.coefficient("(Intercept)", 2), std::log(2.0 / 5.0), 1e-10);
    EXPECT_EQ(f.flat_name(1), "(Intercept)[2]");
}

TEST(Multinomial, SaturatedMatchesNonparametricRor) {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        const auto data = oracle::random_labels_2x2(rng, 2);
        const auto f = fit_dataset(EstimatorFamily::multinomial_logit, data, saturated_spec());
        for (int c = 1; c <= 2; ++c) {
            const auto s0 = oracle::cell_shares(data, 0);
            const auto sc = oracle::cell_shares(data, c);
            const double ror = (sc[3] / s0[3]) / (sc[2] / s0[2]) / ((sc[1] / s0[1]) / (sc[0] / s0[0]));
            EXPECT_NEAR(std::exp(f.coefficient("D", c)), ror, 1e-6 * ror);
        }
    }
}

TEST(Saturated, PoissonAndLogitMatchCellRatios) {
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 30; ++rep) {
        const auto data = oracle::random_positive_2x2(rng);
        const auto m = oracle::cell_means(data);
        const double rr = (m[3] / m[2]) / (m[1] / m[0]);
        const auto f = fit_dataset(EstimatorFamily::poisson_qmle, data, saturated_spec());
        EXPECT_NEAR(std::exp(f.coefficient("D")), rr, 1e-8 * rr);

        const auto labels = oracle::random_labels_2x2(rng, 1);
        const auto s = oracle::cell_shares(labels, 1);
        auto odds = [&](int k) { return s[k] / (1 - s[k]); };
        const double ror = (odds(3) / odds(2)) / (odds(1) / odds(0));
        const auto g = fit_dataset(EstimatorFamily::logit_qmle, labels, saturated_spec());
        EXPECT_NEAR(std::exp(g.coefficient("D")), ror, 1e-8 * ror);
    }
}

TEST(Numerics, GradientsMatchFiniteDifferences) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> z(0.0, 0.5);
    auto p = random_problem(rng, 40, 2);
    Eigen::VectorXd counts = (p.y * 5).array().floor();
    PoissonQuasiLikelihood pois(p.X.values, counts, p.w);
    LogisticQuasiLikelihood logit(p.X.values, p.y, p.w);
    MultinomialLikelihood mlogit(p.X.values, p.labels, p.w, 2);
    auto rel = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff());
    };
    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd b3(3), b6(6);
        for (auto& v : b3) v = z(rng);
        for (auto& v : b6) v = z(rng);
        const auto fp = [&](const Eigen::VectorXd& b) {
            return oracle::poisson_maximand(p.X.values, counts, p.w, b);
        };
        const auto fl = [&](const Eigen::VectorXd& b) {
            return oracle::logit_maximand(p.X.values, p.y, p.w, b);
        };
        const auto fm = [&](const Eigen::VectorXd& b) {
            return oracle::multinomial_maximand(p.X.values, p.labels, p.w, b, 2);
        };
        EXPECT_NEAR(pois(b3).value, fp(b3), 1e-9 * (1 + std::abs(fp(b3))));
        EXPECT_NEAR(logit(b3).value, fl(b3), 1e-9 * (1 + std::abs(fl(b3))));
        EXPECT_NEAR(mlogit(b6).value, fm(b6), 1e-9 * (1 + std::abs(fm(b6))));
        EXPECT_LE(rel(pois(b3).gradient, oracle::fd_gradient(fp, b3)), 1e-6);
        EXPECT_LE(rel(logit(b3).gradient, oracle::fd_gradient(fl, b3)), 1e-6);
        EXPECT_LE(rel(mlogit(b6).gradient, oracle::fd_gradient(fm, b6)), 1e-6);
    }
}

TEST(Numerics, OptimumIsAStrictMaximumWithSmallScore) {
    std::mt19937_64 rng(37);
    auto p = random_problem(rng, 80, 2);
    const FitOptions o;
    const double tol = o.gradient_tolerance * (1.0 + p.w.sum());
    const auto check = [&](const FitResult& f, const Evaluation& e) {
        EXPECT_TRUE(f.converged);
        EXPECT_LE(e.gradient.cwiseAbs().maxCoeff(), tol);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.hessian);
        EXPECT_LT(es.eigenvalues().maxCoeff(), 0.0);
    };
    const auto fp = fit_poisson_qmle(p.X, p.y, p.w);
    check(fp, PoissonQuasiLikelihood(p.X.values, p.y, p.w)(fp.coefficients));
    const auto fl = fit_logit_qmle(p.X, p.y, p.w);
    check(fl, LogisticQuasiLikelihood(p.X.values, p.y, p.w)(fl.coefficients));
    const auto fm = fit_multinomial_logit(p.X, p.labels, p.w);
    check(fm, MultinomialLikelihood(p.X.values, p.labels, p.w, 2)(fm.coefficients));
}

TEST(Numerics, IntegerWeightsEqualDuplicatedRows) {
    std::mt19937_64 rng(41);
    auto p = random_problem(rng, 30, 2);
    Eigen::VectorXd iw(30);
    std::vector<Eigen::Index> expand;
    for (Eigen::Index i = 0; i < 30; ++i) {
        iw(i) = 1 + i % 3;
        for (int k = 0; k < iw(i); ++k) expand.push_back(i);
    }
    const auto n2 = static_cast<Eigen::Index>(expand.size());
    Eigen::MatrixXd X2(n2, 3);
    Eigen::VectorXd y2(n2), l2(n2);
    for (Eigen::Index r = 0; r < n2; ++r) {
        X2.row(r) = p.X.values.row(expand[static_cast<std::size_t>(r)]);
        y2(r) = p.y(expand[static_cast<std::size_t>(r)]);
        l2(r) = p.labels(expand[static_cast<std::size_t>(r)]);
    }
    const auto D2 = make_design(X2, p.X.column_names);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n2);
    auto same = [](const FitResult& a, const FitResult& b) {
        EXPECT_LE((a.coefficients - b.coefficients).cwiseAbs().maxCoeff(), 1e-10);
    };
    same(fit_ols(p.X, p.y, iw), fit_ols(D2, y2, ones));
    same(fit_poisson_qmle(p.X, p.y, iw), fit_poisson_qmle(D2, y2, ones));
    same(fit_logit_qmle(p.X, p.y, iw), fit_logit_qmle(D2, y2, ones));
    same(fit_multinomial_logit(p.X, p.labels, iw), fit_multinomial_logit(D2, l2, ones));
}

TEST(Errors, PoissonAllZeroOutcomeHitsOverflowGuard) {
    EXPECT_THROW(fit_poisson_qmle(intercept_only(5), Eigen::VectorXd::Zero(5),
                                  Eigen::VectorXd::Ones(5)),
                 OverflowGuardError);
}

TEST(Errors, PerfectSeparation) {
    const auto X = small_design();
    Eigen::VectorXd y(8);
    y << 0, 0, 0, 1, 1, 1, 1, 1;
    EXPECT_THROW(fit_logit_qmle(X, y, Eigen::VectorXd::Ones(8)), SeparationError);
}

TEST(Errors, CollinearColumnsAreNamed) {
    Eigen::MatrixXd v(6, 3);
    v.col(0).setOnes();
    v.col(1) << 1, 2, 3, 4, 5, 6;
    v.col(2) = 2 * v.col(1);
    const auto X = make_design(v, {"(Intercept)", "a", "b"});
    Eigen::VectorXd y(6);
    y << 1, 2, 1, 3, 2, 4;
    try {
        fit_ols(X, y, Eigen::VectorXd::Ones(6));
        FAIL() << "expected SingularDesignError";
    } catch (const SingularDesignError& e) {
        ASSERT_EQ(e.columns().size(), 1u);
        EXPECT_TRUE(e.columns()[0] == "a" || e.columns()[0] == "b");
    }
}

TEST(Errors, OutcomeDomainChecks) {
    const auto X = small_design();
    Eigen::VectorXd y = Eigen::VectorXd::Constant(8, -1.0);
    EXPECT_THROW(fit_poisson_qmle(X, y, Eigen::VectorXd::Ones(8)), DataError);
    EXPECT_THROW(fit_logit_qmle(X, y, Eigen::VectorXd::Ones(8)), DataError);
    Eigen::VectorXd labels = Eigen::VectorXd::Zero(8);
    labels(0) = 2;
    EXPECT_THROW(fit_multinomial_logit(X, labels, Eigen::VectorXd::Ones(8)), DataError);
}

TEST(Ols, ZeroOutcomeGivesZeroEstimatesAndVariance) {
    const auto f = fit_ols(small_design(), Eigen::VectorXd::Zero(8), Eigen::VectorXd::Ones(8));
    EXPECT_EQ(f.coefficients.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(f.vcov.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Ols, SaturatedDdIsDifferenceOfDifferences) {
    const auto data = oracle::two_by_two({{{1.0, 3.0}, {2.0}, {3.0}, {12.0, 10.0}}});
    const auto f = fit_dataset(EstimatorFamily::ols, data, saturated_spec());
    EXPECT_NEAR(f.coefficient("D"), (11.0 - 3.0) - (2.0 - 2.0), 1e-12);
}

TEST(Ols, ClassicalVarianceOnRequest) {
    FitOptions o;
    o.classical_ols_vcov = true;
    Eigen::VectorXd y(8);
    y << 1, 0, 2, 1, 3, 2, 4, 3;
    const auto X = small_design();
    const auto f = fit_ols(X, y, Eigen::VectorXd::Ones(8), {}, o);
    EXPECT_EQ(f.vcov_kind, VcovKind::classical_ols);
    const Eigen::VectorXd e = y - X.values * f.coefficients;
    const Eigen::MatrixXd xtx_inv = (X.values.transpose() * X.values).inverse();
    const Eigen::MatrixXd expected = xtx_inv * e.squaredNorm() / 6.0;
    EXPECT_LE((f.vcov - expected).cwiseAbs().maxCoeff(), 1e-12);
}
