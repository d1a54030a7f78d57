#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "ldvdd/estimators.hpp"
#include "oracles.hpp"

using namespace ldvdd;

namespace {

struct Problem {
    Eigen::MatrixXd X;
    Eigen::VectorXd y, w;
};

Problem random_problem(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> z;
    std::poisson_distribution<int> pois(2.0);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    Problem p{Eigen::MatrixXd(n, 3), Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        p.X.row(i) << 1.0, z(rng), (i % 2);
        p.y(i) = pois(rng);
        p.w(i) = u(rng);
    }
    return p;
}

DesignMatrix as_design(const Eigen::MatrixXd& X) {
    DesignMatrix d;
    d.values = X;
    for (Eigen::Index k = 0; k < X.cols(); ++k) d.column_names.push_back("x" + std::to_string(k));
    return d;
}

}  // namespace

TEST(Vcov, ZeroResidualsGiveZeroMatrix) {
    std::mt19937_64 rng(1);
    auto p = random_problem(rng, 12);
    const Eigen::VectorXd beta(Eigen::Vector3d(0.3, -0.2, 0.1));
    const Eigen::VectorXd y = p.X * beta;
    const auto v = robust_vcov(EstimatorFamily::ols, p.X, y, p.w, beta);
    EXPECT_LE(v.cwiseAbs().maxCoeff(), 1e-24);
}

TEST(Vcov, SingletonClustersEqualUnclustered) {
    std::mt19937_64 rng(2);
    auto p = random_problem(rng, 40);
    std::vector<std::int64_t> ids(40);
    std::iota(ids.begin(), ids.end(), 100);
    const auto X = as_design(p.X);
    const auto a = fit_poisson_qmle(X, p.y, p.w);
    const auto b = fit_poisson_qmle(X, p.y, p.w, ids);
    EXPECT_EQ(b.vcov_kind, VcovKind::cluster_sandwich);
    EXPECT_LE((a.vcov - b.vcov).cwiseAbs().maxCoeff(), 1e-12 * a.vcov.cwiseAbs().maxCoeff());
}

TEST(Vcov, ClusterMeatMatchesBruteForce) {
    std::mt19937_64 rng(3);
    auto p = random_problem(rng, 10);
    const std::vector<std::int64_t> ids{4, 4, 7, 1, 7, 4, 1, 9, 9, 9};
    const Eigen::VectorXd beta(Eigen::Vector3d(0.5, 0.1, -0.3));
    PoissonQuasiLikelihood f(p.X, p.y, p.w);
    const Eigen::MatrixXd s = f.scores(beta);

    std::vector<Eigen::VectorXd> rows;
    for (Eigen::Index i = 0; i < 10; ++i) {
        Eigen::VectorXd r(3);
        const double eta = p.X.row(i).dot(beta);
        for (Eigen::Index k = 0; k < 3; ++k) r(k) = p.w(i) * (p.y(i) - std::exp(eta)) * p.X(i, k);
        rows.push_back(r);
    }
    const std::vector<long> lids(ids.begin(), ids.end());
    EXPECT_LE((score_meat(s, ids) - oracle::brute_force_meat(rows, lids)).cwiseAbs().maxCoeff(),
              1e-10);
    EXPECT_LE((score_meat(s) - oracle::brute_force_meat(rows)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Vcov, ClusterCorrectionFactor) {
    std::mt19937_64 rng(4);
    auto p = random_problem(rng, 30);
    std::vector<std::int64_t> ids(30);
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<std::int64_t>(i % 6);
    const auto X = as_design(p.X);
    FitOptions corrected;
    corrected.cluster_correction = true;
    const auto a = fit_poisson_qmle(X, p.y, p.w, ids);
    const auto b = fit_poisson_qmle(X, p.y, p.w, ids, corrected);
    const double factor = 6.0 / 5.0 * 29.0 / 27.0;
    EXPECT_LE((b.vcov - factor * a.vcov).cwiseAbs().maxCoeff(), 1e-12 * b.vcov.cwiseAbs().maxCoeff());
}

TEST(Vcov, SingularBreadThrows) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Ones(2, 2);
    EXPECT_THROW(inverse_bread(a), SingularHessianError);
}

TEST(Vcov, OlsRobustMatchesHc0Formula) {
    std::mt19937_64 rng(5);
    auto p = random_problem(rng, 25);
    const auto f = fit_ols(as_design(p.X), p.y, p.w);
    const Eigen::VectorXd e = p.y - p.X * f.coefficients;
    Eigen::MatrixXd bread = Eigen::MatrixXd::Zero(3, 3), meat = Eigen::MatrixXd::Zero(3, 3);
    for (Eigen::Index i = 0; i < 25; ++i) {
        const Eigen::VectorXd x = p.X.row(i).transpose();
        bread += p.w(i) * x * x.transpose();
        meat += p.w(i) * p.w(i) * e(i) * e(i) * x * x.transpose();
    }
    const Eigen::MatrixXd expected = bread.inverse() * meat * bread.inverse();
    EXPECT_LE((f.vcov - expected).cwiseAbs().maxCoeff(), 1e-10 * expected.cwiseAbs().maxCoeff());
}
