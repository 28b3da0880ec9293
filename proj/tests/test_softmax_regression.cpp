#include <doctest.h>

#include <cmath>
#include <random>

#include "moe/errors.hpp"
#include "moe/softmax_regression.hpp"
#include "support.hpp"

using namespace moe;

namespace {

struct Problem {
    Eigen::MatrixXd design;
    Eigen::MatrixXd targets;
};

/// Noisy multinomial data with fractional weights; the weighted MLE is finite.
Problem random_problem(std::mt19937_64& rng, int n, int p, int C)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Problem pr{Eigen::MatrixXd(n, p), Eigen::MatrixXd::Zero(n, C)};
    for (int t = 0; t < n; ++t) {
        pr.design(t, 0) = 1.0;
        for (int j = 1; j < p; ++j) pr.design(t, j) = 2.0 * u(rng) - 1.0;
        const double w = 0.2 + u(rng);
        pr.targets(t, static_cast<int>(u(rng) * C) % C) = w;
    }
    return pr;
}

Eigen::VectorXd flatten(const Eigen::MatrixXd& coef, int rows)
{
    Eigen::VectorXd v(rows * coef.cols());
    for (int c = 0; c < rows; ++c)
        for (Eigen::Index j = 0; j < coef.cols(); ++j) v(c * coef.cols() + j) = coef(c, j);
    return v;
}

Eigen::MatrixXd unflatten(const Eigen::VectorXd& v, Eigen::MatrixXd coef, int rows)
{
    for (int c = 0; c < rows; ++c)
        for (Eigen::Index j = 0; j < coef.cols(); ++j) coef(c, j) = v(c * coef.cols() + j);
    return coef;
}

/// Plain objective written from the formula.
double objective_naive(const Problem& pr, const Eigen::MatrixXd& coef)
{
    double total = 0.0;
    for (Eigen::Index t = 0; t < pr.design.rows(); ++t) {
        double norm = 0.0;
        std::vector<double> eta(static_cast<std::size_t>(pr.targets.cols()));
        for (Eigen::Index c = 0; c < pr.targets.cols(); ++c) {
            eta[static_cast<std::size_t>(c)] = coef.row(c).dot(pr.design.row(t));
            norm += std::exp(eta[static_cast<std::size_t>(c)]);
        }
        for (Eigen::Index c = 0; c < pr.targets.cols(); ++c)
            total += pr.targets(t, c) * (eta[static_cast<std::size_t>(c)] - std::log(norm));
    }
    return total;
}

/// Fixed-step gradient ascent using finite-difference gradients only.
Eigen::MatrixXd ascent_oracle(const Problem& pr, Eigen::MatrixXd coef, int rows)
{
    auto f = [&](const Eigen::VectorXd& v) { return objective_naive(pr, unflatten(v, coef, rows)); };
    Eigen::VectorXd v = flatten(coef, rows);
    const double scale = 1.0 / pr.targets.sum();
    for (int it = 0; it < 20000; ++it) {
        const Eigen::VectorXd g = moe::testing::central_gradient(f, v, 1e-6);
        v += 2.0 * scale * g;
        if (g.norm() * scale < 1e-11) break;
    }
    return unflatten(v, coef, rows);
}

} // namespace

TEST_CASE("objective and derivatives agree with naive evaluation and finite differences")
{
    std::mt19937_64 rng(31);
    const Problem pr = random_problem(rng, 80, 3, 4);
    const WeightedSoftmaxRegression reg(pr.design, pr.targets, 3);
    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(4, 3);
    std::normal_distribution<double> n01;
    for (int c = 0; c < 3; ++c)
        for (int j = 0; j < 3; ++j) coef(c, j) = n01(rng);

    CHECK(reg.objective(coef) == doctest::Approx(objective_naive(pr, coef)).epsilon(1e-12));

    Eigen::VectorXd g;
    Eigen::MatrixXd H;
    reg.derivatives(coef, g, H);
    auto f = [&](const Eigen::VectorXd& v) { return reg.objective(unflatten(v, coef, 3)); };
    const Eigen::VectorXd fd = moe::testing::central_gradient(f, flatten(coef, 3), 1e-6);
    CHECK((g - fd).norm() <= 1e-6 * (1.0 + g.norm()));

    // Hessian column i by differencing the analytic gradient.
    for (int i = 0; i < g.size(); ++i) {
        Eigen::VectorXd up = flatten(coef, 3), dn = up;
        up(i) += 1e-6;
        dn(i) -= 1e-6;
        Eigen::VectorXd gu, gd;
        reg.gradient(unflatten(up, coef, 3), gu);
        reg.gradient(unflatten(dn, coef, 3), gd);
        const Eigen::VectorXd col = -(gu - gd) / 2e-6;
        CHECK((H.col(i) - col).norm() <= 1e-5 * (1.0 + H.col(i).norm()));
    }
    CHECK((H - H.transpose()).norm() <= 1e-14 * H.norm());
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().minCoeff() >= -1e-9);
}

TEST_CASE("Newton maximizer reaches the gradient-ascent optimum")
{
    std::mt19937_64 rng(37);
    const Problem pr = random_problem(rng, 60, 2, 3);
    const WeightedSoftmaxRegression reg(pr.design, pr.targets, 2);
    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(3, 2);
    const NewtonOutcome out = reg.maximize(coef, NewtonConfig{});
    CHECK(out.converged);
    CHECK_FALSE(out.stalled);
    const Eigen::MatrixXd oracle = ascent_oracle(pr, Eigen::MatrixXd::Zero(3, 2), 2);
    CHECK((coef - oracle).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(coef.row(2).isZero());
}

TEST_CASE("pinned rows stay fixed")
{
    std::mt19937_64 rng(41);
    const Problem pr = random_problem(rng, 50, 2, 3);
    Eigen::MatrixXd coef(3, 2);
    coef << 0.1, 0.2, -0.3, 0.4, 0.7, -0.5;
    const Eigen::RowVectorXd pinned = coef.row(2);
    WeightedSoftmaxRegression(pr.design, pr.targets, 2).maximize(coef, NewtonConfig{});
    CHECK(coef.row(2) == pinned);

    Eigen::MatrixXd none = coef;
    const NewtonOutcome out = WeightedSoftmaxRegression(pr.design, pr.targets, 0).maximize(none, NewtonConfig{});
    CHECK(none == coef);
    CHECK(out.converged);
}

TEST_CASE("a finite box is respected and the result is optimal within it")
{
    // Separable data: the unconstrained optimum runs off to infinity.
    Eigen::MatrixXd design(40, 2);
    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(40, 2);
    for (int t = 0; t < 40; ++t) {
        const double x = -1.0 + 2.0 * t / 39.0;
        design.row(t) << 1.0, x;
        targets(t, x > 0.0 ? 0 : 1) = 1.0;
    }
    NewtonConfig cfg;
    cfg.bound = 4.0;
    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(2, 2);
    const WeightedSoftmaxRegression reg(design, targets, 1);
    const NewtonOutcome out = reg.maximize(coef, cfg);
    CHECK_FALSE(out.stalled);
    CHECK(coef.cwiseAbs().maxCoeff() <= 4.0);
    CHECK(coef(0, 1) == doctest::Approx(4.0));

    // No feasible point nearby does better.
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    const double best = reg.objective(coef);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::MatrixXd probe = coef;
        probe(0, 0) = std::clamp(coef(0, 0) + u(rng), -4.0, 4.0);
        probe(0, 1) = std::clamp(coef(0, 1) + u(rng), -4.0, 4.0);
        CHECK(reg.objective(probe) <= best + 1e-12);
    }
}

TEST_CASE("shape contracts")
{
    Eigen::MatrixXd design = Eigen::MatrixXd::Ones(3, 2);
    Eigen::MatrixXd targets = Eigen::MatrixXd::Ones(4, 2);
    CHECK_THROWS_AS(WeightedSoftmaxRegression(design, targets, 1), ContractViolation);
    Eigen::MatrixXd t3 = Eigen::MatrixXd::Ones(3, 2);
    CHECK_THROWS_AS(WeightedSoftmaxRegression(design, t3, 3), ContractViolation);
    const WeightedSoftmaxRegression reg(design, t3, 1);
    CHECK_THROWS_AS(reg.objective(Eigen::MatrixXd::Zero(3, 2)), ContractViolation);
}
