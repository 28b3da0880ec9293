#include <doctest.h>

#include <cmath>
#include <random>

#include "moe/errors.hpp"
#include "moe/model.hpp"
#include "moe/synth.hpp"
#include "support.hpp"

using namespace moe;
using moe::testing::density_naive;
using moe::testing::random_measure;
using moe::testing::uniform_point;
using moe::testing::vec1;

namespace {

Component scalar_component(double beta0, double beta1, double a1, double b1)
{
    Eigen::VectorXd a(2), bb(1);
    a << a1, 0.0;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(1, 2);
    b(0, 0) = b1;
    return make_component(beta0, vec1(beta1), a, b);
}

} // namespace

TEST_CASE("expert_prob hand values")
{
    Component uniform{0.0, vec1(0.0), Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Zero(1, 3)};
    const Eigen::VectorXd u = expert_prob(uniform, vec1(0.7));
    for (int s = 0; s < 3; ++s) CHECK(u(s) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const Eigen::VectorXd half = expert_prob(scalar_component(0, 0, -1, 2), vec1(0.5));
    CHECK(half(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(half(1) == doctest::Approx(0.5).epsilon(1e-15));

    const Eigen::VectorXd p = expert_prob(scalar_component(0, 0, 1, -1), vec1(0.5));
    const double e = std::exp(0.5);
    CHECK(p(0) == doctest::Approx(e / (1 + e)).epsilon(1e-14));
    CHECK(p(1) == doctest::Approx(1 / (1 + e)).epsilon(1e-14));
    CHECK(p(0) == doctest::Approx(0.6225).epsilon(1e-4));
}

TEST_CASE("expert_prob survives extreme logits")
{
    const Eigen::VectorXd p = expert_prob(scalar_component(0, 0, 800, 0), vec1(0.0));
    CHECK(p.allFinite());
    CHECK(p(0) == doctest::Approx(1.0));
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("dimension mismatch is a contract violation")
{
    const Component c = scalar_component(0, 1, 1, 1);
    Eigen::VectorXd x2(2);
    x2 << 0.1, 0.2;
    CHECK_THROWS_AS(expert_prob(c, x2), ContractViolation);
    CHECK_THROWS_AS(u_value(c, x2, 0), ContractViolation);
    const MixingMeasure G(1, 2, {c}, false);
    CHECK_THROWS_AS(density(G, x2, GateTransform::identity()), ContractViolation);
}

TEST_CASE("gate weights, density and u on the regime-1 truth")
{
    const Scenario s = preset("regime1");
    const Eigen::VectorXd x = vec1(0.5);
    const Eigen::VectorXd w = gate_weights(s.truth, x, s.gate);
    const double e25 = std::exp(2.5);
    CHECK(w(0) == doctest::Approx(e25 / (1 + e25)).epsilon(1e-14));
    CHECK(w(1) == doctest::Approx(1 / (1 + e25)).epsilon(1e-14));
    CHECK(w(0) == doctest::Approx(0.9241).epsilon(1e-4));

    const Eigen::VectorXd g = density(s.truth, x, s.gate);
    const double e05 = std::exp(0.5);
    CHECK(g(0) == doctest::Approx(w(0) * 0.5 + w(1) * e05 / (1 + e05)).epsilon(1e-14));
    CHECK(g(0) == doctest::Approx(0.5093).epsilon(1e-4));
    CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-15));

    CHECK(u_value(s.truth[0], x, 0) == doctest::Approx(std::exp(1.5) * 0.5).epsilon(1e-14));
    CHECK(u_value(s.truth[0], x, 0) == doctest::Approx(2.2408).epsilon(1e-4));
}

TEST_CASE("gate weight special cases")
{
    std::mt19937_64 rng(3);
    const Component c = moe::testing::random_component(rng, 2, 3);
    const MixingMeasure single(2, 3, {c});
    CHECK(gate_weights(single, uniform_point(rng, 2), GateTransform::identity())(0) == 1.0);

    Component c2 = moe::testing::random_component(rng, 2, 3);
    c2.beta0 = c.beta0;
    c2.beta1 = c.beta1;
    const MixingMeasure twins(2, 3, {c, c2, c});
    const Eigen::VectorXd w = gate_weights(twins, uniform_point(rng, 2), GateTransform::tanh());
    for (int i = 0; i < 3; ++i) CHECK(w(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("u_value with a flat gate is the expert probability")
{
    std::mt19937_64 rng(5);
    Component c = moe::testing::random_component(rng, 3, 4);
    c.beta1.setZero();
    const Eigen::VectorXd x = uniform_point(rng, 3);
    const Eigen::VectorXd f = expert_prob(c, x);
    for (int s = 0; s < 4; ++s) CHECK(u_value(c, x, s) == doctest::Approx(f(s)).epsilon(1e-14));

    Component flat{0.0, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Zero(3, 4)};
    CHECK(u_value(flat, x, 2) == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("density matches a direct re-implementation for every gate kind")
{
    std::mt19937_64 rng(11);
    const GateTransform gates[] = {GateTransform::identity(), GateTransform::sigmoid(), GateTransform::tanh(),
                                   GateTransform::cos(),      GateTransform::sin(),     GateTransform::log_abs(),
                                   GateTransform::power(3),   GateTransform::normalize()};
    for (const GateTransform& M : gates) {
        for (int trial = 0; trial < 10; ++trial) {
            const int d = 1 + trial % 3;
            const int K = 2 + trial % 3;
            const MixingMeasure G = random_measure(rng, d, K, 1 + trial % 4);
            const Eigen::VectorXd x = uniform_point(rng, d, 0.05, 1.0);
            const Eigen::VectorXd got = density(G, x, M);
            const std::vector<double> want = density_naive(G, x, M);
            for (int s = 0; s < K; ++s) CHECK(got(s) == doctest::Approx(want[static_cast<std::size_t>(s)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("density is a probability vector and translation invariant")
{
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const int d = 1 + trial % 4;
        const int K = 2 + trial % 4;
        const MixingMeasure G = random_measure(rng, d, K, 1 + trial % 5, 2.0);
        Eigen::VectorXd t1 = uniform_point(rng, d, -3.0, 3.0);
        const MixingMeasure T = translate_gates(G, -1.7 + 0.1 * trial, t1);
        const MixingMeasure C = canonicalize(G);
        CHECK(C.canonical());
        for (int rep = 0; rep < 100; ++rep) {
            const Eigen::VectorXd x = uniform_point(rng, d);
            const Eigen::VectorXd g = density(G, x, GateTransform::identity());
            CHECK((g.array() >= 0.0).all());
            CHECK(std::abs(g.sum() - 1.0) <= 1e-12);
            CHECK((density(T, x, GateTransform::identity()) - g).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((density(C, x, GateTransform::identity()) - g).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("canonicalize examples")
{
    const Scenario s = preset("regime1");
    CHECK(canonicalize(s.truth) == s.truth);

    const MixingMeasure shifted = translate_gates(s.truth, 2.5, vec1(0.0));
    CHECK_FALSE(shifted.canonical());
    const MixingMeasure back = canonicalize(shifted);
    CHECK(back.canonical());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].beta0 == doctest::Approx(s.truth[i].beta0).epsilon(1e-15));
        CHECK(back[i].beta1(0) == doctest::Approx(s.truth[i].beta1(0)).epsilon(1e-15));
    }
    CHECK(back[1].beta0 == 0.0);
    CHECK(back[1].beta1(0) == 0.0);
}

TEST_CASE("measure validation")
{
    Component c = scalar_component(0.3, 1.0, 1.0, 2.0);
    Component bad = c;
    bad.a(1) = 0.5;
    CHECK_THROWS_AS(MixingMeasure(1, 2, {bad}), ContractViolation);
    bad = c;
    bad.b(0, 1) = 1.0;
    CHECK_THROWS_AS(MixingMeasure(1, 2, {bad}), ContractViolation);
    bad = c;
    bad.beta0 = NAN;
    CHECK_THROWS_AS(MixingMeasure(1, 2, {bad}), ContractViolation);
    CHECK_THROWS_AS(MixingMeasure(1, 2, {c}, true), ContractViolation);
    CHECK_THROWS_AS(MixingMeasure(1, 2, {}), ContractViolation);
    CHECK_THROWS_AS(MixingMeasure(2, 2, {c}), ContractViolation);

    const Component pinned = make_component(0.0, vec1(0.0), Eigen::Vector2d(1.0, 7.0), Eigen::MatrixXd::Ones(1, 2));
    CHECK(pinned.a(1) == 0.0);
    CHECK(pinned.b(0, 1) == 0.0);
}

TEST_CASE("true-measure assumptions")
{
    const Scenario s = preset("regime1");
    CHECK_NOTHROW(require_true_measure(s.truth));
    const MixingMeasure flat(1, 2, {scalar_component(0.5, 0, 1, 2), scalar_component(0, 0, -1, 0)}, true);
    CHECK_THROWS_AS(require_true_measure(flat), ContractViolation);
    const MixingMeasure twins(1, 2, {scalar_component(0.5, 1, 1, 2), scalar_component(0, 0, 1, 2)}, true);
    CHECK_THROWS_AS(require_true_measure(twins), ContractViolation);
}

TEST_CASE("dataset validation")
{
    Eigen::MatrixXd x(2, 1);
    x << 0.1, 0.2;
    CHECK_NOTHROW(Dataset(x, {0, 1}, 2));
    CHECK_THROWS_AS(Dataset(x, {0, 2}, 2), ContractViolation);
    CHECK_THROWS_AS(Dataset(x, {0}, 2), ContractViolation);
    x(1, 0) = INFINITY;
    CHECK_THROWS_AS(Dataset(x, {0, 1}, 2), ContractViolation);
}

TEST_CASE("log-likelihood")
{
    const MixingMeasure uniform(1, 3, {Component{0.0, vec1(0.0), Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Zero(1, 3)}});
    Eigen::MatrixXd one(1, 1);
    one << 0.4;
    CHECK(log_likelihood(uniform, Dataset(one, {2}, 3), GateTransform::identity()) ==
          doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-15));

    const Scenario s = preset("regime1");
    Eigen::MatrixXd x(5, 1);
    x << 0.05, 0.3, 0.5, 0.71, 0.98;
    const std::vector<int> y{0, 1, 1, 0, 1};
    const Dataset D(x, y, 2);
    double naive = 0.0;
    for (int t = 0; t < 5; ++t)
        naive += std::log(density_naive(s.truth, vec1(x(t, 0)), s.gate)[static_cast<std::size_t>(y[static_cast<std::size_t>(t)])]);
    const double ll = log_likelihood(s.truth, D, s.gate);
    CHECK(ll == doctest::Approx(naive).epsilon(1e-12));

    Eigen::MatrixXd x2(10, 1);
    x2 << x, x;
    std::vector<int> y2 = y;
    y2.insert(y2.end(), y.begin(), y.end());
    CHECK(log_likelihood(s.truth, Dataset(x2, y2, 2), s.gate) == doctest::Approx(2.0 * ll).epsilon(1e-14));

    Eigen::MatrixXd xp(5, 1);
    xp << 0.98, 0.5, 0.05, 0.3, 0.71;
    const Dataset P(xp, {1, 1, 0, 1, 0}, 2);
    CHECK(log_likelihood(s.truth, P, s.gate) == doctest::Approx(ll).epsilon(1e-14));
}

TEST_CASE("softmax and log-sum-exp are stable")
{
    Eigen::VectorXd v(3);
    v << 1000.0, 1000.0, -1000.0;
    const Eigen::VectorXd p = softmax(v);
    CHECK(p(0) == doctest::Approx(0.5));
    CHECK(p(2) == 0.0);
    CHECK(log_sum_exp(v) == doctest::Approx(1000.0 + std::log(2.0)));
}
