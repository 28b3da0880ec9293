#include <doctest.h>

#include <cmath>

#include "moe/errors.hpp"
#include "moe/synth.hpp"
#include "moe/theory.hpp"
#include "support.hpp"

using namespace moe;

namespace {

/// Midpoint-rule average of g(Y = s | x) over [0, 1].
double class_mass(const Scenario& s, int cls, int cells = 20000)
{
    double total = 0.0;
    for (int i = 0; i < cells; ++i) {
        const double x = (i + 0.5) / cells;
        total += moe::testing::density_naive(s.truth, moe::testing::vec1(x), s.gate)[static_cast<std::size_t>(cls)];
    }
    return total / cells;
}

} // namespace

TEST_CASE("presets carry the published parameters")
{
    const Scenario r1 = preset("regime1");
    CHECK(r1.truth.size() == 2);
    CHECK(r1.truth.dim() == 1);
    CHECK(r1.truth.classes() == 2);
    CHECK(r1.truth.canonical());
    CHECK(r1.truth[0].beta0 == 1.0);
    CHECK(r1.truth[0].beta1(0) == 3.0);
    CHECK(r1.truth[0].a(0) == -1.0);
    CHECK(r1.truth[0].b(0, 0) == 2.0);
    CHECK(r1.truth[1].a(0) == 1.0);
    CHECK(r1.truth[1].b(0, 0) == -1.0);
    CHECK(r1.regime == Regime::regime1);
    CHECK(r1.box == CovariateBox::unit(1));

    const Scenario r2 = preset("regime2", GateTransform::sigmoid());
    CHECK(r2.truth[1].b(0, 0) == 0.0);
    CHECK(r2.regime == Regime::regime2);
    CHECK(r2.gate == GateTransform::sigmoid());
    CHECK(r2.truth.gate() == GateTransform::sigmoid());

    CHECK_THROWS_AS(preset("regime3"), ContractViolation);
}

TEST_CASE("sampling is deterministic per seed")
{
    const Scenario s = preset("regime1");
    CHECK(sample(s, 200, 9) == sample(s, 200, 9));
    CHECK_FALSE(sample(s, 200, 9) == sample(s, 200, 10));
    const Dataset D = sample(s, 200, 9);
    CHECK((D.x().array() >= 0.0).all());
    CHECK((D.x().array() <= 1.0).all());
    CHECK_THROWS_AS(sample(s, 0, 1), ContractViolation);
}

TEST_CASE("label frequencies match the quadrature of the true density")
{
    for (const char* name : {"regime1", "regime2"}) {
        const Scenario s = preset(name);
        const std::size_t n = 100000;
        const Dataset D = sample(s, n, 2024);
        double ones = 0.0;
        for (int y : D.labels()) ones += y == 0 ? 1.0 : 0.0;
        const double freq = ones / static_cast<double>(n);
        const double p = class_mass(s, 0);
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        CAPTURE(name);
        CHECK(std::abs(freq - p) < 0.01);
        CHECK(std::abs(freq - p) < 3.0 * se);
    }
}

TEST_CASE("covariates are uniform on the box")
{
    const Dataset D = sample(preset("regime2"), 50000, 5);
    const double mean = D.x().mean();
    const double var = (D.x().array() - mean).square().mean();
    CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
    CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}
