#include "moe/synth.hpp"

#include <random>

#include "moe/errors.hpp"
#include "moe/theory.hpp"

namespace moe {

std::string to_string(Regime r)
{
    return r == Regime::regime1 ? "regime1" : "regime2";
}

namespace {

Component binary_component(double beta0, double beta1, double a1, double b1)
{
    Eigen::VectorXd g(1), a(2);
    g << beta1;
    a << a1, 0.0;
    Eigen::MatrixXd b(1, 2);
    b << b1, 0.0;
    return make_component(beta0, g, a, b);
}

} // namespace

Scenario preset(std::string_view name, const GateTransform& gate)
{
    double b21 = 0.0;
    if (name == "regime1")
        b21 = -1.0;
    else if (name == "regime2")
        b21 = 0.0;
    else
        throw ContractViolation("unknown scenario '" + std::string(name) + "' (expected regime1 or regime2)");

    std::vector<Component> comps{binary_component(1.0, 3.0, -1.0, 2.0), binary_component(0.0, 0.0, 1.0, b21)};
    MixingMeasure truth(1, 2, std::move(comps), true, gate);
    require_true_measure(truth);
    Scenario s{std::string(name), truth, gate, CovariateBox::unit(1), classify_regime(truth)};
    return s;
}

Dataset sample(const Scenario& scenario, std::size_t n, std::uint64_t seed)
{
    MOE_REQUIRE(n >= 1, "sample size must be at least 1");
    const MixingMeasure& truth = scenario.truth;
    MOE_REQUIRE(scenario.box.dim() == truth.dim(), "covariate box and truth differ in dimension");
    Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(StreamRole::data)}));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), truth.dim());
    std::vector<int> labels(n);
    for (std::size_t t = 0; t < n; ++t) {
        const Eigen::VectorXd xt = scenario.box.sample(rng);
        x.row(static_cast<Eigen::Index>(t)) = xt.transpose();
        const Eigen::VectorXd g = density(truth, xt, scenario.gate);
        const double u = unif(rng);
        int label = truth.classes() - 1;
        double cum = 0.0;
        for (int s = 0; s < truth.classes(); ++s) {
            cum += g(s);
            if (u < cum) {
                label = s;
                break;
            }
        }
        labels[t] = label;
    }
    return Dataset(std::move(x), std::move(labels), truth.classes());
}

} // namespace moe
