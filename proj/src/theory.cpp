#include "moe/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "moe/errors.hpp"

namespace moe {

namespace {
constexpr double kTinyGradient = 1e-14;
}

int collapsed_component(const MixingMeasure& G, double tol)
{
    const int K = G.classes();
    for (std::size_t i = 0; i < G.size(); ++i) {
        bool collapsed = true;
        for (int l = 0; l < K - 1 && collapsed; ++l) collapsed = G[i].b.col(l).norm() <= tol;
        if (collapsed) return static_cast<int>(i);
    }
    return -1;
}

Regime classify_regime(const MixingMeasure& G, double tol)
{
    return collapsed_component(G, tol) >= 0 ? Regime::regime2 : Regime::regime1;
}

MixingMeasure collapsed_first(const MixingMeasure& G, double tol)
{
    const int idx = collapsed_component(G, tol);
    MOE_REQUIRE(idx >= 0, "measure has no collapsed expert (not Regime 2)");
    std::vector<Component> comps = G.components();
    std::rotate(comps.begin(), comps.begin() + idx, comps.begin() + idx + 1);
    return canonicalize(MixingMeasure(G.dim(), G.classes(), std::move(comps), false, G.gate()));
}

UGradients u_gradients(const Component& c, const Eigen::VectorXd& x, int s)
{
    MOE_REQUIRE(s >= 0 && s < c.classes(), "class index out of range");
    const Eigen::VectorXd f = expert_prob(c, x);
    const double gate = std::exp(c.beta1.dot(x));
    return {x * (gate * f(s)), x * (gate * f(s) * (1.0 - f(s)))};
}

PdeReport pde_interaction_check(const Component& c, const std::vector<Eigen::VectorXd>& x_samples, double tol)
{
    MOE_REQUIRE(!x_samples.empty(), "need at least one covariate sample");
    MOE_REQUIRE(tol > 0.0, "tol must be positive");
    PdeReport report;
    const int K = c.classes();
    bool any = false;
    for (int s = 0; s < K - 1; ++s) {
        std::vector<double> ratios;
        bool infinite = false;
        for (const Eigen::VectorXd& x : x_samples) {
            const UGradients g = u_gradients(c, x, s);
            for (Eigen::Index j = 0; j < x.size(); ++j) {
                const double lhs = g.d_beta1(j);
                const double rhs = g.d_bs(j);
                if (std::abs(rhs) < kTinyGradient) {
                    if (std::abs(lhs) >= kTinyGradient) infinite = true;
                    continue;
                }
                ratios.push_back(lhs / rhs);
            }
        }
        if (ratios.empty() && !infinite) continue;
        any = true;
        if (infinite || ratios.empty()) {
            report.class_constants.push_back(std::numeric_limits<double>::infinity());
            report.max_relative_deviation = std::numeric_limits<double>::infinity();
            report.constant_spread = std::numeric_limits<double>::infinity();
            continue;
        }
        double mean = 0.0;
        for (double v : ratios) mean += v;
        mean /= static_cast<double>(ratios.size());
        const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
        double dev = 0.0;
        for (double v : ratios) dev = std::max(dev, std::abs(v - mean) / std::abs(mean));
        report.class_constants.push_back(mean);
        report.max_relative_deviation = std::max(report.max_relative_deviation, dev);
        report.constant_spread = std::max(report.constant_spread, *hi - *lo);
    }
    if (!any) throw InconclusiveError("all gradients below 1e-14; proportionality cannot be assessed");
    report.proportionality_constant = report.class_constants.front();
    report.holds = report.max_relative_deviation < tol && report.constant_spread < tol;
    return report;
}

AdversarialParams adversarial_params(const MixingMeasure& truth, double n, const CovariateBox& box)
{
    MOE_REQUIRE(truth.canonical(), "truth must be canonical");
    MOE_REQUIRE(truth.size() >= 2, "truth needs at least two components");
    MOE_REQUIRE(collapsed_component(truth) == 0, "first component of the truth must be the collapsed one");
    MOE_REQUIRE(box.dim() == truth.dim(), "covariate box has the wrong dimension");
    MOE_REQUIRE(n > 0.0, "n must be positive");

    const Component& c = truth[0];
    const Eigen::VectorXd f = softmax(c.a);  // expert is constant in x because b = 0
    double N = 0.0;
    for (int l = 0; l < truth.classes() - 1; ++l) N += f(l) * (1.0 - f(l));

    AdversarialParams p;
    p.n = n;
    p.B = box.norm_bound();
    p.N = N;
    p.t_n = p.B / (n * N);
    const double denom = n * N * std::exp(c.beta0) - p.B;
    if (!(denom > 0.0))
        throw RangeError("n too small for the adversarial sequence: n N exp(beta0_1) - B = " + std::to_string(denom));
    p.c_n = 1.0 / denom;
    return p;
}

MixingMeasure build_adversarial(const MixingMeasure& truth, const AdversarialParams& p)
{
    MOE_REQUIRE(truth.canonical() && truth.size() >= 2, "truth must be canonical with at least two components");
    MOE_REQUIRE(collapsed_component(truth) == 0, "first component of the truth must be the collapsed one");
    const Component& star = truth[0];
    const double half_mass = 0.5 * std::exp(star.beta0) - 0.5 * p.t_n;
    if (!(half_mass > 0.0)) throw RangeError("t_n exceeds the collapsed component's gate mass");

    Component split = star;
    split.beta0 = std::log(half_mass);
    split.beta1.array() += p.c_n;
    split.a.head(truth.classes() - 1).array() += p.c_n;

    std::vector<Component> comps{split, split};
    for (std::size_t i = 1; i < truth.size(); ++i) comps.push_back(truth[i]);
    return MixingMeasure(truth.dim(), truth.classes(), std::move(comps), true, truth.gate());
}

double dr_closed_form(const MixingMeasure& truth, const AdversarialParams& p, double r)
{
    MOE_REQUIRE(r >= 1.0, "r must be at least 1");
    const double mass = std::exp(truth[0].beta0);
    if (!(p.t_n < mass)) throw RangeError("t_n exceeds the collapsed component's gate mass");
    const double d = truth.dim();
    const double K = truth.classes();
    return p.t_n + (mass - p.t_n) * std::pow(p.c_n, r) * (std::pow(d, r / 2.0) + (K - 1.0));
}

std::vector<std::pair<double, double>> collapse_ratio_series(const MixingMeasure& truth,
                                                             const std::vector<double>& n_grid, double r,
                                                             const McConfig& mc, const CovariateBox& box)
{
    const MixingMeasure star = collapsed_component(truth) == 0 && truth.canonical() ? truth : collapsed_first(truth);
    McConfig cfg = mc;
    cfg.box = box;
    std::vector<std::pair<double, double>> series;
    for (double n : n_grid) {
        const AdversarialParams p = adversarial_params(star, n, box);
        const MixingMeasure Gn = build_adversarial(star, p);
        const GateTransform standard;
        const double tv = tv_expect(Gn, star, standard, standard, cfg).value;
        series.emplace_back(n, tv / voronoi_loss(Gn, star, r));
    }
    return series;
}

} // namespace moe
