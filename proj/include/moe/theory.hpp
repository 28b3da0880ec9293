#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "moe/metrics.hpp"
#include "moe/model.hpp"
#include "moe/synth.hpp"

namespace moe {

/// Regime2 iff some component has every non-reference slope column within tol of zero.
Regime classify_regime(const MixingMeasure& G, double tol = 0.0);

/// Index of the first component whose slopes all vanish, or -1.
int collapsed_component(const MixingMeasure& G, double tol = 0.0);

/// Moves the first collapsed component to the front and re-canonicalizes.
MixingMeasure collapsed_first(const MixingMeasure& G, double tol = 0.0);

struct UGradients {
    Eigen::VectorXd d_beta1;  ///< du/dbeta1
    Eigen::VectorXd d_bs;     ///< du/db_s (slope column of class s)
};

UGradients u_gradients(const Component& c, const Eigen::VectorXd& x, int s);

struct PdeReport {
    double proportionality_constant = 0.0;     ///< constant of the first class
    std::vector<double> class_constants;       ///< per non-reference class
    double max_relative_deviation = 0.0;
    double constant_spread = 0.0;
    bool holds = false;
};

/// Checks du/dbeta1 = C_s du/db_s with a constant C_s independent of x, for
/// every non-reference class s. Coordinates where both sides vanish are skipped.
PdeReport pde_interaction_check(const Component& c, const std::vector<Eigen::VectorXd>& x_samples,
                                double tol);

struct AdversarialParams {
    double n = 0.0;
    double t_n = 0.0;
    double c_n = 0.0;
    double B = 0.0;  ///< bound on ||X||
    double N = 0.0;  ///< sum of first-order expert derivatives at the collapsed atom
};

/// Needs a canonical Regime2 truth whose first component is collapsed.
AdversarialParams adversarial_params(const MixingMeasure& truth, double n,
                                     const CovariateBox& box);

/// (k* + 1)-component perturbation that splits the collapsed atom in two.
MixingMeasure build_adversarial(const MixingMeasure& truth, const AdversarialParams& p);

/// t_n + (exp(beta0_1) - t_n) c_n^r (d^{r/2} + K - 1).
double dr_closed_form(const MixingMeasure& truth, const AdversarialParams& p, double r);

/// (n, E_X V(g_{G_n}, g_truth) / D_r(G_n, truth)) along the adversarial sequence.
std::vector<std::pair<double, double>> collapse_ratio_series(const MixingMeasure& truth,
                                                             const std::vector<double>& n_grid, double r,
                                                             const McConfig& mc,
                                                             const CovariateBox& box);

} // namespace moe
