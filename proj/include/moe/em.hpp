#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "moe/model.hpp"
#include "moe/softmax_regression.hpp"
#include "moe/synth.hpp"

namespace moe {

/// Which gate parameters stay fixed during the M-step.
enum class GatePinning {
    last_component,  ///< last fitted component keeps beta0 = 0, beta1 = 0
    free,            ///< all gates move; the result is canonicalized afterwards
};

struct InitSpec {
    enum class Mode { near_truth, random };
    Mode mode = Mode::near_truth;
    double sigma = 0.1;   ///< noise around the truth (near_truth)
    double scale = 1.0;   ///< parameter scale (random)
};

struct FitConfig {
    int k = 3;
    int max_iter = 2000;
    double tol = 1e-6;          ///< on |dNLL| / (1 + |NLL|)
    bool stop_on_tol = true;    ///< false runs exactly max_iter iterations
    InitSpec init;
    NewtonConfig newton{.bound = 10.0};  ///< compact parameter box for every fitted coefficient
    GatePinning pinning = GatePinning::last_component;
};

struct FitReport {
    MixingMeasure measure;
    std::vector<double> nll_trajectory;  ///< entry 0 is the initialization
    int iterations = 0;
    bool converged = false;
    int inner_warnings = 0;              ///< M-steps where a sub-problem failed to improve
};

/// Random surjection of fitted components onto true components, then Gaussian
/// perturbation of the assigned true parameters. The last fitted component is
/// always the sole member of the last true cell and keeps its gate pinned.
MixingMeasure init_near_truth(const Scenario& scenario, int k, std::uint64_t seed, double sigma = 0.1);

/// Independent N(0, scale^2) draws for every free parameter.
MixingMeasure init_random(int d, int K, int k, std::uint64_t seed, double scale);

/// Posterior component responsibilities (n x k), computed in log space.
Eigen::MatrixXd e_step(const MixingMeasure& G, const Dataset& D, const GateTransform& M);

/// Q(G | R) = sum_{t,i} r_ti [log gate_i(x_t) + log f_i(y_t | x_t)].
double expected_complete_loglik(const Eigen::MatrixXd& R, const Dataset& D, const GateTransform& M,
                                const MixingMeasure& G);

struct MStepResult {
    MixingMeasure measure;
    bool warning = false;
};

MStepResult m_step(const Eigen::MatrixXd& R, const Dataset& D, const GateTransform& M,
                   const MixingMeasure& G, const FitConfig& cfg);

FitReport fit(const Dataset& D, const FitConfig& cfg, const GateTransform& M, const MixingMeasure& init);

/// Pieces of the M-step exposed for derivative checks. Coefficient rows are
/// (beta0, beta1) per component for the gate and (a_l, b_l) per class for an expert.
Eigen::MatrixXd gate_design(const Dataset& D, const GateTransform& M);
Eigen::MatrixXd expert_design(const Dataset& D);
Eigen::MatrixXd gate_coefficients(const MixingMeasure& G);
Eigen::MatrixXd expert_coefficients(const Component& c);
Eigen::MatrixXd expert_targets(const Eigen::MatrixXd& R, const Dataset& D, int component);

} // namespace moe
