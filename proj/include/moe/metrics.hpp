#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "moe/box.hpp"
#include "moe/model.hpp"

namespace moe {

struct VoronoiAssignment {
    std::vector<std::vector<std::size_t>> cells;  ///< per true component, fitted indices
    std::vector<std::size_t> owner;               ///< per fitted component, its true index
    std::vector<double> distances;                ///< per fitted component
};

/// theta = (beta1, a_1..a_{K-1}, vec(b_1..b_{K-1})); the pinned class carries no information.
Eigen::VectorXd atom_vector(const Component& c);

/// Nearest-atom assignment; ties go to the smallest true index.
VoronoiAssignment voronoi_cells(const MixingMeasure& fit, const MixingMeasure& truth);

/// Order-r Voronoi loss D_r(fit, truth). Both measures must be canonical; r >= 1.
double voronoi_loss(const MixingMeasure& fit, const MixingMeasure& truth, double r);

struct McConfig {
    std::size_t samples = 20000;
    std::uint64_t seed = 0;
    std::optional<CovariateBox> box;  ///< unit cube when unset
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

double hellinger(const Eigen::VectorXd& p, const Eigen::VectorXd& q);
double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// E_X h(g_A(.|X), g_B(.|X)) by Monte Carlo over the covariate box. Points are
/// generated in fixed blocks with per-block streams, so the value does not
/// depend on how blocks are scheduled.
McEstimate hellinger_expect(const MixingMeasure& A, const MixingMeasure& B, const GateTransform& MA,
                            const GateTransform& MB, const McConfig& mc = {});
McEstimate tv_expect(const MixingMeasure& A, const MixingMeasure& B, const GateTransform& MA,
                     const GateTransform& MB, const McConfig& mc = {});

/// The covariate points used by the estimators above, in order.
std::vector<Eigen::VectorXd> mc_points(int d, const McConfig& mc);

} // namespace moe
