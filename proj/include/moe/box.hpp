#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "moe/rng.hpp"

namespace moe {

/// Axis-aligned covariate domain; defaults to the unit cube.
class CovariateBox {
public:
    CovariateBox() = default;
    explicit CovariateBox(std::vector<std::pair<double, double>> bounds);

    static CovariateBox unit(int d);

    int dim() const { return static_cast<int>(bounds_.size()); }
    const std::vector<std::pair<double, double>>& bounds() const { return bounds_; }

    bool contains(const Eigen::VectorXd& x) const;
    /// max over the box of the Euclidean norm (attained at a corner).
    double norm_bound() const;
    Eigen::VectorXd sample(Rng& rng) const;

    bool operator==(const CovariateBox&) const = default;

private:
    std::vector<std::pair<double, double>> bounds_;
};

} // namespace moe
