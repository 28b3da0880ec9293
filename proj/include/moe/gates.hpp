#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>

#include "moe/box.hpp"

namespace moe {

enum class GateKind { identity, sigmoid, tanh, cos, sin, log_abs, power, normalize };

/// Input map M applied to the covariate before it reaches the softmax gate.
///
/// Every kind acts element-wise except `normalize` (x / ||x||). `log_abs` is
/// undefined at coordinates equal to zero and `normalize` at the origin.
class GateTransform {
public:
    GateTransform() = default;

    static GateTransform identity() { return GateTransform(); }
    static GateTransform sigmoid() { return GateTransform(GateKind::sigmoid); }
    static GateTransform tanh() { return GateTransform(GateKind::tanh); }
    static GateTransform cos() { return GateTransform(GateKind::cos); }
    static GateTransform sin() { return GateTransform(GateKind::sin); }
    static GateTransform log_abs() { return GateTransform(GateKind::log_abs); }
    static GateTransform normalize() { return GateTransform(GateKind::normalize); }
    /// x^m element-wise; m >= 3.
    static GateTransform power(int m);

    /// Parses "identity", "sigmoid", "tanh", "cos", "sin", "logabs", "powerM", "normalize".
    static GateTransform parse(std::string_view tag);
    std::string name() const;

    GateKind kind() const { return kind_; }
    int exponent() const { return exponent_; }
    bool is_identity() const { return kind_ == GateKind::identity; }

    /// Throws DomainError naming the offending coordinate when x is outside the domain.
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

    /// True when every coordinate keeps at least `margin` away from the excluded set.
    bool in_domain(const Eigen::VectorXd& x, double margin = 0.0) const;

    bool operator==(const GateTransform&) const = default;

private:
    explicit GateTransform(GateKind kind, int exponent = 0) : kind_(kind), exponent_(exponent) {}

    GateKind kind_ = GateKind::identity;
    int exponent_ = 0;
};

struct IndependenceReport {
    int monomial_count = 0;
    int numeric_rank = 0;
    double min_singular_value = 0.0;
    double max_singular_value = 0.0;
    double exclusion_radius = 0.0;
    bool pass = false;
};

/// Number of monomials X^p M(X)^q with p, q in N^d and |p| + |q| <= 2.
int monomial_count(int d);

/// Numerical rank test for linear independence of {X^p M(X)^q : |p| + |q| <= 2}.
///
/// Draws `n_samples` covariates uniformly from `box` (rejecting points within
/// 1e-6 of M's excluded set), evaluates every monomial in graded lexicographic
/// order over the concatenation (x_1..x_d, m_1..m_d), and counts singular values
/// above rel_tol * sigma_max.
IndependenceReport independence_check(const GateTransform& transform, int d, int n_samples,
                                       double rel_tol = 1e-8, std::uint64_t seed = 0);
IndependenceReport independence_check(const GateTransform& transform, const CovariateBox& box,
                                      int n_samples, double rel_tol, std::uint64_t seed);

} // namespace moe
