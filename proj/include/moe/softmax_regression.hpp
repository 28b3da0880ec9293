#pragma once

#include <Eigen/Dense>

#include <limits>

namespace moe {

struct NewtonConfig {
    int max_inner = 50;
    double damping = 1e-8;
    double line_search_shrink = 0.5;
    double armijo = 1e-4;
    double grad_tol = 1e-8;
    double decrement_tol = 1e-13;  ///< stop once the Newton decrement is below this times (1 + |L|)
    int max_backtracks = 60;
    double bound = std::numeric_limits<double>::infinity();  ///< box |coef| <= bound on the free rows
};

struct NewtonOutcome {
    int iterations = 0;        ///< accepted Newton steps
    double objective = 0.0;    ///< objective at the returned coefficients
    double grad_norm = 0.0;    ///< gradient norm at the returned coefficients
    bool converged = false;    ///< gradient norm reached grad_tol or the Newton decrement vanished
    bool stalled = false;      ///< no step improved while the gradient was still large
};

/// Weighted multinomial logit objective
///
///     L(W) = sum_t [ sum_c T(t, c) eta(t, c) - w_t log sum_c exp(eta(t, c)) ],
///     eta(t, c) = W.row(c) . design.row(t),   w_t = sum_c T(t, c).
///
/// Both M-step sub-problems have this form: the gate problem with T = responsibilities,
/// an expert problem with T(t, c) = r_ti [y_t == c]. Only the first `free_rows` rows of W
/// are optimized; the remaining rows stay at their current values. L is concave.
///
/// Holds references to `design` and `targets`; both must outlive the object.
class WeightedSoftmaxRegression {
public:
    WeightedSoftmaxRegression(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets, int free_rows);

    int categories() const { return static_cast<int>(targets_.cols()); }
    int features() const { return static_cast<int>(design_.cols()); }
    int free_rows() const { return free_rows_; }
    int parameter_count() const { return free_rows_ * features(); }

    double objective(const Eigen::MatrixXd& coef) const;
    /// Gradient over the free rows, flattened row-major (row c, feature j) -> c * p + j.
    double gradient(const Eigen::MatrixXd& coef, Eigen::VectorXd& grad) const;
    /// Gradient and the negated Hessian (positive semidefinite).
    double derivatives(const Eigen::MatrixXd& coef, Eigen::VectorXd& grad, Eigen::MatrixXd& neg_hessian) const;

    /// Damped Newton ascent with Armijo backtracking, warm-started from `coef`.
    /// With a finite bound the free rows are first clipped into the box and the
    /// iteration becomes projected Newton: coordinates held at the box by the
    /// gradient are frozen for that step.
    NewtonOutcome maximize(Eigen::MatrixXd& coef, const NewtonConfig& cfg) const;

private:
    const Eigen::MatrixXd& design_;
    const Eigen::MatrixXd& targets_;
    int free_rows_;
};

} // namespace moe
