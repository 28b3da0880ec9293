#include "moe/softmax_regression.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "moe/errors.hpp"

namespace moe {

namespace {

enum class Want { value, gradient, hessian };

double evaluate(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets, int free_rows,
                const Eigen::MatrixXd& coef, Want want, Eigen::VectorXd* grad, Eigen::MatrixXd* neg_hess)
{
    const Eigen::Index n = design.rows();
    const int p = static_cast<int>(design.cols());
    const int C = static_cast<int>(targets.cols());
    const int P = free_rows * p;
    MOE_REQUIRE(coef.rows() == C && coef.cols() == p, "coefficient matrix has the wrong shape");

    if (want != Want::value) grad->setZero(P);
    if (want == Want::hessian) neg_hess->setZero(P, P);

    std::vector<double> eta(C), pi(C), xt(p);
    double obj = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        double w = 0.0;
        for (int c = 0; c < C; ++c) w += targets(t, c);
        if (w == 0.0) continue;
        for (int j = 0; j < p; ++j) xt[j] = design(t, j);
        double m = -INFINITY;
        for (int c = 0; c < C; ++c) {
            double e = 0.0;
            for (int j = 0; j < p; ++j) e += coef(c, j) * xt[j];
            eta[c] = e;
            m = std::max(m, e);
        }
        double s = 0.0;
        for (int c = 0; c < C; ++c) {
            pi[c] = std::exp(eta[c] - m);
            s += pi[c];
        }
        const double lse = m + std::log(s);
        double lin = 0.0;
        for (int c = 0; c < C; ++c) {
            lin += targets(t, c) * eta[c];
            pi[c] /= s;
        }
        obj += lin - w * lse;
        if (want == Want::value) continue;

        for (int c = 0; c < free_rows; ++c) {
            const double r = targets(t, c) - w * pi[c];
            for (int j = 0; j < p; ++j) (*grad)(c * p + j) += r * xt[j];
        }
        if (want != Want::hessian) continue;
        for (int c = 0; c < free_rows; ++c) {
            for (int c2 = c; c2 < free_rows; ++c2) {
                const double h = w * pi[c] * ((c == c2 ? 1.0 : 0.0) - pi[c2]);
                for (int j = 0; j < p; ++j)
                    for (int j2 = 0; j2 < p; ++j2) (*neg_hess)(c * p + j, c2 * p + j2) += h * xt[j] * xt[j2];
            }
        }
    }
    if (want == Want::hessian) {
        for (int c = 0; c < free_rows; ++c)
            for (int c2 = c + 1; c2 < free_rows; ++c2)
                neg_hess->block(c2 * p, c * p, p, p) = neg_hess->block(c * p, c2 * p, p, p).transpose();
    }
    return obj;
}

} // namespace

WeightedSoftmaxRegression::WeightedSoftmaxRegression(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets,
                                                     int free_rows)
    : design_(design), targets_(targets), free_rows_(free_rows)
{
    MOE_REQUIRE(design.rows() == targets.rows(), "design and targets differ in row count");
    MOE_REQUIRE(targets.cols() >= 1, "at least one category required");
    MOE_REQUIRE(free_rows >= 0 && free_rows <= targets.cols(), "free_rows out of range");
}

double WeightedSoftmaxRegression::objective(const Eigen::MatrixXd& coef) const
{
    return evaluate(design_, targets_, free_rows_, coef, Want::value, nullptr, nullptr);
}

double WeightedSoftmaxRegression::gradient(const Eigen::MatrixXd& coef, Eigen::VectorXd& grad) const
{
    return evaluate(design_, targets_, free_rows_, coef, Want::gradient, &grad, nullptr);
}

double WeightedSoftmaxRegression::derivatives(const Eigen::MatrixXd& coef, Eigen::VectorXd& grad,
                                              Eigen::MatrixXd& neg_hessian) const
{
    return evaluate(design_, targets_, free_rows_, coef, Want::hessian, &grad, &neg_hessian);
}

NewtonOutcome WeightedSoftmaxRegression::maximize(Eigen::MatrixXd& coef, const NewtonConfig& cfg) const
{
    MOE_REQUIRE(cfg.bound > 0.0, "Newton box bound must be positive");
    NewtonOutcome out;
    const int p = features();
    const int P = parameter_count();
    const double B = cfg.bound;
    const bool boxed = std::isfinite(B);
    if (boxed) coef.topRows(free_rows_) = coef.topRows(free_rows_).cwiseMax(-B).cwiseMin(B);

    Eigen::VectorXd grad;
    Eigen::MatrixXd neg_hess;
    double f = derivatives(coef, grad, neg_hess);
    if (P == 0) {
        out.objective = f;
        out.converged = true;
        return out;
    }

    // Free-coordinate mask: a coordinate sitting on the box with the gradient pointing out is held.
    std::vector<char> held(static_cast<std::size_t>(P), 0);
    auto refresh_held = [&]() {
        for (int c = 0; c < free_rows_; ++c) {
            for (int j = 0; j < p; ++j) {
                const double v = coef(c, j);
                const double g = grad(c * p + j);
                held[static_cast<std::size_t>(c * p + j)] = boxed && ((v >= B && g > 0.0) || (v <= -B && g < 0.0));
            }
        }
    };
    auto projected_norm = [&]() {
        double s2 = 0.0;
        for (int i = 0; i < P; ++i)
            if (!held[static_cast<std::size_t>(i)]) s2 += grad(i) * grad(i);
        return std::sqrt(s2);
    };

    Eigen::MatrixXd trial;
    auto line_search = [&](const Eigen::VectorXd& dir, double& f_trial) {
        double step = 1.0;
        for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
            trial = coef;
            double gain = 0.0;
            for (int c = 0; c < free_rows_; ++c) {
                for (int j = 0; j < p; ++j) {
                    double v = coef(c, j) + step * dir(c * p + j);
                    if (boxed) v = std::clamp(v, -B, B);
                    gain += grad(c * p + j) * (v - coef(c, j));
                    trial(c, j) = v;
                }
            }
            f_trial = objective(trial);
            if (std::isfinite(f_trial) && f_trial > f && f_trial >= f + cfg.armijo * gain) return true;
            step *= cfg.line_search_shrink;
        }
        return false;
    };

    refresh_held();
    for (int iter = 0; iter < cfg.max_inner; ++iter) {
        if (projected_norm() <= cfg.grad_tol) {
            out.converged = true;
            break;
        }

        std::vector<int> idx;
        for (int i = 0; i < P; ++i)
            if (!held[static_cast<std::size_t>(i)]) idx.push_back(i);
        const auto m = static_cast<Eigen::Index>(idx.size());
        Eigen::VectorXd g_free(m);
        Eigen::MatrixXd H_free(m, m);
        for (Eigen::Index a = 0; a < m; ++a) {
            g_free(a) = grad(idx[static_cast<std::size_t>(a)]);
            for (Eigen::Index b = 0; b < m; ++b)
                H_free(a, b) = neg_hess(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
        }

        Eigen::VectorXd d_free;
        double damping = cfg.damping;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Eigen::MatrixXd A = H_free;
            A.diagonal().array() += damping;
            Eigen::LLT<Eigen::MatrixXd> llt(A);
            if (llt.info() == Eigen::Success) {
                d_free = llt.solve(g_free);
                if (d_free.allFinite()) break;
            }
            d_free.resize(0);
            damping = std::max(damping * 10.0, 1e-10);
        }
        if (d_free.size() != m) d_free = g_free;  // steepest ascent fallback

        const double decrement = g_free.dot(d_free);
        if (decrement <= cfg.decrement_tol * (1.0 + std::abs(f))) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd dir = Eigen::VectorXd::Zero(P);
        for (Eigen::Index a = 0; a < m; ++a) dir(idx[static_cast<std::size_t>(a)]) = d_free(a);

        double f_trial = f;
        bool accepted = line_search(dir, f_trial);
        if (!accepted && boxed) {
            // Clipping can spoil a Newton direction; the projected gradient is still an ascent path.
            for (int i = 0; i < P; ++i) dir(i) = held[static_cast<std::size_t>(i)] ? 0.0 : grad(i);
            accepted = line_search(dir, f_trial);
        }
        if (!accepted) {
            out.stalled = out.iterations == 0;
            break;
        }
        coef = trial;
        ++out.iterations;
        f = derivatives(coef, grad, neg_hess);
        refresh_held();
    }
    out.objective = f;
    out.grad_norm = projected_norm();
    if (out.grad_norm <= cfg.grad_tol) out.converged = true;
    return out;
}

} // namespace moe
