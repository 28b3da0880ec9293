#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "moe/gates.hpp"

namespace moe {

/// One expert together with its gating parameters.
///
/// Class indices are zero-based in code; the last class (K - 1) is the
/// reference class whose intercept a[K-1] and slope column b.col(K-1) are
/// pinned to zero.
struct Component {
    double beta0 = 0.0;      ///< log gate weight
    Eigen::VectorXd beta1;   ///< gate slope, length d
    Eigen::VectorXd a;       ///< expert intercepts, length K
    Eigen::MatrixXd b;       ///< expert slopes, d x K

    int dim() const { return static_cast<int>(beta1.size()); }
    int classes() const { return static_cast<int>(a.size()); }
};

/// Builds a component, zero-filling the pinned reference class.
Component make_component(double beta0, Eigen::VectorXd beta1, Eigen::VectorXd a, Eigen::MatrixXd b);

/// G = sum_i exp(beta0_i) delta_(beta1_i, a_i, b_i).
class MixingMeasure {
public:
    /// Validates shapes, finiteness and the reference-class pinning. With
    /// `canonical` set, the last component must also carry beta0 = 0, beta1 = 0.
    MixingMeasure(int d, int K, std::vector<Component> components, bool canonical = false,
                  GateTransform gate = {});

    int dim() const { return d_; }
    int classes() const { return K_; }
    std::size_t size() const { return components_.size(); }
    bool canonical() const { return canonical_; }
    const GateTransform& gate() const { return gate_; }

    const Component& operator[](std::size_t i) const { return components_[i]; }
    const std::vector<Component>& components() const { return components_; }

    MixingMeasure with_gate(GateTransform gate) const;

    bool operator==(const MixingMeasure& other) const;

private:
    int d_;
    int K_;
    std::vector<Component> components_;
    bool canonical_;
    GateTransform gate_;
};

/// Covariates (n x d) and zero-based class labels.
class Dataset {
public:
    Dataset(Eigen::MatrixXd x, std::vector<int> labels, int K);

    std::size_t size() const { return labels_.size(); }
    int dim() const { return static_cast<int>(x_.cols()); }
    int classes() const { return K_; }
    const Eigen::MatrixXd& x() const { return x_; }
    const std::vector<int>& labels() const { return labels_; }
    Eigen::VectorXd row(std::size_t t) const { return x_.row(static_cast<Eigen::Index>(t)).transpose(); }

    bool operator==(const Dataset&) const;

private:
    Eigen::MatrixXd x_;
    std::vector<int> labels_;
    int K_;
};

/// Numerically stable softmax (max-logit subtraction).
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);
double log_sum_exp(const Eigen::VectorXd& v);

/// f(Y = s | x; a, b) for every class s.
Eigen::VectorXd expert_prob(const Component& c, const Eigen::VectorXd& x);

/// Softmax(beta1_i^T M(x) + beta0_i) over the components of G.
Eigen::VectorXd gate_weights(const MixingMeasure& G, const Eigen::VectorXd& x, const GateTransform& M);

/// Conditional class distribution g_G(. | x).
Eigen::VectorXd density(const MixingMeasure& G, const Eigen::VectorXd& x, const GateTransform& M);

/// u(Y = s | x) = exp(beta1^T x) f(Y = s | x; a, b).
double u_value(const Component& c, const Eigen::VectorXd& x, int s);

/// Adds (t0, t1) to every component's (beta0, beta1). The density is unchanged.
MixingMeasure translate_gates(const MixingMeasure& G, double t0, const Eigen::VectorXd& t1);

/// Translates the gates so the last component has beta0 = 0 and beta1 = 0.
MixingMeasure canonicalize(const MixingMeasure& G);

/// sum_t log g_G(y_t | x_t).
double log_likelihood(const MixingMeasure& G, const Dataset& D, const GateTransform& M);

/// Checks the ground-truth assumptions: canonical, distinct experts, some nonzero gate slope.
void require_true_measure(const MixingMeasure& G);

} // namespace moe
