#pragma once

// Shared fixtures and straightforward reference implementations for the tests.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

#include "moe/model.hpp"

namespace moe::testing {

inline Component random_component(std::mt19937_64& rng, int d, int K, double scale = 1.0)
{
    std::normal_distribution<double> n01(0.0, scale);
    Component c{n01(rng), Eigen::VectorXd(d), Eigen::VectorXd::Zero(K), Eigen::MatrixXd::Zero(d, K)};
    for (int r = 0; r < d; ++r) c.beta1(r) = n01(rng);
    for (int l = 0; l < K - 1; ++l) {
        c.a(l) = n01(rng);
        for (int r = 0; r < d; ++r) c.b(r, l) = n01(rng);
    }
    return c;
}

inline MixingMeasure random_measure(std::mt19937_64& rng, int d, int K, int k, double scale = 1.0,
                                    GateTransform gate = {})
{
    std::vector<Component> comps;
    for (int i = 0; i < k; ++i) comps.push_back(random_component(rng, d, K, scale));
    return MixingMeasure(d, K, std::move(comps), false, gate);
}

inline Eigen::VectorXd uniform_point(std::mt19937_64& rng, int d, double lo = 0.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd x(d);
    for (int r = 0; r < d; ++r) x(r) = u(rng);
    return x;
}

/// Element-wise transform written out independently of GateTransform::apply.
inline double transform_scalar(const GateTransform& M, double v)
{
    switch (M.kind()) {
    case GateKind::identity: return v;
    case GateKind::sigmoid: return 1.0 / (1.0 + std::exp(-v));
    case GateKind::tanh: return std::tanh(v);
    case GateKind::cos: return std::cos(v);
    case GateKind::sin: return std::sin(v);
    case GateKind::log_abs: return std::log(std::fabs(v));
    case GateKind::power: return std::pow(v, M.exponent());
    case GateKind::normalize: break;
    }
    return v;
}

inline Eigen::VectorXd transform_naive(const GateTransform& M, const Eigen::VectorXd& x)
{
    if (M.kind() == GateKind::normalize) return x / x.norm();
    Eigen::VectorXd out(x.size());
    for (Eigen::Index r = 0; r < x.size(); ++r) out(r) = transform_scalar(M, x(r));
    return out;
}

/// Direct evaluation of the mixture formula: plain exponentials, no stabilization.
inline std::vector<double> density_naive(const MixingMeasure& G, const Eigen::VectorXd& x, const GateTransform& M)
{
    const Eigen::VectorXd z = transform_naive(M, x);
    const int K = G.classes();
    std::vector<double> gate_num;
    double gate_den = 0.0;
    for (const Component& c : G.components()) {
        double logit = c.beta0;
        for (int r = 0; r < G.dim(); ++r) logit += c.beta1(r) * z(r);
        gate_num.push_back(std::exp(logit));
        gate_den += gate_num.back();
    }
    std::vector<double> out(static_cast<std::size_t>(K), 0.0);
    for (std::size_t i = 0; i < G.size(); ++i) {
        const Component& c = G[i];
        std::vector<double> e(static_cast<std::size_t>(K));
        double den = 0.0;
        for (int s = 0; s < K; ++s) {
            double h = c.a(s);
            for (int r = 0; r < G.dim(); ++r) h += c.b(r, s) * x(r);
            e[static_cast<std::size_t>(s)] = std::exp(h);
            den += e[static_cast<std::size_t>(s)];
        }
        for (int s = 0; s < K; ++s)
            out[static_cast<std::size_t>(s)] += gate_num[i] / gate_den * e[static_cast<std::size_t>(s)] / den;
    }
    return out;
}

/// Central finite-difference gradient of a scalar function of a vector.
template <typename F>
Eigen::VectorXd central_gradient(F&& f, const Eigen::VectorXd& at, double h)
{
    Eigen::VectorXd g(at.size());
    for (Eigen::Index i = 0; i < at.size(); ++i) {
        Eigen::VectorXd up = at, dn = at;
        up(i) += h;
        dn(i) -= h;
        g(i) = (f(up) - f(dn)) / (2.0 * h);
    }
    return g;
}

inline Eigen::VectorXd vec1(double v)
{
    Eigen::VectorXd x(1);
    x << v;
    return x;
}

} // namespace moe::testing
