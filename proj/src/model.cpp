#include "moe/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "moe/errors.hpp"

namespace moe {

namespace {

void check_component(const Component& c, int d, int K, std::size_t index)
{
    const std::string where = "component " + std::to_string(index + 1) + ": ";
    MOE_REQUIRE(c.beta1.size() == d, where + "beta1 must have length d");
    MOE_REQUIRE(c.a.size() == K, where + "a must have length K");
    MOE_REQUIRE(c.b.rows() == d && c.b.cols() == K, where + "b must be d x K");
    MOE_REQUIRE(std::isfinite(c.beta0) && c.beta1.allFinite() && c.a.allFinite() && c.b.allFinite(),
                where + "parameters must be finite");
    MOE_REQUIRE(c.a(K - 1) == 0.0, where + "reference-class intercept a[K] must be 0");
    MOE_REQUIRE((c.b.col(K - 1).array() == 0.0).all(), where + "reference-class slope b[:,K] must be 0");
}

void check_dims(const MixingMeasure& G, const Eigen::VectorXd& x)
{
    MOE_REQUIRE(x.size() == G.dim(), "covariate has length " + std::to_string(x.size()) + ", measure expects " +
                                         std::to_string(G.dim()));
}

} // namespace

Component make_component(double beta0, Eigen::VectorXd beta1, Eigen::VectorXd a, Eigen::MatrixXd b)
{
    Component c{beta0, std::move(beta1), std::move(a), std::move(b)};
    if (c.a.size() > 0) c.a(c.a.size() - 1) = 0.0;
    if (c.b.cols() > 0) c.b.col(c.b.cols() - 1).setZero();
    return c;
}

MixingMeasure::MixingMeasure(int d, int K, std::vector<Component> components, bool canonical, GateTransform gate)
    : d_(d), K_(K), components_(std::move(components)), canonical_(canonical), gate_(gate)
{
    MOE_REQUIRE(d_ >= 1, "dimension d must be positive");
    MOE_REQUIRE(K_ >= 2, "number of classes K must be at least 2");
    MOE_REQUIRE(!components_.empty(), "a mixing measure needs at least one component");
    for (std::size_t i = 0; i < components_.size(); ++i) check_component(components_[i], d_, K_, i);
    if (canonical_) {
        const Component& last = components_.back();
        MOE_REQUIRE(last.beta0 == 0.0 && (last.beta1.array() == 0.0).all(),
                    "canonical measure needs beta0 = 0 and beta1 = 0 on its last component");
    }
}

MixingMeasure MixingMeasure::with_gate(GateTransform gate) const
{
    MixingMeasure copy = *this;
    copy.gate_ = gate;
    return copy;
}

bool MixingMeasure::operator==(const MixingMeasure& o) const
{
    if (d_ != o.d_ || K_ != o.K_ || canonical_ != o.canonical_ || !(gate_ == o.gate_) ||
        components_.size() != o.components_.size())
        return false;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const Component& p = components_[i];
        const Component& q = o.components_[i];
        if (p.beta0 != q.beta0 || p.beta1 != q.beta1 || p.a != q.a || p.b != q.b) return false;
    }
    return true;
}

Dataset::Dataset(Eigen::MatrixXd x, std::vector<int> labels, int K) : x_(std::move(x)), labels_(std::move(labels)), K_(K)
{
    MOE_REQUIRE(K_ >= 2, "dataset needs K >= 2");
    MOE_REQUIRE(!labels_.empty(), "dataset needs at least one row");
    MOE_REQUIRE(static_cast<std::size_t>(x_.rows()) == labels_.size(), "covariate rows and labels differ in count");
    MOE_REQUIRE(x_.cols() >= 1, "covariates need at least one column");
    MOE_REQUIRE(x_.allFinite(), "covariates must be finite");
    for (std::size_t t = 0; t < labels_.size(); ++t) {
        if (labels_[t] < 0 || labels_[t] >= K_)
            throw ContractViolation("label at row " + std::to_string(t + 1) + " out of range");
    }
}

bool Dataset::operator==(const Dataset& o) const
{
    return K_ == o.K_ && labels_ == o.labels_ && x_.rows() == o.x_.rows() && x_.cols() == o.x_.cols() && x_ == o.x_;
}

double log_sum_exp(const Eigen::VectorXd& v)
{
    const double m = v.maxCoeff();
    return m + std::log((v.array() - m).exp().sum());
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits)
{
    Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp().matrix();
    return e / e.sum();
}

Eigen::VectorXd expert_prob(const Component& c, const Eigen::VectorXd& x)
{
    MOE_REQUIRE(x.size() == c.dim(), "covariate length does not match the expert");
    const Eigen::VectorXd logits = c.a + c.b.transpose() * x;
    return softmax(logits);
}

Eigen::VectorXd gate_weights(const MixingMeasure& G, const Eigen::VectorXd& x, const GateTransform& M)
{
    check_dims(G, x);
    const Eigen::VectorXd z = M.apply(x);
    Eigen::VectorXd logits(static_cast<Eigen::Index>(G.size()));
    for (std::size_t i = 0; i < G.size(); ++i) logits(static_cast<Eigen::Index>(i)) = G[i].beta1.dot(z) + G[i].beta0;
    return softmax(logits);
}

Eigen::VectorXd density(const MixingMeasure& G, const Eigen::VectorXd& x, const GateTransform& M)
{
    const Eigen::VectorXd w = gate_weights(G, x, M);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(G.classes());
    for (std::size_t i = 0; i < G.size(); ++i) g += w(static_cast<Eigen::Index>(i)) * expert_prob(G[i], x);
    return g;
}

double u_value(const Component& c, const Eigen::VectorXd& x, int s)
{
    MOE_REQUIRE(s >= 0 && s < c.classes(), "class index out of range");
    return std::exp(c.beta1.dot(x)) * expert_prob(c, x)(s);
}

MixingMeasure translate_gates(const MixingMeasure& G, double t0, const Eigen::VectorXd& t1)
{
    MOE_REQUIRE(t1.size() == G.dim(), "translation must have length d");
    std::vector<Component> comps = G.components();
    for (Component& c : comps) {
        c.beta0 += t0;
        c.beta1 += t1;
    }
    const Component& last = comps.back();
    const bool canonical = last.beta0 == 0.0 && (last.beta1.array() == 0.0).all();
    return MixingMeasure(G.dim(), G.classes(), std::move(comps), canonical, G.gate());
}

MixingMeasure canonicalize(const MixingMeasure& G)
{
    const Component& last = G.components().back();
    const double t0 = last.beta0;
    const Eigen::VectorXd t1 = last.beta1;
    std::vector<Component> comps = G.components();
    for (Component& c : comps) {
        c.beta0 -= t0;
        c.beta1 -= t1;
    }
    // exact zeros on the reference component regardless of rounding
    comps.back().beta0 = 0.0;
    comps.back().beta1.setZero();
    return MixingMeasure(G.dim(), G.classes(), std::move(comps), true, G.gate());
}

double log_likelihood(const MixingMeasure& G, const Dataset& D, const GateTransform& M)
{
    MOE_REQUIRE(D.dim() == G.dim() && D.classes() == G.classes(), "dataset and measure dimensions differ");
    double total = 0.0;
    for (std::size_t t = 0; t < D.size(); ++t) {
        const Eigen::VectorXd g = density(G, D.row(t), M);
        total += std::log(g(D.labels()[t]));
    }
    return total;
}

void require_true_measure(const MixingMeasure& G)
{
    MOE_REQUIRE(G.canonical(), "true measure must be canonical");
    bool any_slope = false;
    for (const Component& c : G.components()) any_slope = any_slope || (c.beta1.array() != 0.0).any();
    MOE_REQUIRE(any_slope, "true measure needs at least one nonzero gate slope");
    for (std::size_t i = 0; i < G.size(); ++i)
        for (std::size_t j = i + 1; j < G.size(); ++j)
            MOE_REQUIRE(G[i].a != G[j].a || G[i].b != G[j].b, "true experts must be pairwise distinct");
}

} // namespace moe
