#include "moe/gates.hpp"

#include <cmath>
#include <string>

#include "moe/errors.hpp"

namespace moe {

GateTransform GateTransform::power(int m)
{
    MOE_REQUIRE(m >= 3, "power gate needs an exponent >= 3");
    return GateTransform(GateKind::power, m);
}

GateTransform GateTransform::parse(std::string_view tag)
{
    if (tag == "identity") return identity();
    if (tag == "sigmoid") return sigmoid();
    if (tag == "tanh") return tanh();
    if (tag == "cos") return cos();
    if (tag == "sin") return sin();
    if (tag == "logabs") return log_abs();
    if (tag == "normalize") return normalize();
    if (tag.starts_with("power") && tag.size() > 5) {
        const std::string digits(tag.substr(5));
        if (digits.find_first_not_of("0123456789") == std::string::npos && digits.size() < 6)
            return power(std::stoi(digits));
    }
    throw ContractViolation("unknown gate transform '" + std::string(tag) + "'");
}

std::string GateTransform::name() const
{
    switch (kind_) {
    case GateKind::identity: return "identity";
    case GateKind::sigmoid: return "sigmoid";
    case GateKind::tanh: return "tanh";
    case GateKind::cos: return "cos";
    case GateKind::sin: return "sin";
    case GateKind::log_abs: return "logabs";
    case GateKind::power: return "power" + std::to_string(exponent_);
    case GateKind::normalize: return "normalize";
    }
    return "identity";
}

bool GateTransform::in_domain(const Eigen::VectorXd& x, double margin) const
{
    if (!x.allFinite()) return false;
    switch (kind_) {
    case GateKind::log_abs:
        for (Eigen::Index j = 0; j < x.size(); ++j)
            if (std::abs(x(j)) <= margin) return false;
        return true;
    case GateKind::normalize:
        return x.norm() > margin;
    default:
        return true;
    }
}

Eigen::VectorXd GateTransform::apply(const Eigen::VectorXd& x) const
{
    Eigen::VectorXd out(x.size());
    switch (kind_) {
    case GateKind::identity:
        return x;
    case GateKind::sigmoid:
        for (Eigen::Index j = 0; j < x.size(); ++j) out(j) = 1.0 / (1.0 + std::exp(-x(j)));
        return out;
    case GateKind::tanh:
        return x.array().tanh().matrix();
    case GateKind::cos:
        return x.array().cos().matrix();
    case GateKind::sin:
        return x.array().sin().matrix();
    case GateKind::log_abs:
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            if (x(j) == 0.0)
                throw DomainError("logabs gate undefined at coordinate " + std::to_string(j + 1) + " (x = 0)");
            out(j) = std::log(std::abs(x(j)));
        }
        return out;
    case GateKind::power:
        for (Eigen::Index j = 0; j < x.size(); ++j) out(j) = std::pow(x(j), exponent_);
        return out;
    case GateKind::normalize: {
        const double norm = x.norm();
        if (norm == 0.0) throw DomainError("normalize gate undefined at x = 0 (all coordinates zero)");
        return x / norm;
    }
    }
    return x;
}

int monomial_count(int d)
{
    const int m = 2 * d;
    return 1 + m + m * (m + 1) / 2;
}

IndependenceReport independence_check(const GateTransform& transform, int d, int n_samples, double rel_tol,
                                      std::uint64_t seed)
{
    return independence_check(transform, CovariateBox::unit(d), n_samples, rel_tol, seed);
}

IndependenceReport independence_check(const GateTransform& transform, const CovariateBox& box, int n_samples,
                                      double rel_tol, std::uint64_t seed)
{
    constexpr double kExclusion = 1e-6;
    const int d = box.dim();
    const int cols = monomial_count(d);
    MOE_REQUIRE(n_samples >= cols, "independence check needs at least as many samples as monomials");
    MOE_REQUIRE(rel_tol > 0.0, "rel_tol must be positive");

    Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(StreamRole::design)}));
    Eigen::MatrixXd design(n_samples, cols);
    Eigen::VectorXd z(2 * d);
    int row = 0;
    int attempts = 0;
    while (row < n_samples) {
        if (++attempts > 1000 * n_samples)
            throw DomainError("could not sample covariates inside the gate transform's domain");
        const Eigen::VectorXd x = box.sample(rng);
        if (!transform.in_domain(x, kExclusion)) continue;
        z << x, transform.apply(x);
        // graded lexicographic: 1, z_i, z_i z_j (i <= j)
        int col = 0;
        design(row, col++) = 1.0;
        for (int i = 0; i < 2 * d; ++i) design(row, col++) = z(i);
        for (int i = 0; i < 2 * d; ++i)
            for (int j = i; j < 2 * d; ++j) design(row, col++) = z(i) * z(j);
        ++row;
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(design);
    const Eigen::VectorXd& sv = svd.singularValues();
    IndependenceReport report;
    report.monomial_count = cols;
    report.max_singular_value = sv.size() > 0 ? sv(0) : 0.0;
    report.min_singular_value = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
    report.exclusion_radius =
        (transform.kind() == GateKind::log_abs || transform.kind() == GateKind::normalize) ? kExclusion : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * report.max_singular_value) ++report.numeric_rank;
    report.pass = report.numeric_rank == cols;
    return report;
}

} // namespace moe
