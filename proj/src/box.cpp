#include "moe/box.hpp"

#include <cmath>
#include <random>

#include "moe/errors.hpp"

namespace moe {

CovariateBox::CovariateBox(std::vector<std::pair<double, double>> bounds) : bounds_(std::move(bounds))
{
    MOE_REQUIRE(!bounds_.empty(), "covariate box needs at least one dimension");
    for (const auto& [lo, hi] : bounds_) {
        MOE_REQUIRE(std::isfinite(lo) && std::isfinite(hi) && lo < hi,
                    "covariate box bounds must be finite with lo < hi");
    }
}

CovariateBox CovariateBox::unit(int d)
{
    MOE_REQUIRE(d >= 1, "dimension must be positive");
    return CovariateBox(std::vector<std::pair<double, double>>(static_cast<std::size_t>(d), {0.0, 1.0}));
}

bool CovariateBox::contains(const Eigen::VectorXd& x) const
{
    if (x.size() != dim()) return false;
    for (int j = 0; j < dim(); ++j) {
        if (x(j) < bounds_[j].first || x(j) > bounds_[j].second) return false;
    }
    return true;
}

double CovariateBox::norm_bound() const
{
    double sq = 0.0;
    for (const auto& [lo, hi] : bounds_) {
        const double m = std::max(std::abs(lo), std::abs(hi));
        sq += m * m;
    }
    return std::sqrt(sq);
}

Eigen::VectorXd CovariateBox::sample(Rng& rng) const
{
    Eigen::VectorXd x(dim());
    for (int j = 0; j < dim(); ++j) {
        std::uniform_real_distribution<double> u(bounds_[j].first, bounds_[j].second);
        x(j) = u(rng);
    }
    return x;
}

} // namespace moe
