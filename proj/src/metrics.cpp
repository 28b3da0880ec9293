#include "moe/metrics.hpp"

#include <cmath>
#include <limits>

#include "moe/errors.hpp"

namespace moe {

namespace {

constexpr std::size_t kMcBlock = 4096;

void require_comparable(const MixingMeasure& fit, const MixingMeasure& truth)
{
    MOE_REQUIRE(fit.canonical() && truth.canonical(), "Voronoi quantities need canonical measures");
    MOE_REQUIRE(fit.dim() == truth.dim() && fit.classes() == truth.classes(),
                "measures disagree on (d, K)");
}

/// Mean and standard error of f(x) over the MC design, accumulated block by block.
template <typename F>
McEstimate mc_average(int d, const McConfig& mc, F&& f)
{
    MOE_REQUIRE(mc.samples >= 1, "Monte Carlo needs at least one sample");
    const CovariateBox box = mc.box ? *mc.box : CovariateBox::unit(d);
    MOE_REQUIRE(box.dim() == d, "Monte Carlo box has the wrong dimension");
    double sum = 0.0;
    double sum_sq = 0.0;
    const std::size_t blocks = (mc.samples + kMcBlock - 1) / kMcBlock;
    for (std::size_t blk = 0; blk < blocks; ++blk) {
        Rng rng = make_rng(derive_seed(mc.seed, {static_cast<std::uint64_t>(StreamRole::monte_carlo), blk}));
        const std::size_t count = std::min(kMcBlock, mc.samples - blk * kMcBlock);
        double bs = 0.0;
        double bss = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double v = f(box.sample(rng));
            bs += v;
            bss += v * v;
        }
        sum += bs;
        sum_sq += bss;
    }
    const double n = static_cast<double>(mc.samples);
    const double mean = sum / n;
    const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
    return {mean, std::sqrt(var / n)};
}

} // namespace

Eigen::VectorXd atom_vector(const Component& c)
{
    const int d = c.dim();
    const int K = c.classes();
    Eigen::VectorXd theta(d + (K - 1) * (1 + d));
    theta.head(d) = c.beta1;
    theta.segment(d, K - 1) = c.a.head(K - 1);
    for (int l = 0; l < K - 1; ++l) theta.segment(d + (K - 1) + l * d, d) = c.b.col(l);
    return theta;
}

VoronoiAssignment voronoi_cells(const MixingMeasure& fit, const MixingMeasure& truth)
{
    require_comparable(fit, truth);
    VoronoiAssignment out;
    out.cells.resize(truth.size());
    out.owner.resize(fit.size());
    out.distances.resize(fit.size());
    std::vector<Eigen::VectorXd> atoms;
    for (const Component& c : truth.components()) atoms.push_back(atom_vector(c));
    for (std::size_t i = 0; i < fit.size(); ++i) {
        const Eigen::VectorXd theta = atom_vector(fit[i]);
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            const double dist = (theta - atoms[j]).norm();
            if (dist < best_dist) {  // strict: ties keep the smaller index
                best = j;
                best_dist = dist;
            }
        }
        out.owner[i] = best;
        out.distances[i] = best_dist;
        out.cells[best].push_back(i);
    }
    return out;
}

double voronoi_loss(const MixingMeasure& fit, const MixingMeasure& truth, double r)
{
    MOE_REQUIRE(r >= 1.0, "Voronoi loss order r must be at least 1");
    const VoronoiAssignment cells = voronoi_cells(fit, truth);
    const int K = truth.classes();
    double loss = 0.0;
    for (std::size_t j = 0; j < truth.size(); ++j) {
        const Component& star = truth[j];
        const auto& members = cells.cells[j];
        double mass = 0.0;
        for (std::size_t i : members) mass += std::exp(fit[i].beta0);
        loss += std::abs(mass - std::exp(star.beta0));

        const double order = members.size() > 1 ? r : 1.0;
        for (std::size_t i : members) {
            const Component& c = fit[i];
            double term = std::pow((c.beta1 - star.beta1).norm(), order);
            for (int l = 0; l < K - 1; ++l) {
                term += std::pow(std::abs(c.a(l) - star.a(l)), order);
                term += std::pow((c.b.col(l) - star.b.col(l)).norm(), order);
            }
            loss += std::exp(c.beta0) * term;
        }
    }
    return loss;
}

double hellinger(const Eigen::VectorXd& p, const Eigen::VectorXd& q)
{
    MOE_REQUIRE(p.size() == q.size(), "distributions differ in support size");
    const double h2 = 0.5 * (p.array().sqrt() - q.array().sqrt()).square().sum();
    return std::sqrt(std::min(1.0, std::max(0.0, h2)));
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q)
{
    MOE_REQUIRE(p.size() == q.size(), "distributions differ in support size");
    return std::min(1.0, 0.5 * (p - q).cwiseAbs().sum());
}

McEstimate hellinger_expect(const MixingMeasure& A, const MixingMeasure& B, const GateTransform& MA,
                            const GateTransform& MB, const McConfig& mc)
{
    MOE_REQUIRE(A.dim() == B.dim() && A.classes() == B.classes(), "measures disagree on (d, K)");
    return mc_average(A.dim(), mc, [&](const Eigen::VectorXd& x) {
        return hellinger(density(A, x, MA), density(B, x, MB));
    });
}

McEstimate tv_expect(const MixingMeasure& A, const MixingMeasure& B, const GateTransform& MA,
                     const GateTransform& MB, const McConfig& mc)
{
    MOE_REQUIRE(A.dim() == B.dim() && A.classes() == B.classes(), "measures disagree on (d, K)");
    return mc_average(A.dim(), mc, [&](const Eigen::VectorXd& x) {
        return total_variation(density(A, x, MA), density(B, x, MB));
    });
}

std::vector<Eigen::VectorXd> mc_points(int d, const McConfig& mc)
{
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(mc.samples);
    mc_average(d, mc, [&](const Eigen::VectorXd& x) {
        pts.push_back(x);
        return 0.0;
    });
    return pts;
}

} // namespace moe
