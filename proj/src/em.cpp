#include "moe/em.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "moe/errors.hpp"

namespace moe {

namespace {

/// Coefficient-matrix view of a measure, the working representation of EM.
struct Params {
    Eigen::MatrixXd gate;                  // k x (d+1): (beta0, beta1)
    std::vector<Eigen::MatrixXd> experts;  // K x (d+1): (a_l, b_l)
};

Params to_params(const MixingMeasure& G)
{
    Params p;
    p.gate = gate_coefficients(G);
    for (const Component& c : G.components()) p.experts.push_back(expert_coefficients(c));
    return p;
}

MixingMeasure to_measure(const Params& p, int d, int K, const GateTransform& M)
{
    std::vector<Component> comps;
    comps.reserve(p.experts.size());
    for (std::size_t i = 0; i < p.experts.size(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        Component c;
        c.beta0 = p.gate(row, 0);
        c.beta1 = p.gate.row(row).tail(d).transpose();
        c.a = p.experts[i].col(0);
        c.b = p.experts[i].rightCols(d).transpose();
        c.a(K - 1) = 0.0;
        c.b.col(K - 1).setZero();
        comps.push_back(std::move(c));
    }
    const Component& last = comps.back();
    const bool canonical = last.beta0 == 0.0 && (last.beta1.array() == 0.0).all();
    return MixingMeasure(d, K, std::move(comps), canonical, M);
}

/// Responsibilities and log-likelihood in one pass, using log-sum-exp per row.
double responsibilities(const Params& p, const Eigen::MatrixXd& zg, const Eigen::MatrixXd& xe,
                        const std::vector<int>& labels, Eigen::MatrixXd& R)
{
    const Eigen::Index n = zg.rows();
    const int k = static_cast<int>(p.gate.rows());
    const int K = static_cast<int>(p.experts.front().rows());
    const int pg = static_cast<int>(zg.cols());
    const int pe = static_cast<int>(xe.cols());
    R.resize(n, k);
    std::vector<double> lg(k), lnum(k), eta(K);
    double total = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        double gmax = -INFINITY;
        for (int i = 0; i < k; ++i) {
            double v = 0.0;
            for (int j = 0; j < pg; ++j) v += p.gate(i, j) * zg(t, j);
            lg[i] = v;
            gmax = std::max(gmax, v);
        }
        double gs = 0.0;
        for (int i = 0; i < k; ++i) gs += std::exp(lg[i] - gmax);
        const double glse = gmax + std::log(gs);

        const int y = labels[static_cast<std::size_t>(t)];
        double nmax = -INFINITY;
        for (int i = 0; i < k; ++i) {
            const Eigen::MatrixXd& E = p.experts[i];
            double emax = -INFINITY;
            for (int l = 0; l < K; ++l) {
                double v = 0.0;
                for (int j = 0; j < pe; ++j) v += E(l, j) * xe(t, j);
                eta[l] = v;
                emax = std::max(emax, v);
            }
            double es = 0.0;
            for (int l = 0; l < K; ++l) es += std::exp(eta[l] - emax);
            lnum[i] = (lg[i] - glse) + (eta[y] - emax - std::log(es));
            nmax = std::max(nmax, lnum[i]);
        }
        double ns = 0.0;
        for (int i = 0; i < k; ++i) ns += std::exp(lnum[i] - nmax);
        const double ll = nmax + std::log(ns);
        for (int i = 0; i < k; ++i) R(t, i) = std::exp(lnum[i] - ll);
        total += ll;
    }
    return total;
}

/// One M-step in place. Returns true when some sub-problem failed to improve.
bool maximize_in_place(Params& p, const Eigen::MatrixXd& R, const Eigen::MatrixXd& zg, const Eigen::MatrixXd& xe,
                       const std::vector<int>& labels, const FitConfig& cfg)
{
    const int k = static_cast<int>(p.gate.rows());
    const int K = static_cast<int>(p.experts.front().rows());
    bool warning = false;

    const int gate_free = cfg.pinning == GatePinning::last_component ? k - 1 : k;
    {
        WeightedSoftmaxRegression gate_problem(zg, R, gate_free);
        Eigen::MatrixXd coef = p.gate;
        const NewtonOutcome out = gate_problem.maximize(coef, cfg.newton);
        warning = warning || out.stalled;
        p.gate = coef;
    }

    Eigen::MatrixXd targets(zg.rows(), K);
    for (int i = 0; i < k; ++i) {
        targets.setZero();
        for (Eigen::Index t = 0; t < targets.rows(); ++t) targets(t, labels[static_cast<std::size_t>(t)]) = R(t, i);
        WeightedSoftmaxRegression expert_problem(xe, targets, K - 1);
        Eigen::MatrixXd coef = p.experts[i];
        const NewtonOutcome out = expert_problem.maximize(coef, cfg.newton);
        warning = warning || out.stalled;
        p.experts[i] = coef;
    }
    return warning;
}

void check_fit_inputs(const MixingMeasure& G, const Dataset& D)
{
    MOE_REQUIRE(D.dim() == G.dim(), "dataset dimension " + std::to_string(D.dim()) +
                                        " does not match measure dimension " + std::to_string(G.dim()));
    MOE_REQUIRE(D.classes() == G.classes(), "dataset and measure disagree on the number of classes");
}

void check_config(const FitConfig& cfg)
{
    MOE_REQUIRE(cfg.k >= 1, "k must be positive");
    MOE_REQUIRE(cfg.max_iter >= 0, "max_iter must be nonnegative");
    MOE_REQUIRE(cfg.tol > 0.0, "tol must be positive");
    MOE_REQUIRE(cfg.newton.max_inner >= 0, "newton.max_inner must be nonnegative");
    MOE_REQUIRE(cfg.newton.damping >= 0.0, "newton.damping must be nonnegative");
    MOE_REQUIRE(cfg.newton.line_search_shrink > 0.0 && cfg.newton.line_search_shrink < 1.0,
                "newton.line_search_shrink must lie in (0, 1)");
    MOE_REQUIRE(cfg.newton.armijo > 0.0 && cfg.newton.armijo < 1.0, "newton.armijo must lie in (0, 1)");
}

} // namespace

Eigen::MatrixXd gate_design(const Dataset& D, const GateTransform& M)
{
    const auto n = static_cast<Eigen::Index>(D.size());
    Eigen::MatrixXd z(n, D.dim() + 1);
    z.col(0).setOnes();
    for (Eigen::Index t = 0; t < n; ++t) z.row(t).tail(D.dim()) = M.apply(D.row(static_cast<std::size_t>(t))).transpose();
    return z;
}

Eigen::MatrixXd expert_design(const Dataset& D)
{
    Eigen::MatrixXd z(static_cast<Eigen::Index>(D.size()), D.dim() + 1);
    z.col(0).setOnes();
    z.rightCols(D.dim()) = D.x();
    return z;
}

Eigen::MatrixXd gate_coefficients(const MixingMeasure& G)
{
    Eigen::MatrixXd W(static_cast<Eigen::Index>(G.size()), G.dim() + 1);
    for (std::size_t i = 0; i < G.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        W(r, 0) = G[i].beta0;
        W.row(r).tail(G.dim()) = G[i].beta1.transpose();
    }
    return W;
}

Eigen::MatrixXd expert_coefficients(const Component& c)
{
    Eigen::MatrixXd W(c.classes(), c.dim() + 1);
    W.col(0) = c.a;
    W.rightCols(c.dim()) = c.b.transpose();
    return W;
}

Eigen::MatrixXd expert_targets(const Eigen::MatrixXd& R, const Dataset& D, int component)
{
    MOE_REQUIRE(component >= 0 && component < R.cols(), "component index out of range");
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(R.rows(), D.classes());
    for (Eigen::Index t = 0; t < R.rows(); ++t) T(t, D.labels()[static_cast<std::size_t>(t)]) = R(t, component);
    return T;
}

MixingMeasure init_near_truth(const Scenario& scenario, int k, std::uint64_t seed, double sigma)
{
    const MixingMeasure& truth = scenario.truth;
    const int kstar = static_cast<int>(truth.size());
    MOE_REQUIRE(k >= kstar, "cannot fit fewer components (" + std::to_string(k) + ") than the truth has (" +
                                std::to_string(kstar) + ")");
    MOE_REQUIRE(sigma >= 0.0 && std::isfinite(sigma), "sigma must be nonnegative");
    const int d = truth.dim();
    const int K = truth.classes();
    Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(StreamRole::init)}));

    // Owner of each fitted index. The last fitted component alone represents the
    // last (reference) true component; the others form a uniform random surjection
    // onto the remaining true components.
    std::vector<int> owner(static_cast<std::size_t>(k), kstar - 1);
    if (kstar == 1) {
        std::fill(owner.begin(), owner.end(), 0);
    } else {
        std::uniform_int_distribution<int> pick(0, kstar - 2);
        std::vector<int> counts;
        do {
            counts.assign(static_cast<std::size_t>(kstar - 1), 0);
            for (int i = 0; i < k - 1; ++i) {
                owner[static_cast<std::size_t>(i)] = pick(rng);
                ++counts[static_cast<std::size_t>(owner[static_cast<std::size_t>(i)])];
            }
        } while (std::find(counts.begin(), counts.end(), 0) != counts.end());
        std::sort(owner.begin(), owner.end() - 1);
    }
    std::vector<int> cell_size(static_cast<std::size_t>(kstar), 0);
    for (int j : owner) ++cell_size[static_cast<std::size_t>(j)];

    std::normal_distribution<double> noise(0.0, sigma > 0.0 ? sigma : 1.0);
    auto jitter = [&]() { return sigma > 0.0 ? noise(rng) : 0.0; };

    std::vector<Component> comps;
    for (int i = 0; i < k; ++i) {
        const int j = owner[static_cast<std::size_t>(i)];
        Component c = truth[static_cast<std::size_t>(j)];
        const bool pinned = i == k - 1;
        if (!pinned) {
            c.beta0 += jitter();
            for (int r = 0; r < d; ++r) c.beta1(r) += jitter();
            c.beta0 -= std::log(static_cast<double>(cell_size[static_cast<std::size_t>(j)]));
        }
        for (int l = 0; l < K - 1; ++l) {
            c.a(l) += jitter();
            for (int r = 0; r < d; ++r) c.b(r, l) += jitter();
        }
        if (pinned) {
            c.beta0 = 0.0;
            c.beta1.setZero();
        }
        comps.push_back(std::move(c));
    }
    return MixingMeasure(d, K, std::move(comps), true, scenario.gate);
}

MixingMeasure init_random(int d, int K, int k, std::uint64_t seed, double scale)
{
    MOE_REQUIRE(d >= 1 && K >= 2 && k >= 1, "invalid dimensions for random initialization");
    MOE_REQUIRE(scale > 0.0, "scale must be positive");
    Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(StreamRole::init)}));
    std::normal_distribution<double> noise(0.0, scale);
    std::vector<Component> comps;
    for (int i = 0; i < k; ++i) {
        Component c{0.0, Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(K), Eigen::MatrixXd::Zero(d, K)};
        if (i < k - 1) {
            c.beta0 = noise(rng);
            for (int r = 0; r < d; ++r) c.beta1(r) = noise(rng);
        }
        for (int l = 0; l < K - 1; ++l) {
            c.a(l) = noise(rng);
            for (int r = 0; r < d; ++r) c.b(r, l) = noise(rng);
        }
        comps.push_back(std::move(c));
    }
    return MixingMeasure(d, K, std::move(comps), true);
}

Eigen::MatrixXd e_step(const MixingMeasure& G, const Dataset& D, const GateTransform& M)
{
    check_fit_inputs(G, D);
    Eigen::MatrixXd R;
    responsibilities(to_params(G), gate_design(D, M), expert_design(D), D.labels(), R);
    return R;
}

double expected_complete_loglik(const Eigen::MatrixXd& R, const Dataset& D, const GateTransform& M,
                                const MixingMeasure& G)
{
    check_fit_inputs(G, D);
    MOE_REQUIRE(R.rows() == static_cast<Eigen::Index>(D.size()) && R.cols() == static_cast<Eigen::Index>(G.size()),
                "responsibility matrix has the wrong shape");
    const Eigen::MatrixXd zg = gate_design(D, M);
    const Eigen::MatrixXd xe = expert_design(D);
    const Params p = to_params(G);
    double q = WeightedSoftmaxRegression(zg, R, 0).objective(p.gate);
    for (std::size_t i = 0; i < G.size(); ++i) {
        const Eigen::MatrixXd T = expert_targets(R, D, static_cast<int>(i));
        q += WeightedSoftmaxRegression(xe, T, 0).objective(p.experts[i]);
    }
    return q;
}

MStepResult m_step(const Eigen::MatrixXd& R, const Dataset& D, const GateTransform& M, const MixingMeasure& G,
                   const FitConfig& cfg)
{
    check_fit_inputs(G, D);
    check_config(cfg);
    MOE_REQUIRE(R.rows() == static_cast<Eigen::Index>(D.size()) && R.cols() == static_cast<Eigen::Index>(G.size()),
                "responsibility matrix has the wrong shape");
    const Eigen::MatrixXd zg = gate_design(D, M);
    const Eigen::MatrixXd xe = expert_design(D);
    Params p = to_params(G);
    const bool warning = maximize_in_place(p, R, zg, xe, D.labels(), cfg);
    MixingMeasure next = to_measure(p, G.dim(), G.classes(), G.gate());
    if (cfg.pinning == GatePinning::free && G.canonical()) next = canonicalize(next);
    return {std::move(next), warning};
}

FitReport fit(const Dataset& D, const FitConfig& cfg, const GateTransform& M, const MixingMeasure& init)
{
    check_fit_inputs(init, D);
    check_config(cfg);
    MOE_REQUIRE(static_cast<int>(init.size()) == cfg.k, "initial measure has " + std::to_string(init.size()) +
                                                           " components, config asks for " + std::to_string(cfg.k));
    if (cfg.pinning == GatePinning::last_component)
        MOE_REQUIRE(init.canonical(), "initial measure must be canonical when the last gate is pinned");

    const Eigen::MatrixXd zg = gate_design(D, M);
    const Eigen::MatrixXd xe = expert_design(D);
    Params p = to_params(init);
    Eigen::MatrixXd R;

    FitReport report{canonicalize(init.with_gate(M)), {}, 0, false, 0};
    double ll = responsibilities(p, zg, xe, D.labels(), R);
    report.nll_trajectory.push_back(-ll);
    for (int it = 1; it <= cfg.max_iter; ++it) {
        if (!std::isfinite(ll)) break;
        if (maximize_in_place(p, R, zg, xe, D.labels(), cfg)) ++report.inner_warnings;
        const double prev = -ll;
        ll = responsibilities(p, zg, xe, D.labels(), R);
        const double nll = -ll;
        report.nll_trajectory.push_back(nll);
        report.iterations = it;
        if (cfg.stop_on_tol && std::abs(nll - prev) / (1.0 + std::abs(nll)) < cfg.tol) {
            report.converged = true;
            break;
        }
    }
    bool finite = p.gate.allFinite();
    for (const Eigen::MatrixXd& E : p.experts) finite = finite && E.allFinite();
    if (report.iterations > 0 && finite) report.measure = canonicalize(to_measure(p, init.dim(), init.classes(), M));
    return report;
}

} // namespace moe
