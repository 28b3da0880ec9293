#include "moe/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "moe/errors.hpp"
#include "moe/model_io.hpp"
#include "moe/plot.hpp"
#include "moe/synth.hpp"

namespace moe {

namespace {

std::string pinning_name(GatePinning p)
{
    return p == GatePinning::last_component ? "last_component" : "free";
}

GatePinning parse_pinning(const std::string& s)
{
    if (s == "last_component") return GatePinning::last_component;
    if (s == "free") return GatePinning::free;
    throw ContractViolation("unknown gate pinning '" + s + "'");
}

/// Runs job(i) for i in [0, count) on up to `threads` workers.
template <typename Job>
void parallel_for(std::size_t count, int threads, Job&& job)
{
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (std::size_t i = next++; i < count; i = next++) job(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

std::string fmt_count(double n)
{
    return std::to_string(static_cast<long long>(std::llround(n)));
}

double parse_number(const std::string& cell)
{
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    MOE_REQUIRE(res.ec == std::errc() && res.ptr == cell.data() + cell.size(), "bad numeric field '" + cell + "'");
    return v;
}

} // namespace

nlohmann::json to_json(const ExperimentConfig& cfg)
{
    const FitConfig& em = cfg.em;
    return {{"scenario", cfg.scenario},
            {"gate", cfg.gate.name()},
            {"k_list", cfg.k_list},
            {"n_grid", cfg.n_grid},
            {"replications", cfg.replications},
            {"master_seed", cfg.master_seed},
            {"em",
             {{"k", em.k},
              {"max_iter", em.max_iter},
              {"tol", em.tol},
              {"stop_on_tol", em.stop_on_tol},
              {"pinning", pinning_name(em.pinning)},
              {"init",
               {{"mode", em.init.mode == InitSpec::Mode::near_truth ? "near_truth" : "random"},
                {"sigma", em.init.sigma},
                {"scale", em.init.scale}}},
              {"newton",
               {{"max_inner", em.newton.max_inner},
                {"damping", em.newton.damping},
                {"line_search_shrink", em.newton.line_search_shrink},
                {"armijo", em.newton.armijo},
                {"grad_tol", em.newton.grad_tol},
                {"decrement_tol", em.newton.decrement_tol},
                {"bound", std::isfinite(em.newton.bound) ? nlohmann::json(em.newton.bound) : nlohmann::json(nullptr)}}}}},
            {"mc", {{"samples", cfg.mc.samples}, {"seed", cfg.mc.seed}}},
            {"out_dir", cfg.out_dir.string()},
            {"threads", cfg.threads}};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j)
{
    ExperimentConfig cfg;
    try {
        cfg.scenario = j.value("scenario", cfg.scenario);
        if (j.contains("gate")) cfg.gate = GateTransform::parse(j.at("gate").get<std::string>());
        cfg.k_list = j.value("k_list", cfg.k_list);
        cfg.n_grid = j.value("n_grid", cfg.n_grid);
        cfg.replications = j.value("replications", cfg.replications);
        cfg.master_seed = j.value("master_seed", cfg.master_seed);
        cfg.out_dir = j.value("out_dir", cfg.out_dir.string());
        cfg.threads = j.value("threads", cfg.threads);
        if (j.contains("em")) {
            const auto& e = j.at("em");
            FitConfig& em = cfg.em;
            em.k = e.value("k", em.k);
            em.max_iter = e.value("max_iter", em.max_iter);
            em.tol = e.value("tol", em.tol);
            em.stop_on_tol = e.value("stop_on_tol", em.stop_on_tol);
            if (e.contains("pinning")) em.pinning = parse_pinning(e.at("pinning").get<std::string>());
            if (e.contains("init")) {
                const auto& i = e.at("init");
                const std::string mode = i.value("mode", std::string("near_truth"));
                MOE_REQUIRE(mode == "near_truth" || mode == "random", "unknown init mode '" + mode + "'");
                em.init.mode = mode == "random" ? InitSpec::Mode::random : InitSpec::Mode::near_truth;
                em.init.sigma = i.value("sigma", em.init.sigma);
                em.init.scale = i.value("scale", em.init.scale);
            }
            if (e.contains("newton")) {
                const auto& nw = e.at("newton");
                em.newton.max_inner = nw.value("max_inner", em.newton.max_inner);
                em.newton.damping = nw.value("damping", em.newton.damping);
                em.newton.line_search_shrink = nw.value("line_search_shrink", em.newton.line_search_shrink);
                em.newton.armijo = nw.value("armijo", em.newton.armijo);
                em.newton.grad_tol = nw.value("grad_tol", em.newton.grad_tol);
                em.newton.decrement_tol = nw.value("decrement_tol", em.newton.decrement_tol);
                if (nw.contains("bound"))
                    em.newton.bound = nw.at("bound").is_null() ? std::numeric_limits<double>::infinity()
                                                               : nw.at("bound").get<double>();
            }
        }
        if (j.contains("mc")) {
            cfg.mc.samples = j.at("mc").value("samples", cfg.mc.samples);
            cfg.mc.seed = j.at("mc").value("seed", cfg.mc.seed);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ContractViolation(std::string("malformed experiment config: ") + e.what());
    }
    return cfg;
}

std::vector<std::size_t> log_spaced_grid(std::size_t lo, std::size_t hi, std::size_t count)
{
    MOE_REQUIRE(lo >= 1 && hi > lo, "grid needs 1 <= lo < hi");
    MOE_REQUIRE(count >= 2, "grid needs at least two points");
    std::vector<std::size_t> grid;
    const double a = std::log(static_cast<double>(lo));
    const double b = std::log(static_cast<double>(hi));
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        auto n = static_cast<std::size_t>(std::llround(std::exp(a + t * (b - a))));
        if (!grid.empty()) n = std::max(n, grid.back() + 1);
        grid.push_back(n);
    }
    return grid;
}

ExperimentConfig desk_config(std::string scenario, GateTransform gate, int k)
{
    ExperimentConfig cfg;
    cfg.scenario = std::move(scenario);
    cfg.gate = gate;
    cfg.k_list = {k};
    cfg.n_grid = log_spaced_grid(1000, 30000, 8);
    cfg.replications = 10;
    cfg.em.k = k;
    return cfg;
}

LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points)
{
    MOE_REQUIRE(points.size() >= 2, "slope fit needs at least two points");
    double mx = 0.0, my = 0.0;
    for (const auto& [n, v] : points) {
        MOE_REQUIRE(n > 0.0 && v > 0.0 && std::isfinite(n) && std::isfinite(v),
                    "slope fit needs positive finite sizes and values");
        mx += std::log(n);
        my += std::log(v);
    }
    const double m = static_cast<double>(points.size());
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [n, v] : points) {
        const double dx = std::log(n) - mx;
        const double dy = std::log(v) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    MOE_REQUIRE(sxx > 0.0, "slope fit needs at least two distinct sizes");
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ss_res = std::max(0.0, syy - fit.slope * sxy);
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

RateReport summarize_replicates(int k, const std::vector<std::size_t>& n_grid, int replications,
                                std::vector<ReplicateRecord> records)
{
    RateReport report;
    report.k = k;
    std::stable_sort(records.begin(), records.end(), [](const ReplicateRecord& a, const ReplicateRecord& b) {
        return a.n != b.n ? a.n < b.n : a.replication < b.replication;
    });
    std::vector<std::pair<double, double>> usable;
    for (std::size_t n : n_grid) {
        RatePoint pt;
        pt.n = static_cast<double>(n);
        pt.replications = replications;
        std::vector<double> losses;
        for (const ReplicateRecord& r : records) {
            if (r.n != n) continue;
            if (r.status == ReplicateStatus::ok) {
                losses.push_back(r.loss);
                ++pt.status_ok;
            } else {
                ++pt.status_failed;
            }
        }
        if (losses.empty()) {
            pt.mean_loss = std::numeric_limits<double>::quiet_NaN();
            pt.std_loss = std::numeric_limits<double>::quiet_NaN();
        } else {
            double sum = 0.0;
            for (double v : losses) sum += v;
            pt.mean_loss = sum / static_cast<double>(losses.size());
            double ss = 0.0;
            for (double v : losses) ss += (v - pt.mean_loss) * (v - pt.mean_loss);
            pt.std_loss = losses.size() > 1 ? std::sqrt(ss / static_cast<double>(losses.size() - 1)) : 0.0;
            if (pt.mean_loss > 0.0) usable.emplace_back(pt.n, pt.mean_loss);
        }
        report.points.push_back(pt);
    }
    if (usable.size() >= 3) report.fit = fit_loglog_slope(usable);
    report.replicates = std::move(records);
    return report;
}

std::vector<RateReport> run_rate_experiment(const ExperimentConfig& cfg)
{
    MOE_REQUIRE(cfg.replications >= 1, "replications must be at least 1");
    MOE_REQUIRE(!cfg.n_grid.empty(), "n_grid must not be empty");
    MOE_REQUIRE(!cfg.k_list.empty(), "k_list must not be empty");
    for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
        MOE_REQUIRE(cfg.n_grid[i] > cfg.n_grid[i - 1], "n_grid must be strictly increasing");
    const Scenario scenario = preset(cfg.scenario, cfg.gate);

    std::vector<RateReport> reports;
    for (int k : cfg.k_list) {
        const std::size_t reps = static_cast<std::size_t>(cfg.replications);
        std::vector<ReplicateRecord> records(cfg.n_grid.size() * reps);
        parallel_for(records.size(), cfg.threads, [&](std::size_t job) {
            const std::size_t ni = job / reps;
            const std::size_t rep = job % reps;
            ReplicateRecord& rec = records[job];
            rec.n = cfg.n_grid[ni];
            rec.replication = static_cast<int>(rep);
            try {
                const std::uint64_t data_seed =
                    derive_seed(cfg.master_seed, {ni, rep, static_cast<std::uint64_t>(StreamRole::data)});
                const std::uint64_t init_seed =
                    derive_seed(cfg.master_seed, {ni, rep, static_cast<std::uint64_t>(StreamRole::init)});
                const Dataset D = sample(scenario, rec.n, data_seed);
                FitConfig fc = cfg.em;
                fc.k = k;
                const MixingMeasure init =
                    fc.init.mode == InitSpec::Mode::near_truth
                        ? init_near_truth(scenario, k, init_seed, fc.init.sigma)
                        : init_random(scenario.truth.dim(), scenario.truth.classes(), k, init_seed, fc.init.scale);
                const FitReport fr = fit(D, fc, scenario.gate, init);
                rec.iterations = fr.iterations;
                rec.converged = fr.converged;
                const bool finite_nll = std::all_of(fr.nll_trajectory.begin(), fr.nll_trajectory.end(),
                                                    [](double v) { return std::isfinite(v); });
                rec.loss = finite_nll ? voronoi_loss(fr.measure, scenario.truth, 2.0)
                                      : std::numeric_limits<double>::quiet_NaN();
                rec.status = std::isfinite(rec.loss) ? ReplicateStatus::ok : ReplicateStatus::failed;
            } catch (const std::exception&) {
                rec.loss = std::numeric_limits<double>::quiet_NaN();
                rec.status = ReplicateStatus::failed;
            }
        });
        reports.push_back(summarize_replicates(k, cfg.n_grid, cfg.replications, std::move(records)));
    }
    return reports;
}

NllComparison run_nll_comparison(const ExperimentConfig& cfg, const std::vector<GateTransform>& gates, int iters,
                                 std::size_t n)
{
    MOE_REQUIRE(!gates.empty(), "need at least one gate transform");
    MOE_REQUIRE(iters >= 0, "iteration count must be nonnegative");
    MOE_REQUIRE(!cfg.k_list.empty(), "k_list must not be empty");
    const Scenario scenario = preset(cfg.scenario, cfg.gate);
    const int k = cfg.k_list.front();
    const Dataset D = sample(scenario, n, derive_seed(cfg.master_seed, {0, 0, static_cast<std::uint64_t>(StreamRole::data)}));
    const MixingMeasure init = init_near_truth(
        scenario, k, derive_seed(cfg.master_seed, {0, 0, static_cast<std::uint64_t>(StreamRole::init)}), cfg.em.init.sigma);

    NllComparison out;
    out.gates = gates;
    out.trajectories.resize(gates.size());
    parallel_for(gates.size(), cfg.threads, [&](std::size_t g) {
        FitConfig fc = cfg.em;
        fc.k = k;
        fc.max_iter = iters;
        fc.stop_on_tol = false;
        out.trajectories[g] = fit(D, fc, gates[g], init.with_gate(gates[g])).nll_trajectory;
    });
    return out;
}

std::string rate_csv(const RateReport& report)
{
    std::string out = "n,mean_d2,std_d2,replications,status_ok,status_failed\n";
    for (const RatePoint& p : report.points) {
        out += fmt_count(p.n) + "," + format_double(p.mean_loss) + "," + format_double(p.std_loss) + "," +
               std::to_string(p.replications) + "," + std::to_string(p.status_ok) + "," +
               std::to_string(p.status_failed) + "\n";
    }
    return out;
}

std::vector<RatePoint> parse_rate_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    MOE_REQUIRE(static_cast<bool>(std::getline(in, line)) &&
                    line == "n,mean_d2,std_d2,replications,status_ok,status_failed",
                "rate CSV header mismatch");
    std::vector<RatePoint> points;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        MOE_REQUIRE(cells.size() == 6, "rate CSV row needs 6 fields");
        RatePoint p;
        p.n = parse_number(cells[0]);
        p.mean_loss = parse_number(cells[1]);
        p.std_loss = parse_number(cells[2]);
        p.replications = static_cast<int>(parse_number(cells[3]));
        p.status_ok = static_cast<int>(parse_number(cells[4]));
        p.status_failed = static_cast<int>(parse_number(cells[5]));
        points.push_back(p);
    }
    return points;
}

std::string replicates_csv(const RateReport& report)
{
    std::string out = "n,replication,d2,iterations,converged,status\n";
    for (const ReplicateRecord& r : report.replicates) {
        out += std::to_string(r.n) + "," + std::to_string(r.replication) + "," + format_double(r.loss) + "," +
               std::to_string(r.iterations) + "," + (r.converged ? "1" : "0") + "," +
               (r.status == ReplicateStatus::ok ? "ok" : "failed") + "\n";
    }
    return out;
}

std::string rate_svg(const RateReport& report, const std::string& title)
{
    plot::Series pts{"mean D2", {}, {}, "#1f77b4", true, true, ""};
    for (const RatePoint& p : report.points) {
        pts.x.push_back(p.n);
        pts.y.push_back(p.mean_loss);
    }
    std::vector<plot::Series> series{pts};
    plot::Axes axes{title.empty() ? "Voronoi loss D2, k = " + std::to_string(report.k) : title, "sample size n",
                    "mean D2", true, true, {}};
    if (report.fit) {
        plot::Series line{"least-squares fit", {}, {}, "#ff7f0e", false, true, "8,3,2,3"};
        for (const RatePoint& p : report.points) {
            line.x.push_back(p.n);
            line.y.push_back(std::exp(report.fit->intercept) * std::pow(p.n, report.fit->slope));
        }
        series.push_back(line);
        char buf[96];
        std::snprintf(buf, sizeof(buf), "slope = %.3f (R^2 = %.3f)", report.fit->slope, report.fit->r_squared);
        axes.notes.emplace_back(buf);
    } else {
        axes.notes.emplace_back("slope unavailable (fewer than 3 usable sizes)");
    }
    return plot::render_svg(axes, series);
}

std::string nll_csv(const NllComparison& cmp)
{
    std::string out = "iteration";
    for (const GateTransform& g : cmp.gates) out += "," + g.name();
    out += "\n";
    std::size_t len = 0;
    for (const auto& t : cmp.trajectories) len = std::max(len, t.size());
    for (std::size_t i = 0; i < len; ++i) {
        out += std::to_string(i);
        for (const auto& t : cmp.trajectories) out += "," + (i < t.size() ? format_double(t[i]) : std::string());
        out += "\n";
    }
    return out;
}

std::string nll_svg(const NllComparison& cmp, const std::string& title)
{
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    std::vector<plot::Series> series;
    for (std::size_t g = 0; g < cmp.gates.size(); ++g) {
        plot::Series s{cmp.gates[g].name(), {}, {}, colors[g % 6], false, true, ""};
        for (std::size_t i = 0; i < cmp.trajectories[g].size(); ++i) {
            s.x.push_back(static_cast<double>(i));
            s.y.push_back(cmp.trajectories[g][i]);
        }
        series.push_back(std::move(s));
    }
    return plot::render_svg({title, "EM iteration", "negative log-likelihood", false, false, {}}, series);
}

void emit_csv(const RateReport& report, const std::filesystem::path& path)
{
    write_text_file(path, rate_csv(report));
}

void emit_svg(const RateReport& report, const std::filesystem::path& path, const std::string& title)
{
    write_text_file(path, rate_svg(report, title));
}

void emit_rate_outputs(const ExperimentConfig& cfg, const std::vector<RateReport>& reports)
{
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.out_dir.string() + "': " + ec.message());
    for (const RateReport& r : reports) {
        const std::string stem = cfg.scenario + "_" + cfg.gate.name() + "_k" + std::to_string(r.k);
        emit_csv(r, cfg.out_dir / (stem + ".csv"));
        write_text_file(cfg.out_dir / (stem + "_replicates.csv"), replicates_csv(r));
        emit_svg(r, cfg.out_dir / (stem + ".svg"), cfg.scenario + ", gate " + cfg.gate.name() + ", k = " + std::to_string(r.k));
    }
    nlohmann::json meta = to_json(cfg);
    meta["grid"] = "uniform log-spaced grid shared by all regimes";
    nlohmann::json fits = nlohmann::json::array();
    for (const RateReport& r : reports) {
        nlohmann::json f = {{"k", r.k}};
        if (r.fit) {
            f["slope"] = r.fit->slope;
            f["intercept"] = r.fit->intercept;
            f["r_squared"] = r.fit->r_squared;
        } else {
            f["slope"] = nullptr;
        }
        fits.push_back(f);
    }
    meta["fits"] = fits;
    write_text_file(cfg.out_dir / (cfg.scenario + "_" + cfg.gate.name() + "_meta.json"), meta.dump(2) + "\n");
}

} // namespace moe
