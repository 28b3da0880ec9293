#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "moe/em.hpp"
#include "moe/errors.hpp"
#include "moe/gates.hpp"
#include "moe/harness.hpp"
#include "moe/metrics.hpp"
#include "moe/model_io.hpp"
#include "moe/rng.hpp"
#include "moe/synth.hpp"
#include "moe/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_dir = ".";
    std::string config;
};

template <typename T>
T pick(const CLI::Option* opt, const T& flag_value, const T& config_value)
{
    return opt->count() > 0 ? flag_value : config_value;
}

fs::path resolve(const Globals& g, const std::string& file)
{
    fs::path p(file);
    return p.is_absolute() || p.has_parent_path() ? p : fs::path(g.out_dir) / p;
}

void ensure_parent(const fs::path& p)
{
    if (!p.has_parent_path()) return;
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw moe::IoError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
}

void write_json(const fs::path& p, const json& j)
{
    ensure_parent(p);
    moe::write_text_file(p, j.dump(2) + "\n");
}

json box_json(const moe::CovariateBox& box)
{
    json bounds = json::array();
    for (const auto& [lo, hi] : box.bounds()) bounds.push_back({lo, hi});
    return bounds;
}

json scenario_json(const moe::Scenario& s)
{
    return {{"name", s.name},
            {"regime", moe::to_string(s.regime)},
            {"gate", s.gate.name()},
            {"box", box_json(s.box)},
            {"truth", moe::to_json(s.truth)}};
}

json pde_json(const moe::PdeReport& r)
{
    return {{"holds", r.holds},
            {"proportionality_constant", r.proportionality_constant},
            {"class_constants", r.class_constants},
            {"max_relative_deviation", r.max_relative_deviation},
            {"constant_spread", r.constant_spread}};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"moe-lab: softmax-gated multinomial mixture-of-experts laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "Master seed");
    auto* threads_opt = app.add_option("--threads", g.threads, "Worker threads for replications")->check(CLI::PositiveNumber);
    auto* out_dir_opt = app.add_option("--out-dir", g.out_dir, "Directory for outputs");
    app.add_option("--config", g.config, "JSON experiment config (same field names as the emitted config)");

    std::string scenario = "regime1";
    std::string gate_tag = "identity";

    // synth
    auto* synth = app.add_subcommand("synth", "Sample a dataset from a preset scenario");
    std::size_t synth_n = 1000;
    std::string synth_out = "data.csv";
    auto* synth_scenario = synth->add_option("--scenario", scenario, "regime1 | regime2");
    auto* synth_gate = synth->add_option("--gate", gate_tag, "Gate transform tag");
    synth->add_option("--n", synth_n, "Sample size")->check(CLI::PositiveNumber);
    synth->add_option("--out", synth_out, "Dataset CSV path");

    // fit
    auto* fitc = app.add_subcommand("fit", "Fit a mixture of experts by EM");
    std::string fit_data;
    std::string fit_init = "regime1";
    std::string fit_out = "fit.json";
    int fit_k = 3;
    double fit_sigma = 0.1;
    int fit_max_iter = 2000;
    double fit_tol = 1e-6;
    fitc->add_option("--data", fit_data, "Dataset CSV")->required();
    auto* fit_k_opt = fitc->add_option("--k", fit_k, "Number of fitted components")->check(CLI::PositiveNumber);
    auto* fit_gate = fitc->add_option("--gate", gate_tag, "Gate transform tag");
    auto* fit_init_opt = fitc->add_option("--init-scenario", fit_init, "Scenario whose truth seeds the initialization");
    auto* fit_sigma_opt = fitc->add_option("--sigma", fit_sigma, "Initialization noise");
    auto* fit_iter_opt = fitc->add_option("--max-iter", fit_max_iter, "EM iteration cap");
    auto* fit_tol_opt = fitc->add_option("--tol", fit_tol, "Relative NLL change stopping threshold");
    fitc->add_option("--out", fit_out, "Output JSON path");

    // rate
    auto* rate = app.add_subcommand("rate", "Replicated Voronoi-loss rate experiment");
    std::vector<int> rate_k;
    std::vector<std::size_t> rate_grid;
    int rate_reps = 10;
    auto* rate_scenario = rate->add_option("--scenario", scenario, "regime1 | regime2");
    auto* rate_gate = rate->add_option("--gate", gate_tag, "Gate transform tag");
    auto* rate_k_opt = rate->add_option("--k", rate_k, "Fitted component counts")->delimiter(',');
    auto* rate_grid_opt = rate->add_option("--n-grid", rate_grid, "Sample sizes (comma separated)")->delimiter(',');
    auto* rate_reps_opt = rate->add_option("--replications", rate_reps, "Replications per size")->check(CLI::PositiveNumber);

    // nll-compare
    auto* nll = app.add_subcommand("nll-compare", "EM negative log-likelihood trajectories across gates");
    std::vector<std::string> nll_gates{"identity", "sin", "cos", "logabs"};
    int nll_iters = 200;
    std::size_t nll_n = 10000;
    std::string nll_scenario = "regime2";
    int nll_k = 3;
    auto* nll_scenario_opt = nll->add_option("--scenario", nll_scenario, "Scenario providing the shared dataset");
    nll->add_option("--gates", nll_gates, "Gate tags (comma separated)")->delimiter(',');
    nll->add_option("--iters", nll_iters, "EM iterations per gate")->check(CLI::NonNegativeNumber);
    nll->add_option("--n", nll_n, "Shared sample size")->check(CLI::PositiveNumber);
    auto* nll_k_opt = nll->add_option("--k", nll_k, "Fitted component count")->check(CLI::PositiveNumber);

    // check
    auto* check = app.add_subcommand("check", "Theory checks: pde | regime | adversarial | independence");
    std::string what;
    double check_r = 2.0;
    int check_d = 1;
    int check_samples = 100;
    std::string check_out = "report.json";
    check->add_option("--what", what, "pde | regime | adversarial | independence")
        ->required()
        ->check(CLI::IsMember({"pde", "regime", "adversarial", "independence"}));
    auto* check_scenario = check->add_option("--scenario", scenario, "Preset scenario");
    auto* check_gate = check->add_option("--gate", gate_tag, "Gate transform tag");
    check->add_option("--r", check_r, "Loss order for the adversarial check")->check(CLI::Range(1.0, 1e6));
    check->add_option("--d", check_d, "Covariate dimension for the independence check")->check(CLI::PositiveNumber);
    check->add_option("--samples", check_samples, "Number of covariate samples")->check(CLI::PositiveNumber);
    check->add_option("--out", check_out, "Report JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        moe::ExperimentConfig cfg;
        if (!g.config.empty()) cfg = moe::experiment_config_from_json(json::parse(moe::read_text_file(g.config)));
        if (seed_opt->count() > 0) cfg.master_seed = g.seed;
        if (threads_opt->count() > 0) cfg.threads = g.threads;
        if (out_dir_opt->count() > 0 || cfg.out_dir.empty()) cfg.out_dir = g.out_dir;
        g.out_dir = cfg.out_dir.string();
        g.seed = cfg.master_seed;

        if (*synth) {
            const std::string name = pick(synth_scenario, scenario, cfg.scenario);
            const moe::GateTransform gate = synth_gate->count() ? moe::GateTransform::parse(gate_tag) : cfg.gate;
            const moe::Scenario s = moe::preset(name, gate);
            const moe::Dataset D = moe::sample(s, synth_n, g.seed);
            const fs::path out = resolve(g, synth_out);
            ensure_parent(out);
            moe::write_text_file(out, moe::dataset_to_csv(D));
            fs::path side = out;
            side.replace_extension(".scenario.json");
            json j = scenario_json(s);
            j["n"] = synth_n;
            j["seed"] = g.seed;
            write_json(side, j);
            std::cout << "wrote " << out.string() << " and " << side.string() << "\n";
        } else if (*fitc) {
            const moe::GateTransform gate = fit_gate->count() ? moe::GateTransform::parse(gate_tag) : cfg.gate;
            const moe::Scenario s = moe::preset(pick(fit_init_opt, fit_init, cfg.scenario), gate);
            const moe::Dataset D = moe::dataset_from_csv(moe::read_text_file(fit_data), s.truth.classes());
            MOE_REQUIRE(D.dim() == s.truth.dim(), "dataset dimension does not match the init scenario");
            moe::FitConfig fc = cfg.em;
            fc.k = pick(fit_k_opt, fit_k, cfg.k_list.empty() ? fc.k : cfg.k_list.front());
            fc.init.sigma = pick(fit_sigma_opt, fit_sigma, fc.init.sigma);
            fc.max_iter = pick(fit_iter_opt, fit_max_iter, fc.max_iter);
            fc.tol = pick(fit_tol_opt, fit_tol, fc.tol);
            const std::uint64_t init_seed =
                moe::derive_seed(g.seed, {static_cast<std::uint64_t>(moe::StreamRole::init)});
            const moe::MixingMeasure init =
                fc.init.mode == moe::InitSpec::Mode::near_truth
                    ? moe::init_near_truth(s, fc.k, init_seed, fc.init.sigma)
                    : moe::init_random(D.dim(), D.classes(), fc.k, init_seed, fc.init.scale);
            const moe::FitReport rep = moe::fit(D, fc, gate, init);
            moe::ExperimentConfig echo = cfg;
            echo.scenario = s.name;
            echo.gate = gate;
            echo.k_list = {fc.k};
            echo.em = fc;
            json j = {{"measure", moe::to_json(rep.measure)},
                      {"nll_trajectory", rep.nll_trajectory},
                      {"iterations", rep.iterations},
                      {"converged", rep.converged},
                      {"inner_warnings", rep.inner_warnings},
                      {"data", fit_data},
                      {"config", moe::to_json(echo)}};
            if (rep.measure.classes() == s.truth.classes() && rep.measure.dim() == s.truth.dim())
                j["d2_vs_init_scenario"] = moe::voronoi_loss(rep.measure, s.truth, 2.0);
            const fs::path out = resolve(g, fit_out);
            write_json(out, j);
            std::cout << "iterations " << rep.iterations << (rep.converged ? " (converged)" : " (not converged)")
                      << ", final NLL " << moe::format_double(rep.nll_trajectory.back()) << "\n";
        } else if (*rate) {
            if (rate_scenario->count()) cfg.scenario = scenario;
            if (rate_gate->count()) cfg.gate = moe::GateTransform::parse(gate_tag);
            if (rate_k_opt->count()) cfg.k_list = rate_k;
            if (rate_reps_opt->count()) cfg.replications = rate_reps;
            if (rate_grid_opt->count()) cfg.n_grid = rate_grid;
            if (cfg.n_grid.empty()) cfg.n_grid = moe::desk_config(cfg.scenario, cfg.gate).n_grid;
            const auto reports = moe::run_rate_experiment(cfg);
            moe::emit_rate_outputs(cfg, reports);
            for (const auto& r : reports) {
                std::cout << cfg.scenario << " " << cfg.gate.name() << " k=" << r.k << ": ";
                if (r.fit)
                    std::cout << "slope " << r.fit->slope << ", r^2 " << r.fit->r_squared << "\n";
                else
                    std::cout << "slope unavailable\n";
            }
        } else if (*nll) {
            cfg.scenario = pick(nll_scenario_opt, nll_scenario, nll_scenario);
            if (nll_k_opt->count() || cfg.k_list.empty()) cfg.k_list = {nll_k};
            std::vector<moe::GateTransform> gates;
            for (const auto& t : nll_gates) gates.push_back(moe::GateTransform::parse(t));
            const auto cmp = moe::run_nll_comparison(cfg, gates, nll_iters, nll_n);
            const fs::path dir = cfg.out_dir;
            ensure_parent(dir / "nll.csv");
            moe::write_text_file(dir / "nll.csv", moe::nll_csv(cmp));
            moe::write_text_file(dir / "nll.svg",
                                 moe::nll_svg(cmp, "EM negative log-likelihood, " + cfg.scenario + ", n = " +
                                                       std::to_string(nll_n)));
            for (std::size_t i = 0; i < gates.size(); ++i) {
                const auto& t = cmp.trajectories[i];
                std::cout << gates[i].name() << ": drop " << (t.front() - t.back()) << "\n";
            }
        } else if (*check) {
            const std::string name = pick(check_scenario, scenario, cfg.scenario);
            const moe::GateTransform gate = check_gate->count() ? moe::GateTransform::parse(gate_tag) : cfg.gate;
            json j = {{"what", what}};
            if (what == "independence") {
                const auto r = moe::independence_check(gate, check_d, std::max(check_samples, 0), 1e-8, g.seed);
                j.update({{"gate", gate.name()},
                          {"d", check_d},
                          {"monomial_count", r.monomial_count},
                          {"numeric_rank", r.numeric_rank},
                          {"min_singular_value", r.min_singular_value},
                          {"max_singular_value", r.max_singular_value},
                          {"exclusion_radius", r.exclusion_radius},
                          {"pass", r.pass}});
            } else {
                const moe::Scenario s = moe::preset(name, gate);
                j["scenario"] = s.name;
                if (what == "regime") {
                    j["regime"] = moe::to_string(moe::classify_regime(s.truth));
                    j["collapsed_component"] = moe::collapsed_component(s.truth);
                } else if (what == "pde") {
                    const auto xs = moe::mc_points(s.truth.dim(), {static_cast<std::size_t>(check_samples), g.seed, s.box});
                    json comps = json::array();
                    for (std::size_t i = 0; i < s.truth.size(); ++i) {
                        json c = {{"component", i}};
                        try {
                            c["report"] = pde_json(moe::pde_interaction_check(s.truth.components()[i], xs, 1e-8));
                        } catch (const moe::InconclusiveError& e) {
                            c["inconclusive"] = e.what();
                        }
                        comps.push_back(c);
                    }
                    j["components"] = comps;
                } else {
                    MOE_REQUIRE(moe::classify_regime(s.truth) == moe::Regime::regime2,
                                "adversarial check needs a scenario with a collapsed expert");
                    const moe::MixingMeasure truth = moe::collapsed_first(s.truth);
                    const std::vector<double> grid{1e2, 1e3, 1e4};
                    json rows = json::array();
                    for (double n : grid) {
                        const auto p = moe::adversarial_params(truth, n, s.box);
                        const auto Gn = moe::build_adversarial(truth, p);
                        rows.push_back({{"n", n},
                                        {"t_n", p.t_n},
                                        {"c_n", p.c_n},
                                        {"B", p.B},
                                        {"N", p.N},
                                        {"dr_closed_form", moe::dr_closed_form(truth, p, check_r)},
                                        {"voronoi_loss", moe::voronoi_loss(Gn, truth, check_r)}});
                    }
                    j["r"] = check_r;
                    j["sequence"] = rows;
                    moe::McConfig mc;
                    mc.seed = g.seed;
                    json series = json::array();
                    for (const auto& [n, ratio] : moe::collapse_ratio_series(truth, grid, check_r, mc, s.box))
                        series.push_back({{"n", n}, {"ratio", ratio}});
                    j["collapse_ratio"] = series;
                }
            }
            const fs::path out = resolve(g, check_out);
            write_json(out, j);
            std::cout << j.dump(2) << "\n";
        }
    } catch (const moe::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 2;
    } catch (const std::range_error& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "contract violation: malformed JSON: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
