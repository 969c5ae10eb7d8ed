#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lqh/approx_engine.hpp"
#include "lqh/bs_analytics.hpp"
#include "lqh/exact_engine.hpp"
#include "lqh/levy_models.hpp"
#include "lqh/mc_validator.hpp"
#include "lqh/tables.hpp"

using namespace lqh;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kConfig = 2, kCalibration = 3, kQuadrature = 4, kValidation = 5 };

struct Common {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::vector<std::string> settings;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double tol = 0.0;
    double contour_R = 0.0;
};

RunConfig resolve(const Common& o) {
    RunConfig cfg = o.config_path.empty() ? default_run_config() : load_run_config(o.config_path);
    for (const auto& kv : o.settings) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + kv);
        apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (o.seed_set) apply_setting(cfg, "seed", std::to_string(o.seed));
    if (o.tol > 0.0) {
        std::ostringstream os;
        os << std::setprecision(17) << o.tol;
        apply_setting(cfg, "rel_tol", os.str());
    }
    if (o.contour_R != 0.0) {
        std::ostringstream os;
        os << std::setprecision(17) << o.contour_R;
        apply_setting(cfg, "contour_R", os.str());
    }
    return cfg;
}

void emit(const Common& o, const std::string& text) {
    if (o.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + o.out_path);
    out << text;
}

json params_json(const LevyModel& m) {
    json j;
    j["kind"] = to_string(m.kind);
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, BSParams>) {
                j["mu"] = p.mu;
                j["sigma"] = p.sigma;
            } else if constexpr (std::is_same_v<P, JDParams>) {
                j["drift"] = p.drift;
                j["diffusion_vol"] = p.diffusion_vol;
                j["jump_intensity"] = p.jump_intensity;
                j["jump_mean"] = p.jump_mean;
                j["jump_sd"] = p.jump_sd;
            } else if constexpr (std::is_same_v<P, NIGParams>) {
                j["alpha"] = p.alpha;
                j["beta"] = p.beta;
                j["delta"] = p.delta;
                j["drift"] = p.drift;
            } else {
                j["sigma"] = p.vg_sigma;
                j["nu"] = p.vg_nu;
                j["theta"] = p.vg_theta;
                j["drift"] = p.drift;
            }
        },
        m.params);
    j["domain_halfwidth"] = m.domain_halfwidth;
    return j;
}

json moments_json(const LevyMoments& mo) {
    return json{{"mu", mo.mu}, {"sigma", mo.sigma}, {"skew_rate", mo.skew_rate}, {"exkurt_rate", mo.exkurt_rate}};
}

json breakdown_json(const ApproxBreakdown& b) {
    return json{{"order0", b.order0}, {"order1", b.order1}, {"order2", b.order2}, {"total", b.total}};
}

json echo_config(const RunConfig& cfg) {
    json j = json::object();
    for (const auto& [k, v] : cfg.entries) j[k] = v;
    return j;
}

int cmd_calibrate(const Common& o) {
    const RunConfig cfg = resolve(o);
    json out;
    out["config"] = echo_config(cfg);
    out["models"] = json::array();
    std::ostringstream csv;
    csv << "# jd_jump_vol_share = " << std::setprecision(17) << cfg.jd_jump_vol_share << '\n';
    csv << "model,exkurt_rate,parameter,value\n";
    for (double ek : cfg.exkurt_rates) {
        for (auto kind : cfg.models) {
            std::vector<std::string> warnings;
            const auto target = target_moments(cfg, ek);
            const auto m = calibrate(kind, target, cfg.jd_jump_vol_share, &warnings);
            json e;
            e["target"] = moments_json(target);
            e["params"] = params_json(m);
            e["moments"] = moments_json(moments(m));
            e["warnings"] = warnings;
            out["models"].push_back(e);
            for (const auto& [k, v] : e["params"].items()) {
                if (k == "kind") continue;
                csv << to_string(kind) << ',' << std::setprecision(17) << ek << ',' << k << ','
                    << v.get<double>() << '\n';
            }
        }
    }
    emit(o, o.format == "json" ? out.dump(2) + "\n" : csv.str());
    return kOk;
}

int cmd_quote(const Common& o) {
    const RunConfig cfg = resolve(o);
    const double ek = cfg.exkurt_rates.front(), K = cfg.strikes.front(), T = cfg.maturities.front();
    const ModelKind kind = cfg.models.front();
    std::vector<std::string> warnings;
    const LevyMoments target = target_moments(cfg, ek);
    const LevyModel model = calibrate(kind, target, cfg.jd_jump_vol_share, &warnings);
    const Contract c = call_contract(cfg.S0, K, T, cfg.contour_R);
    const LevyMoments mo = moments(model);
    const BSWorld world{mo.mu, mo.sigma, cfg.S0, T};

    const auto hs = hedge_structure(model, c, cfg.quad);
    const double vo = vo_error(model, c, cfg.quad).value;
    const double pure = pure_error(model, c, cfg.quad).value;
    const double bsh = bs_hedge_error(model, c, cfg.quad).value;

    json r;
    r["config"] = echo_config(cfg);
    r["model"] = params_json(model);
    r["moments"] = moments_json(mo);
    r["contract"] = {{"type", "call"}, {"S0", cfg.S0}, {"K", K}, {"T", T}, {"contour_R", cfg.contour_R}};
    r["exact"] = {{"initial_capital", hs.v()},
                  {"Lambda", hs.Lambda()},
                  {"kappa1", hs.kappa1()},
                  {"pure_ratio", hs.xi(0.0, cfg.S0)},
                  {"vo_ratio", vo_hedge_ratio(hs, 0.0, cfg.S0, 0.0)},
                  {"vo_error", vo},
                  {"pure_error", pure},
                  {"bs_hedge_error", bsh},
                  {"sqrt_vo_error", std::sqrt(vo)},
                  {"sqrt_bs_hedge_error", std::sqrt(bsh)}};
    r["black_scholes"] = {{"price", bs_price(world, c.payoff, 0.0, cfg.S0, cfg.quad)},
                          {"delta", cash_greek(world, c.payoff, 1, 0.0, cfg.S0, cfg.quad) / cfg.S0}};
    const double avo = approx_vo_error(mo, c, cfg.quad, &warnings);
    const double apure = approx_pure_error(mo, c, cfg.quad);
    const double abs_ = approx_bs_error(mo, c, cfg.quad);
    r["approx"] = {{"initial_capital", breakdown_json(approx_initial_capital(mo, c, cfg.quad))},
                   {"pure_ratio", breakdown_json(approx_pure_ratio(mo, c, 0.0, cfg.S0, cfg.quad))},
                   {"vo_ratio", breakdown_json(approx_vo_ratio(mo, c, 0.0, cfg.S0, 0.0, cfg.quad))},
                   {"Lambda", breakdown_json(approx_lambda(mo))},
                   {"vo_error", avo},
                   {"pure_error", apure},
                   {"bs_error", abs_},
                   {"sqrt_vo_error", std::sqrt(std::max(avo, 0.0))},
                   {"sqrt_bs_error", std::sqrt(std::max(abs_, 0.0))}};
    r["timestep_equivalent"] = timestep_equivalent(mo, &warnings);
    r["warnings"] = warnings;
    emit(o, r.dump(2) + "\n");
    return kOk;
}

int cmd_table(const Common& o, const std::string& which) {
    const RunConfig cfg = resolve(o);
    const Table t = build_table(parse_table_kind(which), cfg);
    std::ostringstream os;
    if (o.format == "json") write_json(os, t);
    else write_csv(os, t);
    emit(o, os.str());
    return kOk;
}

int cmd_validate(const Common& o) {
    RunConfig cfg = resolve(o);
    // Without explicit cell settings, validate the single default cell.
    if (!cfg.entries.count("exkurt_rates") && !cfg.entries.count("exkurt_rate") && !cfg.entries.count("exkurt"))
        cfg.exkurt_rates = {2.0 / 250.0};
    if (!cfg.entries.count("strikes") && !cfg.entries.count("strike") && !cfg.entries.count("K")) cfg.strikes = {100.0};
    if (!cfg.entries.count("maturities") && !cfg.entries.count("maturity") && !cfg.entries.count("T"))
        cfg.maturities = {0.25};
    if (!cfg.entries.count("models") && !cfg.entries.count("model")) cfg.models = {ModelKind::MertonJD};

    SimConfig sim;
    sim.paths = cfg.paths;
    sim.steps_per_year = cfg.steps_per_year;
    sim.seed = cfg.seed;
    sim.strategy = cfg.strategy;
    sim.ratio_source = cfg.ratio_source;
    sim.threads = cfg.quad.threads;
    sim.quad = cfg.quad;

    json out;
    out["config"] = echo_config(cfg);
    out["strategy"] = to_string(cfg.strategy);
    out["ratio_source"] = to_string(cfg.ratio_source);
    out["cells"] = json::array();
    std::ostringstream csv;
    csv << "# strategy = " << to_string(cfg.strategy) << "\n# ratio_source = " << to_string(cfg.ratio_source)
        << "\n# paths = " << cfg.paths << "\n# seed = " << cfg.seed << "\n# z_threshold = " << cfg.z_threshold
        << "\n# z = max(|analytic - mc| - allowance, 0) / std_error\n";
    csv << "model,exkurt_rate,K,T,analytic,mc_mse,std_error,allowance,z,pass\n";
    bool ok = true;
    for (auto kind : cfg.models)
        for (double ek : cfg.exkurt_rates)
            for (double K : cfg.strikes)
                for (double T : cfg.maturities) {
                    const auto model = calibrate(kind, target_moments(cfg, ek), cfg.jd_jump_vol_share);
                    const Contract c = call_contract(cfg.S0, K, T, cfg.contour_R);
                    double analytic = 0.0;
                    switch (cfg.strategy) {
                        case Strategy::BSDelta: analytic = bs_hedge_error(model, c, cfg.quad).value; break;
                        case Strategy::Pure: analytic = pure_error(model, c, cfg.quad).value; break;
                        case Strategy::VarianceOptimal: analytic = vo_error(model, c, cfg.quad).value; break;
                    }
                    const auto r = run_hedge(model, c, sim);
                    const double dt = rebalancing_grid(T, cfg.steps_per_year).dt;
                    const double allowance = discretization_allowance(model, c, dt, cfg.quad);
                    const double excess = std::max(std::abs(analytic - r.mse) - allowance, 0.0);
                    const double z = r.std_error > 0.0 ? excess / r.std_error : (excess > 0.0 ? INFINITY : 0.0);
                    const bool pass = z <= cfg.z_threshold;
                    ok = ok && pass;
                    out["cells"].push_back({{"model", to_string(kind)},
                                            {"exkurt_rate", ek},
                                            {"K", K},
                                            {"T", T},
                                            {"analytic", analytic},
                                            {"mc_mse", r.mse},
                                            {"std_error", r.std_error},
                                            {"mean_pnl", r.mean_pnl},
                                            {"allowance", allowance},
                                            {"z", z},
                                            {"pass", pass}});
                    csv << to_string(kind) << ',' << std::setprecision(17) << ek << ',' << K << ',' << T << ','
                        << std::fixed << std::setprecision(6) << analytic << ',' << r.mse << ',' << r.std_error << ','
                        << allowance << ',' << std::setprecision(3) << z << ',' << (pass ? "yes" : "no") << '\n'
                        << std::defaultfloat;
                }
    out["pass"] = ok;
    emit(o, o.format == "json" ? out.dump(2) + "\n" : csv.str());
    return ok ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variance-optimal, pure and Black-Scholes hedges of European options in exponential Levy models"};
    app.require_subcommand(1);
    Common o;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "flat key = value config file")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out_path, "output file (default stdout)");
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--set", o.settings, "override a config key: key=value (repeatable)");
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](const std::uint64_t& s) { o.seed = s, o.seed_set = true; }, "Monte Carlo seed");
        sub->add_option("--tol", o.tol, "relative quadrature tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--contour-R", o.contour_R, "real part of the inversion contour");
    };
    auto* cal = app.add_subcommand("calibrate", "fit JD/NIG/VG parameters to the configured moments");
    auto* quote = app.add_subcommand("quote", "exact and approximate hedge report for one model and contract");
    auto* table = app.add_subcommand("table", "reproduce the capital, ratio or error table");
    auto* validate = app.add_subcommand("validate", "Monte Carlo check of the analytic hedging errors");
    std::string which;
    table->add_option("which", which, "capital | ratio | error")
        ->required()
        ->check(CLI::IsMember({"capital", "ratio", "error"}));
    for (auto* s : {cal, quote, table, validate}) add_common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfig;
    }

    try {
        if (*cal) return cmd_calibrate(o);
        if (*quote) return cmd_quote(o);
        if (*table) return cmd_table(o, which);
        if (*validate) return cmd_validate(o);
    } catch (const CalibrationError& e) {
        std::cerr << "calibration error: " << e.what() << '\n';
        return kCalibration;
    } catch (const QuadratureError& e) {
        std::cerr << "quadrature error: " << e.what() << '\n';
        return kQuadrature;
    } catch (const Error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    }
    return kOk;
}
