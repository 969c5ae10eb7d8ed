#include "lqh/tables.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lqh/approx_engine.hpp"
#include "lqh/bs_analytics.hpp"
#include "lqh/exact_engine.hpp"
#include "parallel.hpp"

namespace lqh {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> number_list(const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(parse_number(s));
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

// Shortest representation that round-trips.
std::string fmt(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

}  // namespace

double parse_number(const std::string& text) {
    const std::string t = trim(text);
    const auto slash = t.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const double v = std::stod(t, &used);
            if (used != t.size()) throw ConfigError("trailing characters in number: " + t);
            return v;
        }
        const std::string num = trim(t.substr(0, slash)), den = trim(t.substr(slash + 1));
        const double a = std::stod(num, &used);
        if (used != num.size()) throw ConfigError("bad numerator: " + t);
        const double b = std::stod(den, &used);
        if (used != den.size() || b == 0.0) throw ConfigError("bad denominator: " + t);
        return a / b;
    } catch (const std::logic_error&) {
        throw ConfigError("not a number: '" + t + "'");
    }
}

RunConfig default_run_config() {
    RunConfig c;
    c.skew_rate = 0.1 / std::sqrt(250.0);
    c.exkurt_rates = {2.0 / 250.0, 5.0 / 250.0, 10.0 / 250.0};
    c.strikes = {95.0, 100.0, 105.0};
    c.maturities = {1.0 / 12.0, 0.25, 0.5};
    c.models = {ModelKind::MertonJD, ModelKind::NIG, ModelKind::VG};
    c.jd_jump_vol_share = std::sqrt(1.0 - 0.7 * 0.7);
    return c;
}

void apply_setting(RunConfig& c, const std::string& key_in, const std::string& value) {
    std::string key = key_in;
    std::replace(key.begin(), key.end(), '-', '_');
    try {
        if (key == "S0") c.S0 = parse_number(value);
        else if (key == "mu") c.mu = parse_number(value);
        else if (key == "sigma") c.sigma = parse_number(value);
        else if (key == "skew_rate" || key == "skew") c.skew_rate = parse_number(value);
        else if (key == "exkurt_rates" || key == "exkurt_rate" || key == "exkurt") c.exkurt_rates = number_list(value);
        else if (key == "strikes" || key == "strike" || key == "K") c.strikes = number_list(value);
        else if (key == "maturities" || key == "maturity" || key == "T") c.maturities = number_list(value);
        else if (key == "models" || key == "model") {
            c.models.clear();
            for (const auto& m : split_list(value)) c.models.push_back(parse_model_kind(m));
            if (c.models.empty()) throw ConfigError("empty model list");
        } else if (key == "jd.jump_vol_share" || key == "jd_jump_vol_share") c.jd_jump_vol_share = parse_number(value);
        else if (key == "jd.diffusion_share" || key == "jd_diffusion_share") {
            const double d = parse_number(value);
            if (!(d >= 0.0 && d < 1.0)) throw ConfigError("jd.diffusion_share must lie in [0, 1)");
            c.jd_jump_vol_share = std::sqrt(1.0 - d * d);
        } else if (key == "contour_R" || key == "quad.contour_R") c.contour_R = parse_number(value);
        else if (key == "rel_tol" || key == "tol" || key == "quad.rel_tol") c.quad.rel_tol = parse_number(value);
        else if (key == "abs_tol" || key == "quad.abs_tol") c.quad.abs_tol = parse_number(value);
        else if (key == "max_nodes" || key == "quad.max_nodes") c.quad.max_nodes = static_cast<std::size_t>(parse_number(value));
        else if (key == "panel_width" || key == "quad.panel_width") c.quad.panel_width = parse_number(value);
        else if (key == "threads" || key == "quad.threads") c.quad.threads = static_cast<unsigned>(parse_number(value));
        else if (key == "validate.paths" || key == "paths") c.paths = static_cast<std::size_t>(parse_number(value));
        else if (key == "validate.steps_per_year" || key == "steps_per_year") c.steps_per_year = static_cast<int>(parse_number(value));
        else if (key == "validate.seed" || key == "seed") c.seed = std::stoull(trim(value));
        else if (key == "validate.z_threshold" || key == "z_threshold") c.z_threshold = parse_number(value);
        else if (key == "validate.strategy" || key == "strategy") c.strategy = parse_strategy(trim(value));
        else if (key == "validate.ratio_source" || key == "ratio_source") c.ratio_source = parse_ratio_source(trim(value));
        else throw ConfigError("unknown config key: " + key_in);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("bad value for " + key_in + ": " + e.what());
    }
    c.entries[key] = trim(value);
}

RunConfig parse_run_config(std::istream& in, RunConfig base) {
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        const std::string full = section.empty() || section == "table" ? key : section + "." + key;
        apply_setting(base, full, line.substr(eq + 1));
    }
    return base;
}

RunConfig load_run_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    return parse_run_config(in, std::move(base));
}

LevyMoments target_moments(const RunConfig& cfg, double exkurt_rate) {
    return LevyMoments{cfg.mu, cfg.sigma, cfg.skew_rate, exkurt_rate};
}

std::string to_string(TableKind kind) {
    switch (kind) {
        case TableKind::Capital: return "capital";
        case TableKind::Ratio: return "ratio";
        case TableKind::Error: return "error";
    }
    return "?";
}

TableKind parse_table_kind(const std::string& name) {
    if (name == "capital") return TableKind::Capital;
    if (name == "ratio") return TableKind::Ratio;
    if (name == "error") return TableKind::Error;
    throw ConfigError("unknown table: " + name);
}

double Table::value(double ek, double K, double T, const std::string& column) const {
    auto col = std::find_if(columns.begin(), columns.end(), [&](const TableColumn& c) { return c.name == column; });
    if (col == columns.end()) throw ParameterError("no column " + column);
    const auto idx = static_cast<std::size_t>(col - columns.begin());
    for (const auto& r : rows) {
        if (std::abs(r.exkurt_rate - ek) < 1e-12 && std::abs(r.strike - K) < 1e-9 && std::abs(r.maturity - T) < 1e-12)
            return r.values[idx];
    }
    throw ParameterError("no such table cell");
}

Table build_table(TableKind kind, const RunConfig& cfg) {
    if (cfg.models.empty() || cfg.exkurt_rates.empty() || cfg.strikes.empty() || cfg.maturities.empty())
        throw ConfigError("table needs models, exkurt_rates, strikes and maturities");
    Table tab;
    tab.kind = kind;
    const std::string tol = fmt(cfg.quad.rel_tol);
    const std::string what = kind == TableKind::Capital ? "initial capital v"
                             : kind == TableKind::Ratio ? "initial variance-optimal hedge ratio phi(0, S0, 0)"
                                                        : "sqrt mean squared error of the variance-optimal hedge";
    for (auto m : cfg.models)
        tab.columns.push_back({to_string(m), "exact " + what + ", model " + to_string(m) + ", rel_tol " + tol});
    if (kind == TableKind::Capital) tab.columns.push_back({"BS", "Black-Scholes price C(0, S0), rel_tol " + tol});
    if (kind == TableKind::Ratio) tab.columns.push_back({"BS", "Black-Scholes delta psi(0, S0), rel_tol " + tol});
    tab.columns.push_back({"Approx", "second-order approximation of the " + what + ", rel_tol " + tol});
    if (kind == TableKind::Error) {
        for (auto m : cfg.models)
            tab.columns.push_back({to_string(m) + "_BS", "exact sqrt mean squared error of the Black-Scholes hedge, model " +
                                                             to_string(m) + ", rel_tol " + tol});
        tab.columns.push_back({"Approx_BS", "second-order approximation of the Black-Scholes hedge error, rel_tol " + tol});
    }

    // Calibrate once per (ExKurt, model).
    std::vector<std::vector<LevyModel>> calibrated;
    for (double ek : cfg.exkurt_rates) {
        std::vector<LevyModel> row;
        for (auto m : cfg.models) row.push_back(calibrate(m, target_moments(cfg, ek), cfg.jd_jump_vol_share, &tab.warnings));
        calibrated.push_back(std::move(row));
    }

    struct Job {
        std::size_t e, k, t;
        int model;  // -1: model-free columns
    };
    std::vector<Job> jobs;
    const int nm = static_cast<int>(cfg.models.size());
    for (std::size_t e = 0; e < cfg.exkurt_rates.size(); ++e)
        for (std::size_t k = 0; k < cfg.strikes.size(); ++k)
            for (std::size_t t = 0; t < cfg.maturities.size(); ++t)
                for (int m = -1; m < nm; ++m) jobs.push_back({e, k, t, m});

    const unsigned outer = std::min<unsigned>(detail::resolve_threads(cfg.quad.threads), static_cast<unsigned>(jobs.size()));
    QuadratureConfig quad = cfg.quad;
    if (outer > 1) quad.threads = 1;

    const auto results = detail::parallel_map<std::vector<double>>(jobs.size(), outer, [&](std::size_t j) {
        const Job& job = jobs[j];
        const double ek = cfg.exkurt_rates[job.e], K = cfg.strikes[job.k], T = cfg.maturities[job.t];
        const Contract c = call_contract(cfg.S0, K, T, cfg.contour_R);
        const LevyMoments mo = target_moments(cfg, ek);
        if (job.model >= 0) {
            const LevyModel& model = calibrated[job.e][static_cast<std::size_t>(job.model)];
            switch (kind) {
                case TableKind::Capital: return std::vector<double>{hedge_structure(model, c, quad).v()};
                case TableKind::Ratio: {
                    const auto hs = hedge_structure(model, c, quad);
                    return std::vector<double>{vo_hedge_ratio(hs, 0.0, cfg.S0, 0.0)};
                }
                case TableKind::Error:
                    return std::vector<double>{std::sqrt(vo_error(model, c, quad).value),
                                               std::sqrt(bs_hedge_error(model, c, quad).value)};
            }
        }
        const BSWorld world{mo.mu, mo.sigma, cfg.S0, T};
        switch (kind) {
            case TableKind::Capital:
                return std::vector<double>{bs_price(world, c.payoff, 0.0, cfg.S0, quad),
                                           approx_initial_capital(mo, c, quad).total};
            case TableKind::Ratio:
                return std::vector<double>{cash_greek(world, c.payoff, 1, 0.0, cfg.S0, quad) / cfg.S0,
                                           approx_vo_ratio(mo, c, 0.0, cfg.S0, 0.0, quad).total};
            case TableKind::Error:
                return std::vector<double>{std::sqrt(approx_vo_error(mo, c, quad)), std::sqrt(approx_bs_error(mo, c, quad))};
        }
        return std::vector<double>{};
    });

    const std::size_t per_cell = static_cast<std::size_t>(nm) + 1;
    for (std::size_t j = 0; j < jobs.size(); j += per_cell) {
        TableRow row;
        row.exkurt_rate = cfg.exkurt_rates[jobs[j].e];
        row.strike = cfg.strikes[jobs[j].k];
        row.maturity = cfg.maturities[jobs[j].t];
        const auto& free = results[j];
        if (kind == TableKind::Error) {
            for (int m = 0; m < nm; ++m) row.values.push_back(results[j + 1 + m][0]);
            row.values.push_back(free[0]);
            for (int m = 0; m < nm; ++m) row.values.push_back(results[j + 1 + m][1]);
            row.values.push_back(free[1]);
        } else {
            for (int m = 0; m < nm; ++m) row.values.push_back(results[j + 1 + m][0]);
            row.values.push_back(free[0]);
            row.values.push_back(free[1]);
        }
        tab.rows.push_back(std::move(row));
    }

    tab.metadata = {{"table", to_string(kind)},
                    {"S0", fmt(cfg.S0)},
                    {"mu", fmt(cfg.mu)},
                    {"sigma", fmt(cfg.sigma)},
                    {"skew_rate", fmt(cfg.skew_rate)},
                    {"jd_jump_vol_share", fmt(cfg.jd_jump_vol_share)},
                    {"contour_R", fmt(cfg.contour_R)},
                    {"rel_tol", fmt(cfg.quad.rel_tol)},
                    {"abs_tol", fmt(cfg.quad.abs_tol)},
                    {"max_nodes", std::to_string(cfg.quad.max_nodes)}};
    for (const auto& [k, v] : cfg.entries) tab.metadata.emplace_back("config." + k, v);
    return tab;
}

void write_csv(std::ostream& out, const Table& t) {
    for (const auto& [k, v] : t.metadata) out << "# " << k << " = " << v << '\n';
    for (const auto& c : t.columns) out << "# column " << c.name << ": " << c.description << '\n';
    for (const auto& w : t.warnings) out << "# warning: " << w << '\n';
    out << "exkurt_rate,K,T";
    for (const auto& c : t.columns) out << ',' << c.name;
    out << '\n';
    for (const auto& r : t.rows) {
        out << fmt(r.exkurt_rate) << ',' << fmt(r.strike) << ',' << fmt(r.maturity);
        std::ostringstream os;
        os << std::fixed << std::setprecision(3);
        for (double v : r.values) os << ',' << v;
        out << os.str() << '\n';
    }
}

void write_json(std::ostream& out, const Table& t) {
    nlohmann::ordered_json j;
    j["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.metadata) j["metadata"][k] = v;
    j["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : t.columns) j["columns"].push_back({{"name", c.name}, {"description", c.description}});
    j["warnings"] = t.warnings;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        nlohmann::ordered_json row;
        row["exkurt_rate"] = r.exkurt_rate;
        row["K"] = r.strike;
        row["T"] = r.maturity;
        for (std::size_t i = 0; i < r.values.size(); ++i) row[t.columns[i].name] = r.values[i];
        j["rows"].push_back(row);
    }
    out << j.dump(2) << '\n';
}

}  // namespace lqh
