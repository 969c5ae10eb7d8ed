#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lqh/core.hpp"
#include "lqh/levy_models.hpp"
#include "lqh/mc_validator.hpp"

namespace lqh {

// Everything a CLI run needs. Parsed from flat `key = value` text with
// optional `[section]` headers; a key inside a section is stored as
// `section.key`. Numbers accept the fraction form `a/b`.
struct RunConfig {
    double S0 = 100.0;
    double mu = -0.08;
    double sigma = 0.4;
    double skew_rate = 0.0;
    std::vector<double> exkurt_rates;
    std::vector<double> strikes;
    std::vector<double> maturities;
    std::vector<ModelKind> models;
    // Jump-component standard deviation as a share of sigma for the JD calibration.
    double jd_jump_vol_share = 0.7;
    double contour_R = 1.5;
    QuadratureConfig quad{};

    // validate
    std::size_t paths = 100'000;
    int steps_per_year = 250;
    std::uint64_t seed = 1;
    double z_threshold = 4.0;
    Strategy strategy = Strategy::BSDelta;
    RatioSource ratio_source = RatioSource::ApproxFormula;

    // every key = value pair seen, echoed into output metadata
    std::map<std::string, std::string> entries;
};

// Default study block: S0 = 100, mu = -0.08,
// sigma = 0.4, skew 0.1/sqrt(250), ExKurt in {2, 5, 10}/250, K in {95, 100, 105},
// T in {1/12, 1/4, 1/2}; JD diffusion volatility 0.7 sigma.
RunConfig default_run_config();

double parse_number(const std::string& text);
// Applies the pairs in `in` on top of `base`. Throws ConfigError.
RunConfig parse_run_config(std::istream& in, RunConfig base = default_run_config());
RunConfig load_run_config(const std::string& path, RunConfig base = default_run_config());
// Applies one key (possibly dotted) to the config. Throws ConfigError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

LevyMoments target_moments(const RunConfig& cfg, double exkurt_rate);

enum class TableKind { Capital, Ratio, Error };
std::string to_string(TableKind kind);
TableKind parse_table_kind(const std::string& name);

struct TableColumn {
    std::string name;
    std::string description;
};

struct TableRow {
    double exkurt_rate = 0.0;
    double strike = 0.0;
    double maturity = 0.0;
    std::vector<double> values;  // aligned with Table::columns
};

struct Table {
    TableKind kind = TableKind::Capital;
    std::vector<TableColumn> columns;
    std::vector<TableRow> rows;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> warnings;

    double value(double exkurt_rate, double strike, double maturity, const std::string& column) const;
};

// Capital: exact v per model, BS price, approximation.
// Ratio: exact phi(0, S0, 0) per model, BS delta, approximation.
// Error: sqrt of exact VO error per model, approximation, then the same for the BS hedge.
Table build_table(TableKind kind, const RunConfig& cfg);

void write_csv(std::ostream& out, const Table& table);
void write_json(std::ostream& out, const Table& table);

}  // namespace lqh
