#include <doctest.h>

#include <json.hpp>
#include <regex>
#include <sstream>

#include "lqh/bs_analytics.hpp"
#include "lqh/tables.hpp"

using namespace lqh;

namespace {

RunConfig one_cell() {
    RunConfig c = default_run_config();
    apply_setting(c, "exkurt", "5/250");
    apply_setting(c, "K", "100");
    apply_setting(c, "T", "1/4");
    return c;
}

}  // namespace

TEST_CASE("numbers accept fractions and reject junk") {
    CHECK(parse_number("1/12") == doctest::Approx(1.0 / 12.0));
    CHECK(parse_number(" 2.5e-1 ") == 0.25);
    CHECK(parse_number("-3/4") == -0.75);
    CHECK_THROWS_AS(parse_number("abc"), ConfigError);
    CHECK_THROWS_AS(parse_number("1/0"), ConfigError);
    CHECK_THROWS_AS(parse_number("3x"), ConfigError);
}

TEST_CASE("config text with sections and comments") {
    std::istringstream in(R"(# study overrides
sigma = 0.3
exkurt = 2/250, 10/250   # two rows
models = VG, NIG
[jd]
diffusion_share = 0.6
[validate]
paths = 5000
strategy = pure
[quad]
rel_tol = 1e-8
)");
    const auto c = parse_run_config(in);
    CHECK(c.sigma == 0.3);
    REQUIRE(c.exkurt_rates.size() == 2);
    CHECK(c.exkurt_rates[1] == doctest::Approx(0.04));
    CHECK(c.models == std::vector<ModelKind>{ModelKind::VG, ModelKind::NIG});
    CHECK(c.jd_jump_vol_share == doctest::Approx(0.8));
    CHECK(c.paths == 5000);
    CHECK(c.strategy == Strategy::Pure);
    CHECK(c.quad.rel_tol == 1e-8);
    CHECK(c.entries.at("validate.paths") == "5000");
}

TEST_CASE("unknown or malformed configuration raises ConfigError") {
    std::istringstream bad_key("volatility = 0.2\n");
    CHECK_THROWS_AS(parse_run_config(bad_key), ConfigError);
    std::istringstream no_eq("sigma 0.2\n");
    CHECK_THROWS_AS(parse_run_config(no_eq), ConfigError);
    std::istringstream open_section("[validate\npaths = 3\n");
    CHECK_THROWS_AS(parse_run_config(open_section), ConfigError);
    RunConfig c = default_run_config();
    CHECK_THROWS_AS(apply_setting(c, "models", "CGMY"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "validate.strategy", "hold"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "jd.diffusion_share", "1.5"), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/lqh.cfg"), ConfigError);
}

TEST_CASE("default preset describes the numerical study") {
    const auto c = default_run_config();
    CHECK(c.exkurt_rates.size() == 3);
    CHECK(c.strikes == std::vector<double>{95.0, 100.0, 105.0});
    CHECK(c.skew_rate == doctest::Approx(0.1 / std::sqrt(250.0)));
    CHECK(c.jd_jump_vol_share * c.jd_jump_vol_share == doctest::Approx(0.51));
}

TEST_CASE("capital table layout, CSV precision and JSON determinism") {
    const auto cfg = one_cell();
    const auto t = build_table(TableKind::Capital, cfg);
    REQUIRE(t.rows.size() == 1);
    REQUIRE(t.columns.size() == 5);
    CHECK(t.columns[3].name == "BS");
    CHECK(t.value(0.02, 100.0, 0.25, "BS") == doctest::Approx(call::price(0.4, 0.25, 100.0, 100.0)).epsilon(1e-9));
    CHECK_THROWS_AS(t.value(0.02, 100.0, 0.25, "CGMY"), ParameterError);

    std::ostringstream csv;
    write_csv(csv, t);
    const std::string text = csv.str();
    CHECK(text.find("# table = capital") != std::string::npos);
    CHECK(text.find("# column JD: ") != std::string::npos);
    CHECK(text.find("exkurt_rate,K,T,JD,NIG,VG,BS,Approx\n") != std::string::npos);
    const std::regex row(R"(0\.02,100,0\.25(,\d+\.\d{3}){5}\n)");
    CHECK(std::regex_search(text, row));

    std::ostringstream j1, j2;
    write_json(j1, t);
    write_json(j2, build_table(TableKind::Capital, cfg));
    CHECK(j1.str() == j2.str());
    const auto parsed = nlohmann::json::parse(j1.str());
    CHECK(parsed["rows"][0]["BS"].get<double>() == t.rows[0].values[3]);
    CHECK(parsed["metadata"]["config.T"] == "1/4");
}

TEST_CASE("error table pairs variance-optimal and Black-Scholes hedge columns") {
    auto cfg = one_cell();
    apply_setting(cfg, "T", "1/12");
    apply_setting(cfg, "models", "NIG");
    const auto t = build_table(TableKind::Error, cfg);
    REQUIRE(t.columns.size() == 4);
    CHECK(t.columns[0].name == "NIG");
    CHECK(t.columns[1].name == "Approx");
    CHECK(t.columns[2].name == "NIG_BS");
    CHECK(t.columns[3].name == "Approx_BS");
    CHECK(t.rows[0].values[0] <= t.rows[0].values[2]);
    CHECK(parse_table_kind("ratio") == TableKind::Ratio);
    CHECK_THROWS_AS(parse_table_kind("greeks"), ConfigError);
}
