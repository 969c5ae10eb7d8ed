#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lqh/approx_engine.hpp"
#include "lqh/bs_analytics.hpp"
#include "lqh/exact_engine.hpp"
#include "lqh/levy_models.hpp"
#include "lqh/mc_validator.hpp"
#include "lqh/payoff_transform.hpp"
#include "lqh/tables.hpp"

namespace py = pybind11;
using namespace lqh;

namespace {

template <class Fn>
py::dict breakdown(Fn&& make) {
    const ApproxBreakdown b = make();
    py::dict d;
    d["order0"] = b.order0;
    d["order1"] = b.order1;
    d["order2"] = b.order2;
    d["total"] = b.total;
    return d;
}

std::string table_text(const Table& t, bool json) {
    std::ostringstream os;
    if (json)
        write_json(os, t);
    else
        write_csv(os, t);
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Variance-optimal and Black-Scholes hedging errors in exponential Levy models";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());
    py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<CalibrationError>(m, "CalibrationError", base.ptr());

    py::class_<QuadratureConfig>(m, "QuadratureConfig")
        .def(py::init<>())
        .def_readwrite("rel_tol", &QuadratureConfig::rel_tol)
        .def_readwrite("abs_tol", &QuadratureConfig::abs_tol)
        .def_readwrite("panel_width", &QuadratureConfig::panel_width)
        .def_readwrite("initial_halfwidth", &QuadratureConfig::initial_halfwidth)
        .def_readwrite("max_nodes", &QuadratureConfig::max_nodes)
        .def_readwrite("threads", &QuadratureConfig::threads);

    py::enum_<ModelKind>(m, "ModelKind")
        .value("BS", ModelKind::BS)
        .value("JD", ModelKind::MertonJD)
        .value("NIG", ModelKind::NIG)
        .value("VG", ModelKind::VG);

    py::class_<LevyMoments>(m, "LevyMoments")
        .def(py::init([](double mu, double sigma, double skew_rate, double exkurt_rate) {
                 return LevyMoments{mu, sigma, skew_rate, exkurt_rate};
             }),
             py::arg("mu"), py::arg("sigma"), py::arg("skew_rate") = 0.0, py::arg("exkurt_rate") = 0.0)
        .def_readwrite("mu", &LevyMoments::mu)
        .def_readwrite("sigma", &LevyMoments::sigma)
        .def_readwrite("skew_rate", &LevyMoments::skew_rate)
        .def_readwrite("exkurt_rate", &LevyMoments::exkurt_rate);

    py::class_<LevyModel>(m, "LevyModel")
        .def_readonly("kind", &LevyModel::kind)
        .def_readonly("domain_halfwidth", &LevyModel::domain_halfwidth)
        .def_readonly("lambda_", &LevyModel::lambda)
        .def("kappa", [](const LevyModel& model, cplx z) { return kappa(model, z); })
        .def("cumulants", [](const LevyModel& model) { return cumulants(model); })
        .def("moments", [](const LevyModel& model) { return moments(model); })
        .def("perturbed", [](const LevyModel& model, double lam) { return perturbed(model, lam); });

    m.def(
        "calibrate",
        [](ModelKind kind, const LevyMoments& mo, double share) { return calibrate(kind, mo, share); },
        py::arg("kind"), py::arg("moments"), py::arg("jd_jump_vol_share") = 0.7);

    py::class_<Contract>(m, "Contract")
        .def_readonly("S0", &Contract::S0)
        .def_readonly("T", &Contract::T)
        .def_readonly("strike", &Contract::strike);
    m.def("call_contract", &call_contract, py::arg("S0"), py::arg("K"), py::arg("T"), py::arg("R") = 1.5);
    m.def(
        "payoff", [](const Contract& c, double s, const QuadratureConfig& q) { return invert(c.payoff, s, q); },
        py::arg("contract"), py::arg("s"), py::arg("quad") = QuadratureConfig{});

    m.def("bs_price", &call::price, py::arg("sigma"), py::arg("tau"), py::arg("s"), py::arg("K"));
    m.def("bs_delta", &call::delta, py::arg("sigma"), py::arg("tau"), py::arg("s"), py::arg("K"));

    py::class_<HedgeStructure>(m, "HedgeStructure")
        .def(py::init<LevyModel, Contract, QuadratureConfig>(), py::arg("model"), py::arg("contract"),
             py::arg("quad") = QuadratureConfig{})
        .def_property_readonly("Lambda", &HedgeStructure::Lambda)
        .def_property_readonly("v", &HedgeStructure::v)
        .def("H", &HedgeStructure::H, py::arg("t"), py::arg("s"))
        .def("xi", &HedgeStructure::xi, py::arg("t"), py::arg("s"))
        .def(
            "vo_ratio", [](const HedgeStructure& hs, double t, double s, double g) { return vo_hedge_ratio(hs, t, s, g); },
            py::arg("t"), py::arg("s"), py::arg("g"));

    auto err = [](ErrorQuadrature (*fn)(const LevyModel&, const Contract&, const QuadratureConfig&, bool)) {
        return [fn](const LevyModel& model, const Contract& c, const QuadratureConfig& q) { return fn(model, c, q, true).value; };
    };
    m.def("vo_error", err(&vo_error), py::arg("model"), py::arg("contract"), py::arg("quad") = QuadratureConfig{});
    m.def("pure_error", err(&pure_error), py::arg("model"), py::arg("contract"), py::arg("quad") = QuadratureConfig{});
    m.def("bs_hedge_error", err(&bs_hedge_error), py::arg("model"), py::arg("contract"),
          py::arg("quad") = QuadratureConfig{});

    m.def(
        "approx_initial_capital",
        [](const LevyMoments& mo, const Contract& c) { return breakdown([&] { return approx_initial_capital(mo, c); }); },
        py::arg("moments"), py::arg("contract"));
    m.def(
        "approx_pure_ratio",
        [](const LevyMoments& mo, const Contract& c, double t, double s) {
            return breakdown([&] { return approx_pure_ratio(mo, c, t, s); });
        },
        py::arg("moments"), py::arg("contract"), py::arg("t"), py::arg("s"));
    m.def(
        "approx_lambda", [](const LevyMoments& mo) { return breakdown([&] { return approx_lambda(mo); }); },
        py::arg("moments"));
    m.def(
        "approx_vo_error", [](const LevyMoments& mo, const Contract& c) { return approx_vo_error(mo, c); },
        py::arg("moments"), py::arg("contract"));
    m.def(
        "approx_pure_error", [](const LevyMoments& mo, const Contract& c) { return approx_pure_error(mo, c); },
        py::arg("moments"), py::arg("contract"));
    m.def(
        "approx_bs_error", [](const LevyMoments& mo, const Contract& c) { return approx_bs_error(mo, c); },
        py::arg("moments"), py::arg("contract"));
    m.def(
        "timestep_equivalent", [](const LevyMoments& mo) { return timestep_equivalent(mo); }, py::arg("moments"));

    py::class_<SimResult>(m, "SimResult")
        .def_readonly("mse", &SimResult::mse)
        .def_readonly("std_error", &SimResult::std_error)
        .def_readonly("mean_pnl", &SimResult::mean_pnl)
        .def_readonly("paths_used", &SimResult::paths_used);
    m.def(
        "run_hedge",
        [](const LevyModel& model, const Contract& c, const std::string& strategy, const std::string& ratio_source,
           std::size_t paths, int steps_per_year, std::uint64_t seed, unsigned threads) {
            SimConfig cfg;
            cfg.strategy = parse_strategy(strategy);
            cfg.ratio_source = parse_ratio_source(ratio_source);
            cfg.paths = paths;
            cfg.steps_per_year = steps_per_year;
            cfg.seed = seed;
            cfg.threads = threads;
            py::gil_scoped_release release;
            return run_hedge(model, c, cfg);
        },
        py::arg("model"), py::arg("contract"), py::arg("strategy") = "bs", py::arg("ratio_source") = "approx",
        py::arg("paths") = 10'000, py::arg("steps_per_year") = 250, py::arg("seed") = 1, py::arg("threads") = 0);

    m.def(
        "build_table",
        [](const std::string& kind, const std::string& config_text, const std::string& format) {
            std::istringstream in(config_text);
            const RunConfig cfg = parse_run_config(in);
            Table t;
            {
                py::gil_scoped_release release;
                t = build_table(parse_table_kind(kind), cfg);
            }
            return table_text(t, format == "json");
        },
        py::arg("kind"), py::arg("config") = "", py::arg("format") = "csv");
}
