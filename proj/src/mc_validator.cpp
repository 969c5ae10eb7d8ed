#include "lqh/mc_validator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "lqh/approx_engine.hpp"
#include "lqh/bs_analytics.hpp"
#include "lqh/exact_engine.hpp"
#include "parallel.hpp"

namespace lqh {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

double std_normal(KeyedRng& rng) { return boost::random::normal_distribution<double>(0.0, 1.0)(rng); }

// Michael, Schucany and Haas transform for IG(mean, shape).
double inverse_gaussian(double mean, double shape, KeyedRng& rng) {
    const double n = std_normal(rng);
    const double y = n * n;
    const double my = mean * y;
    const double x = mean + mean * my / (2.0 * shape) - mean / (2.0 * shape) * std::sqrt(4.0 * shape * my + my * my);
    const double u = boost::random::uniform_01<double>()(rng);
    return u <= mean / (mean + x) ? x : mean * mean / x;
}

double payoff_at(const Contract& c, double s) { return std::max(s - *c.strike, 0.0); }

// Catmull-Rom tensor-product interpolation on a uniform grid; clamps outside.
class Bicubic {
public:
    Bicubic(int nx, double x0, double dx, int ny, double y0, double dy)
        : nx_(nx), ny_(ny), x0_(x0), dx_(dx), y0_(y0), dy_(dy), v_(static_cast<std::size_t>(nx) * ny) {}

    double& at(int i, int j) { return v_[static_cast<std::size_t>(i) * ny_ + j]; }

    double operator()(double x, double y) const {
        double wx[4], wy[4];
        int ix, iy;
        locate(x, x0_, dx_, nx_, ix, wx);
        locate(y, y0_, dy_, ny_, iy, wy);
        double acc = 0.0;
        for (int a = 0; a < 4; ++a) {
            const int i = std::clamp(ix - 1 + a, 0, nx_ - 1);
            double row = 0.0;
            for (int b = 0; b < 4; ++b) {
                const int j = std::clamp(iy - 1 + b, 0, ny_ - 1);
                row += wy[b] * v_[static_cast<std::size_t>(i) * ny_ + j];
            }
            acc += wx[a] * row;
        }
        return acc;
    }

private:
    static void locate(double x, double x0, double dx, int n, int& i, double w[4]) {
        double u = std::clamp((x - x0) / dx, 0.0, static_cast<double>(n - 1));
        i = std::min(static_cast<int>(u), n - 2);
        const double f = u - i, f2 = f * f, f3 = f2 * f;
        w[0] = 0.5 * (-f + 2.0 * f2 - f3);
        w[1] = 0.5 * (2.0 - 5.0 * f2 + 3.0 * f3);
        w[2] = 0.5 * (f + 4.0 * f2 - 3.0 * f3);
        w[3] = 0.5 * (-f2 + f3);
    }

    int nx_, ny_;
    double x0_, dx_, y0_, dy_;
    std::vector<double> v_;
};

struct Hedger {
    double capital = 0.0;
    std::function<double(double tau, double s, double gains)> ratio;
};

Hedger make_hedger(const LevyModel& model, const Contract& c, const SimConfig& cfg, double tau_min) {
    const auto mo = moments(model);
    const double K = *c.strike, T = c.T, sg = mo.sigma;
    Hedger h;
    if (cfg.strategy == Strategy::BSDelta) {
        h.capital = call::price(sg, T, c.S0, K);
        h.ratio = [=](double tau, double s, double) { return call::delta(sg, tau, s, K); };
        return h;
    }
    const bool vo = cfg.strategy == Strategy::VarianceOptimal;
    if (cfg.ratio_source == RatioSource::ApproxFormula) {
        const auto D0 = call::cash_greeks(sg, T, c.S0, K);
        h.capital = mean_value_from_greeks(mo, D0, T).total;
        if (vo) {
            h.ratio = [=](double tau, double s, double g) {
                return vo_ratio_from_greeks(mo, call::cash_greeks(sg, tau, s, K), tau, s, D0, T, g).total;
            };
        } else {
            h.ratio = [=](double tau, double s, double) {
                return pure_ratio_from_greeks(mo, call::cash_greeks(sg, tau, s, K), tau, s).total;
            };
        }
        return h;
    }

    const auto hs = hedge_structure(model, c, cfg.quad);
    const int nt = std::max(cfg.grid_time, 2), nx = std::max(cfg.grid_space, 2);
    const double th0 = std::sqrt(std::min(tau_min, T)), th1 = std::sqrt(T);
    const double dth = nt > 1 && th1 > th0 ? (th1 - th0) / (nt - 1) : 1.0;
    const double half = cfg.grid_width_sd * sg * std::sqrt(T);
    const double x0 = std::log(c.S0) - half, dx = 2.0 * half / (nx - 1);
    auto xi = std::make_shared<Bicubic>(nt, th0, dth, nx, x0, dx);
    auto H = std::make_shared<Bicubic>(nt, th0, dth, nx, x0, dx);
    const auto vals = detail::parallel_map<std::pair<double, double>>(
        static_cast<std::size_t>(nt) * nx, cfg.threads, [&](std::size_t k) {
            const int i = static_cast<int>(k / nx), j = static_cast<int>(k % nx);
            const double tau = std::pow(th0 + dth * i, 2);
            return hs.H_and_xi(std::max(T - tau, 0.0), std::exp(x0 + dx * j));
        });
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nx; ++j) {
            H->at(i, j) = vals[static_cast<std::size_t>(i) * nx + j].first;
            xi->at(i, j) = vals[static_cast<std::size_t>(i) * nx + j].second;
        }
    h.capital = hs.v();
    const double L = hs.Lambda(), v = hs.v();
    if (vo) {
        h.ratio = [=](double tau, double s, double g) {
            const double th = std::sqrt(tau), x = std::log(s);
            return (*xi)(th, x) + L / s * ((*H)(th, x) - v - g);
        };
    } else {
        h.ratio = [=](double tau, double s, double) { return (*xi)(std::sqrt(tau), std::log(s)); };
    }
    return h;
}

void check_inputs(const LevyModel& model, const Contract& c, const SimConfig& cfg) {
    if (cfg.paths < 1) throw ParameterError("simulation needs at least one path");
    if (cfg.steps_per_year < 1) throw ParameterError("simulation needs steps_per_year >= 1");
    if (!(c.T > 0.0) || !(c.S0 > 0.0)) throw ParameterError("simulation needs S0 > 0 and T > 0");
    if (model.lambda != 1.0) throw ParameterError("simulation supports unperturbed models only");
    if (!(cumulants(model)[1] > 0.0)) throw ParameterError("simulation needs a non-degenerate model");
}

}  // namespace

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::BSDelta: return "bs_delta";
        case Strategy::Pure: return "pure";
        case Strategy::VarianceOptimal: return "variance_optimal";
    }
    return "?";
}

std::string to_string(RatioSource r) { return r == RatioSource::ApproxFormula ? "approx" : "exact_grid"; }

Strategy parse_strategy(const std::string& name) {
    if (name == "bs_delta" || name == "bs") return Strategy::BSDelta;
    if (name == "pure") return Strategy::Pure;
    if (name == "variance_optimal" || name == "vo") return Strategy::VarianceOptimal;
    throw ParameterError("unknown strategy: " + name);
}

RatioSource parse_ratio_source(const std::string& name) {
    if (name == "approx") return RatioSource::ApproxFormula;
    if (name == "exact_grid" || name == "exact") return RatioSource::ExactGrid;
    throw ParameterError("unknown ratio source: " + name);
}

KeyedRng::KeyedRng(std::uint64_t seed, std::uint64_t path, std::uint64_t step)
    : state_(mix64(mix64(mix64(seed + kGolden) ^ (path + kGolden)) ^ (step * kGolden + 1))) {}

KeyedRng::result_type KeyedRng::operator()() {
    state_ += kGolden;
    return mix64(state_);
}

double sample_increment(const LevyModel& model, double dt, std::uint64_t seed, std::uint64_t path,
                        std::uint64_t step) {
    KeyedRng rng(seed, path, step);
    switch (model.kind) {
        case ModelKind::BS: {
            const auto& p = std::get<BSParams>(model.params);
            return p.mu * dt + p.sigma * std::sqrt(dt) * std_normal(rng);
        }
        case ModelKind::MertonJD: {
            const auto& p = std::get<JDParams>(model.params);
            double x = p.drift * dt + p.diffusion_vol * std::sqrt(dt) * std_normal(rng);
            const double rate = p.jump_intensity * dt;
            const int n = rate > 0.0 ? boost::random::poisson_distribution<int, double>(rate)(rng) : 0;
            if (n > 0) x += n * p.jump_mean + p.jump_sd * std::sqrt(static_cast<double>(n)) * std_normal(rng);
            return x;
        }
        case ModelKind::NIG: {
            const auto& p = std::get<NIGParams>(model.params);
            const double g = std::sqrt(p.alpha * p.alpha - p.beta * p.beta);
            const double d = p.delta * dt;
            const double V = inverse_gaussian(d / g, d * d, rng);
            return p.drift * dt + p.beta * V + std::sqrt(V) * std_normal(rng);
        }
        case ModelKind::VG: {
            const auto& p = std::get<VGParams>(model.params);
            const double G = boost::random::gamma_distribution<double>(dt / p.vg_nu, p.vg_nu)(rng);
            return p.drift * dt + p.vg_theta * G + p.vg_sigma * std::sqrt(G) * std_normal(rng);
        }
    }
    throw ParameterError("unknown model kind");
}

TimeGrid rebalancing_grid(double T, int steps_per_year) {
    if (!(T > 0.0) || steps_per_year < 1) throw ParameterError("rebalancing grid needs T > 0 and steps_per_year >= 1");
    TimeGrid g;
    g.dt = 1.0 / steps_per_year;
    // A remainder shorter than a quarter step is merged into the previous interval.
    for (std::size_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * g.dt;
        if (k > 0 && t > T - 0.25 * g.dt) break;
        g.times.push_back(t);
    }
    return g;
}

PathBatch simulate_paths(const LevyModel& model, const Contract& contract, const SimConfig& cfg) {
    check_inputs(model, contract, cfg);
    PathBatch b;
    b.paths = cfg.paths;
    b.grid = rebalancing_grid(contract.T, cfg.steps_per_year);
    const std::size_t n = b.steps();
    b.increments.resize(b.paths * n);
    detail::parallel_map<char>(b.paths, cfg.threads, [&](std::size_t p) {
        for (std::size_t k = 0; k < n; ++k)
            b.increments[p * n + k] = sample_increment(model, b.grid.length(k, contract.T), cfg.seed, p, k);
        return char{0};
    });
    return b;
}

SimResult run_hedge(const LevyModel& model, const Contract& c, const SimConfig& cfg) {
    check_inputs(model, c, cfg);
    if (!c.strike) throw ParameterError("Monte Carlo hedging needs a call contract with a strike");
    const TimeGrid grid = rebalancing_grid(c.T, cfg.steps_per_year);
    const std::size_t N = grid.steps();
    const Hedger h = make_hedger(model, c, cfg, std::min(grid.dt, grid.length(N - 1, c.T)));
    const bool dump = !cfg.dump_path.empty();
    const std::size_t dumped = dump ? std::min(cfg.dump_paths, cfg.paths) : 0;
    std::vector<std::string> rows(dumped);

    struct PathOut {
        double err = 0.0, err2 = 0.0, err4 = 0.0;
    };
    const auto outs = detail::parallel_map<PathOut>(cfg.paths, cfg.threads, [&](std::size_t p) {
        double s = c.S0, gains = 0.0;
        std::ostringstream os;
        for (std::size_t k = 0; k < N; ++k) {
            const double t = grid.times[k];
            const double ratio = h.ratio(c.T - t, s, gains);
            if (p < dumped) os << p << ' ' << t << ' ' << s << ' ' << ratio << ' ' << gains << '\n';
            const double next = s * std::exp(sample_increment(model, grid.length(k, c.T), cfg.seed, p, k));
            gains += ratio * (next - s);
            s = next;
        }
        if (p < dumped) {
            os << p << ' ' << c.T << ' ' << s << " nan " << gains << '\n';
            rows[p] = os.str();
        }
        const double e = payoff_at(c, s) - h.capital - gains;
        return PathOut{e, e * e, e * e * e * e};
    });

    std::vector<double> e1(outs.size()), e2(outs.size()), e4(outs.size());
    for (std::size_t i = 0; i < outs.size(); ++i) {
        e1[i] = outs[i].err;
        e2[i] = outs[i].err2;
        e4[i] = outs[i].err4;
    }
    const double n = static_cast<double>(cfg.paths);
    SimResult r;
    r.paths_used = cfg.paths;
    r.mean_pnl = detail::tree_sum(e1) / n;
    r.mse = detail::tree_sum(e2) / n;
    const double var2 = n > 1 ? std::max(detail::tree_sum(e4) / n - r.mse * r.mse, 0.0) * n / (n - 1.0) : 0.0;
    r.std_error = std::sqrt(var2 / n);

    if (dump) {
        std::ofstream out(cfg.dump_path);
        if (!out) throw ParameterError("cannot open dump file " + cfg.dump_path);
        out << "path_id t S_t ratio gains\n";
        for (const auto& row : rows) out << row;
    }
    return r;
}

double discretization_allowance(const LevyModel& model, const Contract& contract, double dt,
                                const QuadratureConfig& quad) {
    const auto mo = moments(model);
    const GreekCombination d2{single_greek(2)};
    const BSWorld world{mo.mu, mo.sigma, contract.S0, contract.T};
    return 0.5 * std::pow(mo.sigma, 4) * dt * expected_integral(world, contract.payoff, d2, d2, 0.0, quad).value;
}

}  // namespace lqh
