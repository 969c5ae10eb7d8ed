#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "lqh/core.hpp"
#include "lqh/levy_models.hpp"
#include "lqh/payoff_transform.hpp"

namespace lqh {

enum class Strategy { BSDelta, Pure, VarianceOptimal };
enum class RatioSource { ApproxFormula, ExactGrid };

std::string to_string(Strategy s);
std::string to_string(RatioSource r);
Strategy parse_strategy(const std::string& name);
RatioSource parse_ratio_source(const std::string& name);

struct SimConfig {
    std::size_t paths = 10'000;
    int steps_per_year = 250;
    std::uint64_t seed = 1;
    Strategy strategy = Strategy::BSDelta;
    RatioSource ratio_source = RatioSource::ApproxFormula;
    unsigned threads = 0;
    QuadratureConfig quad{};
    // ExactGrid resolution: time nodes (uniform in sqrt(T - t)) x log-spot nodes.
    int grid_time = 64;
    int grid_space = 257;
    double grid_width_sd = 6.0;
    // Optional per-step dump of the first dump_paths paths.
    std::string dump_path;
    std::size_t dump_paths = 16;
};

struct SimResult {
    double mse = 0.0;
    double std_error = 0.0;
    double mean_pnl = 0.0;
    std::size_t paths_used = 0;
};

// A counter-based generator: the stream for (seed, path, step) is a pure
// function of the key, so any thread may draw any path.
class KeyedRng {
public:
    using result_type = std::uint64_t;
    KeyedRng(std::uint64_t seed, std::uint64_t path, std::uint64_t step);
    result_type operator()();
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    std::uint64_t state_;
};

// One increment of X over dt for the given key.
double sample_increment(const LevyModel& model, double dt, std::uint64_t seed, std::uint64_t path,
                        std::uint64_t step);

// Rebalancing dates t_k = k / steps_per_year below T; the last interval ends at T
// and may be shorter than the others.
struct TimeGrid {
    double dt = 0.0;
    std::vector<double> times;  // t_0 = 0 < t_1 < ... < t_{n-1} < T

    std::size_t steps() const { return times.size(); }
    double length(std::size_t k, double T) const { return (k + 1 < times.size() ? times[k + 1] : T) - times[k]; }
};

TimeGrid rebalancing_grid(double T, int steps_per_year);

struct PathBatch {
    std::size_t paths = 0;
    TimeGrid grid;
    std::vector<double> increments;  // row-major, paths x steps

    std::size_t steps() const { return grid.steps(); }
    double at(std::size_t path, std::size_t step) const { return increments[path * steps() + step]; }
};

PathBatch simulate_paths(const LevyModel& model, const Contract& contract, const SimConfig& config);
SimResult run_hedge(const LevyModel& model, const Contract& contract, const SimConfig& config);

// Leading-order cost of rebalancing every dt in the moment-matched Black-Scholes model.
double discretization_allowance(const LevyModel& model, const Contract& contract, double dt,
                                const QuadratureConfig& quad = {});

}  // namespace lqh
