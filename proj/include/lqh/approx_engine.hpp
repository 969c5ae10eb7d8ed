#pragma once

#include <string>
#include <vector>

#include "lqh/bs_analytics.hpp"
#include "lqh/levy_models.hpp"
#include "lqh/payoff_transform.hpp"

namespace lqh {

// Expansion of a quantity along the curve lambda -> model^lambda around the
// Brownian limit: Q ~ order0 + order1 + order2 / 2.
struct ApproxBreakdown {
    double order0 = 0.0;
    double order1 = 0.0;
    double order2 = 0.0;
    double total = 0.0;

    static ApproxBreakdown from_orders(double q0, double q1, double q2) {
        return {q0, q1, q2, q0 + q1 + 0.5 * q2};
    }
};

// Coefficient sets indexed by the cash greek they multiply (entry k belongs to D_k).
struct GreekCoefficients {
    double m = 0.0;
    GreekVector a{}, b{}, c{}, d{}, e{}, f{}, g{};
};

// m = (mu + sigma^2 / 2) / sigma^2
double drift_ratio(const LevyMoments& moments);
GreekCoefficients mean_value_coefficients(double m);
GreekCoefficients pure_ratio_coefficients(double m);

BSWorld bs_world(const LevyMoments& moments, const Contract& contract);

// Closed forms from cash greeks D_0..D_7 already evaluated at (t, s), tau = T - t.
ApproxBreakdown mean_value_from_greeks(const LevyMoments& moments, const GreekVector& D, double tau);
ApproxBreakdown pure_ratio_from_greeks(const LevyMoments& moments, const GreekVector& D, double tau, double s);
// D0 holds the greeks at (0, S0); T is the maturity.
ApproxBreakdown vo_ratio_from_greeks(const LevyMoments& moments, const GreekVector& D, double tau, double s,
                                     const GreekVector& D0, double T, double g);

ApproxBreakdown approx_mean_value(const LevyMoments& moments, const Contract& contract, double t, double s,
                                  const QuadratureConfig& quad = {});
ApproxBreakdown approx_initial_capital(const LevyMoments& moments, const Contract& contract,
                                       const QuadratureConfig& quad = {});
ApproxBreakdown approx_pure_ratio(const LevyMoments& moments, const Contract& contract, double t, double s,
                                  const QuadratureConfig& quad = {});
ApproxBreakdown approx_lambda(const LevyMoments& moments);
ApproxBreakdown approx_vo_ratio(const LevyMoments& moments, const Contract& contract, double t, double s, double g,
                                const QuadratureConfig& quad = {});

// Mean squared hedging errors. A negative ExKurt - Skew^2 is appended to *warnings.
double approx_vo_error(const LevyMoments& moments, const Contract& contract, const QuadratureConfig& quad = {},
                       std::vector<std::string>* warnings = nullptr);
double approx_pure_error(const LevyMoments& moments, const Contract& contract, const QuadratureConfig& quad = {},
                         std::vector<std::string>* warnings = nullptr);
double approx_bs_error(const LevyMoments& moments, const Contract& contract, const QuadratureConfig& quad = {},
                       std::vector<std::string>* warnings = nullptr);

// Correction functions of the Black-Scholes hedge error as cash-greek combinations in (t, s).
GreekCombination bs_correction_A(const LevyMoments& moments);
GreekCombination bs_correction_B(const LevyMoments& moments);
// Pointwise evaluation of a combination from one cash-greek pass per spot shift.
double evaluate_combination(const GreekCombination& comb, const BSWorld& world, const PayoffTransform& payoff,
                            double t, double s, const QuadratureConfig& quad = {});

// Rebalancing interval at which discrete Black-Scholes delta hedging carries the
// same leading-order risk as continuous pure hedging under jumps.
double timestep_equivalent(const LevyMoments& moments, std::vector<std::string>* warnings = nullptr);

}  // namespace lqh
