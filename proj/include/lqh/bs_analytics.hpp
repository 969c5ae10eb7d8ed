#pragma once

#include <array>
#include <vector>

#include "lqh/core.hpp"
#include "lqh/payoff_transform.hpp"

namespace lqh {

// The moment-matched Black-Scholes world: log-price drift mu and volatility sigma.
struct BSWorld {
    double mu = 0.0;
    double sigma = 0.0;
    double S0 = 100.0;
    double T = 0.25;
};

inline constexpr int kMaxGreek = 7;
using GreekVector = std::array<double, kMaxGreek + 1>;

// q_n(z) = z (z - 1) ... (z - n + 1)
cplx falling_factorial(cplx z, int n);

double bs_price(const BSWorld& world, const PayoffTransform& payoff, double t, double s,
                const QuadratureConfig& quad = {});
double cash_greek(const BSWorld& world, const PayoffTransform& payoff, int n, double t, double s,
                  const QuadratureConfig& quad = {});
// D_0 .. D_7 from one contour pass.
GreekVector cash_greeks(const BSWorld& world, const PayoffTransform& payoff, double t, double s,
                        const QuadratureConfig& quad = {});

// Closed-form call values with zero rate: used as fast paths and test oracles.
namespace call {
double price(double sigma, double tau, double s, double K);
double delta(double sigma, double tau, double s, double K);
GreekVector cash_greeks(double sigma, double tau, double s, double K);
}  // namespace call

// One summand of a cash-greek combination
//   coeff * tau^tau_power * sum_k weights[k] D_k(t, s * exp(spot_shift * tau)),  tau = T - t.
struct GreekTerm {
    double coeff = 1.0;
    int tau_power = 0;
    GreekVector weights{};
    double spot_shift = 0.0;
};
using GreekCombination = std::vector<GreekTerm>;

GreekTerm single_greek(int n, double coeff = 1.0, int tau_power = 0);

struct ExpectedIntegral {
    double value = 0.0;
    double truncation = 0.0;
    std::size_t nodes = 0;
    double imag_residual = 0.0;
};

// E int_0^T exp(-dampening (T - t)) g1(t, S_t) g2(t, S_t) dt under the world's
// lognormal law, evaluated as a double contour integral.
ExpectedIntegral expected_integral(const BSWorld& world, const PayoffTransform& payoff, const GreekCombination& g1,
                                   const GreekCombination& g2, double dampening = 0.0,
                                   const QuadratureConfig& quad = {}, bool symmetric = true);

}  // namespace lqh
