#include "lqh/approx_engine.hpp"

#include <cmath>
#include <sstream>

namespace lqh {

namespace {

constexpr double kFlatDrift = 1e-7;

void check_moments(const LevyMoments& mo) {
    if (!(mo.sigma > 0.0)) throw ParameterError("approximations need sigma > 0");
}

double dot(const GreekVector& w, const GreekVector& D) {
    double acc = 0.0;
    for (int k = 0; k <= kMaxGreek; ++k) acc += w[k] * D[k];
    return acc;
}

void check_time(const Contract& c, double t) {
    if (!(t >= 0.0) || !(t < c.T)) throw ParameterError("approximations are defined for 0 <= t < T");
}

void warn_if_platykurtic(const LevyMoments& mo, std::vector<std::string>* warnings) {
    const double gap = mo.exkurt_rate - mo.skew_rate * mo.skew_rate;
    if (gap < 0.0 && warnings) {
        std::ostringstream os;
        os << "ExKurt - Skew^2 = " << gap << " < 0: second-order error approximation is not meaningful";
        warnings->push_back(os.str());
    }
}

}  // namespace

double drift_ratio(const LevyMoments& mo) {
    check_moments(mo);
    return (mo.mu + 0.5 * mo.sigma * mo.sigma) / (mo.sigma * mo.sigma);
}

GreekCoefficients mean_value_coefficients(double m) {
    GreekCoefficients k;
    k.m = m;
    k.a[2] = 0.5 - 0.5 * m;
    k.a[3] = 1.0 / 6.0;
    k.b[2] = m - 1.0 / 6.0;
    k.c[2] = 0.5 - m / 3.0 + 0.5 * m * m;
    k.c[3] = 13.0 / 6.0 - 3.0 * m + m * m;
    k.c[4] = 1.75 - 1.5 * m + 0.25 * m * m;
    k.c[5] = 5.0 / 12.0 - m / 6.0;
    k.c[6] = 1.0 / 36.0;
    k.d[2] = 7.0 / 12.0 - 1.5 * m;
    k.d[3] = 0.5 - m / 3.0;
    k.d[4] = 1.0 / 12.0;
    return k;
}

GreekCoefficients pure_ratio_coefficients(double m) {
    GreekCoefficients k;
    k.m = m;
    k.a[2] = 0.5;
    k.b[2] = 1.0 - m;
    k.b[3] = 1.0 - 0.5 * m;
    k.b[4] = 1.0 / 6.0;
    k.c[2] = -1.0;
    k.d[2] = 2.0 / 3.0 + m;
    k.d[3] = 17.0 / 6.0 - m;
    k.d[4] = 1.5 - 0.5 * m;
    k.d[5] = 1.0 / 6.0;
    k.e[2] = 1.0 - 2.0 * m + m * m;
    k.e[3] = 7.0 - 10.0 * m + 3.5 * m * m;
    k.e[4] = 55.0 / 6.0 - 9.0 * m + 2.0 * m * m;
    k.e[5] = 23.0 / 6.0 - 7.0 / 3.0 * m + 0.25 * m * m;
    k.e[6] = 7.0 / 12.0 - m / 6.0;
    k.e[7] = 1.0 / 36.0;
    k.f[2] = 1.5;
    k.f[3] = 1.0 / 3.0;
    k.g[2] = 7.0 / 6.0 - 3.0 * m;
    k.g[3] = 25.0 / 12.0 - 2.5 * m;
    k.g[4] = 5.0 / 6.0 - m / 3.0;
    k.g[5] = 1.0 / 12.0;
    return k;
}

BSWorld bs_world(const LevyMoments& mo, const Contract& c) {
    check_moments(mo);
    return BSWorld{mo.mu, mo.sigma, c.S0, c.T};
}

ApproxBreakdown mean_value_from_greeks(const LevyMoments& mo, const GreekVector& D, double tau) {
    const auto k = mean_value_coefficients(drift_ratio(mo));
    const double sg = mo.sigma, sk = mo.skew_rate, ek = mo.exkurt_rate;
    const double s2 = sg * sg, s3 = s2 * sg, s4 = s2 * s2;
    const double h1 = sk * s3 * tau * dot(k.a, D);
    const double h2 = sk * sk * s4 * tau * (k.b[2] * D[2] + s2 * tau * dot(k.c, D)) + ek * s4 * tau * dot(k.d, D);
    return ApproxBreakdown::from_orders(D[0], h1, h2);
}

ApproxBreakdown pure_ratio_from_greeks(const LevyMoments& mo, const GreekVector& D, double tau, double s) {
    const auto k = pure_ratio_coefficients(drift_ratio(mo));
    const double sg = mo.sigma, sk = mo.skew_rate, ek = mo.exkurt_rate;
    const double s2 = sg * sg;
    const double x0 = D[1] / s;
    const double x1 = sk * sg / s * (k.a[2] * D[2] + s2 * tau * dot(k.b, D));
    const double x2 = sk * sk * s2 / s * (k.c[2] * D[2] + s2 * tau * dot(k.d, D)) +
                      sk * sk * s2 * s2 * s2 * tau * tau / s * dot(k.e, D) +
                      ek * s2 / s * (dot(k.f, D) + s2 * tau * dot(k.g, D));
    return ApproxBreakdown::from_orders(x0, x1, x2);
}

ApproxBreakdown approx_mean_value(const LevyMoments& mo, const Contract& c, double t, double s,
                                  const QuadratureConfig& quad) {
    check_time(c, t);
    return mean_value_from_greeks(mo, cash_greeks(bs_world(mo, c), c.payoff, t, s, quad), c.T - t);
}

ApproxBreakdown approx_initial_capital(const LevyMoments& mo, const Contract& c, const QuadratureConfig& quad) {
    return approx_mean_value(mo, c, 0.0, c.S0, quad);
}

ApproxBreakdown approx_pure_ratio(const LevyMoments& mo, const Contract& c, double t, double s,
                                  const QuadratureConfig& quad) {
    check_time(c, t);
    return pure_ratio_from_greeks(mo, cash_greeks(bs_world(mo, c), c.payoff, t, s, quad), c.T - t, s);
}

ApproxBreakdown approx_lambda(const LevyMoments& mo) {
    const double L0 = drift_ratio(mo);
    const double sg = mo.sigma, sk = mo.skew_rate, ek = mo.exkurt_rate;
    const double L1 = sk * sg * (1.0 / 6.0 - L0);
    const double L2 = sk * sk * sg * sg * (2.0 * L0 - 1.0 / 3.0) + ek * sg * sg / 6.0 * (0.5 - 7.0 * L0);
    return ApproxBreakdown::from_orders(L0, L1, L2);
}

ApproxBreakdown vo_ratio_from_greeks(const LevyMoments& mo, const GreekVector& D, double tau, double s,
                                     const GreekVector& D0, double T, double g) {
    const auto xi = pure_ratio_from_greeks(mo, D, tau, s);
    const auto L = approx_lambda(mo);
    const auto here = mean_value_from_greeks(mo, D, tau);
    const auto start = mean_value_from_greeks(mo, D0, T);
    const double gap0 = here.order0 - start.order0 - g;
    const double gap1 = here.order1 - start.order1;
    const double gap2 = here.order2 - start.order2;
    const double chi0 = L.order0 / s * gap0;
    const double chi1 = L.order1 / s * gap0 + L.order0 / s * gap1;
    const double chi2 = L.order2 / s * gap0 + 2.0 * L.order1 / s * gap1 + L.order0 / s * gap2;
    return ApproxBreakdown::from_orders(xi.order0 + chi0, xi.order1 + chi1, xi.order2 + chi2);
}

ApproxBreakdown approx_vo_ratio(const LevyMoments& mo, const Contract& c, double t, double s, double g,
                                const QuadratureConfig& quad) {
    check_time(c, t);
    const auto world = bs_world(mo, c);
    return vo_ratio_from_greeks(mo, cash_greeks(world, c.payoff, t, s, quad), c.T - t, s,
                                cash_greeks(world, c.payoff, 0.0, c.S0, quad), c.T, g);
}

double approx_vo_error(const LevyMoments& mo, const Contract& c, const QuadratureConfig& quad,
                       std::vector<std::string>* warnings) {
    warn_if_platykurtic(mo, warnings);
    const double m = drift_ratio(mo);
    const double s4 = std::pow(mo.sigma, 4);
    const double lead = 0.25 * s4 * (mo.exkurt_rate - mo.skew_rate * mo.skew_rate);
    if (lead == 0.0) return 0.0;
    const GreekCombination d2{single_greek(2)};
    const double damp = m * m * mo.sigma * mo.sigma;
    return lead * expected_integral(bs_world(mo, c), c.payoff, d2, d2, damp, quad).value;
}

double approx_pure_error(const LevyMoments& mo, const Contract& c, const QuadratureConfig& quad,
                         std::vector<std::string>* warnings) {
    warn_if_platykurtic(mo, warnings);
    const double s4 = std::pow(mo.sigma, 4);
    const double lead = 0.25 * s4 * (mo.exkurt_rate - mo.skew_rate * mo.skew_rate);
    if (lead == 0.0) return 0.0;
    const GreekCombination d2{single_greek(2)};
    return lead * expected_integral(bs_world(mo, c), c.payoff, d2, d2, 0.0, quad).value;
}

GreekCombination bs_correction_A(const LevyMoments& mo) {
    const double m = drift_ratio(mo);
    if (std::abs(m) < kFlatDrift) {
        GreekTerm t;
        t.tau_power = 1;
        t.weights[3] = 1.0;
        t.weights[2] = 3.0;
        return {t};
    }
    const double drift = m * mo.sigma * mo.sigma;
    GreekTerm up, down;
    up.weights[2] = down.weights[2] = 1.0;
    up.weights[1] = down.weights[1] = 1.0;
    up.weights[0] = down.weights[0] = -1.0;
    up.coeff = 1.0 / drift;
    up.spot_shift = drift;
    down.coeff = -1.0 / drift;
    return {up, down};
}

GreekCombination bs_correction_B(const LevyMoments& mo) {
    const double m = drift_ratio(mo);
    if (std::abs(m) < kFlatDrift) {
        GreekTerm t;
        t.tau_power = 1;
        t.weights[4] = 1.0;
        t.weights[3] = 6.0;
        t.weights[2] = 6.0;
        return {t};
    }
    const double drift = m * mo.sigma * mo.sigma;
    GreekTerm up, down;
    up.weights[3] = down.weights[3] = 1.0;
    up.weights[2] = down.weights[2] = 3.0;
    up.coeff = 1.0 / drift;
    up.spot_shift = drift;
    down.coeff = -1.0 / drift;
    return {up, down};
}

double evaluate_combination(const GreekCombination& comb, const BSWorld& world, const PayoffTransform& payoff,
                            double t, double s, const QuadratureConfig& quad) {
    const double tau = world.T - t;
    double acc = 0.0;
    for (const auto& term : comb) {
        const auto D = cash_greeks(world, payoff, t, s * std::exp(term.spot_shift * tau), quad);
        acc += term.coeff * std::pow(tau, term.tau_power) * dot(term.weights, D);
    }
    return acc;
}

double approx_bs_error(const LevyMoments& mo, const Contract& c, const QuadratureConfig& quad,
                       std::vector<std::string>* warnings) {
    const double pure = approx_pure_error(mo, c, quad, warnings);
    const double sk = mo.skew_rate;
    if (sk == 0.0) return pure;
    const auto world = bs_world(mo, c);
    const double s2 = mo.sigma * mo.sigma;
    const double A0 = evaluate_combination(bs_correction_A(mo), world, c.payoff, 0.0, c.S0, quad);

    GreekCombination g{single_greek(2, 0.5 * s2)};
    for (auto term : bs_correction_B(mo)) {
        term.coeff *= s2 * s2 / 6.0;
        g.push_back(term);
    }
    const double path = expected_integral(world, c.payoff, g, g, 0.0, quad).value;
    return pure + sk * sk * s2 * s2 * s2 / 36.0 * A0 * A0 + sk * sk * path;
}

double timestep_equivalent(const LevyMoments& mo, std::vector<std::string>* warnings) {
    const double dt = 0.5 * (mo.exkurt_rate - mo.skew_rate * mo.skew_rate);
    if (dt < 0.0 && warnings) warnings->push_back("negative time step equivalent: ExKurt < Skew^2");
    return dt;
}

}  // namespace lqh
