#include "lqh/bs_analytics.hpp"

#include <cmath>

#include "lqh/quadrature.hpp"

namespace lqh {

namespace {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

cplx bs_exponent(double sigma, cplx z) { return 0.5 * sigma * sigma * z * (z - 1.0); }

void check_world(const BSWorld& w) {
    if (!(w.sigma > 0.0)) throw ParameterError("BS world needs sigma > 0");
    if (!(w.T > 0.0) || !(w.S0 > 0.0)) throw ParameterError("BS world needs S0 > 0 and T > 0");
}

}  // namespace

cplx falling_factorial(cplx z, int n) {
    cplx q = 1.0;
    for (int k = 0; k < n; ++k) q *= (z - static_cast<double>(k));
    return q;
}

GreekVector cash_greeks(const BSWorld& world, const PayoffTransform& payoff, double t, double s,
                        const QuadratureConfig& quad_in) {
    check_world(world);
    if (!(s > 0.0)) throw ParameterError("cash greeks need s > 0");
    const auto quad = quad::fit_to_clearance(quad_in, payoff.pole_clearance);
    const double tau = world.T - t;
    if (!(tau > 0.0)) throw DegenerateError("cash greeks are evaluated for t < T only");
    const double ls = std::log(s);
    using Vec = std::array<cplx, kMaxGreek + 1>;
    auto f = [&](double x) {
        const cplx z(payoff.R, x);
        const cplx base = payoff.weighted(ls, x) * std::exp(bs_exponent(world.sigma, z) * tau);
        Vec v;
        cplx q = 1.0;
        for (int n = 0; n <= kMaxGreek; ++n) {
            v[n] = base * q;
            q *= (z - static_cast<double>(n));
        }
        return v;
    };
    const double scale = 1.0 / (world.sigma * std::sqrt(tau));
    auto r = quad::integrate_halfline<Vec>(f, quad, std::max(quad.initial_halfwidth, 2.0 * scale),
                                           quad::oscillation_wavelength(ls - payoff.log_scale));
    GreekVector out;
    for (int n = 0; n <= kMaxGreek; ++n) out[n] = 2.0 * r.value[n].real();
    return out;
}

double cash_greek(const BSWorld& world, const PayoffTransform& payoff, int n, double t, double s,
                  const QuadratureConfig& quad_in) {
    if (n < 0 || n > kMaxGreek) throw ParameterError("cash greek order must lie in 0..7");
    const auto quad = quad::fit_to_clearance(quad_in, payoff.pole_clearance);
    if (n == 0 && !(world.T - t > 0.0)) return invert(payoff, s, quad);
    check_world(world);
    if (!(s > 0.0)) throw ParameterError("cash greeks need s > 0");
    const double tau = world.T - t;
    if (!(tau > 0.0)) throw DegenerateError("cash greeks of order >= 1 are undefined at t = T");
    const double ls = std::log(s);
    auto f = [&](double x) {
        const cplx z(payoff.R, x);
        return payoff.weighted(ls, x) * std::exp(bs_exponent(world.sigma, z) * tau) * falling_factorial(z, n);
    };
    const double scale = 1.0 / (world.sigma * std::sqrt(tau));
    auto r = quad::integrate_halfline<cplx>(f, quad, std::max(quad.initial_halfwidth, 2.0 * scale),
                                            quad::oscillation_wavelength(ls - payoff.log_scale));
    return 2.0 * r.value.real();
}

double bs_price(const BSWorld& world, const PayoffTransform& payoff, double t, double s,
                const QuadratureConfig& quad) {
    if (t < 0.0 || t > world.T) throw ParameterError("bs_price: t outside [0, T]");
    return cash_greek(world, payoff, 0, t, s, quad);
}

namespace call {

double price(double sigma, double tau, double s, double K) {
    if (tau <= 0.0) return std::max(s - K, 0.0);
    const double v = sigma * std::sqrt(tau);
    const double d1 = std::log(s / K) / v + 0.5 * v;
    return s * norm_cdf(d1) - K * norm_cdf(d1 - v);
}

double delta(double sigma, double tau, double s, double K) {
    if (tau <= 0.0) return s > K ? 1.0 : 0.0;
    const double v = sigma * std::sqrt(tau);
    return norm_cdf(std::log(s / K) / v + 0.5 * v);
}

GreekVector cash_greeks(double sigma, double tau, double s, double K) {
    GreekVector out{};
    const double v = sigma * std::sqrt(tau);
    const double d1 = std::log(s / K) / v + 0.5 * v;
    out[0] = price(sigma, tau, s, K);
    out[1] = s * norm_cdf(d1);
    // D_n = s phi(d1) P_n(d1) for n >= 2 with P_2 = 1/v and
    // P_{n+1} = P_n (1 - d/v) + P_n'/v - n P_n.
    std::vector<double> poly{1.0 / v};
    const double base = s * norm_pdf(d1);
    for (int n = 2; n <= kMaxGreek; ++n) {
        double val = 0.0;
        for (std::size_t k = poly.size(); k-- > 0;) val = val * d1 + poly[k];
        out[n] = base * val;
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k] += poly[k] * (1.0 - static_cast<double>(n));
            next[k + 1] -= poly[k] / v;
            if (k > 0) next[k - 1] += static_cast<double>(k) * poly[k] / v;
        }
        poly = std::move(next);
    }
    return out;
}

}  // namespace call

GreekTerm single_greek(int n, double coeff, int tau_power) {
    GreekTerm t;
    t.coeff = coeff;
    t.tau_power = tau_power;
    t.weights[n] = 1.0;
    return t;
}

ExpectedIntegral expected_integral(const BSWorld& world, const PayoffTransform& payoff, const GreekCombination& g1,
                                   const GreekCombination& g2, double dampening, const QuadratureConfig& quad_in,
                                   bool symmetric) {
    check_world(world);
    const auto quad = quad::fit_to_clearance(quad_in, payoff.pole_clearance);
    const double R = payoff.R;
    const double L = std::log(world.S0) - payoff.log_scale;
    const double T = world.T;
    const double s2 = world.sigma * world.sigma;
    auto poly = [](const GreekTerm& g, cplx z) {
        cplx acc = 0.0, q = 1.0;
        for (int k = 0; k <= kMaxGreek; ++k) {
            if (g.weights[k] != 0.0) acc += g.weights[k] * q;
            q *= (z - static_cast<double>(k));
        }
        return g.coeff * acc;
    };
    auto F = [&](double u, double w) {
        const cplx y(R, u), z(R, w - u);
        const cplx yz = y + z;
        const cplx a = world.mu * yz + 0.5 * s2 * yz * yz;  // kappa^0(y + z)
        const cplx ey = bs_exponent(world.sigma, y), ez = bs_exponent(world.sigma, z);
        cplx acc = 0.0;
        for (const auto& ti : g1) {
            const cplx pi = poly(ti, y);
            for (const auto& tj : g2) {
                const cplx b = ey + ez + ti.spot_shift * y + tj.spot_shift * z - dampening;
                acc += pi * poly(tj, z) * quad::exp_time_moment(a, b, T, ti.tau_power + tj.tau_power);
            }
        }
        return acc * std::exp(yz * L) * payoff.density(y) * payoff.density(z);
    };
    const double scale = 1.0 / (world.sigma * std::sqrt(T));
    quad::PlaneSpec spec;
    spec.core_w = 2.0 * scale + 2.0;
    spec.core_u = 2.0 * scale + 2.0;
    spec.separation_u = 12.0 * scale;
    spec.wavelength_w = quad::oscillation_wavelength(L);
    const auto r = quad::integrate_plane(F, spec, quad, symmetric);
    return {r.value, r.truncation, r.nodes, r.imag_residual};
}

}  // namespace lqh
