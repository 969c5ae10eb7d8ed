#include "lqh/payoff_transform.hpp"

#include <algorithm>
#include <cmath>

#include "lqh/quadrature.hpp"

namespace lqh {

cplx PayoffTransform::p(cplx z) const {
    // density carries the factor i from dz = i dx; undo it for the plain density.
    return std::exp(-z * log_scale) * density(z) / cplx(0.0, 1.0);
}

cplx PayoffTransform::weighted(double log_s, double x) const {
    const cplx z(R, x);
    return std::exp(z * (log_s - log_scale)) * density(z);
}

PayoffTransform call_transform(double K, double R) {
    if (!(K > 0.0)) throw ParameterError("call strike must be positive");
    if (!(R > 1.0)) throw ParameterError("call transform needs contour abscissa R > 1");
    PayoffTransform t;
    t.R = R;
    t.log_scale = std::log(K);
    // K^{1-z} / (2 pi i z (z - 1)) dz with dz = i dx; K^{-z} sits in log_scale.
    t.density = [K](cplx z) { return K / (2.0 * M_PI * z * (z - 1.0)); };
    t.decay_order = 2;
    t.pole_clearance = std::min(R - 1.0, R);
    return t;
}

Contract call_contract(double S0, double K, double T, double R) {
    if (!(S0 > 0.0) || !(T > 0.0)) throw ParameterError("contract needs S0 > 0 and T > 0");
    return Contract{S0, T, call_transform(K, R), K};
}

double invert(const PayoffTransform& payoff, double s, const QuadratureConfig& quad_in) {
    const auto quad = quad::fit_to_clearance(quad_in, payoff.pole_clearance);
    if (!(s > 0.0)) throw ParameterError("invert: spot must be positive");
    const double ls = std::log(s);
    auto f = [&](double x) { return payoff.weighted(ls, x); };
    auto r = quad::integrate_halfline<cplx>(f, quad, quad.initial_halfwidth,
                                            quad::oscillation_wavelength(ls - payoff.log_scale));
    return 2.0 * r.value.real();
}

Inversion invert_full(const PayoffTransform& payoff, double s, const QuadratureConfig& quad_in) {
    const auto quad = quad::fit_to_clearance(quad_in, payoff.pole_clearance);
    if (!(s > 0.0)) throw ParameterError("invert: spot must be positive");
    const double ls = std::log(s);
    auto f = [&](double x) { return payoff.weighted(ls, x); };
    auto r = quad::integrate_line<cplx>(f, quad, 0.0, quad.initial_halfwidth,
                                        quad::oscillation_wavelength(ls - payoff.log_scale));
    Inversion out;
    out.value = r.value.real();
    out.imag_residual = std::abs(r.value.imag());
    out.truncation = r.truncation;
    out.nodes = r.nodes;
    if (out.imag_residual > std::max(1e3 * quad.rel_tol * std::abs(out.value), 1e3 * quad.abs_tol) + 1e-9)
        throw QuadratureError("invert: imaginary residual above tolerance");
    return out;
}

}  // namespace lqh
