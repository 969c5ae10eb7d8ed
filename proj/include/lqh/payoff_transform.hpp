#pragma once

#include <functional>
#include <optional>

#include "lqh/core.hpp"

namespace lqh {

// f(s) = int_{R + iR} s^z p(z) dz with p(z) = exp(-z * log_scale) * density(z).
// Factoring the scale out keeps the phase of s^z p(z) accurate far out on the
// contour, since only log(s) - log_scale multiplies Im z.
struct PayoffTransform {
    double R = 1.5;
    double log_scale = 0.0;
    std::function<cplx(cplx)> density;  // includes the Jacobian dz = i dx
    int decay_order = 2;
    // Distance from the contour to the nearest pole of the density.
    double pole_clearance = 0.5;

    cplx p(cplx z) const;
    // s^z p(z) dz/dx evaluated at z = R + i x.
    cplx weighted(double log_s, double x) const;
};

struct Contract {
    double S0 = 100.0;
    double T = 0.25;
    PayoffTransform payoff;
    std::optional<double> strike;
};

PayoffTransform call_transform(double K, double R = 1.5);
Contract call_contract(double S0, double K, double T, double R = 1.5);

struct Inversion {
    double value = 0.0;
    double imag_residual = 0.0;
    double truncation = 0.0;
    std::size_t nodes = 0;
};

// Contour inversion over Im z >= 0 using conjugate symmetry.
double invert(const PayoffTransform& payoff, double s, const QuadratureConfig& quad = {});
// Same integral over the whole line; reports the imaginary residual.
Inversion invert_full(const PayoffTransform& payoff, double s, const QuadratureConfig& quad = {});

}  // namespace lqh
