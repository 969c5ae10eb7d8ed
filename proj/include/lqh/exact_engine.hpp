#pragma once

#include <utility>

#include "lqh/core.hpp"
#include "lqh/levy_models.hpp"
#include "lqh/payoff_transform.hpp"

namespace lqh {

// Mean value function, pure hedge ratio and feedback constant of the
// variance-optimal hedge in an exponential Levy model.
class HedgeStructure {
public:
    HedgeStructure(LevyModel model, Contract contract, QuadratureConfig quad);

    double Lambda() const { return Lambda_; }
    double v() const { return v_; }
    double kappa1() const { return k1_; }
    double kappa_bar11() const { return kbar11_; }

    cplx gamma(cplx z) const;
    cplx eta(cplx z) const;

    double H(double t, double s) const;
    double xi(double t, double s) const;
    // Both from one contour pass.
    std::pair<double, double> H_and_xi(double t, double s) const;

    const LevyModel& model() const { return model_; }
    const Contract& contract() const { return contract_; }
    const QuadratureConfig& quad() const { return quad_; }

private:
    LevyModel model_;
    Contract contract_;
    QuadratureConfig quad_;
    double sigma_ = 0.0;
    double k1_ = 0.0;
    double kbar11_ = 0.0;
    double Lambda_ = 0.0;
    double v_ = 0.0;
};

HedgeStructure hedge_structure(const LevyModel& model, const Contract& contract, const QuadratureConfig& quad = {});

// xi(t, s) + Lambda / s * (H(t, s) - v - g)
double vo_hedge_ratio(const HedgeStructure& hs, double t, double s, double g);

struct ErrorQuadrature {
    double value = 0.0;
    double truncation = 0.0;
    std::size_t nodes = 0;
    double imag_residual = 0.0;
};

ErrorQuadrature vo_error(const LevyModel& model, const Contract& contract, const QuadratureConfig& quad = {},
                         bool symmetric = true);
ErrorQuadrature pure_error(const LevyModel& model, const Contract& contract, const QuadratureConfig& quad = {},
                           bool symmetric = true);
// Error of the moment-matched Black-Scholes hedge (initial capital C(0, S0), ratio dC/ds).
ErrorQuadrature bs_hedge_error(const LevyModel& model, const Contract& contract, const QuadratureConfig& quad = {},
                               bool symmetric = true);

}  // namespace lqh
