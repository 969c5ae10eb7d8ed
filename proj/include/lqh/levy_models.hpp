#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "lqh/core.hpp"

namespace lqh {

enum class ModelKind { BS, MertonJD, NIG, VG };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

// Per-year drift, volatility, skewness rate and excess kurtosis rate of X_1.
struct LevyMoments {
    double mu = 0.0;
    double sigma = 0.0;
    double skew_rate = 0.0;
    double exkurt_rate = 0.0;
};

struct BSParams {
    double mu = 0.0;
    double sigma = 0.0;
};

// Gaussian diffusion plus compound Poisson with normal jump sizes.
struct JDParams {
    double drift = 0.0;
    double diffusion_vol = 0.0;
    double jump_intensity = 0.0;
    double jump_mean = 0.0;
    double jump_sd = 0.0;
};

struct NIGParams {
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double drift = 0.0;
};

struct VGParams {
    double vg_sigma = 0.0;
    double vg_nu = 0.0;
    double vg_theta = 0.0;
    double drift = 0.0;
};

using ModelParams = std::variant<BSParams, JDParams, NIGParams, VGParams>;

struct LevyModel {
    ModelKind kind = ModelKind::BS;
    ModelParams params = BSParams{};
    // Largest r with [-r, r] inside the interior of the strip where E e^{z X_1} exists.
    double domain_halfwidth = 0.0;
    // Position on the curve joining the moment-matched Brownian motion (0) to this model (1).
    double lambda = 1.0;

    static LevyModel bs(const BSParams& p);
    static LevyModel merton_jd(const JDParams& p);
    static LevyModel nig(const NIGParams& p);
    static LevyModel vg(const VGParams& p);
};

struct CumulantEval {
    cplx value;
    double k1 = 0.0;
    double k2 = 0.0;
    double kbar11 = 0.0;
};

cplx kappa(const LevyModel& model, cplx z);
CumulantEval evaluate(const LevyModel& model, cplx z);

// kappa(y + z) - kappa(y) - kappa(z)
cplx kappa_bar(const LevyModel& model, cplx y, cplx z);

// First four cumulants of X_1.
std::array<double, 4> cumulants(const LevyModel& model);
LevyMoments moments(const LevyModel& model);

LevyModel calibrate(ModelKind kind, const LevyMoments& target, double jd_jump_vol_share = 0.7,
                    std::vector<std::string>* warnings = nullptr);

// The curve member at lambda; |lambda| <= 1 (negative values reflect the jump part).
LevyModel perturbed(const LevyModel& model, double lambda);
cplx kappa_lambda(const LevyModel& model, double lambda, cplx z);

}  // namespace lqh
