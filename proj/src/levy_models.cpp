#include "lqh/levy_models.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lqh {

namespace {

constexpr double kUnbounded = 1e6;

double vg_halfwidth(const VGParams& p) {
    // Roots of 1 - theta nu x - sigma^2 nu x^2 / 2.
    const double a = 0.5 * p.vg_sigma * p.vg_sigma * p.vg_nu;
    const double b = p.vg_theta * p.vg_nu;
    const double disc = std::sqrt(b * b + 4.0 * a);
    const double upper = (-b + disc) / (2.0 * a);
    const double lower = (-b - disc) / (2.0 * a);
    return std::min(upper, -lower);
}

cplx expm1(cplx w) {
    const double s = std::sin(0.5 * w.imag());
    return {std::expm1(w.real()) * std::cos(w.imag()) - 2.0 * s * s, std::exp(w.real()) * std::sin(w.imag())};
}

cplx log1p(cplx w) {
    return {0.5 * std::log1p(2.0 * w.real() + std::norm(w)), std::atan2(w.imag(), 1.0 + w.real())};
}

cplx base_kappa(const LevyModel& m, cplx z) {
    switch (m.kind) {
        case ModelKind::BS: {
            const auto& p = std::get<BSParams>(m.params);
            return p.mu * z + 0.5 * p.sigma * p.sigma * z * z;
        }
        case ModelKind::MertonJD: {
            const auto& p = std::get<JDParams>(m.params);
            const cplx jump = expm1(p.jump_mean * z + 0.5 * p.jump_sd * p.jump_sd * z * z);
            return p.drift * z + 0.5 * p.diffusion_vol * p.diffusion_vol * z * z + p.jump_intensity * jump;
        }
        case ModelKind::NIG: {
            const auto& p = std::get<NIGParams>(m.params);
            const double gamma = std::sqrt(p.alpha * p.alpha - p.beta * p.beta);
            const cplx bz = p.beta + z;
            const cplx root = std::sqrt(p.alpha * p.alpha - bz * bz);
            return p.drift * z + p.delta * z * (2.0 * p.beta + z) / (gamma + root);
        }
        case ModelKind::VG: {
            const auto& p = std::get<VGParams>(m.params);
            const cplx w = -p.vg_theta * p.vg_nu * z - 0.5 * p.vg_sigma * p.vg_sigma * p.vg_nu * z * z;
            return p.drift * z - log1p(w) / p.vg_nu;
        }
    }
    return 0.0;
}

std::array<double, 4> base_cumulants(const LevyModel& m) {
    switch (m.kind) {
        case ModelKind::BS: {
            const auto& p = std::get<BSParams>(m.params);
            return {p.mu, p.sigma * p.sigma, 0.0, 0.0};
        }
        case ModelKind::MertonJD: {
            const auto& p = std::get<JDParams>(m.params);
            const double l = p.jump_intensity, a = p.jump_mean, v = p.jump_sd * p.jump_sd;
            return {p.drift + l * a, p.diffusion_vol * p.diffusion_vol + l * (a * a + v),
                    l * (a * a * a + 3.0 * a * v), l * (a * a * a * a + 6.0 * a * a * v + 3.0 * v * v)};
        }
        case ModelKind::NIG: {
            const auto& p = std::get<NIGParams>(m.params);
            const double a2 = p.alpha * p.alpha, b = p.beta, d = p.delta;
            const double g = std::sqrt(a2 - b * b);
            return {p.drift + d * b / g, d * a2 / (g * g * g), 3.0 * d * a2 * b / std::pow(g, 5),
                    3.0 * d * a2 * (a2 + 4.0 * b * b) / std::pow(g, 7)};
        }
        case ModelKind::VG: {
            const auto& p = std::get<VGParams>(m.params);
            const double s2 = p.vg_sigma * p.vg_sigma, n = p.vg_nu, t = p.vg_theta;
            return {p.drift + t, s2 + n * t * t, 3.0 * s2 * n * t + 2.0 * n * n * t * t * t,
                    3.0 * s2 * s2 * n + 12.0 * s2 * n * n * t * t + 6.0 * n * n * n * t * t * t * t};
        }
    }
    return {0.0, 0.0, 0.0, 0.0};
}

void require(bool ok, const char* what) {
    if (!ok) throw ParameterError(what);
}

}  // namespace

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::BS: return "BS";
        case ModelKind::MertonJD: return "JD";
        case ModelKind::NIG: return "NIG";
        case ModelKind::VG: return "VG";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    std::string n;
    for (char c : name) n.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (n == "BS") return ModelKind::BS;
    if (n == "JD" || n == "MERTONJD" || n == "MERTON") return ModelKind::MertonJD;
    if (n == "NIG") return ModelKind::NIG;
    if (n == "VG") return ModelKind::VG;
    throw ParameterError("unknown model kind '" + name + "'");
}

LevyModel LevyModel::bs(const BSParams& p) {
    require(p.sigma > 0.0, "BS: sigma must be positive");
    return LevyModel{ModelKind::BS, p, kUnbounded, 1.0};
}

LevyModel LevyModel::merton_jd(const JDParams& p) {
    require(p.diffusion_vol >= 0.0 && p.jump_intensity >= 0.0 && p.jump_sd >= 0.0,
            "JD: volatilities and intensity must be non-negative");
    require(p.diffusion_vol > 0.0 || (p.jump_intensity > 0.0 && (p.jump_sd > 0.0 || p.jump_mean != 0.0)),
            "JD: model is deterministic");
    return LevyModel{ModelKind::MertonJD, p, kUnbounded, 1.0};
}

LevyModel LevyModel::nig(const NIGParams& p) {
    require(p.alpha > 0.0 && p.delta > 0.0, "NIG: alpha and delta must be positive");
    require(std::abs(p.beta) < p.alpha, "NIG: |beta| must be below alpha");
    return LevyModel{ModelKind::NIG, p, p.alpha - std::abs(p.beta), 1.0};
}

LevyModel LevyModel::vg(const VGParams& p) {
    require(p.vg_sigma > 0.0 && p.vg_nu > 0.0, "VG: sigma and nu must be positive");
    return LevyModel{ModelKind::VG, p, vg_halfwidth(p), 1.0};
}

std::array<double, 4> cumulants(const LevyModel& model) {
    auto c = base_cumulants(model);
    c[2] *= model.lambda;
    c[3] *= model.lambda * model.lambda;
    return c;
}

LevyMoments moments(const LevyModel& model) {
    const auto c = cumulants(model);
    const double sigma = std::sqrt(c[1]);
    return {c[0], sigma, c[2] / (c[1] * sigma), c[3] / (c[1] * c[1])};
}

cplx kappa(const LevyModel& model, cplx z) {
    if (!(std::abs(z.real()) < model.domain_halfwidth)) {
        std::ostringstream os;
        os << "Re z = " << z.real() << " outside the strip |Re z| < " << model.domain_halfwidth << " of the "
           << to_string(model.kind) << " model";
        throw DomainError(os.str());
    }
    const double lam = model.lambda;
    if (lam == 1.0) return base_kappa(model, z);
    const auto c = base_cumulants(model);
    if (lam == 0.0) return c[0] * z + 0.5 * c[1] * z * z;
    return (1.0 - 1.0 / lam) * c[0] * z + base_kappa(model, lam * z) / (lam * lam);
}

cplx kappa_bar(const LevyModel& model, cplx y, cplx z) {
    return kappa(model, y + z) - kappa(model, y) - kappa(model, z);
}

CumulantEval evaluate(const LevyModel& model, cplx z) {
    CumulantEval e;
    e.value = kappa(model, z);
    e.k1 = kappa(model, 1.0).real();
    e.k2 = kappa(model, 2.0).real();
    e.kbar11 = e.k2 - 2.0 * e.k1;
    return e;
}

LevyModel perturbed(const LevyModel& model, double lambda) {
    if (model.lambda != 1.0) throw ParameterError("perturbed: model is already a curve member");
    if (!(std::abs(lambda) <= 1.0)) throw ParameterError("perturbed: |lambda| must not exceed 1");
    LevyModel out = model;
    out.lambda = lambda;
    out.domain_halfwidth = lambda == 0.0 ? kUnbounded : std::min(kUnbounded, model.domain_halfwidth / std::abs(lambda));
    return out;
}

cplx kappa_lambda(const LevyModel& model, double lambda, cplx z) {
    return kappa(perturbed(model, lambda), z);
}

// ---------------------------------------------------------------------------
// Calibration

namespace {

LevyModel calibrate_jd(const std::array<double, 4>& c, double share) {
    if (!(share > 0.0 && share < 1.0)) throw CalibrationError("JD: jump volatility share must lie in (0, 1)", {});
    const double vj = share * share * c[1];
    const double a = c[2] / vj;
    const double b = c[3] / vj;
    if (!(b > a * a)) {
        throw CalibrationError("JD: target kurtosis too small for the requested jump share",
                               {c[2], c[3]});
    }
    double mean = 0.0, var = b / 3.0;
    if (a != 0.0) {
        auto jump_var = [a](double m) { return m * m * (a - m) / (3.0 * m - a); };
        auto g = [&](double m) {
            const double v = jump_var(m);
            return (m * m * m * m + 6.0 * m * m * v + 3.0 * v * v) / (m * m + v) - b;
        };
        double lo = a / 3.0 * (1.0 + 1e-9), hi = a;
        if (a < 0.0) std::swap(lo, hi);
        double glo = g(lo), ghi = g(hi);
        // Shrink the end where the jump variance diverges until g changes sign.
        for (int i = 0; i < 200 && glo * ghi > 0.0; ++i) {
            if (std::abs(a) > 0) {
                if (a > 0) lo = a / 3.0 + 0.5 * (lo - a / 3.0);
                else hi = a / 3.0 + 0.5 * (hi - a / 3.0);
                glo = g(lo);
                ghi = g(hi);
            }
        }
        if (glo * ghi > 0.0) throw CalibrationError("JD: no bracket for the jump mean", {glo, ghi});
        std::uintmax_t iters = 200;
        auto root = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi,
                                                      boost::math::tools::eps_tolerance<double>(52), iters);
        mean = 0.5 * (root.first + root.second);
        var = jump_var(mean);
    }
    JDParams p;
    p.jump_mean = mean;
    p.jump_sd = std::sqrt(var);
    p.jump_intensity = vj / (mean * mean + var);
    p.diffusion_vol = std::sqrt((1.0 - share * share) * c[1]);
    p.drift = c[0] - p.jump_intensity * mean;
    return LevyModel::merton_jd(p);
}

LevyModel calibrate_nig(const std::array<double, 4>& c) {
    const double s = c[2] / std::pow(c[1], 1.5);
    const double e = c[3] / (c[1] * c[1]);
    if (!(3.0 * e > 4.0 * s * s)) throw CalibrationError("NIG: requires 3 ExKurt > 4 Skew^2", {s, e});
    const double rho2 = s * s / (3.0 * e - 4.0 * s * s);
    const double rho = std::copysign(std::sqrt(rho2), s);
    const double dg = 3.0 * (1.0 + 4.0 * rho2) / e;  // delta * gamma
    const double alpha = std::sqrt(dg / (c[1] * (1.0 - rho2) * (1.0 - rho2)));
    NIGParams p;
    p.alpha = alpha;
    p.beta = rho * alpha;
    const double gamma = alpha * std::sqrt(1.0 - rho2);
    p.delta = dg / gamma;
    p.drift = c[0] - p.delta * p.beta / gamma;
    return LevyModel::nig(p);
}

LevyModel calibrate_vg(const std::array<double, 4>& c) {
    const double c2 = c[1], c3 = c[2], c4 = c[3];
    double nu = c4 / (3.0 * c2 * c2);
    double th = c3 / (3.0 * c2 * nu);
    auto residual = [&](double n, double t, double& r1, double& r2) {
        const double q = n * t * t;
        r1 = (3.0 * c2 * n * t - n * n * t * t * t - c3) / std::pow(c2, 1.5);
        r2 = (3.0 * n * (c2 * c2 + 2.0 * c2 * q - q * q) - c4) / (c2 * c2);
    };
    double r1 = 0, r2 = 0;
    residual(nu, th, r1, r2);
    int it = 0;
    for (; it < 100 && std::hypot(r1, r2) > 1e-15; ++it) {
        const double q = nu * th * th;
        // Jacobian of the unscaled equations.
        const double j11 = 3.0 * c2 * th - 2.0 * nu * th * th * th;
        const double j12 = 3.0 * c2 * nu - 3.0 * nu * nu * th * th;
        const double dq_dn = th * th, dq_dt = 2.0 * nu * th;
        const double inner = c2 * c2 + 2.0 * c2 * q - q * q;
        const double dinner = 2.0 * c2 - 2.0 * q;
        const double j21 = 3.0 * inner + 3.0 * nu * dinner * dq_dn;
        const double j22 = 3.0 * nu * dinner * dq_dt;
        const double f1 = r1 * std::pow(c2, 1.5), f2 = r2 * c2 * c2;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0) break;
        const double dn = (f1 * j22 - f2 * j12) / det;
        const double dt = (j11 * f2 - j21 * f1) / det;
        double step = 1.0;
        const double norm0 = std::hypot(r1, r2);
        for (int h = 0; h < 40; ++h, step *= 0.5) {
            const double n1 = nu - step * dn, t1 = th - step * dt;
            if (n1 <= 0.0 || c2 - n1 * t1 * t1 <= 0.0) continue;
            double a1, a2;
            residual(n1, t1, a1, a2);
            if (std::hypot(a1, a2) < norm0 || h == 39) {
                nu = n1;
                th = t1;
                r1 = a1;
                r2 = a2;
                break;
            }
        }
    }
    if (!(std::hypot(r1, r2) <= 1e-12) || nu <= 0.0 || c2 - nu * th * th <= 0.0)
        throw CalibrationError("VG: Newton iteration did not converge", {r1, r2});
    VGParams p;
    p.vg_nu = nu;
    p.vg_theta = th;
    p.vg_sigma = std::sqrt(c2 - nu * th * th);
    p.drift = c[0] - th;
    return LevyModel::vg(p);
}

}  // namespace

LevyModel calibrate(ModelKind kind, const LevyMoments& target, double jd_jump_vol_share,
                    std::vector<std::string>* warnings) {
    if (!(target.sigma > 0.0)) throw CalibrationError("target sigma must be positive", {target.sigma});
    if (kind == ModelKind::BS) {
        if ((target.skew_rate != 0.0 || target.exkurt_rate != 0.0) && warnings)
            warnings->push_back("BS calibration ignores skewness and excess kurtosis targets");
        return LevyModel::bs({target.mu, target.sigma});
    }
    if (!(target.exkurt_rate > 0.0))
        throw CalibrationError(to_string(kind) + ": excess kurtosis rate must be positive", {target.exkurt_rate});
    const double s2 = target.sigma * target.sigma;
    const std::array<double, 4> c{target.mu, s2, target.skew_rate * s2 * target.sigma,
                                  target.exkurt_rate * s2 * s2};
    LevyModel m;
    try {
        switch (kind) {
            case ModelKind::MertonJD: m = calibrate_jd(c, jd_jump_vol_share); break;
            case ModelKind::NIG: m = calibrate_nig(c); break;
            case ModelKind::VG: m = calibrate_vg(c); break;
            default: break;
        }
    } catch (const ParameterError& e) {
        throw CalibrationError(std::string("calibrated parameters invalid: ") + e.what(), {});
    }
    const auto got = moments(m);
    const std::vector<double> res{got.mu - target.mu, got.sigma - target.sigma, got.skew_rate - target.skew_rate,
                                  got.exkurt_rate - target.exkurt_rate};
    const double tol = 1e-10;
    const bool ok = std::abs(res[0]) <= tol * std::max(std::abs(target.mu), target.sigma) &&
                    std::abs(res[1]) <= tol * target.sigma &&
                    std::abs(res[2]) <= tol * std::max(std::abs(target.skew_rate), 1e-8) &&
                    std::abs(res[3]) <= tol * target.exkurt_rate;
    if (!ok) throw CalibrationError(to_string(kind) + ": moment round-trip failed", res);
    return m;
}

}  // namespace lqh
