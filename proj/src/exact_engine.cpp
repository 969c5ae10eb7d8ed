#include "lqh/exact_engine.hpp"

#include <array>
#include <atomic>
#include <limits>
#include <cmath>
#include <sstream>

#include "lqh/quadrature.hpp"

namespace lqh {

namespace {

double model_sigma(const LevyModel& m) { return std::sqrt(cumulants(m)[1]); }

void check_strip(const LevyModel& m, const Contract& c) {
    const double r2 = 2.0 * c.payoff.R;
    if (!(r2 < m.domain_halfwidth)) {
        std::ostringstream os;
        os << "contour abscissa R = " << c.payoff.R << " needs 2R inside the strip |Re z| < " << m.domain_halfwidth;
        throw DomainError(os.str());
    }
}

QuadratureConfig fitted(const QuadratureConfig& q, const LevyModel& m, const Contract& c) {
    return quad::fit_to_clearance(q, std::min(c.payoff.pole_clearance, m.domain_halfwidth - 2.0 * c.payoff.R));
}

double core_for(double sigma, double tau, double floor) {
    if (!(tau > 0.0)) return floor;
    return std::min(200.0, std::max(floor, 2.0 * (1.0 / (sigma * std::sqrt(tau))) + 2.0));
}

quad::PlaneSpec plane_spec(double sigma, const Contract& c) {
    const double scale = 1.0 / (sigma * std::sqrt(c.T));
    quad::PlaneSpec spec;
    spec.core_w = 2.0 * scale + 2.0;
    spec.core_u = 2.0 * scale + 2.0;
    spec.separation_u = 12.0 * scale;
    spec.wavelength_w = quad::oscillation_wavelength(std::log(c.S0) - c.payoff.log_scale);
    return spec;
}

std::atomic<unsigned long> g_generation{0};

// Values that depend only on y = R + i u, cached per thread for the inner sweep over w.
struct YCache {
    unsigned long generation = ~0ul;
    double u = std::numeric_limits<double>::quiet_NaN();
    cplx y, ky, ky1, dens;
};

}  // namespace

HedgeStructure::HedgeStructure(LevyModel model, Contract contract, QuadratureConfig quad)
    : model_(std::move(model)), contract_(std::move(contract)), quad_(quad) {
    check_strip(model_, contract_);
    quad_ = fitted(quad_, model_, contract_);
    sigma_ = model_sigma(model_);
    k1_ = kappa(model_, 1.0).real();
    kbar11_ = kappa(model_, 2.0).real() - 2.0 * k1_;
    if (!(kbar11_ > 0.0)) throw ParameterError("kappa_bar(1,1) must be positive");
    Lambda_ = k1_ / kbar11_;
    v_ = H(0.0, contract_.S0);
}

cplx HedgeStructure::gamma(cplx z) const {
    return (kappa(model_, z + 1.0) - kappa(model_, z) - k1_) / kbar11_;
}

cplx HedgeStructure::eta(cplx z) const { return kappa(model_, z) - k1_ * gamma(z); }

std::pair<double, double> HedgeStructure::H_and_xi(double t, double s) const {
    if (!(s > 0.0)) throw ParameterError("spot must be positive");
    const double tau = contract_.T - t;
    if (tau < 0.0) throw ParameterError("t beyond maturity");
    const double ls = std::log(s);
    const auto& pay = contract_.payoff;
    using Vec = std::array<cplx, 2>;
    auto f = [&](double x) {
        const cplx z(pay.R, x);
        const cplx kz = kappa(model_, z);
        const cplx g = (kappa(model_, z + 1.0) - kz - k1_) / kbar11_;
        const cplx base = pay.weighted(ls, x) * std::exp((kz - k1_ * g) * tau);
        return Vec{base, base * g};
    };
    auto r = quad::integrate_halfline<Vec>(f, quad_, core_for(sigma_, tau, quad_.initial_halfwidth),
                                           quad::oscillation_wavelength(ls - pay.log_scale));
    return {2.0 * r.value[0].real(), 2.0 * r.value[1].real() / s};
}

double HedgeStructure::H(double t, double s) const { return H_and_xi(t, s).first; }
double HedgeStructure::xi(double t, double s) const { return H_and_xi(t, s).second; }

HedgeStructure hedge_structure(const LevyModel& model, const Contract& contract, const QuadratureConfig& quad) {
    return HedgeStructure(model, contract, quad);
}

double vo_hedge_ratio(const HedgeStructure& hs, double t, double s, double g) {
    if (!(t < hs.contract().T)) throw ParameterError("hedge ratio needs t < T");
    const auto [h, xi] = hs.H_and_xi(t, s);
    return xi + hs.Lambda() / s * (h - hs.v() - g);
}

namespace {

ErrorQuadrature j_error(const LevyModel& model, const Contract& c, const QuadratureConfig& quad_in, bool symmetric,
                        int j) {
    check_strip(model, c);
    const auto quad = fitted(quad_in, model, c);
    const double k1 = kappa(model, 1.0).real();
    const double kb11 = kappa(model, 2.0).real() - 2.0 * k1;
    const double shift = static_cast<double>(j) * k1 * k1 / kb11;
    const double L = std::log(c.S0) - c.payoff.log_scale;
    const double T = c.T, R = c.payoff.R;
    const auto& pay = c.payoff;
    const unsigned long gen = g_generation.fetch_add(1);
    auto F = [&](double u, double w) {
        thread_local YCache yc;
        if (yc.generation != gen || yc.u != u) {
            yc.generation = gen;
            yc.u = u;
            yc.y = cplx(R, u);
            yc.ky = kappa(model, yc.y);
            yc.ky1 = kappa(model, yc.y + 1.0);
            yc.dens = pay.density(yc.y);
        }
        const cplx z(R, w - u);
        const cplx kz = kappa(model, z), kz1 = kappa(model, z + 1.0), kyz = kappa(model, yc.y + z);
        const cplx kby1 = yc.ky1 - yc.ky - k1, kbz1 = kz1 - kz - k1;
        const cplx beta = (kyz - yc.ky - kz) - kby1 * kbz1 / kb11;
        const cplx rho = (yc.ky - k1 * kby1 / kb11) + (kz - k1 * kbz1 / kb11) - shift;
        return std::exp((yc.y + z) * L) * yc.dens * pay.density(z) * beta * quad::exp_time_integral(kyz, rho, T);
    };
    const auto r = quad::integrate_plane(F, plane_spec(model_sigma(model), c), quad, symmetric);
    return {std::max(r.value, 0.0), r.truncation, r.nodes, r.imag_residual};
}

// alpha(z, tau) = A1 e^{k tau} + A2 e^{e tau} with k = kappa(z), e = nu^2 z (z - 1) / 2.
struct AlphaForm {
    cplx k, e, A1, A2;
    bool split = true;  // false when e ~ k; then alpha is evaluated directly
};

AlphaForm alpha_form(cplx z, cplx k, double nu2, double k1) {
    AlphaForm a;
    a.k = k;
    a.e = 0.5 * nu2 * z * (z - 1.0);
    if (k1 == 0.0) {
        a.A1 = 1.0;
        a.A2 = 0.0;
        return a;
    }
    const cplx d = a.e - k;
    // The split form cancels badly once |A2| is huge.
    if (std::abs(k1 * z) > 1e6 * std::abs(d)) {
        a.split = false;
        return a;
    }
    a.A2 = -k1 * z / d;
    a.A1 = 1.0 - a.A2;
    return a;
}

cplx alpha_direct(const AlphaForm& a, cplx z, double k1, double tau) {
    return std::exp(a.k * tau) - k1 * z * quad::exp_time_integral(a.e, a.k, tau);
}

}  // namespace

ErrorQuadrature vo_error(const LevyModel& model, const Contract& contract, const QuadratureConfig& quad,
                         bool symmetric) {
    return j_error(model, contract, quad, symmetric, 1);
}

ErrorQuadrature pure_error(const LevyModel& model, const Contract& contract, const QuadratureConfig& quad,
                           bool symmetric) {
    return j_error(model, contract, quad, symmetric, 0);
}

ErrorQuadrature bs_hedge_error(const LevyModel& model, const Contract& c, const QuadratureConfig& quad_in,
                               bool symmetric) {
    check_strip(model, c);
    const auto quad = fitted(quad_in, model, c);
    const double sigma = model_sigma(model);
    const double nu2 = sigma * sigma;
    const double k1 = kappa(model, 1.0).real();
    const double kb11 = kappa(model, 2.0).real() - 2.0 * k1;
    const double L = std::log(c.S0) - c.payoff.log_scale;
    const double T = c.T, R = c.payoff.R;
    const auto& pay = c.payoff;

    // w - d = int S0^z (alpha(z, 0) - e^{e T}) p(z) dz
    auto fw = [&](double x) {
        const cplx z(R, x);
        const cplx k = kappa(model, z);
        const cplx e = 0.5 * nu2 * z * (z - 1.0);
        const cplx diff = (std::exp(k * T) - std::exp(e * T)) - k1 * z * quad::exp_time_integral(e, k, T);
        return pay.weighted(L + pay.log_scale, x) * diff;
    };
    const auto wd = quad::integrate_halfline<cplx>(fw, quad, core_for(sigma, T, quad.initial_halfwidth),
                                                   quad::oscillation_wavelength(L));
    const double gap = 2.0 * wd.value.real();

    const unsigned long gen = g_generation.fetch_add(1);
    auto F = [&](double u, double w) {
        struct Cache {
            unsigned long generation = ~0ul;
            double u = std::numeric_limits<double>::quiet_NaN();
            cplx y, ky, kby1, dens;
            AlphaForm a;
        };
        thread_local Cache yc;
        if (yc.generation != gen || yc.u != u) {
            yc.generation = gen;
            yc.u = u;
            yc.y = cplx(R, u);
            yc.ky = kappa(model, yc.y);
            yc.kby1 = kappa(model, yc.y + 1.0) - yc.ky - k1;
            yc.dens = pay.density(yc.y);
            yc.a = alpha_form(yc.y, yc.ky, nu2, k1);
        }
        const cplx y = yc.y;
        const cplx z(R, w - u);
        const cplx kz = kappa(model, z);
        const cplx kbz1 = kappa(model, z + 1.0) - kz - k1;
        const cplx A = kappa(model, y + z);
        const cplx kbyz = A - yc.ky - kz;
        const AlphaForm az = alpha_form(z, kz, nu2, k1);
        const AlphaForm& ay = yc.a;
        cplx time;
        if (ay.split && az.split) {
            const cplx c1 = kbyz * ay.A1 * az.A1;
            const cplx c2 = kbyz * ay.A1 * az.A2 - yc.kby1 * z * ay.A1;
            const cplx c3 = kbyz * ay.A2 * az.A1 - kbz1 * y * az.A1;
            const cplx c4 = kbyz * ay.A2 * az.A2 - yc.kby1 * z * ay.A2 - kbz1 * y * az.A2 + kb11 * y * z;
            time = c1 * quad::exp_time_integral(A, ay.k + az.k, T) + c2 * quad::exp_time_integral(A, ay.k + az.e, T) +
                   c3 * quad::exp_time_integral(A, ay.e + az.k, T) + c4 * quad::exp_time_integral(A, ay.e + az.e, T);
        } else {
            // Near-coincident exponents: integrate the time variable numerically.
            auto h = [&](double t) {
                const double tau = T - t;
                const cplx aly = alpha_direct(ay, y, k1, tau), alz = alpha_direct(az, z, k1, tau);
                const cplx hv = kbyz * aly * alz - yc.kby1 * aly * z * std::exp(az.e * tau) -
                                kbz1 * alz * y * std::exp(ay.e * tau) + kb11 * y * z * std::exp((ay.e + az.e) * tau);
                return std::exp(A * t) * hv;
            };
            time = quad::panels<cplx>(h, 0.0, T, 16);
        }
        return std::exp((y + z) * L) * yc.dens * pay.density(z) * time;
    };
    const auto r = quad::integrate_plane(F, plane_spec(sigma, c), quad, symmetric);
    ErrorQuadrature out;
    out.value = std::max(gap * gap + r.value, 0.0);
    out.truncation = std::max(r.truncation, wd.truncation);
    out.nodes = r.nodes + wd.nodes;
    out.imag_residual = r.imag_residual;
    return out;
}

}  // namespace lqh
