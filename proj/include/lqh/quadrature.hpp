#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "lqh/core.hpp"

namespace lqh {

namespace quad {

inline constexpr int kOrder = 16;

struct Rule {
    std::array<double, kOrder> x;  // nodes on [-1, 1]
    std::array<double, kOrder> w;
};

const Rule& gauss_legendre16();

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const cplx& v) { return std::abs(v); }
template <std::size_t N>
double magnitude(const std::array<cplx, N>& v) {
    double m = 0.0;
    for (const auto& e : v) m = std::max(m, std::abs(e));
    return m;
}

template <class V>
V zero_like() {
    if constexpr (std::is_arithmetic_v<V>) {
        return V{0};
    } else {
        V v{};
        return v;
    }
}

template <class V>
void accumulate(V& acc, const V& v, double w) {
    if constexpr (std::is_same_v<V, double> || std::is_same_v<V, cplx>) {
        acc += w * v;
    } else {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * v[i];
    }
}

template <class V>
void add(V& acc, const V& v) {
    accumulate(acc, v, 1.0);
}

// Composite Gauss-Legendre over [a, b] split into n equal panels.
template <class V, class F>
V panels(F&& f, double a, double b, std::size_t n) {
    const Rule& r = gauss_legendre16();
    V acc = zero_like<V>();
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double mid = lo + 0.5 * h;
        V part = zero_like<V>();
        for (int k = 0; k < kOrder; ++k) accumulate(part, f(mid + 0.5 * h * r.x[k]), r.w[k]);
        accumulate(acc, part, 0.5 * h);
    }
    return acc;
}

template <class V>
struct LineResult {
    V value;
    double truncation = 0.0;
    std::size_t nodes = 0;
};

inline std::size_t panel_count(double length, double width) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / width - 1e-12)));
}

inline double oscillation_wavelength(double log_ratio) {
    const double a = std::abs(log_ratio);
    return a > 0.0 ? 2.0 * M_PI / a : std::numeric_limits<double>::infinity();
}

[[noreturn]] void budget_exhausted(const std::string& where, double truncation, std::size_t nodes);

// Integral of f over [center - inf, center + inf]. The core interval is
// [center - core, center + core]; beyond it, blocks [Z, 2Z] on both sides are
// appended until two consecutive blocks fall below tolerance.
template <class V, class F>
LineResult<V> integrate_line(F&& f, const QuadratureConfig& cfg, double center, double core,
                             double wavelength) {
    const double wmax = std::min(cfg.panel_width, wavelength / 4.0);
    core = std::max(core, 1e-3);
    LineResult<V> out;
    out.value = panels<V>(f, center - core, center + core, panel_count(2.0 * core, wmax));
    out.nodes = panel_count(2.0 * core, wmax) * kOrder;
    double z = core;
    int quiet = 0;
    while (quiet < 2) {
        const std::size_t nb = std::max<std::size_t>(4, panel_count(z, wavelength / 4.0));
        V block = panels<V>(f, center + z, center + 2.0 * z, nb);
        add(block, panels<V>(f, center - 2.0 * z, center - z, nb));
        add(out.value, block);
        out.nodes += 2 * nb * kOrder;
        z *= 2.0;
        const double tol = std::max(cfg.rel_tol * magnitude(out.value), cfg.abs_tol);
        quiet = magnitude(block) <= tol ? quiet + 1 : 0;
        if (quiet < 2 && (z > cfg.max_truncation || out.nodes > cfg.max_nodes))
            budget_exhausted("line integral", z, out.nodes);
    }
    out.truncation = z;
    return out;
}

// Integral of f over [0, inf) with the same block strategy.
template <class V, class F>
LineResult<V> integrate_halfline(F&& f, const QuadratureConfig& cfg, double core, double wavelength) {
    const double wmax = std::min(cfg.panel_width, wavelength / 4.0);
    core = std::max(core, 1e-3);
    LineResult<V> out;
    out.value = panels<V>(f, 0.0, core, panel_count(core, wmax));
    out.nodes = panel_count(core, wmax) * kOrder;
    double z = core;
    int quiet = 0;
    while (quiet < 2) {
        const std::size_t nb = std::max<std::size_t>(4, panel_count(z, wavelength / 4.0));
        V block = panels<V>(f, z, 2.0 * z, nb);
        add(out.value, block);
        out.nodes += nb * kOrder;
        z *= 2.0;
        const double tol = std::max(cfg.rel_tol * magnitude(out.value), cfg.abs_tol);
        quiet = magnitude(block) <= tol ? quiet + 1 : 0;
        if (quiet < 2 && (z > cfg.max_truncation || out.nodes > cfg.max_nodes))
            budget_exhausted("half-line integral", z, out.nodes);
    }
    out.truncation = z;
    return out;
}

struct PlaneSpec {
    double core_w = 4.0;        // half-width of the inner core interval around its centre
    double core_u = 8.0;        // outer core interval [0, core_u]
    double separation_u = 40.0; // beyond this |u| the inner centre moves to w = 0
    double wavelength_w = std::numeric_limits<double>::infinity();
};

struct PlaneResult {
    double value = 0.0;
    double truncation = 0.0;
    std::size_t nodes = 0;
    double imag_residual = 0.0;
};

// Double integral of F(u, w) over u in R, w in R where F(-u, -w) = conj F(u, w).
// With symmetric = true only u >= 0 is visited and twice the real part is
// returned; otherwise both half-planes are summed and the imaginary part of the
// total is reported as a residual. The outer direction is truncated by doubling
// blocks with a geometric tail estimate once block ratios settle.
PlaneResult integrate_plane(const std::function<cplx(double, double)>& F, const PlaneSpec& spec,
                            const QuadratureConfig& cfg, bool symmetric = true);

// Narrows the panels so that a singularity at distance `clearance` from the
// contour stays outside every panel's Bernstein ellipse of parameter 1 + sqrt(2).
QuadratureConfig fit_to_clearance(QuadratureConfig cfg, double clearance);

// (e^x - 1) / x, accurate near x = 0.
cplx phi1(cplx x);
// int_0^1 u^n e^{x u} du for n in {0, 1, 2, 3}.
cplx phin(int n, cplx x);
// int_0^T e^{a t + b (T - t)} dt.
cplx exp_time_integral(cplx a, cplx b, double T);
// int_0^T e^{a t} (T - t)^n e^{b (T - t)} dt.
cplx exp_time_moment(cplx a, cplx b, double T, int n);

}  // namespace quad

}  // namespace lqh
