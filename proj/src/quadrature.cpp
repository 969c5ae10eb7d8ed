#include "lqh/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <sstream>

#include "parallel.hpp"

namespace lqh::quad {

const Rule& gauss_legendre16() {
    static const Rule rule = [] {
        using G = boost::math::quadrature::gauss<double, kOrder>;
        Rule r{};
        const auto& xa = G::abscissa();
        const auto& wa = G::weights();
        // Boost stores the non-negative half of a symmetric rule.
        int k = 0;
        for (std::size_t i = xa.size(); i-- > 0;) {
            r.x[k] = -xa[i];
            r.w[k] = wa[i];
            ++k;
        }
        for (std::size_t i = 0; i < xa.size(); ++i) {
            r.x[k] = xa[i];
            r.w[k] = wa[i];
            ++k;
        }
        return r;
    }();
    return rule;
}

void budget_exhausted(const std::string& where, double truncation, std::size_t nodes) {
    std::ostringstream os;
    os << where << ": truncation budget exhausted at |Im z| = " << truncation << " after " << nodes
       << " nodes";
    throw QuadratureError(os.str());
}

namespace {

struct Node {
    double u;
    double weight;
};

void push_panels(std::vector<Node>& nodes, double a, double b, std::size_t n) {
    const Rule& r = gauss_legendre16();
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double mid = a + h * (static_cast<double>(p) + 0.5);
        for (int k = 0; k < kOrder; ++k) nodes.push_back({mid + 0.5 * h * r.x[k], 0.5 * h * r.w[k]});
    }
}

}  // namespace

PlaneResult integrate_plane(const std::function<cplx(double, double)>& F, const PlaneSpec& spec,
                            const QuadratureConfig& cfg, bool symmetric) {
    std::size_t inner_nodes = 0;
    auto block_value = [&](const std::vector<Node>& nodes) {
        struct Inner {
            cplx v;
            std::size_t n = 0;
        };
        auto parts = detail::parallel_map<Inner>(nodes.size(), cfg.threads, [&](std::size_t i) {
            const double u = nodes[i].u;
            const bool near = std::abs(u) <= spec.separation_u;
            const double centre = near ? 0.5 * u : 0.0;
            const double core = near ? 0.5 * std::abs(u) + spec.core_w : spec.core_w;
            auto line = integrate_line<cplx>([&](double w) { return F(u, w); }, cfg, centre, core,
                                             spec.wavelength_w);
            return Inner{line.value * nodes[i].weight, line.nodes};
        });
        std::vector<cplx> vals(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i) {
            vals[i] = parts[i].v;
            inner_nodes += parts[i].n;
        }
        return detail::tree_sum(vals);
    };
    auto reduce = [&](cplx v) { return symmetric ? cplx(2.0 * v.real(), 0.0) : v; };

    const double wmax = cfg.panel_width;
    std::vector<Node> nodes;
    if (symmetric) {
        push_panels(nodes, 0.0, spec.core_u, panel_count(spec.core_u, wmax));
    } else {
        push_panels(nodes, -spec.core_u, spec.core_u, panel_count(2.0 * spec.core_u, wmax));
    }
    std::size_t outer = nodes.size();
    cplx total = reduce(block_value(nodes));

    double z = spec.core_u;
    double prev_block = 0.0, prev_ratio = 0.0, prev_estimate = 0.0;
    bool have_estimate = false;
    int quiet = 0;
    cplx tail{0.0, 0.0};
    for (int k = 0;; ++k) {
        nodes.clear();
        push_panels(nodes, z, 2.0 * z, 4);
        if (!symmetric) push_panels(nodes, -2.0 * z, -z, 4);
        outer += nodes.size();
        const cplx block = reduce(block_value(nodes));
        total += block;
        z *= 2.0;

        const double scale = std::abs(total.real());
        const double tol = std::max(cfg.rel_tol * scale, cfg.abs_tol);
        const double b = block.real();
        quiet = std::abs(block) <= tol ? quiet + 1 : 0;
        if (quiet >= 2) {
            tail = 0.0;
            break;
        }
        if (k >= 1 && prev_block != 0.0) {
            const double r = b / prev_block;
            const bool settled = r > 0.0 && r < 0.95 && k >= 2 && std::abs(r - prev_ratio) <= 0.05 * r;
            if (settled) {
                tail = block * (r / (1.0 - r));
                const double estimate = (total + tail).real();
                if (have_estimate && std::abs(estimate - prev_estimate) <= tol) break;
                prev_estimate = estimate;
                have_estimate = true;
            } else {
                have_estimate = false;
            }
            prev_ratio = r;
        }
        prev_block = b;
        if (z > cfg.max_truncation || inner_nodes > cfg.max_nodes)
            budget_exhausted("plane integral", z, inner_nodes);
    }
    const cplx value = total + tail;
    PlaneResult out;
    out.value = value.real();
    out.imag_residual = symmetric ? 0.0 : std::abs(value.imag());
    out.truncation = z;
    out.nodes = inner_nodes;
    (void)outer;
    return out;
}

QuadratureConfig fit_to_clearance(QuadratureConfig cfg, double clearance) {
    if (clearance > 0.0) cfg.panel_width = std::min(cfg.panel_width, 2.0 * clearance);
    return cfg;
}

cplx phi1(cplx x) {
    if (std::abs(x) < 1e-4) {
        return 1.0 + x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0)));
    }
    const double a = x.real(), b = x.imag();
    const double s = std::sin(0.5 * b);
    const cplx em1(std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b));
    return em1 / x;
}

cplx phin(int n, cplx x) {
    if (std::abs(x) < 0.5) {
        // sum_k x^k / (k! (n + k + 1))
        cplx term = 1.0, sum = 0.0;
        for (int k = 0; k < 30; ++k) {
            sum += term / static_cast<double>(n + k + 1);
            term *= x / static_cast<double>(k + 1);
        }
        return sum;
    }
    cplx val = phi1(x);
    const cplx ex = std::exp(x);
    for (int j = 1; j <= n; ++j) val = (ex - static_cast<double>(j) * val) / x;
    return val;
}

cplx exp_time_integral(cplx a, cplx b, double T) {
    // Anchor on the exponent with the larger real part so phi1 sees Re <= 0.
    if (a.real() >= b.real()) return T * std::exp(a * T) * phi1((b - a) * T);
    return T * std::exp(b * T) * phi1((a - b) * T);
}

cplx exp_time_moment(cplx a, cplx b, double T, int n) {
    if (n == 0) return exp_time_integral(a, b, T);
    const cplx x = (b - a) * T;
    if (x.real() <= 1.0) return std::pow(T, n + 1) * std::exp(a * T) * phin(n, x);
    // int_0^1 u^n e^{-x (1 - u)} du by downward integration by parts, anchored on e^{bT}.
    const double er = std::exp(-x.real());
    cplx psi = (1.0 - cplx(er * std::cos(x.imag()), -er * std::sin(x.imag()))) / x;
    for (int j = 1; j <= n; ++j) psi = (1.0 - static_cast<double>(j) * psi) / x;
    return std::pow(T, n + 1) * std::exp(b * T) * psi;
}

}  // namespace lqh::quad
