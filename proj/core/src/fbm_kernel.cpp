#include "fracsde/fbm_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fracsde {

double beta_function(double a, double b, BetaConvention convention) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("beta function arguments must be positive");
    const double std_beta = std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    return convention == BetaConvention::StandardBeta ? std_beta : 1.0 / std_beta;
}

KernelConstants kernel_constants(const HurstParam& h, BetaConvention convention) {
    if (h.is_brownian())
        throw RegimeError("kernel constants are undefined at H = 1/2 (kernel is identically 1)");
    const double H = h.value();
    KernelConstants c;
    c.convention = convention;
    if (h.regime() == HurstRegime::Rough) {
        c.b_h = std::sqrt(2.0 * H / ((1.0 - 2.0 * H) * beta_function(1.0 - 2.0 * H, H + 0.5, convention)));
    } else {
        c.c_h = std::sqrt(H * (2.0 * H - 1.0) / beta_function(2.0 - 2.0 * H, H - 0.5, convention));
    }
    return c;
}

double covariance_rh(double t, double s, const HurstParam& h) {
    if (t < 0.0 || s < 0.0) throw std::domain_error("covariance requires non-negative times");
    const double two_h = 2.0 * h.value();
    return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::abs(t - s), two_h));
}

double fgn_autocovariance(double dt, long lag, const HurstParam& h) {
    const double two_h = 2.0 * h.value();
    const double k = static_cast<double>(std::labs(lag));
    const double core = 0.5 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) +
                               (k >= 1.0 ? std::pow(k - 1.0, two_h) : std::pow(1.0 - k, two_h)));
    return std::pow(dt, two_h) * core;
}

namespace {

void check_kernel_args(double t, double s) {
    if (!(s > 0.0) || !(s < t))
        throw std::domain_error("Volterra kernel requires 0 < s < t");
}

} // namespace

double kernel_kh(double t, double s, const HurstParam& h, const KernelConstants& consts,
                 const QuadratureSpec& spec) {
    if (h.is_brownian()) {
        check_kernel_args(t, s);
        return 1.0;
    }
    check_kernel_args(t, s);
    const double H = h.value();
    if (h.regime() == HurstRegime::Smooth) {
        auto phi = [H](double u) { return std::pow(u, H - 0.5); };
        const double integ = integrate_power_left(phi, s, t, H - 1.5, spec).value;
        return consts.c_h * std::pow(s, 0.5 - H) * integ;
    }
    auto phi = [H](double u) { return std::pow(u, H - 1.5); };
    const double integ = integrate_power_left(phi, s, t, H - 0.5, spec).value;
    return consts.b_h *
           (std::pow(t * (t - s) / s, H - 0.5) - (H - 0.5) * std::pow(s, 0.5 - H) * integ);
}

double kernel_kh(double t, double s, const HurstParam& h, const QuadratureSpec& spec) {
    if (h.is_brownian()) {
        check_kernel_args(t, s);
        return 1.0;
    }
    return kernel_kh(t, s, h, kernel_constants(h), spec);
}

double kernel_kh_dt(double t, double s, const HurstParam& h, const KernelConstants& consts) {
    if (h.is_brownian()) return 0.0;
    check_kernel_args(t, s);
    const double H = h.value();
    const double prefactor =
        h.regime() == HurstRegime::Rough ? consts.b_h * (H - 0.5) : consts.c_h;
    return prefactor * std::pow(t / s, H - 0.5) * std::pow(t - s, H - 1.5);
}

double kernel_kh_cell_average(double t, double s0, double s1, const HurstParam& h,
                              const KernelConstants& consts, const QuadratureSpec& spec) {
    if (!(s0 >= 0.0) || !(s0 < s1) || !(s1 <= t))
        throw std::domain_error("cell average requires 0 <= s0 < s1 <= t");
    if (h.is_brownian()) return 1.0;
    const double H = h.value();
    // K(t,u) ~ u^{-|H-1/2|} at u -> 0 and ~ (t-u)^{H-1/2} at u -> t.
    const double p_left = s0 == 0.0 ? -std::abs(H - 0.5) : 0.0;
    const double p_right = s1 == t ? H - 0.5 : 0.0;
    auto psi = [&](double u) { return kernel_kh(t, u, h, consts, spec); };
    const double integ = integrate_endpoint_singular(psi, s0, s1, p_left, p_right, spec).value;
    return integ / (s1 - s0);
}

double factorization_check(double t, double s, const HurstParam& h, const KernelConstants& consts,
                           const QuadratureSpec& spec) {
    if (!(s > 0.0) || !(s <= t)) throw std::domain_error("factorization requires 0 < s <= t");
    const double target = covariance_rh(t, s, h);
    if (h.is_brownian()) return std::abs(std::min(s, t) - target) / target;

    const double H = h.value();
    const double m = std::min(s, t);
    // Endpoint behaviour of K(t,u) K(s,u): u^{-2|H-1/2|} at u -> 0; at
    // u -> s the factor K(s,u) contributes (s-u)^{H-1/2}, squared when s = t.
    const double p_left = -2.0 * std::abs(H - 0.5);
    const double p_right = (s == t) ? 2.0 * H - 1.0 : H - 0.5;
    auto psi = [&](double u) {
        return kernel_kh(t, u, h, consts, spec) * kernel_kh(s, u, h, consts, spec);
    };
    const QuadResult integ = integrate_endpoint_singular(psi, 0.0, m, p_left, p_right, spec);
    if (!integ.converged && integ.error > 1e-6 * std::max(target, 1e-300))
        throw NumericalError("factorization quadrature did not converge; achieved error estimate " +
                             std::to_string(integ.error));
    return std::abs(integ.value - target) / target;
}

namespace {

// Maximal runs of equal grid-cell levels for a piecewise-constant function.
struct Piece {
    double a, b, level;
};

std::vector<Piece> grid_pieces(const ScalarFn& f, const TimeGrid& grid) {
    std::vector<Piece> pieces;
    const int n = grid.n_steps();
    double level = f(grid.t(0));
    double start = grid.t(0);
    for (int i = 1; i < n; ++i) {
        const double li = f(grid.t(i));
        if (li != level) {
            pieces.push_back({start, grid.t(i), level});
            start = grid.t(i);
            level = li;
        }
    }
    pieces.push_back({start, grid.horizon(), level});
    return pieces;
}

double khstar_simple(const ScalarFn& f, double s, const HurstParam& h, const TimeGrid& grid,
                     const KernelConstants& consts, const QuadratureSpec& spec) {
    const double T = grid.horizon();
    const auto pieces = grid_pieces(f, grid);
    std::size_t j = 0;
    while (j + 1 < pieces.size() && pieces[j + 1].a <= s) ++j;
    const double fs = pieces[j].level;
    // dK/dt integrates exactly to kernel differences over each later piece.
    double acc = kernel_kh(T, s, h, consts, spec) * fs;
    for (std::size_t i = j + 1; i < pieces.size(); ++i) {
        const double upper = i + 1 == pieces.size() ? T : pieces[i].b;
        const double k_hi = kernel_kh(upper, s, h, consts, spec);
        const double k_lo = kernel_kh(pieces[i].a, s, h, consts, spec);
        acc += (pieces[i].level - fs) * (k_hi - k_lo);
    }
    return acc;
}

double khstar_c1(const ScalarFn& f, double s, const HurstParam& h, const TimeGrid& grid,
                 const KernelConstants& consts, const QuadratureSpec& spec) {
    const double T = grid.horizon();
    const double H = h.value();
    const double fs = f(s);
    const double prefactor = consts.b_h * (H - 0.5);
    // (f(t)-f(s)) dK/dt = [(f(t)-f(s))/(t-s)] C_H (t/s)^{H-1/2} (t-s)^{H-1/2}
    auto phi = [&](double t) {
        const double dt = t - s;
        if (dt <= 0.0) return 0.0;
        return (f(t) - fs) / dt * prefactor * std::pow(t / s, H - 0.5);
    };
    const double tail = integrate_power_left(phi, s, T, H - 0.5, spec).value;
    return kernel_kh(T, s, h, consts, spec) * fs + tail;
}

} // namespace

double khstar_apply(const ScalarFn& f, double s, const HurstParam& h, const TimeGrid& grid,
                    const QuadratureSpec& spec) {
    if (h.regime() != HurstRegime::Rough)
        throw RegimeError("K_H^* is implemented for H < 1/2 only");
    if (!(s > 0.0) || !(s < grid.horizon()))
        throw std::domain_error("K_H^* requires 0 < s < T");
    const KernelConstants consts = kernel_constants(h);
    return f.smoothness == Smoothness::Simple ? khstar_simple(f, s, h, grid, consts, spec)
                                              : khstar_c1(f, s, h, grid, consts, spec);
}

namespace {

double inner_product_smooth(const ScalarFn& f, const ScalarFn& g, double H, double T,
                            const QuadratureSpec& spec) {
    const double p = 2.0 * H - 2.0;
    auto inner = [&](double t) {
        double acc = 0.0;
        if (t > 0.0)
            acc += integrate_power_left([&](double v) { return f(t - v); }, 0.0, t, p, spec).value;
        if (t < T)
            acc += integrate_power_left([&](double v) { return f(t + v); }, 0.0, T - t, p, spec).value;
        return acc * g(t);
    };
    return H * (2.0 * H - 1.0) * integrate_adaptive(inner, 0.0, T, spec).value;
}

double inner_product_rough(const ScalarFn& f, const ScalarFn& g, const HurstParam& h,
                           const TimeGrid& grid, const QuadratureSpec& spec) {
    const double T = grid.horizon();
    const double p = 2.0 * h.value() - 1.0;
    // K^* of a piecewise-constant function blows up like (tau-s)^{H-1/2}
    // left of each level change, so integrate segment by segment.
    std::vector<double> cuts{0.0, T};
    for (const ScalarFn* fn : {&f, &g}) {
        if (fn->smoothness != Smoothness::Simple) continue;
        for (const auto& piece : grid_pieces(*fn, grid)) {
            if (piece.a > 0.0 && piece.a < T) cuts.push_back(piece.a);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto psi = [&](double s) {
        return khstar_apply(f, s, h, grid, spec) * khstar_apply(g, s, h, grid, spec);
    };
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += integrate_endpoint_singular(psi, cuts[i], cuts[i + 1], p, p, spec).value;
    return acc;
}

} // namespace

double inner_product_h(const ScalarFn& f, const ScalarFn& g, const HurstParam& h,
                       const TimeGrid& grid, const QuadratureSpec& spec) {
    const double T = grid.horizon();
    switch (h.regime()) {
    case HurstRegime::Standard:
        return integrate_adaptive([&](double t) { return f(t) * g(t); }, 0.0, T, spec).value;
    case HurstRegime::Smooth:
        return inner_product_smooth(f, g, h.value(), T, spec);
    case HurstRegime::Rough:
        return inner_product_rough(f, g, h, grid, spec);
    }
    throw std::logic_error("unreachable");
}

} // namespace fracsde
