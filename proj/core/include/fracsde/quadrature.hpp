#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <vector>

#include "fracsde/errors.hpp"

namespace fracsde {

/// Composite Gauss-Legendre with adaptive bisection. Singular integrands
/// are regularized first: a known endpoint power (u-a)^p is absorbed by
/// the substitution u = a + (b-a) w^{1/(1+p)}, after which the integrand
/// is bounded on (0,1].
struct QuadratureSpec {
    int gauss_points = 16;
    double tol = 1e-10; // accept a subinterval when refinement moves it by less
    int max_depth = 20;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // sum of last refinement differences over accepted leaves
    bool converged = true;

    operator double() const { return value; }
};

/// Nodes and weights on [-1,1], computed once per order and cached.
const std::vector<double>& gauss_legendre_nodes(int n);
const std::vector<double>& gauss_legendre_weights(int n);

namespace detail {

inline double quad_norm(double x) { return std::abs(x); }
inline double quad_norm(const Eigen::VectorXd& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }
inline double quad_norm(const Eigen::MatrixXd& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }

template <class T, class F>
T gauss_panel(const F& f, double a, double b, const std::vector<double>& x, const std::vector<double>& w) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    T acc = w[0] * f(mid + half * x[0]);
    for (std::size_t i = 1; i < x.size(); ++i) acc += w[i] * f(mid + half * x[i]);
    return half * acc;
}

template <class T, class F>
struct AdaptiveState {
    const F& f;
    const std::vector<double>& x;
    const std::vector<double>& w;
    double tol;
    int max_depth;
    double err = 0.0;
    bool converged = true;

    T recurse(double a, double b, const T& whole, int depth) {
        const double mid = 0.5 * (a + b);
        T left = gauss_panel<T>(f, a, mid, x, w);
        T right = gauss_panel<T>(f, mid, b, x, w);
        const double diff = quad_norm(T(left + right - whole));
        if (diff < tol || depth >= max_depth) {
            if (diff >= tol) converged = false;
            err += diff;
            return left + right;
        }
        return recurse(a, mid, left, depth + 1) + recurse(mid, b, right, depth + 1);
    }
};

} // namespace detail

/// Adaptive integral of a bounded integrand over [a,b].
template <class T = double, class F>
QuadResult integrate_adaptive_result(const F& f, double a, double b, const QuadratureSpec& spec,
                                     T* out = nullptr) {
    const auto& x = gauss_legendre_nodes(spec.gauss_points);
    const auto& w = gauss_legendre_weights(spec.gauss_points);
    if (!(b > a)) {
        if (out) *out = T(0.0 * f(a)); // zero of the right shape
        return {0.0, 0.0, true};
    }
    detail::AdaptiveState<T, F> st{f, x, w, spec.tol, spec.max_depth};
    T whole = detail::gauss_panel<T>(f, a, b, x, w);
    T total = st.recurse(a, b, whole, 0);
    if (out) *out = total;
    QuadResult r;
    r.error = st.err;
    r.converged = st.converged;
    if constexpr (std::is_same_v<T, double>) r.value = total;
    return r;
}

inline QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                     const QuadratureSpec& spec = {}) {
    return integrate_adaptive_result<double>(f, a, b, spec);
}

/// \int_a^b (u-a)^p phi(u) du with phi bounded and p > -1.
template <class T = double, class F>
QuadResult integrate_power_left_result(const F& phi, double a, double b, double p,
                                       const QuadratureSpec& spec, T* out = nullptr) {
    if (p <= -1.0) throw NumericalError("endpoint exponent must exceed -1");
    if (!(b > a)) return integrate_adaptive_result<T>(phi, a, a, spec, out);
    const double q = 1.0 / (1.0 + p);
    const double scale = std::pow(b - a, 1.0 + p) / (1.0 + p);
    auto g = [&](double w) { return phi(a + (b - a) * std::pow(w, q)); };
    T inner;
    QuadResult r = integrate_adaptive_result<T>(g, 0.0, 1.0, spec, &inner);
    if (out) *out = scale * inner;
    r.value *= scale;
    r.error *= std::abs(scale);
    return r;
}

/// \int_a^b (b-u)^p phi(u) du with phi bounded and p > -1.
template <class T = double, class F>
QuadResult integrate_power_right_result(const F& phi, double a, double b, double p,
                                        const QuadratureSpec& spec, T* out = nullptr) {
    auto mirrored = [&](double u) { return phi(a + b - u); };
    return integrate_power_left_result<T>(mirrored, a, b, p, spec, out);
}

inline QuadResult integrate_power_left(const std::function<double(double)>& phi, double a, double b,
                                       double p, const QuadratureSpec& spec = {}) {
    return integrate_power_left_result<double>(phi, a, b, p, spec);
}
inline QuadResult integrate_power_right(const std::function<double(double)>& phi, double a, double b,
                                        double p, const QuadratureSpec& spec = {}) {
    return integrate_power_right_result<double>(phi, a, b, p, spec);
}

/// \int_a^b psi(u) du where psi behaves like (u-a)^{p_left} near a and
/// (b-u)^{p_right} near b. The powers are divided out, the halves are
/// integrated on regularized variables. Exponents of zero mean "regular".
QuadResult integrate_endpoint_singular(const std::function<double(double)>& psi, double a, double b,
                                       double p_left, double p_right,
                                       const QuadratureSpec& spec = {});

} // namespace fracsde
