#include "fracsde/quadrature.hpp"

#include <map>
#include <mutex>

namespace fracsde {

namespace {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Legendre nodes by Newton iteration on P_n, weights 2/((1-x^2) P_n'^2).
Rule make_rule(int n) {
    if (n < 2) throw std::invalid_argument("Gauss-Legendre order must be >= 2");
    Rule r;
    r.x.resize(static_cast<std::size_t>(n));
    r.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[static_cast<std::size_t>(i)] = x;
        r.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

const Rule& cached_rule(int n) {
    static std::mutex mu;
    static std::map<int, Rule> rules;
    std::scoped_lock lock(mu);
    auto it = rules.find(n);
    if (it == rules.end()) it = rules.emplace(n, make_rule(n)).first;
    return it->second;
}

} // namespace

const std::vector<double>& gauss_legendre_nodes(int n) { return cached_rule(n).x; }
const std::vector<double>& gauss_legendre_weights(int n) { return cached_rule(n).w; }

QuadResult integrate_endpoint_singular(const std::function<double(double)>& psi, double a, double b,
                                       double p_left, double p_right, const QuadratureSpec& spec) {
    if (!(b > a)) return {0.0, 0.0, true};
    const double mid = 0.5 * (a + b);

    QuadResult left, right;
    if (p_left != 0.0) {
        auto phi = [&](double u) { return psi(u) / std::pow(u - a, p_left); };
        left = integrate_power_left(phi, a, mid, p_left, spec);
    } else {
        left = integrate_adaptive(psi, a, mid, spec);
    }
    if (p_right != 0.0) {
        auto phi = [&](double u) { return psi(u) / std::pow(b - u, p_right); };
        right = integrate_power_right(phi, mid, b, p_right, spec);
    } else {
        right = integrate_adaptive(psi, mid, b, spec);
    }

    QuadResult r;
    r.value = left.value + right.value;
    r.error = left.error + right.error;
    r.converged = left.converged && right.converged;
    return r;
}

} // namespace fracsde
