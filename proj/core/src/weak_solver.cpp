#include "fracsde/weak_solver.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "fracsde/errors.hpp"

namespace fracsde {

DriftFn DriftFn::zero(int dim) {
    DriftFn d;
    d.dim = dim;
    auto z = [dim](double, const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(dim).eval(); };
    d.f = z;
    d.df_dt = z;
    d.df_dx = [dim](double, const Eigen::VectorXd&, const Eigen::VectorXd&) {
        return Eigen::VectorXd::Zero(dim).eval();
    };
    d.growth_phi = ScalarFn::constant(1.0);
    return d;
}

DriftFn DriftFn::linear(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("linear drift needs a square matrix");
    DriftFn d;
    d.dim = static_cast<int>(a.rows());
    d.f = [a](double, const Eigen::VectorXd& x) { return (a * x).eval(); };
    d.df_dt = [n = d.dim](double, const Eigen::VectorXd&) {
        return Eigen::VectorXd::Zero(n).eval();
    };
    d.df_dx = [a](double, const Eigen::VectorXd&, const Eigen::VectorXd& v) {
        return (a * v).eval();
    };
    // |Ax| <= ||A|| |x| <= phi (1+|x|) and the g-condition needs phi >= 1
    const double norm = a.operatorNorm();
    d.growth_phi = ScalarFn::constant(std::max(norm, 1.0));
    return d;
}

SmoothingFamily::SmoothingFamily(int index, int dim) : index_(index) {
    if (index < 1) throw std::invalid_argument("smoothing index must be >= 1");
    if (dim < 1) throw std::invalid_argument("smoothing dimension must be >= 1");
    taper_.resize(dim);
    for (int m = 1; m <= dim; ++m)
        taper_(m - 1) = std::max(0.0, 1.0 - static_cast<double>(m) / (index + 1.0));
    defect_ = (1.0 - taper_.array()).maxCoeff();
}

Eigen::VectorXd SmoothingFamily::apply(const Eigen::VectorXd& x) const {
    if (x.size() != taper_.size()) throw std::invalid_argument("smoothing dimension mismatch");
    return taper_.cwiseProduct(x);
}

Eigen::VectorXd SmoothingFamily::apply_inverse(const Eigen::VectorXd& x) const {
    if (x.size() != taper_.size()) throw std::invalid_argument("smoothing dimension mismatch");
    if (defect_ >= 1.0)
        throw ConvergenceError("S_n is singular on the truncated space (defect >= 1); "
                               "increase the smoothing index past the dimension",
                               defect_);
    Eigen::VectorXd term = x;
    Eigen::VectorXd acc = x;
    for (int j = 0; j < 4096; ++j) {
        term = term - taper_.cwiseProduct(term); // (I - S_n) term
        acc += term;
        if (term.cwiseAbs().maxCoeff() <= 1e-16 * std::max(1.0, acc.cwiseAbs().maxCoeff())) break;
    }
    return acc;
}

ScalingParams::ScalingParams(double a_, int k_, const HurstParam& h, double epsilon_)
    : a(a_), k(k_), epsilon(epsilon_), hurst(h.value()) {
    if (!(a >= 0.0) || !(a < 1.0)) throw std::domain_error("scaling requires a in [0,1)");
    if (k <= 0 || k % 2 != 0) throw std::domain_error("scaling requires positive even k");
    if (!(k * h.value() > 1.0)) throw std::domain_error("scaling requires k H > 1");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::domain_error("solve value epsilon must lie in (0,1)");
}

int ScalingParams::auto_k(const HurstParam& h) {
    int k = 2;
    while (!(k * h.value() > 1.0)) k += 2;
    return k;
}

ScalingParams ScalingParams::with_a(double new_a) const {
    ScalingParams p = *this;
    if (!(new_a >= 0.0) || !(new_a < 1.0)) throw std::domain_error("scaling requires a in [0,1)");
    p.a = new_a;
    return p;
}

PathProcess PathProcess::zero(const TimeGrid& grid, int dim, Eigen::VectorXd x0) {
    PathProcess p{grid, Eigen::MatrixXd::Zero(dim, grid.n_steps() + 1), std::move(x0)};
    return p;
}

double PathProcess::sup_norm() const {
    double m = 0.0;
    for (int i = 0; i < coefficients.cols(); ++i) m = std::max(m, coefficients.col(i).norm());
    return m;
}

namespace {

void check_shapes(const PathProcess& x, const Eigen::VectorXd& x0, const DriftFn& drift,
                  const OperatorValuedFn& g, const HilbertFbm& noise,
                  const SmoothingFamily& smoothing) {
    const int dim = x.dim();
    if (x0.size() != dim || drift.dim != dim || g.dim != dim || noise.dim() != dim ||
        smoothing.dim() != dim)
        throw std::invalid_argument("path, drift, diffusion, noise and smoothing dimensions differ");
    if (x.grid != noise.grid())
        throw std::invalid_argument("path and noise must share the grid");
    if (x.coefficients.cols() != x.grid.n_steps() + 1)
        throw std::invalid_argument("coefficient matrix does not match the grid");
}

/// Cumulative left-point stochastic term int_0^{t_i} a^{Hk} g(a^k s) dB_s.
Eigen::MatrixXd stochastic_cumulative(const ScalingParams& params, const OperatorValuedFn& g,
                                      const HilbertFbm& noise) {
    const TimeGrid& grid = noise.grid();
    const int n = grid.n_steps();
    const int dim = noise.dim();
    const double ak = std::pow(params.a, params.k);
    const double ahk = std::pow(params.a, params.hurst * params.k);
    const Eigen::VectorXd sqrt_lambda = noise.q.sqrt_eigenvalues();

    Eigen::MatrixXd z(dim, n + 1);
    z.col(0).setZero();
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd db = sqrt_lambda.cwiseProduct(noise.driver_increments(i));
        z.col(i + 1) = z.col(i) + ahk * (g(ak * grid.t(i)) * db);
    }
    return z;
}

/// Cumulative trapezoid term int_0^{t_i} of the supplied node values.
Eigen::MatrixXd trapezoid_cumulative(const Eigen::MatrixXd& nodes, double dt) {
    Eigen::MatrixXd acc(nodes.rows(), nodes.cols());
    acc.col(0).setZero();
    for (int i = 0; i + 1 < nodes.cols(); ++i)
        acc.col(i + 1) = acc.col(i) + 0.5 * dt * (nodes.col(i) + nodes.col(i + 1));
    return acc;
}

} // namespace

PathProcess residual_fn(const PathProcess& x, const ScalingParams& params,
                        const Eigen::VectorXd& x0, const DriftFn& drift, const OperatorValuedFn& g,
                        const HilbertFbm& noise, const SmoothingFamily& smoothing) {
    check_shapes(x, x0, drift, g, noise, smoothing);
    const TimeGrid& grid = x.grid;
    const int n = grid.n_steps();
    const int dim = x.dim();
    const double ak = std::pow(params.a, params.k);

    Eigen::MatrixXd smoothed(dim, n + 1);
    Eigen::MatrixXd drift_nodes(dim, n + 1);
    for (int i = 0; i <= n; ++i) {
        smoothed.col(i) = smoothing.apply(x.at(i));
        drift_nodes.col(i) = ak * drift.f(ak * grid.t(i), x0 + smoothed.col(i));
    }
    const Eigen::MatrixXd drift_cum = trapezoid_cumulative(drift_nodes, grid.dt());
    const Eigen::MatrixXd stoch_cum = stochastic_cumulative(params, g, noise);

    PathProcess r{grid, smoothed - drift_cum - stoch_cum, x0};
    return r;
}

PathProcess picard_solve(const ScalingParams& params, const Eigen::VectorXd& x0,
                         const DriftFn& drift, const OperatorValuedFn& g, const HilbertFbm& noise,
                         const SmoothingFamily& smoothing, const SolveOptions& opts) {
    if (!(opts.tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    const ScalingParams solve_params = params.with_a(params.epsilon);
    const TimeGrid& grid = noise.grid();
    const int n = grid.n_steps();
    const int dim = noise.dim();
    const double ak = std::pow(solve_params.a, solve_params.k);

    PathProcess x = PathProcess::zero(grid, dim, x0);
    check_shapes(x, x0, drift, g, noise, smoothing);
    const Eigen::MatrixXd stoch_cum = stochastic_cumulative(solve_params, g, noise);

    auto residual_norm = [&](const PathProcess& cand) {
        return residual_fn(cand, solve_params, x0, drift, g, noise, smoothing).sup_norm();
    };

    const bool newton = opts.method == SolveMethod::Newton;
    if (newton && !drift.df_dx)
        throw CapabilityError("Newton solve needs the drift Jacobian evaluator");

    double res = residual_norm(x);
    double prev_res = res;
    int increases = 0;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if (res <= opts.tol) return x;

        if (!newton) {
            // X <- S_n^{-1} [ int a^k f(a^k s, x0 + S_n X) ds + stochastic ]
            Eigen::MatrixXd drift_nodes(dim, n + 1);
            for (int i = 0; i <= n; ++i)
                drift_nodes.col(i) =
                    ak * drift.f(ak * grid.t(i), x0 + smoothing.apply(x.at(i)));
            const Eigen::MatrixXd drift_cum = trapezoid_cumulative(drift_nodes, grid.dt());
            for (int i = 0; i <= n; ++i)
                x.coefficients.col(i) = smoothing.apply_inverse(drift_cum.col(i) + stoch_cum.col(i));
        } else {
            // March the linearized system in time; trapezoid makes each
            // step an implicit solve for u_i = S_n W(t_i).
            const PathProcess r = residual_fn(x, solve_params, x0, drift, g, noise, smoothing);
            const double c = 0.5 * grid.dt() * ak;
            Eigen::MatrixXd jac(dim, dim);
            Eigen::VectorXd g_prev = Eigen::VectorXd::Zero(dim);
            Eigen::VectorXd cum = Eigen::VectorXd::Zero(dim);
            for (int i = 1; i <= n; ++i) {
                const Eigen::VectorXd state = x0 + smoothing.apply(x.at(i));
                for (int col = 0; col < dim; ++col)
                    jac.col(col) =
                        drift.df_dx(ak * grid.t(i), state, Eigen::VectorXd::Unit(dim, col));
                const Eigen::VectorXd rhs = -r.at(i) + cum + c * g_prev;
                const Eigen::VectorXd u =
                    (Eigen::MatrixXd::Identity(dim, dim) - c * jac).partialPivLu().solve(rhs);
                const Eigen::VectorXd g_cur = ak * (jac * u);
                cum += c * (g_prev + g_cur);
                x.coefficients.col(i) += smoothing.apply_inverse(u);
                g_prev = g_cur;
            }
        }

        res = residual_norm(x);
        if (res > prev_res) {
            if (++increases >= 5)
                throw ConvergenceError(
                    "fixed-point iteration is not contracting; try a smaller epsilon", res);
        } else {
            increases = 0;
        }
        prev_res = res;
    }
    if (res <= opts.tol) return x;
    throw ConvergenceError("fixed-point solve did not reach tolerance within max_iter", res);
}

PathProcess jacobian_action(const PathProcess& x, const PathProcess& w, double b,
                            const Eigen::VectorXd& y, const ScalingParams& params,
                            const Eigen::VectorXd& x0, const DriftFn& drift,
                            const OperatorValuedFn& g, const HilbertFbm& noise,
                            const SmoothingFamily& smoothing) {
    check_shapes(x, x0, drift, g, noise, smoothing);
    check_shapes(w, x0, drift, g, noise, smoothing);
    if (!drift.df_dx) throw CapabilityError("jacobian action needs the drift df/dx evaluator");
    if (b != 0.0 && !drift.df_dt)
        throw CapabilityError("jacobian action in the a-direction needs df/dt");
    if (b != 0.0 && !g.has_time_derivative())
        throw CapabilityError("jacobian action in the a-direction needs dg/dt");

    const TimeGrid& grid = x.grid;
    const int n = grid.n_steps();
    const int dim = x.dim();
    const double a = params.a;
    const double ak = std::pow(a, params.k);
    const double k = static_cast<double>(params.k);

    Eigen::MatrixXd nodes(dim, n + 1);
    for (int i = 0; i <= n; ++i) {
        const double t = grid.t(i);
        const Eigen::VectorXd state = x0 + smoothing.apply(x.at(i));
        Eigen::VectorXd v = drift.df_dx(ak * t, state, y + smoothing.apply(w.at(i)));
        if (b != 0.0)
            v += drift.df_dt(ak * t, state) * (k * std::pow(a, params.k - 1) * b);
        nodes.col(i) = ak * v;
    }
    const Eigen::MatrixXd drift_cum = trapezoid_cumulative(nodes, grid.dt());

    Eigen::MatrixXd stoch_cum = Eigen::MatrixXd::Zero(dim, n + 1);
    if (b != 0.0) {
        const double scale = k * std::pow(a, params.hurst * params.k + params.k - 1) * b;
        const Eigen::VectorXd sqrt_lambda = noise.q.sqrt_eigenvalues();
        for (int i = 0; i < n; ++i) {
            const double t = grid.t(i);
            const Eigen::VectorXd db = sqrt_lambda.cwiseProduct(noise.driver_increments(i));
            stoch_cum.col(i + 1) = stoch_cum.col(i) + scale * t * (g.dt(ak * t) * db);
        }
    }

    Eigen::MatrixXd smoothed_w(dim, n + 1);
    for (int i = 0; i <= n; ++i) smoothed_w.col(i) = smoothing.apply(w.at(i));

    return PathProcess{grid, smoothed_w - drift_cum - stoch_cum, x0};
}

std::pair<PathProcess, HilbertFbm> rescale_to_solution(const PathProcess& x,
                                                       const ScalingParams& params,
                                                       const HilbertFbm& noise,
                                                       const SmoothingFamily& smoothing) {
    const double ek = std::pow(params.epsilon, params.k);
    PathProcess solution{TimeGrid(ek * x.grid.horizon(), x.grid.n_steps()),
                         Eigen::MatrixXd(x.dim(), x.grid.n_steps() + 1), x.x0};
    for (int i = 0; i <= x.grid.n_steps(); ++i)
        solution.coefficients.col(i) = smoothing.apply(x.at(i));
    return {std::move(solution), rescale_hilbert_fbm(noise, params.epsilon, params.k)};
}

double weak_solution_defect(const PathProcess& solution, const HilbertFbm& rescaled_noise,
                            const DriftFn& drift, const OperatorValuedFn& g) {
    const TimeGrid& grid = solution.grid;
    if (grid != rescaled_noise.grid())
        throw std::invalid_argument("solution and rescaled noise must share the grid");
    const int n = grid.n_steps();
    const int dim = solution.dim();

    Eigen::MatrixXd drift_nodes(dim, n + 1);
    for (int i = 0; i <= n; ++i)
        drift_nodes.col(i) = drift.f(grid.t(i), solution.state_at(i));
    const Eigen::MatrixXd drift_cum = trapezoid_cumulative(drift_nodes, grid.dt());

    const Eigen::VectorXd sqrt_lambda = rescaled_noise.q.sqrt_eigenvalues();
    Eigen::VectorXd stoch = Eigen::VectorXd::Zero(dim);
    double defect = 0.0;
    for (int i = 0; i <= n; ++i) {
        defect = std::max(defect, (solution.at(i) - drift_cum.col(i) - stoch).norm());
        if (i < n)
            stoch += g(grid.t(i)) * sqrt_lambda.cwiseProduct(rescaled_noise.driver_increments(i));
    }
    return defect;
}

PathProcess euler_oracle(const Eigen::VectorXd& x0, const DriftFn& drift,
                         const OperatorValuedFn& g, const HilbertFbm& rescaled_noise) {
    const TimeGrid& grid = rescaled_noise.grid();
    const int n = grid.n_steps();
    const int dim = rescaled_noise.dim();
    if (x0.size() != dim || drift.dim != dim || g.dim != dim)
        throw std::invalid_argument("dimension mismatch in the Euler scheme");
    const Eigen::VectorXd sqrt_lambda = rescaled_noise.q.sqrt_eigenvalues();

    PathProcess p = PathProcess::zero(grid, dim, x0);
    Eigen::VectorXd state = x0;
    for (int i = 0; i < n; ++i) {
        state += drift.f(grid.t(i), state) * grid.dt() +
                 g(grid.t(i)) * sqrt_lambda.cwiseProduct(rescaled_noise.driver_increments(i));
        p.coefficients.col(i + 1) = state - x0;
    }
    return p;
}

HypothesisReport validate_hypotheses(const DriftFn& drift, const OperatorValuedFn& g,
                                     double horizon, int probes, RngStream rng) {
    if (probes < 100) throw std::invalid_argument("hypothesis validation needs >= 100 probes");
    const int dim = drift.dim;
    const double magnitudes[] = {1.0, 10.0, 100.0};

    HypothesisReport rep;
    rep.probes = probes;
    rep.derivatives_available = static_cast<bool>(drift.df_dt) && static_cast<bool>(drift.df_dx) &&
                                g.has_time_derivative();

    auto random_vec = [&](double mag) {
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) v(i) = rng.gaussian();
        const double norm = v.norm();
        return norm > 0.0 ? Eigen::VectorXd((mag / norm) * v) : Eigen::VectorXd::Unit(dim, 0).eval();
    };

    for (int p = 0; p < probes; ++p) {
        const double t = rng.uniform() * horizon;
        const Eigen::VectorXd x = random_vec(magnitudes[p % 3]);
        const Eigen::VectorXd v = random_vec(magnitudes[(p / 3) % 3]);
        const double phi = drift.growth_phi(t);

        double f_norm = drift.f(t, x).norm();
        if (drift.df_dt) f_norm += drift.df_dt(t, x).norm();
        rep.max_f_ratio = std::max(rep.max_f_ratio, f_norm / (phi * (1.0 + x.norm())));

        if (drift.df_dx) {
            const double dxf = drift.df_dx(t, x, v).squaredNorm();
            rep.max_dxf_ratio = std::max(
                rep.max_dxf_ratio, dxf / (phi * phi * (1.0 + x.squaredNorm() + v.squaredNorm())));
        }

        double g_norm = (g(t) * v).norm();
        if (g.has_time_derivative()) g_norm += (g.dt(t) * v).norm();
        rep.max_g_ratio = std::max(rep.max_g_ratio, g_norm / (phi * v.norm()));
    }
    const double cap = 1.0 + 1e-9;
    rep.pass = rep.max_f_ratio <= cap && rep.max_dxf_ratio <= cap && rep.max_g_ratio <= cap;
    return rep;
}

double sensitivity_x0(const ScalingParams& params, const Eigen::VectorXd& x0, const DriftFn& drift,
                      const OperatorValuedFn& g, const HilbertFbm& noise,
                      const SmoothingFamily& smoothing, double delta, const SolveOptions& opts) {
    if (!(delta > 0.0)) throw std::domain_error("sensitivity step must be positive");
    const PathProcess base = picard_solve(params, x0, drift, g, noise, smoothing, opts);
    Eigen::VectorXd shifted = x0;
    shifted(0) += delta;
    const PathProcess bumped = picard_solve(params, shifted, drift, g, noise, smoothing, opts);

    const auto [sol_base, noise_base] = rescale_to_solution(base, params, noise, smoothing);
    const auto [sol_bump, noise_bump] = rescale_to_solution(bumped, params, noise, smoothing);
    (void)noise_base;
    (void)noise_bump;

    double sup = 0.0;
    for (int i = 0; i <= sol_base.grid.n_steps(); ++i)
        sup = std::max(sup, (sol_bump.state_at(i) - sol_base.state_at(i)).norm());
    return sup / delta;
}

} // namespace fracsde
