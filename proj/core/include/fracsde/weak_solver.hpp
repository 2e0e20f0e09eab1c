#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>

#include "fracsde/hilbert_fbm.hpp"
#include "fracsde/hurst.hpp"
#include "fracsde/operator_fn.hpp"
#include "fracsde/rng.hpp"
#include "fracsde/scalar_fn.hpp"
#include "fracsde/time_grid.hpp"

namespace fracsde {

/// Drift f(t,x) with the derivative evaluators and the growth envelope phi
/// required by the solvability hypotheses:
///   |f| + |df/dt| <= phi(t)(1 + |x|),  |df/dx v|^2 <= phi(t)^2 (1 + |x|^2 + |v|^2).
struct DriftFn {
    int dim = 0;
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> f;
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> df_dt;
    std::function<Eigen::VectorXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&)> df_dx;
    ScalarFn growth_phi = ScalarFn::constant(1.0);

    static DriftFn zero(int dim);
    /// Time-independent linear drift f(t,x) = A x.
    static DriftFn linear(const Eigen::MatrixXd& a);
};

/// Spectral taper S_n scaling coefficient m (1-based) by
/// max(0, 1 - m/(n+1)); the cutoff beyond m = n is implied. On the
/// truncated space the defect ||S_n - I|| = min(1, dim/(n+1)) is
/// measurable and shrinks as n grows.
class SmoothingFamily {
public:
    SmoothingFamily(int index, int dim);

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    /// S_n^{-1} x through the Neumann series sum (I - S_n)^j x, which
    /// converges precisely when the norm defect is below one.
    Eigen::VectorXd apply_inverse(const Eigen::VectorXd& x) const;

    double operator_norm_defect() const { return defect_; }
    int index() const { return index_; }
    int dim() const { return static_cast<int>(taper_.size()); }
    const Eigen::VectorXd& taper() const { return taper_; }

private:
    int index_;
    Eigen::VectorXd taper_;
    double defect_;
};

/// Scaling data of the rescaled fixed-point problem: the variable a of
/// F_n(X, a, x0) ranges over [0,1); epsilon in (0,1) is the value the
/// solve is run at; k is even with k H > 1.
struct ScalingParams {
    double a;
    int k;
    double epsilon;
    double hurst;

    ScalingParams(double a, int k, const HurstParam& h, double epsilon);

    /// Smallest even k with k H > 1.
    static int auto_k(const HurstParam& h);

    ScalingParams with_a(double new_a) const;
};

/// Discretized path-space element: coefficients (dim x (n_steps+1)) in the
/// e-basis over the grid; column 0 is zero (the unknown starts at 0, the
/// solution is x0 + X). The starting point rides along for bookkeeping.
struct PathProcess {
    TimeGrid grid;
    Eigen::MatrixXd coefficients;
    Eigen::VectorXd x0;

    static PathProcess zero(const TimeGrid& grid, int dim, Eigen::VectorXd x0);

    int dim() const { return static_cast<int>(coefficients.rows()); }
    Eigen::VectorXd at(int i) const { return coefficients.col(i); }
    Eigen::VectorXd state_at(int i) const { return x0 + coefficients.col(i); }
    double sup_norm() const;
};

/// The residual map
///   F_n(X,a,x0)(t) = S_n X(t) - int_0^t a^k f(a^k s, x0 + S_n X(s)) ds
///                    - int_0^t a^{Hk} g(a^k s) dB^H_s,
/// per noise realization: trapezoid for the drift, left points for the
/// stochastic term.
PathProcess residual_fn(const PathProcess& x, const ScalingParams& params,
                        const Eigen::VectorXd& x0, const DriftFn& drift, const OperatorValuedFn& g,
                        const HilbertFbm& noise, const SmoothingFamily& smoothing);

enum class SolveMethod { Picard, Newton };

struct SolveOptions {
    double tol = 1e-8;
    int max_iter = 200;
    SolveMethod method = SolveMethod::Picard;
};

/// Solves F_n(X, epsilon, x0) = 0 in path space. Picard iterates
/// X <- S_n^{-1}[drift integral + stochastic integral]; Newton solves the
/// linearization exactly per step and is the right tool for stiff drifts.
/// Divergence (residual growing over 5 consecutive iterations) raises
/// ConvergenceError advising a smaller epsilon.
PathProcess picard_solve(const ScalingParams& params, const Eigen::VectorXd& x0,
                         const DriftFn& drift, const OperatorValuedFn& g, const HilbertFbm& noise,
                         const SmoothingFamily& smoothing, const SolveOptions& opts = {});

/// Directional derivative of F_n at (X, a, x0) in direction (W, b, y):
///   S_n W(t) - int_0^t a^k [df/dt ka^{k-1} b + df/dx (y + S_n W)] ds
///   - int_0^t k a^{Hk+k-1} s b dg/dt(a^k s) dB^H_s,
/// discretized exactly like the residual against the same noise.
PathProcess jacobian_action(const PathProcess& x, const PathProcess& w, double b,
                            const Eigen::VectorXd& y, const ScalingParams& params,
                            const Eigen::VectorXd& x0, const DriftFn& drift,
                            const OperatorValuedFn& g, const HilbertFbm& noise,
                            const SmoothingFamily& smoothing);

/// Transports the solved fixed point back through the self-similarity:
/// the solution lives on the shrunken horizon epsilon^k T with values
/// S_n X(t/epsilon^k); the returned noise is the driver-wise rescaling,
/// an fBm in its own right.
std::pair<PathProcess, HilbertFbm> rescale_to_solution(const PathProcess& x,
                                                       const ScalingParams& params,
                                                       const HilbertFbm& noise,
                                                       const SmoothingFamily& smoothing);

/// Sup-norm defect of the weak-solution identity
///   x(t) - x0 - int f(s, x(s)) ds - int g(s) dB~_s = 0
/// on the rescaled solution's own grid.
double weak_solution_defect(const PathProcess& solution, const HilbertFbm& rescaled_noise,
                            const DriftFn& drift, const OperatorValuedFn& g);

/// Explicit Euler cross-check on the same noise increments.
PathProcess euler_oracle(const Eigen::VectorXd& x0, const DriftFn& drift,
                         const OperatorValuedFn& g, const HilbertFbm& rescaled_noise);

struct HypothesisReport {
    double max_f_ratio = 0.0;   // (|f| + |df/dt|) / (phi (1+|x|))
    double max_dxf_ratio = 0.0; // |df/dx v|^2 / (phi^2 (1+|x|^2+|v|^2))
    double max_g_ratio = 0.0;   // (|g v| + |dg/dt v|) / (phi |v|)
    int probes = 0;
    bool derivatives_available = true;
    bool pass = false;
};

/// Random probes of the growth conditions at magnitudes 1, 10, 100.
HypothesisReport validate_hypotheses(const DriftFn& drift, const OperatorValuedFn& g,
                                     double horizon, int probes, RngStream rng);

/// Finite-difference sensitivity of the solution to the starting point:
/// sup_t |solution(x0 + delta e_1) - solution(x0)| / delta on a common
/// noise realization.
double sensitivity_x0(const ScalingParams& params, const Eigen::VectorXd& x0, const DriftFn& drift,
                      const OperatorValuedFn& g, const HilbertFbm& noise,
                      const SmoothingFamily& smoothing, double delta,
                      const SolveOptions& opts = {});

} // namespace fracsde
