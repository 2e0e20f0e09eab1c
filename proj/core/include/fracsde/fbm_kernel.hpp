#pragma once

#include "fracsde/hurst.hpp"
#include "fracsde/quadrature.hpp"
#include "fracsde/scalar_fn.hpp"
#include "fracsde/time_grid.hpp"

namespace fracsde {

/// Convention used for the beta function in the kernel normalization
/// constants. StandardBeta is B(a,b) = Gamma(a)Gamma(b)/Gamma(a+b);
/// PaperReciprocal is its reciprocal. The shipped default is the one
/// under which the kernel factorizes back to the covariance (that is
/// StandardBeta); the other is kept selectable for comparison.
enum class BetaConvention { StandardBeta, PaperReciprocal };

struct KernelConstants {
    double b_h = 0.0; // used when H < 1/2
    double c_h = 0.0; // used when H > 1/2
    BetaConvention convention = BetaConvention::StandardBeta;
};

double beta_function(double a, double b, BetaConvention convention);

/// Normalization constant of the Volterra kernel for H != 1/2.
KernelConstants kernel_constants(const HurstParam& h,
                                 BetaConvention convention = BetaConvention::StandardBeta);

/// Covariance R_H(t,s) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2 of fBm.
double covariance_rh(double t, double s, const HurstParam& h);

/// Autocovariance of unit-spaced fractional Gaussian noise at integer lag,
/// scaled to grid spacing dt.
double fgn_autocovariance(double dt, long lag, const HurstParam& h);

/// Volterra kernel K_H(t,s), 0 < s < t. Identically 1 at H = 1/2.
double kernel_kh(double t, double s, const HurstParam& h, const KernelConstants& consts,
                 const QuadratureSpec& spec = {});
double kernel_kh(double t, double s, const HurstParam& h, const QuadratureSpec& spec = {});

/// Closed-form time derivative of the kernel,
///   dK/dt(t,s) = C_H (t/s)^{H-1/2} (t-s)^{H-3/2},
/// with C_H = b_H (H-1/2) for H < 1/2 and C_H = c_H for H > 1/2.
/// Never obtained by numerical differentiation: the (t-s)^{H-3/2}
/// singularity would amplify finite-difference noise.
double kernel_kh_dt(double t, double s, const HurstParam& h, const KernelConstants& consts);

/// Average of K_H(t, .) over the cell [s0, s1], finite even where the
/// kernel blows up at the cell edge; used by the Volterra sampler.
double kernel_kh_cell_average(double t, double s0, double s1, const HurstParam& h,
                              const KernelConstants& consts, const QuadratureSpec& spec = {});

/// Relative defect of the factorization
///   int_0^{s^t} K_H(t,u) K_H(s,u) du = R_H(t,s),
/// the ground truth the normalization constants must satisfy.
double factorization_check(double t, double s, const HurstParam& h, const KernelConstants& consts,
                           const QuadratureSpec& spec = {});

/// The operator K_H^* for H < 1/2:
///   K_H^* f(s) = K(T,s) f(s) + int_s^T (f(t) - f(s)) dK/dt(t,s) dt.
/// T is the grid horizon. Piecewise-constant integrands are handled
/// exactly by telescoping dK/dt over the cells right of s.
double khstar_apply(const ScalarFn& f, double s, const HurstParam& h, const TimeGrid& grid,
                    const QuadratureSpec& spec = {});

/// Inner product <f,g>_H on [0,T]:
///   H > 1/2: H(2H-1) int int f(s) g(t) |t-s|^{2H-2} ds dt
///   H = 1/2: int f g  (L^2 limit)
///   H < 1/2: int K_H^* f (s) K_H^* g (s) ds
double inner_product_h(const ScalarFn& f, const ScalarFn& g, const HurstParam& h,
                       const TimeGrid& grid, const QuadratureSpec& spec = {});

} // namespace fracsde
