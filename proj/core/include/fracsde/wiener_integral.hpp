#pragma once

#include <vector>

#include "fracsde/fbm_path.hpp"
#include "fracsde/fbm_sampler.hpp"
#include "fracsde/scalar_fn.hpp"

namespace fracsde {

/// Step function sum_i a_i 1_{[tau_i, tau_{i+1})} whose breakpoints lie
/// on grid points. Pieces partition [0,T).
class SimpleFunction {
public:
    /// breakpoints are grid indices i_0=0 < i_1 < ... < i_m=n; levels has
    /// one entry per piece.
    SimpleFunction(std::vector<int> breakpoints, std::vector<double> levels);

    static SimpleFunction from_times(const TimeGrid& grid, const std::vector<double>& times,
                                     const std::vector<double>& levels);
    /// Left-endpoint sampling of f on every grid cell.
    static SimpleFunction sample_on_grid(const ScalarFn& f, const TimeGrid& grid);

    const std::vector<int>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& levels() const { return levels_; }
    std::size_t pieces() const { return levels_.size(); }

    double value(const TimeGrid& grid, double t) const;
    ScalarFn as_scalar_fn(const TimeGrid& grid) const;

private:
    std::vector<int> breakpoints_;
    std::vector<double> levels_;
};

/// Wiener integral of a step function: sum_i a_i (B_{tau_{i+1}} - B_{tau_i}).
double integrate_simple(const SimpleFunction& phi, const FbmPath& path);

/// Wiener integral of a continuous integrand via its left-endpoint
/// piecewise-constant approximation on the path's grid.
double integrate_riemann(const ScalarFn& f, const FbmPath& path);

enum class SamplerKind { Cholesky, Circulant, Volterra };

struct IsometryResult {
    double empirical;   // Monte Carlo E[(int f dB)(int g dB)]
    double target;      // <f,g>_H
    double se;          // standard error of the empirical mean
    double defect;      // |empirical - target| / max(|target|, 1e-12)
    double relative_se; // se / max(|target|, 1e-12)
};

/// Monte Carlo check of the isometry E[(int f dB)(int g dB)] = <f,g>_H
/// with a common ensemble of paths for both integrals.
IsometryResult isometry_check(const ScalarFn& f, const ScalarFn& g, const HurstParam& h,
                              int n_paths, const TimeGrid& grid, RngStream rng,
                              SamplerKind kind = SamplerKind::Cholesky, int threads = 0);

double isometry_defect(const ScalarFn& f, const ScalarFn& g, const HurstParam& h, int n_paths,
                       const TimeGrid& grid, RngStream rng);

} // namespace fracsde
