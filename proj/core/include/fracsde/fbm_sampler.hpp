#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "fracsde/fbm_kernel.hpp"
#include "fracsde/fbm_path.hpp"
#include "fracsde/rng.hpp"

namespace fracsde {

/// Exact sampler by Cholesky factorization of the increment (fGn)
/// covariance, which is far better conditioned than the level covariance.
/// One shot of diagonal jitter (1e-12 * trace/n) is applied if the
/// factorization fails; failure after that raises NumericalError.
class CholeskySampler {
public:
    CholeskySampler(TimeGrid grid, HurstParam h);

    FbmPath sample(RngStream rng) const;
    bool jitter_applied() const { return jitter_applied_; }
    const TimeGrid& grid() const { return grid_; }

    static constexpr int kMaxPoints = 4096; // dense factorization bound

private:
    TimeGrid grid_;
    HurstParam h_;
    Eigen::MatrixXd chol_; // lower factor of the fGn covariance
    bool jitter_applied_ = false;
};

/// Exact stationary sampler by circulant embedding of the fGn
/// autocovariance (Davies-Harte). Embedding eigenvalues in [-1e-8, 0)
/// are clipped to zero; anything more negative falls back to the
/// Cholesky sampler, recorded on the emitted paths.
class CirculantSampler {
public:
    CirculantSampler(TimeGrid grid, HurstParam h);
    ~CirculantSampler();
    CirculantSampler(const CirculantSampler&) = delete;
    CirculantSampler& operator=(const CirculantSampler&) = delete;

    FbmPath sample(RngStream rng) const;
    bool fell_back() const { return fallback_ != nullptr; }
    const TimeGrid& grid() const { return grid_; }

private:
    TimeGrid grid_;
    HurstParam h_;
    std::vector<double> spectrum_scale_; // sqrt(lambda_k / M), k = 0..M-1
    void* plan_ = nullptr;               // fftw plan, created once
    std::unique_ptr<CholeskySampler> fallback_;
};

/// Approximate sampler through the integral representation
/// B^H_{t_i} = sum_{j<i} Kbar(t_i, cell_j) dB_j with the cell-averaged
/// kernel, which stays finite where K_H(t,s) blows up as s -> t.
class VolterraSampler {
public:
    VolterraSampler(TimeGrid grid, HurstParam h, const QuadratureSpec& spec = {}, int threads = 1);

    FbmPath sample(RngStream rng) const;
    const Eigen::MatrixXd& kernel_table() const { return table_; }
    const TimeGrid& grid() const { return grid_; }

private:
    TimeGrid grid_;
    HurstParam h_;
    Eigen::MatrixXd table_; // row i-1: averaged kernel against B_{t_i}
};

// One-shot conveniences; ensemble code should construct a sampler once.
FbmPath sample_cholesky(const TimeGrid& grid, const HurstParam& h, RngStream rng);
FbmPath sample_circulant(const TimeGrid& grid, const HurstParam& h, RngStream rng);
FbmPath sample_volterra(const TimeGrid& grid, const HurstParam& h, RngStream rng);

/// Self-similarity rescaling: value a^{kH} path(t) reindexed on the grid
/// with horizon a^k T. Requires 0 < a < 1 and k a positive even integer.
FbmPath rescale_selfsimilar(const FbmPath& path, double a, int k);

/// Hurst estimate by log-regression of empirical second moments of
/// increments across dyadic lags. Requires at least 64 steps; degenerate
/// or out-of-range estimates raise NumericalError.
double estimate_hurst(const FbmPath& path);

} // namespace fracsde
