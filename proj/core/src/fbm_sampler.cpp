#include "fracsde/fbm_sampler.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

#include "fracsde/errors.hpp"
#include "fracsde/parallel.hpp"

namespace fracsde {

std::string to_string(Provenance p) {
    switch (p) {
    case Provenance::Cholesky: return "cholesky";
    case Provenance::CirculantEmbedding: return "circulant";
    case Provenance::VolterraKernel: return "volterra";
    case Provenance::Rescaled: return "rescaled";
    }
    return "?";
}

namespace {

std::mutex& fftw_planner_mutex() {
    static std::mutex mu;
    return mu;
}

FbmPath make_path(const TimeGrid& grid, const HurstParam& h, Provenance prov, RngStream& rng,
                  std::vector<double> increments) {
    FbmPath p{grid, {}, h, prov, rng.seed(), rng.stream_id(), std::nullopt, false};
    p.values.resize(static_cast<std::size_t>(grid.n_steps()) + 1);
    p.values[0] = 0.0;
    for (int i = 0; i < grid.n_steps(); ++i)
        p.values[static_cast<std::size_t>(i) + 1] =
            p.values[static_cast<std::size_t>(i)] + increments[static_cast<std::size_t>(i)];
    return p;
}

} // namespace

CholeskySampler::CholeskySampler(TimeGrid grid, HurstParam h) : grid_(grid), h_(h) {
    const int n = grid_.n_steps();
    if (n + 1 > kMaxPoints)
        throw std::domain_error("Cholesky sampler limited to " + std::to_string(kMaxPoints) +
                                " grid points");
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double c = fgn_autocovariance(grid_.dt(), i - j, h_);
            cov(i, j) = c;
            cov(j, i) = c;
        }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        jitter_applied_ = true;
        const double jitter = 1e-12 * cov.trace() / n;
        cov.diagonal().array() += jitter;
        llt.compute(cov);
        if (llt.info() != Eigen::Success)
            throw NumericalError("fGn covariance is numerically non-PSD even after jitter");
    }
    chol_ = llt.matrixL();
}

FbmPath CholeskySampler::sample(RngStream rng) const {
    const int n = grid_.n_steps();
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.gaussian();
    Eigen::VectorXd inc = chol_ * z;
    return make_path(grid_, h_, Provenance::Cholesky, rng,
                     std::vector<double>(inc.data(), inc.data() + n));
}

CirculantSampler::CirculantSampler(TimeGrid grid, HurstParam h) : grid_(grid), h_(h) {
    const int m = grid_.n_steps();
    if (m < 2) throw std::domain_error("circulant embedding needs at least 2 steps");
    const int M = 2 * m;

    std::vector<std::complex<double>> row(static_cast<std::size_t>(M));
    for (int k = 0; k <= m; ++k) row[static_cast<std::size_t>(k)] = fgn_autocovariance(grid_.dt(), k, h_);
    for (int k = m + 1; k < M; ++k) row[static_cast<std::size_t>(k)] = row[static_cast<std::size_t>(M - k)];

    std::vector<std::complex<double>> eig(static_cast<std::size_t>(M));
    {
        std::scoped_lock lock(fftw_planner_mutex());
        fftw_plan p = fftw_plan_dft_1d(M, reinterpret_cast<fftw_complex*>(row.data()),
                                       reinterpret_cast<fftw_complex*>(eig.data()), FFTW_FORWARD,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_execute(p);
        fftw_destroy_plan(p);
    }

    double min_eig = 0.0;
    spectrum_scale_.resize(static_cast<std::size_t>(M));
    for (int k = 0; k < M; ++k) {
        double lambda = eig[static_cast<std::size_t>(k)].real();
        min_eig = std::min(min_eig, lambda);
        if (lambda < 0.0) lambda = 0.0; // clip round-off negatives
        spectrum_scale_[static_cast<std::size_t>(k)] = std::sqrt(lambda / M);
    }
    if (min_eig < -1e-8) {
        spectrum_scale_.clear();
        fallback_ = std::make_unique<CholeskySampler>(grid_, h_);
        return;
    }

    std::scoped_lock lock(fftw_planner_mutex());
    std::vector<std::complex<double>> dummy_in(static_cast<std::size_t>(M)),
        dummy_out(static_cast<std::size_t>(M));
    plan_ = fftw_plan_dft_1d(M, reinterpret_cast<fftw_complex*>(dummy_in.data()),
                             reinterpret_cast<fftw_complex*>(dummy_out.data()), FFTW_FORWARD,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
}

CirculantSampler::~CirculantSampler() {
    if (plan_ != nullptr) {
        std::scoped_lock lock(fftw_planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
}

FbmPath CirculantSampler::sample(RngStream rng) const {
    if (fallback_) {
        FbmPath p = fallback_->sample(rng);
        p.circulant_fell_back = true;
        return p;
    }
    const int m = grid_.n_steps();
    const int M = 2 * m;

    std::vector<std::complex<double>> spec(static_cast<std::size_t>(M));
    spec[0] = spectrum_scale_[0] * rng.gaussian();
    for (int k = 1; k < m; ++k) {
        const double u = rng.gaussian();
        const double v = rng.gaussian();
        const double s = spectrum_scale_[static_cast<std::size_t>(k)] / std::sqrt(2.0);
        spec[static_cast<std::size_t>(k)] = {s * u, s * v};
        spec[static_cast<std::size_t>(M - k)] = {s * u, -s * v};
    }
    spec[static_cast<std::size_t>(m)] = spectrum_scale_[static_cast<std::size_t>(m)] * rng.gaussian();

    std::vector<std::complex<double>> out(static_cast<std::size_t>(M));
    fftw_execute_dft(static_cast<fftw_plan>(plan_), reinterpret_cast<fftw_complex*>(spec.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));

    std::vector<double> inc(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) inc[static_cast<std::size_t>(i)] = out[static_cast<std::size_t>(i)].real();
    return make_path(grid_, h_, Provenance::CirculantEmbedding, rng, std::move(inc));
}

VolterraSampler::VolterraSampler(TimeGrid grid, HurstParam h, const QuadratureSpec& spec, int threads)
    : grid_(std::move(grid)), h_(h) {
    const int n = grid_.n_steps();
    table_ = Eigen::MatrixXd::Zero(n, n);
    if (h_.is_brownian()) {
        for (int i = 1; i <= n; ++i)
            for (int j = 0; j < i; ++j) table_(i - 1, j) = 1.0;
        return;
    }
    const KernelConstants consts = kernel_constants(h_);
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t row) {
        const int i = static_cast<int>(row) + 1;
        for (int j = 0; j < i; ++j)
            table_(i - 1, j) =
                kernel_kh_cell_average(grid_.t(i), grid_.t(j), grid_.t(j + 1), h_, consts, spec);
    });
}

FbmPath VolterraSampler::sample(RngStream rng) const {
    const int n = grid_.n_steps();
    const double sq_dt = std::sqrt(grid_.dt());
    Eigen::VectorXd db(n);
    for (int j = 0; j < n; ++j) db(j) = sq_dt * rng.gaussian();

    FbmPath p{grid_, {}, h_, Provenance::VolterraKernel, rng.seed(), rng.stream_id(), std::nullopt,
              false};
    p.values.assign(static_cast<std::size_t>(n) + 1, 0.0);
    for (int i = 1; i <= n; ++i)
        p.values[static_cast<std::size_t>(i)] = table_.row(i - 1).head(i).dot(db.head(i));
    return p;
}

FbmPath sample_cholesky(const TimeGrid& grid, const HurstParam& h, RngStream rng) {
    return CholeskySampler(grid, h).sample(rng);
}
FbmPath sample_circulant(const TimeGrid& grid, const HurstParam& h, RngStream rng) {
    return CirculantSampler(grid, h).sample(rng);
}
FbmPath sample_volterra(const TimeGrid& grid, const HurstParam& h, RngStream rng) {
    return VolterraSampler(grid, h).sample(rng);
}

FbmPath rescale_selfsimilar(const FbmPath& path, double a, int k) {
    if (!(a > 0.0) || !(a < 1.0)) throw std::domain_error("rescaling requires a in (0,1)");
    if (k <= 0 || k % 2 != 0) throw std::domain_error("rescaling requires positive even k");
    const double time_factor = std::pow(a, k);
    const double value_factor = std::pow(a, k * path.h.value());

    FbmPath out = path;
    out.grid = TimeGrid(time_factor * path.grid.horizon(), path.grid.n_steps());
    for (double& v : out.values) v *= value_factor;
    out.rescale = RescaleInfo{path.provenance, a, k};
    out.provenance = Provenance::Rescaled;
    return out;
}

double estimate_hurst(const FbmPath& path) {
    const int n = path.grid.n_steps();
    if (n < 64) throw std::domain_error("Hurst estimation needs at least 64 steps");

    std::vector<double> log_lag, log_moment;
    for (int lag = 1; lag <= n / 8; lag *= 2) {
        double acc = 0.0;
        for (int i = 0; i + lag <= n; ++i) {
            const double d = path.at(i + lag) - path.at(i);
            acc += d * d;
        }
        const double m = acc / (n - lag + 1);
        if (!(m > 0.0) || !std::isfinite(m))
            throw NumericalError("degenerate path: vanishing increment moments");
        log_lag.push_back(std::log(static_cast<double>(lag)));
        log_moment.push_back(std::log(m));
    }

    const std::size_t k = log_lag.size();
    const double mx = std::accumulate(log_lag.begin(), log_lag.end(), 0.0) / k;
    const double my = std::accumulate(log_moment.begin(), log_moment.end(), 0.0) / k;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (log_lag[i] - mx) * (log_lag[i] - mx);
        sxy += (log_lag[i] - mx) * (log_moment[i] - my);
    }
    const double estimate = 0.5 * sxy / sxx;
    if (!(estimate > 0.005) || !(estimate < 0.995))
        throw NumericalError("Hurst estimate " + std::to_string(estimate) +
                             " outside the admissible range (0,1)");
    return estimate;
}

} // namespace fracsde
