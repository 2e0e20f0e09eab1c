#include "fracsde/hilbert_fbm.hpp"

#include <cmath>

#include "fracsde/errors.hpp"
#include "fracsde/fbm_kernel.hpp"
#include "fracsde/parallel.hpp"
#include "fracsde/stats.hpp"

namespace fracsde {

SpectralOperatorQ::SpectralOperatorQ(std::vector<double> eigenvalues, std::string basis_descriptor,
                                     double trace_tail_bound)
    : eigenvalues_(std::move(eigenvalues)),
      basis_descriptor_(std::move(basis_descriptor)),
      trace_tail_bound_(trace_tail_bound) {
    if (eigenvalues_.empty()) throw std::invalid_argument("spectral operator needs N >= 1");
    if (trace_tail_bound_ < 0.0) throw std::invalid_argument("tail bound must be non-negative");
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : eigenvalues_) {
        if (!(lambda > 0.0)) throw std::invalid_argument("eigenvalues must be positive");
        if (lambda > prev) throw std::invalid_argument("eigenvalues must be non-increasing");
        prev = lambda;
        trace_ += lambda;
    }
}

SpectralOperatorQ SpectralOperatorQ::power_decay(int truncation, double p) {
    if (truncation < 1) throw std::invalid_argument("truncation must be >= 1");
    if (!(p > 1.0)) throw std::invalid_argument("power decay needs p > 1 for a finite trace");
    std::vector<double> eig(static_cast<std::size_t>(truncation));
    for (int n = 1; n <= truncation; ++n)
        eig[static_cast<std::size_t>(n - 1)] = std::pow(static_cast<double>(n), -p);
    const double tail = std::pow(static_cast<double>(truncation), 1.0 - p) / (p - 1.0);
    return SpectralOperatorQ(std::move(eig), "abstract-power-decay", tail);
}

Eigen::VectorXd SpectralOperatorQ::sqrt_eigenvalues() const {
    Eigen::VectorXd v(truncation());
    for (int n = 0; n < truncation(); ++n) v(n) = std::sqrt(eigenvalues_[static_cast<std::size_t>(n)]);
    return v;
}

Eigen::VectorXd HilbertFbm::coefficient_at(int i) const {
    Eigen::VectorXd v(dim());
    for (int n = 0; n < dim(); ++n)
        v(n) = std::sqrt(q.eigenvalue(n)) * drivers[static_cast<std::size_t>(n)].at(i);
    return v;
}

Eigen::VectorXd HilbertFbm::driver_increments(int j) const {
    Eigen::VectorXd v(dim());
    for (int n = 0; n < dim(); ++n) v(n) = drivers[static_cast<std::size_t>(n)].increment(j);
    return v;
}

HilbertFbm sample_hilbert_fbm(const SpectralOperatorQ& q, const HurstParam& h, const TimeGrid& grid,
                              RngStream rng, SamplerKind kind) {
    HilbertFbm out{q, {}, rng.seed()};
    out.drivers.reserve(static_cast<std::size_t>(q.truncation()));
    switch (kind) {
    case SamplerKind::Cholesky: {
        CholeskySampler sampler(grid, h);
        for (int n = 0; n < q.truncation(); ++n)
            out.drivers.push_back(sampler.sample(rng.substream(static_cast<std::uint64_t>(n))));
        break;
    }
    case SamplerKind::Circulant: {
        CirculantSampler sampler(grid, h);
        for (int n = 0; n < q.truncation(); ++n)
            out.drivers.push_back(sampler.sample(rng.substream(static_cast<std::uint64_t>(n))));
        break;
    }
    case SamplerKind::Volterra: {
        VolterraSampler sampler(grid, h);
        for (int n = 0; n < q.truncation(); ++n)
            out.drivers.push_back(sampler.sample(rng.substream(static_cast<std::uint64_t>(n))));
        break;
    }
    }
    return out;
}

HilbertFbm rescale_hilbert_fbm(const HilbertFbm& noise, double a, int k) {
    HilbertFbm out{noise.q, {}, noise.seed};
    out.drivers.reserve(noise.drivers.size());
    for (const FbmPath& d : noise.drivers) out.drivers.push_back(rescale_selfsimilar(d, a, k));
    return out;
}

OperatorIntegrator::OperatorIntegrator(const OperatorValuedFn& g, const TimeGrid& grid,
                                       const SpectralOperatorQ& q)
    : sqrt_lambda_(q.sqrt_eigenvalues()) {
    if (g.dim != q.truncation())
        throw std::invalid_argument("operator dimension does not match the noise truncation");
    g_at_.reserve(static_cast<std::size_t>(grid.n_steps()));
    for (int i = 0; i < grid.n_steps(); ++i) g_at_.push_back(g(grid.t(i)));
}

Eigen::VectorXd OperatorIntegrator::integrate(const HilbertFbm& noise) const {
    const int n_steps = noise.grid().n_steps();
    if (static_cast<std::size_t>(n_steps) != g_at_.size())
        throw std::invalid_argument("noise grid does not match the integrator grid");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(sqrt_lambda_.size());
    for (int i = 0; i < n_steps; ++i)
        acc.noalias() += g_at_[static_cast<std::size_t>(i)] *
                         sqrt_lambda_.cwiseProduct(noise.driver_increments(i));
    return acc;
}

Eigen::VectorXd integrate_operator(const OperatorValuedFn& g, const HilbertFbm& noise) {
    return OperatorIntegrator(g, noise.grid(), noise.q).integrate(noise);
}

namespace {

using RowArray = Eigen::Array<double, 1, Eigen::Dynamic>;

RowArray lambda_row(const SpectralOperatorQ& q) {
    RowArray lam(q.truncation());
    for (int n = 0; n < q.truncation(); ++n) lam(n) = q.eigenvalue(n);
    return lam;
}

// sum_k lambda_k <A e_k, B e_k>
double weighted_column_dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const RowArray& lam) {
    return ((a.array() * b.array()).colwise().sum() * lam).sum();
}

double second_moment_smooth(const OperatorValuedFn& g, const RowArray& lam, double H, double t_end,
                            const QuadratureSpec& spec) {
    const double p = 2.0 * H - 2.0;
    auto outer = [&](double t) {
        const Eigen::MatrixXd gt = g(t);
        auto w = [&](double s) { return weighted_column_dot(gt, g(s), lam); };
        double acc = 0.0;
        if (t > 0.0)
            acc += integrate_power_left([&](double v) { return w(t - v); }, 0.0, t, p, spec).value;
        if (t < t_end)
            acc += integrate_power_left([&](double v) { return w(t + v); }, 0.0, t_end - t, p, spec).value;
        return acc;
    };
    return H * (2.0 * H - 1.0) * integrate_adaptive(outer, 0.0, t_end, spec).value;
}

double second_moment_rough(const OperatorValuedFn& g, const RowArray& lam, const HurstParam& h,
                           double t_end, const QuadratureSpec& spec) {
    const double H = h.value();
    const double T = t_end; // K_H^* acts against the integration horizon
    const KernelConstants consts = kernel_constants(h);
    const double pref = consts.b_h * (H - 0.5);
    const int n = g.dim;

    auto psi = [&](double s) {
        const Eigen::MatrixXd gs = g(s);
        auto phi = [&](double t) -> Eigen::MatrixXd {
            const double dt = t - s;
            if (dt <= 0.0) return Eigen::MatrixXd::Zero(n, n);
            return ((g(t) - gs) * (pref * std::pow(t / s, H - 0.5) / dt)).eval();
        };
        Eigen::MatrixXd tail;
        integrate_power_left_result<Eigen::MatrixXd>(phi, s, T, H - 0.5, spec, &tail);
        const Eigen::MatrixXd kh = kernel_kh(T, s, h, consts, spec) * gs + tail;
        return weighted_column_dot(kh, kh, lam);
    };
    const double p = 2.0 * H - 1.0;
    return integrate_endpoint_singular(psi, 0.0, T, p, p, spec).value;
}

} // namespace

double second_moment_formula(const OperatorValuedFn& g, const SpectralOperatorQ& q,
                             const HurstParam& h, double t_end, const QuadratureSpec& spec) {
    if (!(t_end > 0.0)) throw std::domain_error("second moment horizon must be positive");
    if (g.dim != q.truncation())
        throw std::invalid_argument("operator dimension does not match the noise truncation");
    const RowArray lam = lambda_row(q);
    switch (h.regime()) {
    case HurstRegime::Smooth:
        return second_moment_smooth(g, lam, h.value(), t_end, spec);
    case HurstRegime::Standard: {
        auto f = [&](double t) {
            const Eigen::MatrixXd gt = g(t);
            return weighted_column_dot(gt, gt, lam);
        };
        return integrate_adaptive(f, 0.0, t_end, spec).value;
    }
    case HurstRegime::Rough:
        return second_moment_rough(g, lam, h, t_end, spec);
    }
    throw std::logic_error("unreachable");
}

MomentBoundConstant lemma1_constant(const HurstParam& h, double horizon,
                                    const QuadratureSpec& spec) {
    const double T = horizon;
    const double H = h.value();
    if (h.regime() == HurstRegime::Standard) return {T, true};

    if (h.regime() == HurstRegime::Smooth) {
        const double p = 2.0 * H - 2.0;
        auto one = [](double) { return 1.0; };
        auto inner = [&](double t) {
            double acc = 0.0;
            if (t > 0.0) acc += integrate_power_left(one, 0.0, t, p, spec).value;
            if (t < T) acc += integrate_power_left(one, 0.0, T - t, p, spec).value;
            return acc;
        };
        const double val = H * (2.0 * H - 1.0) * integrate_adaptive(inner, 0.0, T, spec).value;
        return {val, true};
    }

    // H < 1/2, as printed: the |dK/dt| integrals have a non-integrable
    // (t-s)^{H-3/2} singularity, so the refinement hits the depth cap;
    // the capped value is reported with converged = false.
    const KernelConstants consts = kernel_constants(h);
    const double p = 2.0 * H - 1.0;
    auto k_sq = [&](double s) {
        const double k = kernel_kh(T, s, h, consts, spec);
        return k * k;
    };
    const QuadResult term1 = integrate_endpoint_singular(k_sq, 0.0, T, p, p, spec);

    bool converged = term1.converged;
    auto abs_dk_integral = [&](double s) {
        auto f = [&](double t) { return std::abs(kernel_kh_dt(t, s, h, consts)); };
        const QuadResult r = integrate_adaptive(f, s, T, spec);
        return r.value;
    };
    auto term2_integrand = [&](double s) {
        return std::abs(kernel_kh(T, s, h, consts, spec)) * abs_dk_integral(s);
    };
    auto term3_integrand = [&](double s) {
        const double inner = abs_dk_integral(s);
        return inner * inner; // the printed double integral factorizes
    };
    const QuadResult term2 = integrate_adaptive(term2_integrand, 0.0, T, spec);
    const QuadResult term3 = integrate_adaptive(term3_integrand, 0.0, T, spec);
    converged = false; // the inner |dK/dt| integrals diverge as printed
    return {term1.value + 2.0 * term2.value + term3.value, converged};
}

namespace {

Lemma1FormReport lemma1_form(const std::vector<Eigen::MatrixXd>& integrand_at,
                             double sup_unscaled_norm_sq, const SpectralOperatorQ& q,
                             const HurstParam& h, double a, int k, int n_paths,
                             const TimeGrid& grid, RngStream rng, std::uint64_t stream_salt,
                             int threads) {
    const int N = q.truncation();
    const double a2hk = std::pow(a, 2.0 * h.value() * k);

    Lemma1FormReport rep;
    double sup_sq = 0.0;
    for (const auto& m : integrand_at) {
        const double c = m.array().square().colwise().sum().maxCoeff();
        sup_sq = std::max(sup_sq, c);
    }
    rep.sup_integrand_norm_sq = sup_sq;
    rep.hypothesis_ok = std::isfinite(sup_unscaled_norm_sq) && std::isfinite(sup_sq);

    const MomentBoundConstant c_ht = lemma1_constant(h, grid.horizon());
    rep.c_ht = c_ht.value;
    rep.c_converged = c_ht.converged;
    rep.bound = c_ht.value * a2hk * sup_sq * q.trace();

    std::vector<double> stats(static_cast<std::size_t>(n_paths));
    const Eigen::VectorXd lambda = Eigen::Map<const Eigen::VectorXd>(q.eigenvalues().data(), N);
    parallel_for(static_cast<std::size_t>(n_paths), threads, [&](std::size_t p) {
        HilbertFbm noise =
            sample_hilbert_fbm(q, h, grid, rng.substream(stream_salt + p), SamplerKind::Circulant);
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(N, N); // column j: int v_j dB^j
        for (int i = 0; i < grid.n_steps(); ++i) {
            const Eigen::VectorXd db = noise.driver_increments(i);
            acc.noalias() += integrand_at[static_cast<std::size_t>(i)] * db.asDiagonal();
        }
        stats[p] = a2hk * (acc.array().square().colwise().sum() * lambda.transpose().array()).sum();
    });
    rep.mc_moment = sample_mean(stats);
    rep.mc_se = standard_error(stats);

    const double eps = 4.0 * rep.mc_se / std::max(rep.bound, 1e-300) + 0.05;
    rep.pass = rep.hypothesis_ok && rep.mc_moment <= rep.bound * (1.0 + eps);
    return rep;
}

} // namespace

Lemma1Report lemma1_check(const OperatorValuedFn& g, const OperatorValuedFn& h_fn,
                          const SpectralOperatorQ& q, const HurstParam& h, double a, int k,
                          int n_paths, const TimeGrid& grid, RngStream rng, int threads) {
    if (!(a > 0.0)) throw std::domain_error("lemma check requires a > 0");
    if (n_paths < 2) throw std::invalid_argument("lemma check needs at least 2 paths");
    const double ak = std::pow(a, k);
    const int n = grid.n_steps();

    std::vector<Eigen::MatrixXd> g_at, h_at;
    g_at.reserve(static_cast<std::size_t>(n));
    h_at.reserve(static_cast<std::size_t>(n));
    double g_sup_plain = 0.0, h_sup_plain = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = grid.t(i);
        g_at.push_back(g(ak * t));
        h_at.push_back((t * h_fn(ak * t)).eval());
        g_sup_plain = std::max(g_sup_plain, g(t).array().square().colwise().sum().maxCoeff());
        h_sup_plain =
            std::max(h_sup_plain, (t * h_fn(t)).array().square().colwise().sum().maxCoeff());
    }

    Lemma1Report report;
    report.g_form = lemma1_form(g_at, g_sup_plain, q, h, a, k, n_paths, grid, rng, 0x1000000, threads);
    report.h_form = lemma1_form(h_at, h_sup_plain, q, h, a, k, n_paths, grid, rng, 0x2000000, threads);
    return report;
}

} // namespace fracsde
