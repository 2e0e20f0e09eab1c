#include "fracsde/wiener_integral.hpp"

#include <cmath>
#include <stdexcept>

#include "fracsde/fbm_kernel.hpp"
#include "fracsde/parallel.hpp"
#include "fracsde/stats.hpp"

namespace fracsde {

SimpleFunction::SimpleFunction(std::vector<int> breakpoints, std::vector<double> levels)
    : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)) {
    if (breakpoints_.size() < 2 || levels_.size() + 1 != breakpoints_.size())
        throw std::invalid_argument("simple function needs m+1 breakpoints for m levels");
    if (breakpoints_.front() != 0)
        throw std::invalid_argument("pieces must start at t = 0");
    for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
        if (breakpoints_[i] >= breakpoints_[i + 1])
            throw std::invalid_argument("breakpoints must be strictly increasing");
}

SimpleFunction SimpleFunction::from_times(const TimeGrid& grid, const std::vector<double>& times,
                                          const std::vector<double>& levels) {
    std::vector<int> idx;
    idx.reserve(times.size());
    for (double t : times) {
        const int i = grid.locate(t);
        if (i < 0)
            throw std::invalid_argument("breakpoint " + std::to_string(t) +
                                        " does not lie on the grid");
        idx.push_back(i);
    }
    return SimpleFunction(std::move(idx), levels);
}

SimpleFunction SimpleFunction::sample_on_grid(const ScalarFn& f, const TimeGrid& grid) {
    const int n = grid.n_steps();
    std::vector<int> idx(static_cast<std::size_t>(n) + 1);
    std::vector<double> lv(static_cast<std::size_t>(n));
    for (int i = 0; i <= n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < n; ++i) lv[static_cast<std::size_t>(i)] = f(grid.t(i));
    return SimpleFunction(std::move(idx), std::move(lv));
}

double SimpleFunction::value(const TimeGrid& grid, double t) const {
    for (std::size_t i = 0; i < levels_.size(); ++i)
        if (t < grid.t(breakpoints_[i + 1])) return levels_[i];
    return levels_.back();
}

ScalarFn SimpleFunction::as_scalar_fn(const TimeGrid& grid) const {
    return {[self = *this, grid](double t) { return self.value(grid, t); }, Smoothness::Simple};
}

double integrate_simple(const SimpleFunction& phi, const FbmPath& path) {
    const int n = path.grid.n_steps();
    if (phi.breakpoints().back() > n)
        throw std::invalid_argument("simple function extends beyond the path grid");
    double acc = 0.0;
    for (std::size_t i = 0; i < phi.pieces(); ++i)
        acc += phi.levels()[i] * (path.at(phi.breakpoints()[i + 1]) - path.at(phi.breakpoints()[i]));
    return acc;
}

double integrate_riemann(const ScalarFn& f, const FbmPath& path) {
    double acc = 0.0;
    for (int i = 0; i < path.grid.n_steps(); ++i) acc += f(path.grid.t(i)) * path.increment(i);
    return acc;
}

IsometryResult isometry_check(const ScalarFn& f, const ScalarFn& g, const HurstParam& h,
                              int n_paths, const TimeGrid& grid, RngStream rng, SamplerKind kind,
                              int threads) {
    if (n_paths < 1000) throw std::invalid_argument("isometry check needs at least 1e3 paths");

    std::unique_ptr<CholeskySampler> chol;
    std::unique_ptr<CirculantSampler> circ;
    std::unique_ptr<VolterraSampler> volt;
    switch (kind) {
    case SamplerKind::Cholesky: chol = std::make_unique<CholeskySampler>(grid, h); break;
    case SamplerKind::Circulant: circ = std::make_unique<CirculantSampler>(grid, h); break;
    case SamplerKind::Volterra:
        volt = std::make_unique<VolterraSampler>(grid, h, QuadratureSpec{}, threads);
        break;
    }
    auto draw = [&](RngStream r) {
        if (chol) return chol->sample(r);
        if (circ) return circ->sample(r);
        return volt->sample(r);
    };

    std::vector<double> products(static_cast<std::size_t>(n_paths));
    parallel_for(static_cast<std::size_t>(n_paths), threads, [&](std::size_t p) {
        const FbmPath path = draw(rng.substream(p));
        products[p] = integrate_riemann(f, path) * integrate_riemann(g, path);
    });

    IsometryResult r{};
    r.empirical = sample_mean(products);
    r.se = standard_error(products);
    r.target = inner_product_h(f, g, h, grid);
    const double scale = std::max(std::abs(r.target), 1e-12);
    r.defect = std::abs(r.empirical - r.target) / scale;
    r.relative_se = r.se / scale;
    return r;
}

double isometry_defect(const ScalarFn& f, const ScalarFn& g, const HurstParam& h, int n_paths,
                       const TimeGrid& grid, RngStream rng) {
    return isometry_check(f, g, h, n_paths, grid, rng).defect;
}

} // namespace fracsde
