#include "fracsde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracsde/errors.hpp"

namespace fracsde {

double RunningMoments::standard_error() const {
    return n_ > 1 ? std::sqrt(variance() / n_) : 0.0;
}

double sample_mean(const std::vector<double>& xs) {
    RunningMoments m;
    for (double x : xs) m.add(x);
    return m.mean();
}

double sample_variance(const std::vector<double>& xs) {
    RunningMoments m;
    for (double x : xs) m.add(x);
    return m.variance();
}

double standard_error(const std::vector<double>& xs) {
    RunningMoments m;
    for (double x : xs) m.add(x);
    return m.standard_error();
}

double sample_correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.empty())
        throw std::invalid_argument("correlation needs equally sized, non-empty samples");
    const double mx = sample_mean(xs);
    const double my = sample_mean(ys);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) throw NumericalError("degenerate sample in correlation");
    return sxy / std::sqrt(sxx * syy);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_statistic_normal(std::vector<double> xs, double variance) {
    if (xs.empty()) throw std::invalid_argument("empty sample");
    if (!(variance > 0.0)) throw std::invalid_argument("variance must be positive");
    std::sort(xs.begin(), xs.end());
    const double sigma = std::sqrt(variance);
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = normal_cdf(xs[i] / sigma);
        d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
    }
    return d;
}

double ks_statistic_two_sample(std::vector<double> xs, std::vector<double> ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("empty sample");
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const double nx = static_cast<double>(xs.size());
    const double ny = static_cast<double>(ys.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
        if (xs[i] <= ys[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(i / nx - j / ny));
    }
    return d;
}

namespace {
double ks_coefficient(double alpha) { return std::sqrt(-0.5 * std::log(alpha / 2.0)); }
} // namespace

double ks_critical_one_sample(std::size_t n, double alpha) {
    return ks_coefficient(alpha) / std::sqrt(static_cast<double>(n));
}

double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha) {
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return ks_coefficient(alpha) * std::sqrt((nn + mm) / (nn * mm));
}

} // namespace fracsde
