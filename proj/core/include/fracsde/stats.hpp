#pragma once

#include <cstddef>
#include <vector>

namespace fracsde {

/// Streaming mean / variance (Welford).
class RunningMoments {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / n_;
        m2_ += d * (x - mean_);
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / (n_ - 1) : 0.0; }
    double standard_error() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

double sample_mean(const std::vector<double>& xs);
double sample_variance(const std::vector<double>& xs);
double standard_error(const std::vector<double>& xs);

/// Pearson correlation of paired samples.
double sample_correlation(const std::vector<double>& xs, const std::vector<double>& ys);

/// One-sample Kolmogorov-Smirnov statistic against a centered normal
/// with the given variance.
double ks_statistic_normal(std::vector<double> xs, double variance);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic_two_sample(std::vector<double> xs, std::vector<double> ys);

/// Critical values at level alpha (asymptotic): reject when the KS
/// statistic exceeds these.
double ks_critical_one_sample(std::size_t n, double alpha);
double ks_critical_two_sample(std::size_t n, std::size_t m, double alpha);

/// Standard normal CDF.
double normal_cdf(double x);

} // namespace fracsde
