#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracsde {

/// Uniform partition 0 = t_0 < t_1 < ... < t_n = T of [0,T].
/// Shared by path samplers, integrators and the fixed-point solver,
/// which all require uniform spacing.
class TimeGrid {
public:
    TimeGrid(double horizon, int n_steps) : horizon_(horizon), n_steps_(n_steps) {
        if (!(horizon > 0.0))
            throw std::domain_error("TimeGrid horizon must be positive");
        if (n_steps < 1)
            throw std::domain_error("TimeGrid needs at least one step");
        points_.resize(static_cast<std::size_t>(n_steps) + 1);
        const double dt = horizon / n_steps;
        for (int i = 0; i <= n_steps; ++i) points_[static_cast<std::size_t>(i)] = i * dt;
        points_.back() = horizon; // land on T exactly
    }

    double horizon() const { return horizon_; }
    int n_steps() const { return n_steps_; }
    double dt() const { return horizon_ / n_steps_; }
    double t(int i) const { return points_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& points() const { return points_; }

    /// Index of a grid point within tolerance, or -1.
    int locate(double time, double tol = 1e-9) const {
        const double x = time / dt();
        const int i = static_cast<int>(std::lround(x));
        if (i < 0 || i > n_steps_) return -1;
        if (std::abs(time - t(i)) > tol * std::max(1.0, horizon_)) return -1;
        return i;
    }

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
        return a.horizon_ == b.horizon_ && a.n_steps_ == b.n_steps_;
    }
    friend bool operator!=(const TimeGrid& a, const TimeGrid& b) { return !(a == b); }

private:
    double horizon_;
    int n_steps_;
    std::vector<double> points_;
};

} // namespace fracsde
