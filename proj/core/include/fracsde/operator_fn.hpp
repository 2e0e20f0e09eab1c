#pragma once

#include <Eigen/Core>
#include <functional>

#include "fracsde/errors.hpp"

namespace fracsde {

/// Time-dependent linear operator t -> g(t) on the truncated coefficient
/// space, with an optional time derivative for solver directions that
/// differentiate through the time scaling.
struct OperatorValuedFn {
    int dim = 0;
    std::function<Eigen::MatrixXd(double)> evaluator;
    std::function<Eigen::MatrixXd(double)> time_derivative; // may be empty

    Eigen::MatrixXd operator()(double t) const { return evaluator(t); }

    bool has_time_derivative() const { return static_cast<bool>(time_derivative); }
    Eigen::MatrixXd dt(double t) const {
        if (!time_derivative)
            throw CapabilityError("operator-valued function has no time derivative evaluator");
        return time_derivative(t);
    }

    static OperatorValuedFn identity(int n) {
        return {n, [n](double) { return Eigen::MatrixXd::Identity(n, n); },
                [n](double) { return Eigen::MatrixXd::Zero(n, n); }};
    }
    static OperatorValuedFn zero(int n) {
        return {n, [n](double) { return Eigen::MatrixXd::Zero(n, n); },
                [n](double) { return Eigen::MatrixXd::Zero(n, n); }};
    }
    static OperatorValuedFn scaled_identity(int n, double c) {
        return {n, [n, c](double) { return (c * Eigen::MatrixXd::Identity(n, n)).eval(); },
                [n](double) { return Eigen::MatrixXd::Zero(n, n); }};
    }
    /// Diagonal operator with entries d(t, index).
    static OperatorValuedFn diagonal(int n, std::function<double(double, int)> d,
                                     std::function<double(double, int)> d_dt = nullptr) {
        OperatorValuedFn g;
        g.dim = n;
        g.evaluator = [n, d](double t) {
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
            for (int i = 0; i < n; ++i) m(i, i) = d(t, i);
            return m;
        };
        if (d_dt) {
            g.time_derivative = [n, d_dt](double t) {
                Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
                for (int i = 0; i < n; ++i) m(i, i) = d_dt(t, i);
                return m;
            };
        }
        return g;
    }
    static OperatorValuedFn constant(Eigen::MatrixXd m) {
        const int n = static_cast<int>(m.rows());
        return {n, [m](double) { return m; }, [n](double) { return Eigen::MatrixXd::Zero(n, n); }};
    }
};

} // namespace fracsde
