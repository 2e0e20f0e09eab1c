#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "fracsde/errors.hpp"

namespace fracsde {

enum class Smoothness {
    Simple, // piecewise constant on grid cells
    C1,     // continuously differentiable
};

/// Deterministic scalar integrand on [0,T].
struct ScalarFn {
    std::function<double(double)> evaluator;
    Smoothness smoothness = Smoothness::C1;

    double operator()(double t) const {
        const double v = evaluator(t);
        if (!std::isfinite(v))
            throw NumericalError("scalar function evaluated to a non-finite value");
        return v;
    }

    static ScalarFn constant(double c) {
        return {[c](double) { return c; }, Smoothness::C1};
    }
    static ScalarFn ramp() {
        return {[](double t) { return t; }, Smoothness::C1};
    }
    /// Indicator of [0,cut), piecewise constant.
    static ScalarFn indicator(double cut) {
        return {[cut](double t) { return t < cut ? 1.0 : 0.0; }, Smoothness::Simple};
    }
};

} // namespace fracsde
