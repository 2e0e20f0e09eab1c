#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace fracsde {

/// Truncated eigen-expansion of a symmetric non-negative trace-class
/// operator Q: eigenvalues lambda_1 >= ... >= lambda_N > 0 against an
/// orthonormal basis identified only by a descriptor, plus a bound on
/// the dropped tail sum_{n>N} lambda_n.
class SpectralOperatorQ {
public:
    SpectralOperatorQ(std::vector<double> eigenvalues, std::string basis_descriptor,
                      double trace_tail_bound);

    /// lambda_n = n^{-p}, tail bounded by the integral comparison.
    static SpectralOperatorQ power_decay(int truncation, double p);

    int truncation() const { return static_cast<int>(eigenvalues_.size()); }
    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    double eigenvalue(int n) const { return eigenvalues_[static_cast<std::size_t>(n)]; }
    const std::string& basis_descriptor() const { return basis_descriptor_; }
    double trace() const { return trace_; }
    double trace_tail_bound() const { return trace_tail_bound_; }

    Eigen::VectorXd sqrt_eigenvalues() const;

private:
    std::vector<double> eigenvalues_;
    std::string basis_descriptor_;
    double trace_ = 0.0;
    double trace_tail_bound_ = 0.0;
};

} // namespace fracsde
