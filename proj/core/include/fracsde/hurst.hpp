#pragma once

#include <stdexcept>
#include <string>

namespace fracsde {

enum class HurstRegime {
    Rough,    // H < 1/2, negatively correlated increments
    Standard, // H = 1/2, Brownian motion
    Smooth,   // H > 1/2, long-range dependence
};

/// Validated Hurst exponent H in the open interval (0,1).
class HurstParam {
public:
    explicit HurstParam(double h) : h_(h) {
        if (!(h > 0.0) || !(h < 1.0))
            throw std::domain_error("Hurst parameter must lie in (0,1), got " + std::to_string(h));
        regime_ = h < 0.5 ? HurstRegime::Rough
                : h > 0.5 ? HurstRegime::Smooth
                          : HurstRegime::Standard;
    }

    double value() const { return h_; }
    HurstRegime regime() const { return regime_; }
    bool is_brownian() const { return regime_ == HurstRegime::Standard; }

    friend bool operator==(const HurstParam& a, const HurstParam& b) { return a.h_ == b.h_; }

private:
    double h_;
    HurstRegime regime_;
};

} // namespace fracsde
