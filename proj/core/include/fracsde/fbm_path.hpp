#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracsde/hurst.hpp"
#include "fracsde/time_grid.hpp"

namespace fracsde {

enum class Provenance { Cholesky, CirculantEmbedding, VolterraKernel, Rescaled };

std::string to_string(Provenance p);

struct RescaleInfo {
    Provenance parent;
    double a;
    int k;
};

/// A sampled scalar fBm trajectory on a grid, with provenance.
/// values[0] == 0 exactly and values has n_steps + 1 entries.
struct FbmPath {
    TimeGrid grid;
    std::vector<double> values;
    HurstParam h;
    Provenance provenance;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    std::optional<RescaleInfo> rescale;
    bool circulant_fell_back = false;

    double at(int i) const { return values[static_cast<std::size_t>(i)]; }
    double increment(int i) const { return at(i + 1) - at(i); }
    double terminal() const { return values.back(); }
};

} // namespace fracsde
