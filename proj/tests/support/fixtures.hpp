#pragma once

#include <optional>
#include <vector>

#include "mudt/trace.hpp"

namespace fixtures {

inline mudt::Frame frame(mudt::FrameId id, std::vector<mudt::FeatureId> fps, std::optional<bool> key = std::nullopt) {
    return mudt::Frame{id, mudt::FeaturePointSet(std::move(fps)), key};
}

/// Frame whose feature points are the half-open range [lo, hi).
inline mudt::Frame span_frame(mudt::FrameId id, mudt::FeatureId lo, mudt::FeatureId hi,
                              std::optional<bool> key = std::nullopt) {
    std::vector<mudt::FeatureId> ids;
    for (auto i = lo; i < hi; ++i) ids.push_back(i);
    return frame(id, std::move(ids), key);
}

}  // namespace fixtures
