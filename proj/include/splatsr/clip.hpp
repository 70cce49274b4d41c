#pragma once

#include <optional>
#include <vector>

#include "splatsr/image.hpp"
#include "splatsr/trajectory.hpp"

namespace splatsr {

// Ordered frame sequence of identical dimensions, optionally pose-tagged.
template <class S>
struct VideoClip {
    std::vector<Image<S>> frames;
    std::optional<Trajectory<S>> poses;

    int size() const { return static_cast<int>(frames.size()); }
    bool empty() const { return frames.empty(); }

    void validate() const {
        if (frames.empty()) throw ValueError("video clip: no frames");
        for (const auto& f : frames)
            if (!f.same_size(frames.front()))
                throw ValueError("video clip: frames have mixed dimensions");
        if (poses && poses->size() != size())
            throw ValueError("video clip: pose count does not match frame count");
    }
};

using VideoClipF = VideoClip<float>;
using VideoClipD = VideoClip<double>;

}  // namespace splatsr
