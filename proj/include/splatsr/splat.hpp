#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "splatsr/sh.hpp"
#include "splatsr/types.hpp"

namespace splatsr {

// One anisotropic 3D Gaussian. Scale is the log of the per-axis standard
// deviation and opacity is stored as a logit, so every field is a free
// optimization variable.
template <class S>
struct GaussianSplat {
    Vec3<S> position = Vec3<S>::Zero();
    UnitQuaternion<S> rotation;
    Vec3<S> log_scale = Vec3<S>::Zero();
    S opacity_logit = S(0);
    // sh_coeffs[channel][k]; k = 0 is the DC term.
    std::array<std::array<S, kShCoeffs>, 3> sh_coeffs{};

    template <class T>
    GaussianSplat<T> cast() const {
        GaussianSplat<T> out;
        out.position = position.template cast<T>();
        out.rotation = rotation.template cast<T>();
        out.log_scale = log_scale.template cast<T>();
        out.opacity_logit = T(opacity_logit);
        for (int c = 0; c < 3; ++c)
            for (int k = 0; k < kShCoeffs; ++k) out.sh_coeffs[c][k] = T(sh_coeffs[c][k]);
        return out;
    }
};

template <class S>
struct SplatScene {
    std::vector<GaussianSplat<S>> splats;
    Vec3<S> scene_center = Vec3<S>::Zero();
    S scene_extent = S(1);

    int size() const { return static_cast<int>(splats.size()); }
    bool empty() const { return splats.empty(); }

    // Recompute center (centroid) and extent (bounding-sphere radius) from
    // the current splat positions.
    void update_bounds() {
        if (splats.empty()) {
            scene_center = Vec3<S>::Zero();
            scene_extent = S(1);
            return;
        }
        Vec3<S> sum = Vec3<S>::Zero();
        for (const auto& g : splats) sum += g.position;
        scene_center = sum / S(splats.size());
        S max_dist = S(0);
        for (const auto& g : splats)
            max_dist = std::max(max_dist, (g.position - scene_center).norm());
        scene_extent = std::max(max_dist, S(1e-6));
    }

    template <class T>
    SplatScene<T> cast() const {
        SplatScene<T> out;
        out.splats.reserve(splats.size());
        for (const auto& g : splats) out.splats.push_back(g.template cast<T>());
        out.scene_center = scene_center.template cast<T>();
        out.scene_extent = T(scene_extent);
        return out;
    }
};

using SplatSceneF = SplatScene<float>;
using SplatSceneD = SplatScene<double>;

// Scene with one splat per input point. Scale comes from the mean distance
// to the 3 nearest neighbors; a lone point falls back to 1% of a unit extent.
// Initial opacity is 0.1 and only the SH DC term is set from the color.
template <class S>
SplatScene<S> init_from_points(const std::vector<Vec3<S>>& points,
                               const std::vector<Vec3<S>>& colors,
                               S initial_opacity = S(0.1)) {
    if (points.empty()) throw ValueError("init_from_points: empty point set");
    if (points.size() != colors.size())
        throw ValueError("init_from_points: point and color counts differ");

    const int n = static_cast<int>(points.size());
    SplatScene<S> scene;
    scene.splats.resize(n);

    // Brute-force 3-NN; fine at the scene sizes this library targets.
    std::vector<S> mean_nn(n, S(0));
    const int k = std::min(3, n - 1);
    if (k > 0) {
        std::vector<S> dists(n);
        for (int i = 0; i < n; ++i) {
            dists.clear();
            dists.reserve(n - 1);
            for (int j = 0; j < n; ++j)
                if (j != i) dists.push_back((points[j] - points[i]).norm());
            std::partial_sort(dists.begin(), dists.begin() + k, dists.end());
            S acc = S(0);
            for (int q = 0; q < k; ++q) acc += dists[q];
            mean_nn[i] = acc / S(k);
        }
    }

    for (int i = 0; i < n; ++i) {
        GaussianSplat<S>& g = scene.splats[i];
        g.position = points[i];
        g.rotation = UnitQuaternion<S>();
        S sigma = (k > 0) ? mean_nn[i] : S(0.01);  // documented lone-point fallback
        sigma = std::max(sigma, S(1e-7));
        g.log_scale = Vec3<S>::Constant(std::log(sigma));
        g.opacity_logit = logit(initial_opacity);
        for (int c = 0; c < 3; ++c) g.sh_coeffs[c][0] = sh_dc_from_color(colors[i][c]);
    }
    scene.update_bounds();
    return scene;
}

}  // namespace splatsr
