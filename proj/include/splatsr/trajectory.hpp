#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "splatsr/bspline.hpp"
#include "splatsr/camera.hpp"
#include "splatsr/rng.hpp"
#include "splatsr/types.hpp"

namespace splatsr {

// Ordered camera path; all frames share one set of intrinsics.
template <class S>
struct Trajectory {
    std::vector<CameraPose<S>> poses;
    Intrinsics<S> intrinsics;

    int size() const { return static_cast<int>(poses.size()); }

    template <class T>
    Trajectory<T> cast() const {
        Trajectory<T> out;
        out.intrinsics = intrinsics.template cast<T>();
        out.poses.reserve(poses.size());
        for (const auto& p : poses) out.poses.push_back(p.template cast<T>());
        return out;
    }
};

using TrajectoryF = Trajectory<float>;
using TrajectoryD = Trajectory<double>;

// Free parameters of the perturbed-trajectory sampler.
struct PerturbParams {
    double segment_fraction_lo = 0.7;  // camera centers are resampled on the
    double segment_fraction_hi = 1.0;  // segment between scene center and pose
    int n_control = 0;                 // 0 -> max(4, ceil(T/3))
    int t_out = 30;                    // output pose count
    double sine_amplitude = 0.02;      // fraction of scene_extent
    double sine_cycles = 2.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(segment_fraction_lo >= 0.0 && segment_fraction_lo <= segment_fraction_hi &&
              segment_fraction_hi <= 1.0))
            throw ValueError("perturb: segment fraction range must satisfy 0 <= lo <= hi <= 1");
        if (t_out < 2) throw ValueError("perturb: output pose count must be >= 2");
    }

    int resolved_n_control(int input_poses) const {
        if (n_control > 0) return n_control;
        return std::max(4, (input_poses + 2) / 3);
    }
};

// Smooth perturbed trajectory: camera centers are drawn on the segments
// between the scene center and each input pose, a clamped B-spline is fit to
// the draws, positions are resampled uniformly on it, a vertical sinusoid is
// added, and every pose is re-oriented to look at the scene center.
template <class S>
Trajectory<S> perturb_trajectory(const Trajectory<S>& original, const Vec3<S>& scene_center,
                                 S scene_extent, const Vec3<S>& up,
                                 const PerturbParams& params) {
    params.validate();
    const int t_in = original.size();
    const int n_control = params.resolved_n_control(t_in);
    if (t_in < n_control)
        throw ValueError("perturb_trajectory: input trajectory has fewer poses than n_control");

    Rng rng(params.seed);
    std::vector<Vec3<S>> samples;
    samples.reserve(t_in);
    for (const auto& pose : original.poses) {
        const Vec3<S> offset = pose.center() - scene_center;
        if (offset.norm() < S(1e-9))
            throw ValueError("perturb_trajectory: a camera center coincides with the scene center");
        const S u = S(rng.uniform(params.segment_fraction_lo, params.segment_fraction_hi));
        samples.push_back(scene_center + u * offset);
    }

    const BSpline<S> spline = bspline_fit(samples, 3, n_control);

    Trajectory<S> out;
    out.intrinsics = original.intrinsics;
    out.poses.reserve(params.t_out);
    const Vec3<S> up_unit = up.normalized();
    for (int t = 0; t < params.t_out; ++t) {
        const S u = (params.t_out == 1) ? S(0) : S(t) / S(params.t_out - 1);
        Vec3<S> pos = bspline_eval(spline, u);
        const S phase = S(2) * S(M_PI) * S(params.sine_cycles) * S(t) / S(params.t_out);
        pos += S(params.sine_amplitude) * scene_extent * std::sin(phase) * up_unit;
        out.poses.push_back(look_at(pos, scene_center, up_unit));
    }
    return out;
}

// Look-at orbit: T poses evenly spaced in azimuth at fixed elevation and
// radius. Elevation is measured from the horizontal plane through the center.
template <class S>
Trajectory<S> orbit_trajectory(const Vec3<S>& scene_center, S radius, S elevation, int t_count,
                               const Vec3<S>& up, const Intrinsics<S>& intrinsics,
                               S azimuth_offset = S(0)) {
    if (!(radius > S(0))) throw ValueError("orbit_trajectory: radius must be positive");
    if (t_count < 1) throw ValueError("orbit_trajectory: need at least one pose");

    const Vec3<S> up_unit = up.normalized();
    // Horizontal basis orthogonal to `up`.
    Vec3<S> ref = std::abs(up_unit.x()) < S(0.9) ? Vec3<S>(S(1), S(0), S(0))
                                                 : Vec3<S>(S(0), S(0), S(1));
    const Vec3<S> e0 = (ref - ref.dot(up_unit) * up_unit).normalized();
    const Vec3<S> e1 = up_unit.cross(e0);

    Trajectory<S> out;
    out.intrinsics = intrinsics;
    out.poses.reserve(t_count);
    const S cos_e = std::cos(elevation), sin_e = std::sin(elevation);
    for (int t = 0; t < t_count; ++t) {
        const S az = azimuth_offset + S(2) * S(M_PI) * S(t) / S(t_count);
        const Vec3<S> dir = cos_e * (std::cos(az) * e0 + std::sin(az) * e1) + sin_e * up_unit;
        const Vec3<S> pos = scene_center + radius * dir;
        out.poses.push_back(look_at(pos, scene_center, up_unit));  // throws at elevation +-90 deg
    }
    return out;
}

// Spiral: azimuth sweep with the radius interpolated from start to end.
template <class S>
Trajectory<S> spiral_trajectory(const Vec3<S>& scene_center, S radius_start, S radius_end,
                                S elevation, int t_count, const Vec3<S>& up,
                                const Intrinsics<S>& intrinsics) {
    if (!(radius_start > S(0)) || !(radius_end > S(0)))
        throw ValueError("spiral_trajectory: radii must be positive");
    if (t_count < 1) throw ValueError("spiral_trajectory: need at least one pose");

    const Vec3<S> up_unit = up.normalized();
    Vec3<S> ref = std::abs(up_unit.x()) < S(0.9) ? Vec3<S>(S(1), S(0), S(0))
                                                 : Vec3<S>(S(0), S(0), S(1));
    const Vec3<S> e0 = (ref - ref.dot(up_unit) * up_unit).normalized();
    const Vec3<S> e1 = up_unit.cross(e0);

    Trajectory<S> out;
    out.intrinsics = intrinsics;
    out.poses.reserve(t_count);
    const S cos_e = std::cos(elevation), sin_e = std::sin(elevation);
    for (int t = 0; t < t_count; ++t) {
        const S frac = (t_count == 1) ? S(0) : S(t) / S(t_count - 1);
        const S radius = radius_start + frac * (radius_end - radius_start);
        const S az = S(2) * S(M_PI) * S(t) / S(t_count);
        const Vec3<S> dir = cos_e * (std::cos(az) * e0 + std::sin(az) * e1) + sin_e * up_unit;
        out.poses.push_back(look_at(scene_center + radius * dir, scene_center, up_unit));
    }
    return out;
}

// Result of splitting one input path into an upsampling trajectory and a
// distinct evaluation trajectory.
template <class S>
struct TrajectorySplit {
    Trajectory<S> upsampling;
    Trajectory<S> evaluation;
    bool positions_coincide = false;  // zero-width draw range and no sinusoid
};

// Two perturbation draws with distinct seeds. With a zero-width fraction
// range and zero sinusoid the positions coincide by construction; that case
// is reported through `positions_coincide` instead of failing.
template <class S>
TrajectorySplit<S> split_eval_trajectory(const Trajectory<S>& original,
                                         const Vec3<S>& scene_center, S scene_extent,
                                         const Vec3<S>& up, const PerturbParams& params,
                                         std::uint64_t eval_seed) {
    if (eval_seed == params.seed)
        throw ConfigError("split_eval_trajectory: evaluation seed must differ from the upsampling seed");

    TrajectorySplit<S> split;
    split.upsampling = perturb_trajectory(original, scene_center, scene_extent, up, params);
    PerturbParams eval_params = params;
    eval_params.seed = eval_seed;
    split.evaluation = perturb_trajectory(original, scene_center, scene_extent, up, eval_params);
    split.positions_coincide =
        params.segment_fraction_lo == params.segment_fraction_hi && params.sine_amplitude == 0.0;
    return split;
}

}  // namespace splatsr
