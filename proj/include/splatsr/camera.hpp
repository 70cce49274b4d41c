#pragma once

#include "splatsr/rotation.hpp"
#include "splatsr/types.hpp"

namespace splatsr {

// Pose whose optical axis (+Z in camera space) points from `eye` toward
// `target`, with the camera's up axis (-Y) on the same side as `up`.
template <class S>
CameraPose<S> look_at(const Vec3<S>& eye, const Vec3<S>& target, const Vec3<S>& up) {
    const Vec3<S> forward_raw = target - eye;
    const S dist = forward_raw.norm();
    if (dist < S(1e-9)) throw ValueError("look_at: eye and target coincide");
    const Vec3<S> fwd = forward_raw / dist;

    Vec3<S> right = fwd.cross(up);
    const S rn = right.norm();
    if (rn < S(1e-9)) throw ValueError("look_at: up direction is parallel to the view direction");
    right /= rn;
    const Vec3<S> down = fwd.cross(right);  // camera +Y, image y grows downward

    Mat3<S> r;  // camera-to-world, columns are the camera axes in world coords
    r.col(0) = right;
    r.col(1) = down;
    r.col(2) = fwd;
    return {rotmat_to_quat(r), eye};
}

// World point -> view-space point (camera coordinates, depth along +Z).
template <class S>
Vec3<S> world_to_camera(const CameraPose<S>& pose, const Vec3<S>& p_world) {
    const Mat3<S> r = quat_to_rotmat(pose.rotation);
    return r.transpose() * (p_world - pose.translation);
}

// Pinhole projection of a world point; returns pixel coordinates and the
// view-space depth. Points at or behind the camera get a non-positive depth
// and an unusable pixel, which callers must cull on.
template <class S>
struct Projection {
    Vec2<S> pixel;
    S depth;
};

template <class S>
Projection<S> project(const CameraPose<S>& pose, const Intrinsics<S>& intr,
                      const Vec3<S>& p_world) {
    const Vec3<S> pc = world_to_camera(pose, p_world);
    Projection<S> out;
    out.depth = pc.z();
    if (pc.z() > S(0)) {
        out.pixel = Vec2<S>(intr.fx * pc.x() / pc.z() + intr.cx,
                            intr.fy * pc.y() / pc.z() + intr.cy);
    } else {
        out.pixel = Vec2<S>(std::numeric_limits<S>::quiet_NaN(),
                            std::numeric_limits<S>::quiet_NaN());
    }
    return out;
}

}  // namespace splatsr
