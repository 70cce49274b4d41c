#pragma once

#include "splatsr/types.hpp"

namespace splatsr {

// Rotation matrix of a quaternion. Normalizes defensively, so callers may
// pass slightly denormalized values (e.g. mid-optimization parameters).
template <class S>
Mat3<S> quat_to_rotmat(const UnitQuaternion<S>& q_in) {
    const UnitQuaternion<S> q = q_in.normalized();
    const S w = q.w, x = q.x, y = q.y, z = q.z;
    Mat3<S> r;
    r << S(1) - S(2) * (y * y + z * z), S(2) * (x * y - w * z), S(2) * (x * z + w * y),
         S(2) * (x * y + w * z), S(1) - S(2) * (x * x + z * z), S(2) * (y * z - w * x),
         S(2) * (x * z - w * y), S(2) * (y * z + w * x), S(1) - S(2) * (x * x + y * y);
    return r;
}

// Inverse of quat_to_rotmat up to sign (returns the representative with
// non-negative w). Shepperd's method: branch on the largest diagonal term.
template <class S>
UnitQuaternion<S> rotmat_to_quat(const Mat3<S>& r) {
    UnitQuaternion<S> q;
    const S trace = r(0, 0) + r(1, 1) + r(2, 2);
    if (trace > S(0)) {
        const S s = std::sqrt(trace + S(1)) * S(2);
        q.w = S(0.25) * s;
        q.x = (r(2, 1) - r(1, 2)) / s;
        q.y = (r(0, 2) - r(2, 0)) / s;
        q.z = (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        const S s = std::sqrt(S(1) + r(0, 0) - r(1, 1) - r(2, 2)) * S(2);
        q.w = (r(2, 1) - r(1, 2)) / s;
        q.x = S(0.25) * s;
        q.y = (r(0, 1) + r(1, 0)) / s;
        q.z = (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) > r(2, 2)) {
        const S s = std::sqrt(S(1) + r(1, 1) - r(0, 0) - r(2, 2)) * S(2);
        q.w = (r(0, 2) - r(2, 0)) / s;
        q.x = (r(0, 1) + r(1, 0)) / s;
        q.y = S(0.25) * s;
        q.z = (r(1, 2) + r(2, 1)) / s;
    } else {
        const S s = std::sqrt(S(1) + r(2, 2) - r(0, 0) - r(1, 1)) * S(2);
        q.w = (r(1, 0) - r(0, 1)) / s;
        q.x = (r(0, 2) + r(2, 0)) / s;
        q.y = (r(1, 2) + r(2, 1)) / s;
        q.z = S(0.25) * s;
    }
    if (q.w < S(0)) q = {-q.w, -q.x, -q.y, -q.z};
    return q.normalized();
}

}  // namespace splatsr
