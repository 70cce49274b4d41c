#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "splatsr/errors.hpp"

// Coordinate conventions used throughout:
//   - right-handed world coordinates, +Y is the default "up";
//   - camera pose is stored camera-to-world (rotation quaternion + camera
//     center), the camera looks down its local +Z axis;
//   - image x grows to the right, image y grows downward, and pixel (x, y)
//     samples the continuous image plane exactly at coordinate (x, y).

namespace splatsr {

template <class S> using Vec2 = Eigen::Matrix<S, 2, 1>;
template <class S> using Vec3 = Eigen::Matrix<S, 3, 1>;
template <class S> using Vec4 = Eigen::Matrix<S, 4, 1>;
template <class S> using Mat2 = Eigen::Matrix<S, 2, 2>;
template <class S> using Mat3 = Eigen::Matrix<S, 3, 3>;
template <class S> using Mat23 = Eigen::Matrix<S, 2, 3>;

using Vec3f = Vec3<float>;
using Vec3d = Vec3<double>;

// Rotation stored as (w, x, y, z). Kept unit-norm by the operations below;
// q and -q describe the same rotation.
template <class S>
struct UnitQuaternion {
    S w = S(1), x = S(0), y = S(0), z = S(0);

    UnitQuaternion() = default;
    UnitQuaternion(S w_, S x_, S y_, S z_) : w(w_), x(x_), y(y_), z(z_) {}

    S norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

    UnitQuaternion normalized() const {
        const S n = norm();
        if (!(n > S(0)) || !std::isfinite(n))
            throw ValueError("quaternion with zero or non-finite norm cannot be normalized");
        return {w / n, x / n, y / n, z / n};
    }

    template <class T>
    UnitQuaternion<T> cast() const {
        return {T(w), T(x), T(y), T(z)};
    }

    Vec4<S> coeffs_wxyz() const { return Vec4<S>(w, x, y, z); }
};

using UnitQuaternionF = UnitQuaternion<float>;
using UnitQuaternionD = UnitQuaternion<double>;

// Pinhole intrinsics in pixel units.
template <class S>
struct Intrinsics {
    S fx = S(0), fy = S(0);
    S cx = S(0), cy = S(0);
    int width = 0, height = 0;

    void validate() const {
        if (!(fx > S(0)) || !(fy > S(0)))
            throw ValueError("intrinsics: focal lengths must be positive");
        if (width <= 0 || height <= 0)
            throw ValueError("intrinsics: image dimensions must be positive");
        if (!(cx >= S(0)) || !(cx < S(width)) || !(cy >= S(0)) || !(cy < S(height)))
            throw ValueError("intrinsics: principal point must lie inside the image");
    }

    // Intrinsics of the same view after scaling the image by an integer
    // factor r. Under pixel-center sampling the principal point maps to
    // c' = r*c + (r-1)/2.
    Intrinsics scaled(int r) const {
        if (r < 1) throw ValueError("intrinsics: scale factor must be >= 1");
        const S rs = S(r);
        const S off = S(r - 1) / S(2);
        return {fx * rs, fy * rs, cx * rs + off, cy * rs + off, width * r, height * r};
    }

    // Inverse of scaled(): intrinsics after integer downsampling.
    Intrinsics downscaled(int r) const {
        if (r < 1) throw ValueError("intrinsics: scale factor must be >= 1");
        if (width % r != 0 || height % r != 0)
            throw ValueError("intrinsics: dimensions not divisible by downscale factor");
        const S rs = S(r);
        const S off = S(r - 1) / S(2);
        return {fx / rs, fy / rs, (cx - off) / rs, (cy - off) / rs, width / r, height / r};
    }

    template <class T>
    Intrinsics<T> cast() const {
        return {T(fx), T(fy), T(cx), T(cy), width, height};
    }
};

using IntrinsicsF = Intrinsics<float>;
using IntrinsicsD = Intrinsics<double>;

// Camera-to-world pose: `rotation` maps camera axes into world axes and
// `translation` is the camera center in world coordinates.
template <class S>
struct CameraPose {
    UnitQuaternion<S> rotation;
    Vec3<S> translation = Vec3<S>::Zero();

    Vec3<S> center() const { return translation; }

    template <class T>
    CameraPose<T> cast() const {
        return {rotation.template cast<T>(), translation.template cast<T>()};
    }
};

using CameraPoseF = CameraPose<float>;
using CameraPoseD = CameraPose<double>;

template <class S>
S sigmoid(S x) {
    return S(1) / (S(1) + std::exp(-x));
}

template <class S>
S logit(S p) {
    return std::log(p / (S(1) - p));
}

}  // namespace splatsr
