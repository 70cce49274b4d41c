#pragma once

#include <array>
#include <span>

#include "splatsr/types.hpp"

namespace splatsr {

// Real spherical harmonics in the sign and ordering convention of the
// community Gaussian-splat PLY layout, up to degree 3 (16 basis functions).
inline constexpr int kShMaxDegree = 3;
inline constexpr int kShCoeffs = (kShMaxDegree + 1) * (kShMaxDegree + 1);

inline constexpr double kShC0 = 0.28209479177387814;
inline constexpr double kShC1 = 0.4886025119029199;
inline constexpr double kShC2[5] = {1.0925484305920792, -1.0925484305920792,
                                    0.31539156525252005, -1.0925484305920792,
                                    0.5462742152960396};
inline constexpr double kShC3[7] = {-0.5900435899266435, 2.890611442640554,
                                    -0.4570457994644658, 0.3731763325901154,
                                    -0.4570457994644658, 1.445305721320277,
                                    -0.5900435899266435};

// All 16 basis values at a unit direction.
template <class S>
std::array<S, kShCoeffs> sh_basis(const Vec3<S>& dir) {
    const S x = dir.x(), y = dir.y(), z = dir.z();
    const S xx = x * x, yy = y * y, zz = z * z;
    std::array<S, kShCoeffs> b;
    b[0] = S(kShC0);
    b[1] = S(-kShC1) * y;
    b[2] = S(kShC1) * z;
    b[3] = S(-kShC1) * x;
    b[4] = S(kShC2[0]) * x * y;
    b[5] = S(kShC2[1]) * y * z;
    b[6] = S(kShC2[2]) * (S(2) * zz - xx - yy);
    b[7] = S(kShC2[3]) * x * z;
    b[8] = S(kShC2[4]) * (xx - yy);
    b[9] = S(kShC3[0]) * y * (S(3) * xx - yy);
    b[10] = S(kShC3[1]) * x * y * z;
    b[11] = S(kShC3[2]) * y * (S(4) * zz - xx - yy);
    b[12] = S(kShC3[3]) * z * (S(2) * zz - S(3) * xx - S(3) * yy);
    b[13] = S(kShC3[4]) * x * (S(4) * zz - xx - yy);
    b[14] = S(kShC3[5]) * z * (xx - yy);
    b[15] = S(kShC3[6]) * x * (xx - S(3) * yy);
    return b;
}

// Jacobian of the basis with respect to the direction components:
// out[k] = d b_k / d (x, y, z). Used by the rasterizer backward pass.
template <class S>
std::array<Vec3<S>, kShCoeffs> sh_basis_grad(const Vec3<S>& dir) {
    const S x = dir.x(), y = dir.y(), z = dir.z();
    const S xx = x * x, yy = y * y, zz = z * z;
    std::array<Vec3<S>, kShCoeffs> g;
    g[0] = Vec3<S>::Zero();
    g[1] = Vec3<S>(S(0), S(-kShC1), S(0));
    g[2] = Vec3<S>(S(0), S(0), S(kShC1));
    g[3] = Vec3<S>(S(-kShC1), S(0), S(0));
    g[4] = S(kShC2[0]) * Vec3<S>(y, x, S(0));
    g[5] = S(kShC2[1]) * Vec3<S>(S(0), z, y);
    g[6] = S(kShC2[2]) * Vec3<S>(S(-2) * x, S(-2) * y, S(4) * z);
    g[7] = S(kShC2[3]) * Vec3<S>(z, S(0), x);
    g[8] = S(kShC2[4]) * Vec3<S>(S(2) * x, S(-2) * y, S(0));
    g[9] = S(kShC3[0]) * Vec3<S>(S(6) * x * y, S(3) * xx - S(3) * yy, S(0));
    g[10] = S(kShC3[1]) * Vec3<S>(y * z, x * z, x * y);
    g[11] = S(kShC3[2]) * Vec3<S>(S(-2) * x * y, S(4) * zz - xx - S(3) * yy, S(8) * y * z);
    g[12] = S(kShC3[3]) * Vec3<S>(S(-6) * x * z, S(-6) * y * z, S(6) * zz - S(3) * xx - S(3) * yy);
    g[13] = S(kShC3[4]) * Vec3<S>(S(4) * zz - S(3) * xx - yy, S(-2) * x * y, S(8) * x * z);
    g[14] = S(kShC3[5]) * Vec3<S>(S(2) * x * z, S(-2) * y * z, xx - yy);
    g[15] = S(kShC3[6]) * Vec3<S>(S(3) * xx - S(3) * yy, S(-6) * x * y, S(0));
    return g;
}

// Evaluate one channel: sum of basis * coefficients plus the 0.5 offset of
// the splat color convention. `coeffs` holds (degree+1)^2 values. The result
// is not clamped; the rasterizer clamps at zero.
template <class S>
S sh_eval_channel(std::span<const S> coeffs, const Vec3<S>& dir, int degree) {
    if (degree < 0 || degree > kShMaxDegree)
        throw ValueError("sh_eval: degree must be in [0, 3]");
    const int expected = (degree + 1) * (degree + 1);
    if (static_cast<int>(coeffs.size()) != expected)
        throw ValueError("sh_eval: coefficient count does not match degree");
    const std::array<S, kShCoeffs> basis = sh_basis(dir);
    S acc = S(0);
    for (int k = 0; k < expected; ++k) acc += basis[k] * coeffs[k];
    return acc + S(0.5);
}

// Per-channel evaluation over RGB. Each channel owns (degree+1)^2 coefficients.
template <class S>
Vec3<S> sh_eval(std::span<const S> coeffs_r, std::span<const S> coeffs_g,
                std::span<const S> coeffs_b, const Vec3<S>& dir, int degree) {
    return Vec3<S>(sh_eval_channel(coeffs_r, dir, degree),
                   sh_eval_channel(coeffs_g, dir, degree),
                   sh_eval_channel(coeffs_b, dir, degree));
}

// DC coefficient producing a given view-independent color, and back.
template <class S>
S sh_dc_from_color(S color) {
    return (color - S(0.5)) / S(kShC0);
}

template <class S>
S sh_color_from_dc(S dc) {
    return S(kShC0) * dc + S(0.5);
}

}  // namespace splatsr
