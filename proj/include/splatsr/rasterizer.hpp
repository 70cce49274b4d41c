#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "splatsr/camera.hpp"
#include "splatsr/clip.hpp"
#include "splatsr/image.hpp"
#include "splatsr/splat.hpp"
#include "splatsr/trajectory.hpp"

namespace splatsr {

// Rasterization constants, shared by forward and backward passes.
inline constexpr double kScreenBlur = 0.3;     // isotropic px^2 floor added to 2D covariance
inline constexpr double kAlphaCap = 0.99;      // per-splat alpha contribution cap
inline constexpr double kNearClip = 0.01;      // view-space depth cull
inline constexpr double kCutoffSq = 9.0;       // 3-sigma ellipse truncation, on d^T conic d
inline constexpr int kTileSize = 16;

template <class S>
struct RenderAux {
    int width = 0, height = 0;
    std::vector<S> alpha;  // accumulated opacity per pixel
    std::vector<S> depth;  // expected depth, +inf where nothing was hit
};

template <class S>
struct SplatGrad {
    Vec3<S> position = Vec3<S>::Zero();
    Vec4<S> rotation_wxyz = Vec4<S>::Zero();
    Vec3<S> log_scale = Vec3<S>::Zero();
    S opacity_logit = S(0);
    std::array<std::array<S, kShCoeffs>, 3> sh_coeffs{};
};

template <class S>
using SplatGrads = std::vector<SplatGrad<S>>;

namespace detail {

template <class S>
struct ProjectedSplat {
    int index;        // into scene.splats
    Vec3<S> view_pos; // camera-space position, depth = view_pos.z
    Vec2<S> mean2d;
    Mat2<S> cov2d;
    Mat2<S> conic;    // cov2d^{-1}
    Vec3<S> color;    // SH color clamped at zero
    std::array<bool, 3> color_clamped;
    S opacity;        // sigmoid of the logit
    Vec3<S> view_dir; // unit vector camera center -> splat, world frame
    S view_dist;
    int x0, x1, y0, y1;  // inclusive pixel bounds of the 3-sigma footprint
};

template <class S>
void check_scene_renderable(const SplatScene<S>& scene, const Intrinsics<S>& intr) {
    if (scene.empty()) throw ValueError("render: empty scene");
    intr.validate();
    for (const auto& g : scene.splats) {
        bool ok = g.position.allFinite() && g.log_scale.allFinite() &&
                  std::isfinite(g.opacity_logit) && std::isfinite(g.rotation.norm()) &&
                  g.rotation.norm() > S(0);
        for (int c = 0; c < 3 && ok; ++c)
            for (int k = 0; k < kShCoeffs && ok; ++k) ok = std::isfinite(g.sh_coeffs[c][k]);
        if (!ok) throw ValueError("render: non-finite splat parameter");
    }
}

// Project every splat, cull behind the near plane, sort front to back by
// view depth with splat-index tie-breaking, and clip footprints to the image.
template <class S>
std::vector<ProjectedSplat<S>> project_splats(const SplatScene<S>& scene,
                                              const CameraPose<S>& pose,
                                              const Intrinsics<S>& intr) {
    const Mat3<S> world_to_cam = quat_to_rotmat(pose.rotation).transpose();
    const Vec3<S> cam_center = pose.translation;

    std::vector<ProjectedSplat<S>> out;
    out.reserve(scene.splats.size());
    for (int i = 0; i < scene.size(); ++i) {
        const GaussianSplat<S>& g = scene.splats[i];
        const Vec3<S> t = world_to_cam * (g.position - cam_center);
        if (!(t.z() > S(kNearClip))) continue;

        ProjectedSplat<S> ps;
        ps.index = i;
        ps.view_pos = t;

        const S inv_z = S(1) / t.z();
        ps.mean2d = Vec2<S>(intr.fx * t.x() * inv_z + intr.cx,
                            intr.fy * t.y() * inv_z + intr.cy);

        Mat23<S> jac;
        jac << intr.fx * inv_z, S(0), -intr.fx * t.x() * inv_z * inv_z,
               S(0), intr.fy * inv_z, -intr.fy * t.y() * inv_z * inv_z;
        const Mat23<S> m = jac * world_to_cam;

        const Mat3<S> rot = quat_to_rotmat(g.rotation);
        const Vec3<S> scale = g.log_scale.array().exp();
        const Mat3<S> cov3d = rot * scale.array().square().matrix().asDiagonal() * rot.transpose();

        ps.cov2d = m * cov3d * m.transpose();
        ps.cov2d(0, 0) += S(kScreenBlur);
        ps.cov2d(1, 1) += S(kScreenBlur);
        const S det = ps.cov2d.determinant();
        ps.conic << ps.cov2d(1, 1) / det, -ps.cov2d(0, 1) / det,
                    -ps.cov2d(1, 0) / det, ps.cov2d(0, 0) / det;

        const S rx = S(3) * std::sqrt(ps.cov2d(0, 0));
        const S ry = S(3) * std::sqrt(ps.cov2d(1, 1));
        ps.x0 = std::max(0, static_cast<int>(std::floor(ps.mean2d.x() - rx)));
        ps.x1 = std::min(intr.width - 1, static_cast<int>(std::ceil(ps.mean2d.x() + rx)));
        ps.y0 = std::max(0, static_cast<int>(std::floor(ps.mean2d.y() - ry)));
        ps.y1 = std::min(intr.height - 1, static_cast<int>(std::ceil(ps.mean2d.y() + ry)));
        if (ps.x0 > ps.x1 || ps.y0 > ps.y1) continue;

        ps.opacity = sigmoid(g.opacity_logit);

        const Vec3<S> to_splat = g.position - cam_center;
        ps.view_dist = to_splat.norm();
        ps.view_dir = to_splat / ps.view_dist;
        for (int c = 0; c < 3; ++c) {
            const S raw = sh_eval_channel<S>(
                std::span<const S>(g.sh_coeffs[c].data(), kShCoeffs), ps.view_dir, kShMaxDegree);
            ps.color_clamped[c] = raw < S(0);
            ps.color[c] = std::max(raw, S(0));
        }
        out.push_back(ps);
    }

    std::sort(out.begin(), out.end(), [](const ProjectedSplat<S>& a, const ProjectedSplat<S>& b) {
        if (a.view_pos.z() != b.view_pos.z()) return a.view_pos.z() < b.view_pos.z();
        return a.index < b.index;
    });
    return out;
}

// Per-tile lists of indices into the sorted projected-splat array; list order
// preserves the global front-to-back order.
template <class S>
std::vector<std::vector<int>> build_tile_lists(const std::vector<ProjectedSplat<S>>& splats,
                                               int width, int height, int& tiles_x,
                                               int& tiles_y) {
    tiles_x = (width + kTileSize - 1) / kTileSize;
    tiles_y = (height + kTileSize - 1) / kTileSize;
    std::vector<std::vector<int>> lists(static_cast<size_t>(tiles_x) * tiles_y);
    for (int s = 0; s < static_cast<int>(splats.size()); ++s) {
        const auto& ps = splats[s];
        for (int ty = ps.y0 / kTileSize; ty <= ps.y1 / kTileSize; ++ty)
            for (int tx = ps.x0 / kTileSize; tx <= ps.x1 / kTileSize; ++tx)
                lists[static_cast<size_t>(ty) * tiles_x + tx].push_back(s);
    }
    return lists;
}

}  // namespace detail

// Forward rendering: EWA projection of each splat to a 2D Gaussian followed
// by front-to-back alpha compositing against a constant background.
template <class S>
std::pair<Image<S>, RenderAux<S>> render(const SplatScene<S>& scene, const CameraPose<S>& pose,
                                         const Intrinsics<S>& intr, const Vec3<S>& background) {
    detail::check_scene_renderable(scene, intr);
    const int w = intr.width, h = intr.height;
    Image<S> img(w, h);
    RenderAux<S> aux;
    aux.width = w;
    aux.height = h;
    aux.alpha.assign(static_cast<size_t>(w) * h, S(0));
    aux.depth.assign(static_cast<size_t>(w) * h, std::numeric_limits<S>::infinity());

    const auto splats = detail::project_splats(scene, pose, intr);
    int tiles_x = 0, tiles_y = 0;
    const auto tile_lists = detail::build_tile_lists(splats, w, h, tiles_x, tiles_y);

    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            const auto& list = tile_lists[static_cast<size_t>(ty) * tiles_x + tx];
            const int px0 = tx * kTileSize, px1 = std::min(w, px0 + kTileSize);
            const int py0 = ty * kTileSize, py1 = std::min(h, py0 + kTileSize);
            for (int y = py0; y < py1; ++y) {
                for (int x = px0; x < px1; ++x) {
                    S transmittance = S(1);
                    Vec3<S> color_acc = Vec3<S>::Zero();
                    S depth_acc = S(0);
                    for (int sidx : list) {
                        const auto& ps = splats[sidx];
                        if (x < ps.x0 || x > ps.x1 || y < ps.y0 || y > ps.y1) continue;
                        const S dx = S(x) - ps.mean2d.x();
                        const S dy = S(y) - ps.mean2d.y();
                        const S q = ps.conic(0, 0) * dx * dx + S(2) * ps.conic(0, 1) * dx * dy +
                                    ps.conic(1, 1) * dy * dy;
                        if (q > S(kCutoffSq)) continue;
                        const S alpha =
                            std::min(S(kAlphaCap), ps.opacity * std::exp(S(-0.5) * q));
                        const S weight = alpha * transmittance;
                        color_acc += weight * ps.color;
                        depth_acc += weight * ps.view_pos.z();
                        transmittance *= S(1) - alpha;
                    }
                    const size_t pix = static_cast<size_t>(y) * w + x;
                    const S accum_alpha = S(1) - transmittance;
                    aux.alpha[pix] = accum_alpha;
                    if (accum_alpha > S(1e-12)) aux.depth[pix] = depth_acc / accum_alpha;
                    for (int c = 0; c < 3; ++c)
                        img.at(x, y, c) =
                            std::clamp(color_acc[c] + transmittance * background[c], S(0), S(1));
                }
            }
        }
    }
    return {std::move(img), std::move(aux)};
}

// Reverse-mode gradients of sum_pixels <grad_pixels, rendered> with respect
// to every splat parameter. Must be called with the same scene, pose,
// intrinsics and background as the forward pass it differentiates.
template <class S>
SplatGrads<S> render_backward(const SplatScene<S>& scene, const CameraPose<S>& pose,
                              const Intrinsics<S>& intr, const Vec3<S>& background,
                              const Image<S>& grad_pixels) {
    detail::check_scene_renderable(scene, intr);
    if (grad_pixels.width != intr.width || grad_pixels.height != intr.height)
        throw ValueError("render_backward: gradient image dimensions do not match intrinsics");

    const int w = intr.width, h = intr.height;
    const auto splats = detail::project_splats(scene, pose, intr);
    int tiles_x = 0, tiles_y = 0;
    const auto tile_lists = detail::build_tile_lists(splats, w, h, tiles_x, tiles_y);

    // Pixel-level accumulators per projected splat: screen mean, conic,
    // color, opacity. The chain to the raw parameters runs once per splat
    // afterwards.
    const int n_proj = static_cast<int>(splats.size());
    std::vector<Vec2<S>> g_mean(n_proj, Vec2<S>::Zero());
    std::vector<Mat2<S>> g_conic(n_proj, Mat2<S>::Zero());
    std::vector<Vec3<S>> g_color(n_proj, Vec3<S>::Zero());
    std::vector<S> g_opacity(n_proj, S(0));

    for (int ty = 0; ty < tiles_y; ++ty) {
        for (int tx = 0; tx < tiles_x; ++tx) {
            const auto& list = tile_lists[static_cast<size_t>(ty) * tiles_x + tx];
            const int px0 = tx * kTileSize, px1 = std::min(w, px0 + kTileSize);
            const int py0 = ty * kTileSize, py1 = std::min(h, py0 + kTileSize);
            for (int y = py0; y < py1; ++y) {
                for (int x = px0; x < px1; ++x) {
                    // First walk: recompute the composited color to mirror the
                    // forward clamp and to know the total splat contribution.
                    S t_end = S(1);
                    Vec3<S> color_total = Vec3<S>::Zero();
                    for (int sidx : list) {
                        const auto& ps = splats[sidx];
                        if (x < ps.x0 || x > ps.x1 || y < ps.y0 || y > ps.y1) continue;
                        const S dx = S(x) - ps.mean2d.x();
                        const S dy = S(y) - ps.mean2d.y();
                        const S q = ps.conic(0, 0) * dx * dx + S(2) * ps.conic(0, 1) * dx * dy +
                                    ps.conic(1, 1) * dy * dy;
                        if (q > S(kCutoffSq)) continue;
                        const S alpha =
                            std::min(S(kAlphaCap), ps.opacity * std::exp(S(-0.5) * q));
                        color_total += alpha * t_end * ps.color;
                        t_end *= S(1) - alpha;
                    }

                    Vec3<S> geff;
                    for (int c = 0; c < 3; ++c) {
                        const S raw = color_total[c] + t_end * background[c];
                        geff[c] = (raw >= S(0) && raw <= S(1)) ? grad_pixels.at(x, y, c) : S(0);
                    }
                    if (geff[0] == S(0) && geff[1] == S(0) && geff[2] == S(0)) continue;

                    // Second walk: per-splat partials via prefix/suffix sums.
                    S transmittance = S(1);
                    Vec3<S> prefix = Vec3<S>::Zero();
                    for (int sidx : list) {
                        const auto& ps = splats[sidx];
                        if (x < ps.x0 || x > ps.x1 || y < ps.y0 || y > ps.y1) continue;
                        const S dx = S(x) - ps.mean2d.x();
                        const S dy = S(y) - ps.mean2d.y();
                        const S q = ps.conic(0, 0) * dx * dx + S(2) * ps.conic(0, 1) * dx * dy +
                                    ps.conic(1, 1) * dy * dy;
                        if (q > S(kCutoffSq)) continue;
                        const S gauss = std::exp(S(-0.5) * q);
                        const S alpha_pre = ps.opacity * gauss;
                        const S alpha = std::min(S(kAlphaCap), alpha_pre);
                        const S weight = alpha * transmittance;

                        g_color[sidx] += weight * geff;
                        prefix += weight * ps.color;

                        // d(pixel)/d(alpha): own contribution minus the
                        // rescaled suffix (later splats and the background).
                        Vec3<S> dpix_dalpha =
                            transmittance * ps.color -
                            (color_total - prefix + t_end * background) / (S(1) - alpha);
                        const S g_alpha = geff.dot(dpix_dalpha);

                        if (alpha_pre < S(kAlphaCap)) {  // cap inactive, gradient flows
                            g_opacity[sidx] += g_alpha * gauss;
                            const S g_q = g_alpha * ps.opacity * gauss * S(-0.5);
                            const Vec2<S> d(dx, dy);
                            g_mean[sidx] += g_q * S(-2) * (ps.conic * d);
                            g_conic[sidx] += g_q * d * d.transpose();
                        }
                        transmittance *= S(1) - alpha;
                    }
                }
            }
        }
    }

    // Chain from screen-space quantities back to the raw splat parameters.
    SplatGrads<S> grads(scene.size());
    const Mat3<S> world_to_cam = quat_to_rotmat(pose.rotation).transpose();
    const Vec3<S> cam_center = pose.translation;

    for (int s = 0; s < n_proj; ++s) {
        const auto& ps = splats[s];
        const GaussianSplat<S>& g = scene.splats[ps.index];
        SplatGrad<S>& out = grads[ps.index];

        // Opacity logit.
        out.opacity_logit += g_opacity[s] * ps.opacity * (S(1) - ps.opacity);

        // Spherical harmonics and the view-direction dependence of color.
        const auto basis = sh_basis(ps.view_dir);
        const auto basis_grad = sh_basis_grad(ps.view_dir);
        Vec3<S> g_dir = Vec3<S>::Zero();
        for (int c = 0; c < 3; ++c) {
            if (ps.color_clamped[c]) continue;
            for (int k = 0; k < kShCoeffs; ++k) {
                out.sh_coeffs[c][k] += g_color[s][c] * basis[k];
                g_dir += g_color[s][c] * g.sh_coeffs[c][k] * basis_grad[k];
            }
        }
        Vec3<S> g_pos =
            (Mat3<S>::Identity() - ps.view_dir * ps.view_dir.transpose()) / ps.view_dist * g_dir;

        // 2D covariance from the conic inverse.
        const Mat2<S> conic = ps.conic;
        const Mat2<S> g_cov2d = -conic * g_conic[s] * conic;

        // cov2d = M cov3d M^T + blur, M = J W.
        const Vec3<S> t = ps.view_pos;
        const S inv_z = S(1) / t.z();
        Mat23<S> jac;
        jac << intr.fx * inv_z, S(0), -intr.fx * t.x() * inv_z * inv_z,
               S(0), intr.fy * inv_z, -intr.fy * t.y() * inv_z * inv_z;
        const Mat23<S> m = jac * world_to_cam;

        const Mat3<S> rot = quat_to_rotmat(g.rotation);
        const Vec3<S> scale = g.log_scale.array().exp();
        const Mat3<S> cov3d = rot * scale.array().square().matrix().asDiagonal() * rot.transpose();

        const Mat23<S> g_m = S(2) * g_cov2d * m * cov3d;
        const Mat3<S> g_cov3d = m.transpose() * g_cov2d * m;
        const Mat23<S> g_jac = g_m * world_to_cam.transpose();

        // View-space position: through the projection Jacobian and the mean.
        Vec3<S> g_t = Vec3<S>::Zero();
        g_t.x() += g_jac(0, 2) * (-intr.fx * inv_z * inv_z);
        g_t.y() += g_jac(1, 2) * (-intr.fy * inv_z * inv_z);
        g_t.z() += g_jac(0, 0) * (-intr.fx * inv_z * inv_z) +
                   g_jac(1, 1) * (-intr.fy * inv_z * inv_z) +
                   g_jac(0, 2) * (S(2) * intr.fx * t.x() * inv_z * inv_z * inv_z) +
                   g_jac(1, 2) * (S(2) * intr.fy * t.y() * inv_z * inv_z * inv_z);
        g_t.x() += g_mean[s].x() * intr.fx * inv_z;
        g_t.y() += g_mean[s].y() * intr.fy * inv_z;
        g_t.z() += -g_mean[s].x() * intr.fx * t.x() * inv_z * inv_z -
                   g_mean[s].y() * intr.fy * t.y() * inv_z * inv_z;
        g_pos += world_to_cam.transpose() * g_t;
        out.position += g_pos;

        // Scale: cov3d = R diag(s^2) R^T.
        const Mat3<S> rtgr = rot.transpose() * g_cov3d * rot;
        for (int k = 0; k < 3; ++k)
            out.log_scale[k] += S(2) * scale[k] * scale[k] * rtgr(k, k);

        // Rotation: contract dR tables with the cov3d gradient, then pull
        // back through the quaternion normalization.
        const Mat3<S> g_rot = S(2) * g_cov3d * rot * scale.array().square().matrix().asDiagonal();
        const UnitQuaternion<S> qn = g.rotation.normalized();
        const S qw = qn.w, qx = qn.x, qy = qn.y, qz = qn.z;
        Mat3<S> dr_dw, dr_dx, dr_dy, dr_dz;
        dr_dw << S(0), S(-2) * qz, S(2) * qy,
                 S(2) * qz, S(0), S(-2) * qx,
                 S(-2) * qy, S(2) * qx, S(0);
        dr_dx << S(0), S(2) * qy, S(2) * qz,
                 S(2) * qy, S(-4) * qx, S(-2) * qw,
                 S(2) * qz, S(2) * qw, S(-4) * qx;
        dr_dy << S(-4) * qy, S(2) * qx, S(2) * qw,
                 S(2) * qx, S(0), S(2) * qz,
                 S(-2) * qw, S(2) * qz, S(-4) * qy;
        dr_dz << S(-4) * qz, S(-2) * qw, S(2) * qx,
                 S(2) * qw, S(-4) * qz, S(2) * qy,
                 S(2) * qx, S(2) * qy, S(0);
        Vec4<S> g_qn(g_rot.cwiseProduct(dr_dw).sum(), g_rot.cwiseProduct(dr_dx).sum(),
                     g_rot.cwiseProduct(dr_dy).sum(), g_rot.cwiseProduct(dr_dz).sum());
        const Vec4<S> qn_vec = qn.coeffs_wxyz();
        out.rotation_wxyz += (g_qn - qn_vec * qn_vec.dot(g_qn)) / g.rotation.norm();
    }
    return grads;
}

// Render every pose of a trajectory; the clip carries the trajectory.
template <class S>
VideoClip<S> render_video(const SplatScene<S>& scene, const Trajectory<S>& trajectory,
                          const Vec3<S>& background) {
    if (trajectory.size() < 1) throw ValueError("render_video: empty trajectory");
    VideoClip<S> clip;
    clip.frames.reserve(trajectory.size());
    for (const auto& pose : trajectory.poses)
        clip.frames.push_back(render(scene, pose, trajectory.intrinsics, background).first);
    clip.poses = trajectory;
    return clip;
}

}  // namespace splatsr
