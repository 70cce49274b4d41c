#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "splatsr/clip.hpp"
#include "splatsr/loss.hpp"
#include "splatsr/metrics.hpp"
#include "splatsr/rasterizer.hpp"
#include "splatsr/rng.hpp"
#include "splatsr/splat.hpp"

namespace splatsr {

// Hyperparameters of the splat fit. Learning-rate defaults follow the
// standard splatting recipe; the position rate is scaled by the scene extent
// and decays exponentially to its final value over the run.
struct OptimConfig {
    int steps = 2000;
    double lr_position = 1.6e-4;
    double lr_position_final = 1.6e-6;
    double lr_rotation = 1e-3;
    double lr_scale = 5e-3;
    double lr_opacity = 5e-2;
    double lr_sh = 2.5e-3;
    double ssim_weight = 0.2;  // lambda of the L1/SSIM mix

    int densify_interval = 100;
    int densify_until_step = 1500;
    double prune_opacity_threshold = 0.005;
    double grad_densify_threshold = 2e-4;
    int max_splats = 100000;
    double densify_size_fraction = 0.01;  // clone below, split above this * extent
    double split_scale_shrink = 1.6;

    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-15;

    std::uint64_t seed = 0;
    std::array<double, 3> background{0.0, 0.0, 0.0};

    void validate() const {
        if (steps < 1) throw ValueError("optim config: steps must be >= 1");
        if (!(ssim_weight >= 0.0 && ssim_weight <= 1.0))
            throw ValueError("optim config: ssim_weight must lie in [0, 1]");
        const double rates[] = {lr_position, lr_position_final, lr_rotation,
                                lr_scale,    lr_opacity,        lr_sh};
        for (double r : rates)
            if (!(r > 0.0)) throw ValueError("optim config: learning rates must be positive");
        if (densify_interval < 1) throw ValueError("optim config: densify_interval must be >= 1");
        if (max_splats < 1) throw ValueError("optim config: max_splats must be >= 1");
    }
};

struct FitReport {
    std::vector<double> loss_trace;       // one entry per step
    std::vector<int> splat_count_trace;   // splat count after each step
    std::vector<double> final_view_psnr;  // per training view
    int final_splat_count = 0;
    double wall_seconds = 0.0;
};

namespace detail {

template <class S>
struct AdamState {
    // First and second moments, shaped like the gradients.
    SplatGrads<S> m, v;

    explicit AdamState(int n) : m(n), v(n) {}
};

template <class S>
void adam_update_scalar(S& param, S grad, S& m, S& v, double lr, const OptimConfig& cfg,
                        double bias1, double bias2) {
    m = S(cfg.adam_beta1) * m + S(1.0 - cfg.adam_beta1) * grad;
    v = S(cfg.adam_beta2) * v + S(1.0 - cfg.adam_beta2) * grad * grad;
    const double m_hat = m / bias1;
    const double v_hat = v / bias2;
    param -= S(lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps));
}

}  // namespace detail

// Gradient-descent fit of splat parameters to posed target frames with the
// L1 + SSIM loss, one uniformly sampled view per step, periodic adaptive
// densification (clone small / split large high-gradient splats) and
// opacity-based pruning. Deterministic for a fixed seed.
template <class S>
std::pair<SplatScene<S>, FitReport> fit_splats(const VideoClip<S>& targets,
                                               const SplatScene<S>& init,
                                               const OptimConfig& config) {
    config.validate();
    targets.validate();
    if (!targets.poses) throw ValueError("fit_splats: targets must carry camera poses");
    if (init.empty()) throw ValueError("fit_splats: initial scene is empty");
    if (init.size() > config.max_splats)
        throw ValueError("fit_splats: initial scene exceeds max_splats");

    const auto t_start = std::chrono::steady_clock::now();
    const Trajectory<S>& traj = *targets.poses;
    const Intrinsics<S>& intr = traj.intrinsics;
    const Vec3<S> background(S(config.background[0]), S(config.background[1]),
                             S(config.background[2]));
    const int n_views = targets.size();

    SplatScene<S> scene = init;
    const S extent = scene.scene_extent;  // frozen for lr scaling and densify sizing

    detail::AdamState<S> adam(scene.size());
    std::vector<double> pos_grad_accum(scene.size(), 0.0);
    int steps_since_densify = 0;

    Rng rng(config.seed);
    FitReport report;
    report.loss_trace.reserve(config.steps);
    report.splat_count_trace.reserve(config.steps);

    const double lr_decay = config.lr_position_final / config.lr_position;

    for (int step = 1; step <= config.steps; ++step) {
        const int view = static_cast<int>(rng.uniform_int(n_views));
        auto [rendered, aux] = render(scene, traj.poses[view], intr, background);
        LossResult<S> l = loss(rendered, targets.frames[view], config.ssim_weight);
        if (!std::isfinite(l.value))
            throw Error("fit_splats: non-finite loss at step " + std::to_string(step) +
                        " (view " + std::to_string(view) + ")");
        SplatGrads<S> grads =
            render_backward(scene, traj.poses[view], intr, background, l.grad);

        const double progress = static_cast<double>(step) / config.steps;
        const double lr_pos =
            config.lr_position * static_cast<double>(extent) * std::pow(lr_decay, progress);
        const double bias1 = 1.0 - std::pow(config.adam_beta1, step);
        const double bias2 = 1.0 - std::pow(config.adam_beta2, step);

        for (int i = 0; i < scene.size(); ++i) {
            GaussianSplat<S>& g = scene.splats[i];
            SplatGrad<S>& gr = grads[i];
            SplatGrad<S>& m = adam.m[i];
            SplatGrad<S>& v = adam.v[i];
            for (int k = 0; k < 3; ++k) {
                detail::adam_update_scalar(g.position[k], gr.position[k], m.position[k],
                                           v.position[k], lr_pos, config, bias1, bias2);
                detail::adam_update_scalar(g.log_scale[k], gr.log_scale[k], m.log_scale[k],
                                           v.log_scale[k], config.lr_scale, config, bias1, bias2);
            }
            S quat[4] = {g.rotation.w, g.rotation.x, g.rotation.y, g.rotation.z};
            for (int k = 0; k < 4; ++k)
                detail::adam_update_scalar(quat[k], gr.rotation_wxyz[k], m.rotation_wxyz[k],
                                           v.rotation_wxyz[k], config.lr_rotation, config, bias1,
                                           bias2);
            g.rotation = {quat[0], quat[1], quat[2], quat[3]};
            detail::adam_update_scalar(g.opacity_logit, gr.opacity_logit, m.opacity_logit,
                                       v.opacity_logit, config.lr_opacity, config, bias1, bias2);
            for (int c = 0; c < 3; ++c)
                for (int k = 0; k < kShCoeffs; ++k)
                    detail::adam_update_scalar(g.sh_coeffs[c][k], gr.sh_coeffs[c][k],
                                               m.sh_coeffs[c][k], v.sh_coeffs[c][k], config.lr_sh,
                                               config, bias1, bias2);
            pos_grad_accum[i] += gr.position.template cast<double>().norm();
        }
        ++steps_since_densify;

        if (step % config.densify_interval == 0 && step <= config.densify_until_step) {
            // Densify: clone or split splats whose average positional
            // gradient since the last event exceeds the threshold.
            const int count_before = scene.size();
            std::vector<GaussianSplat<S>> new_splats;
            std::vector<char> remove(count_before, 0);
            for (int i = 0; i < count_before; ++i) {
                const double avg = pos_grad_accum[i] / steps_since_densify;
                if (avg < config.grad_densify_threshold) continue;
                if (count_before + static_cast<int>(new_splats.size()) >= config.max_splats)
                    break;
                GaussianSplat<S>& g = scene.splats[i];
                const S max_scale = std::exp(g.log_scale.maxCoeff());
                if (max_scale < S(config.densify_size_fraction) * extent) {
                    new_splats.push_back(g);  // clone; copies drift apart under later gradients
                } else {
                    // Split: resample two children inside the Gaussian with
                    // shrunken scale, drop the parent.
                    GaussianSplat<S> child = g;
                    child.log_scale =
                        g.log_scale - Vec3<S>::Constant(std::log(S(config.split_scale_shrink)));
                    const Mat3<S> rot = quat_to_rotmat(g.rotation);
                    const Vec3<S> sigma = g.log_scale.array().exp();
                    for (int rep = 0; rep < 2; ++rep) {
                        Vec3<S> draw(S(rng.normal()), S(rng.normal()), S(rng.normal()));
                        GaussianSplat<S> c2 = child;
                        c2.position = g.position + rot * (sigma.array() * draw.array()).matrix();
                        if (count_before + static_cast<int>(new_splats.size()) <
                            config.max_splats) {
                            new_splats.push_back(c2);
                        }
                    }
                    remove[i] = 1;
                }
            }
            // Prune: opacity strictly below the threshold.
            for (int i = 0; i < count_before; ++i) {
                if (sigmoid(static_cast<double>(scene.splats[i].opacity_logit)) <
                    config.prune_opacity_threshold)
                    remove[i] = 1;
            }

            std::vector<GaussianSplat<S>> kept;
            detail::AdamState<S> kept_adam(0);
            kept.reserve(count_before + new_splats.size());
            for (int i = 0; i < count_before; ++i) {
                if (remove[i]) continue;
                kept.push_back(scene.splats[i]);
                kept_adam.m.push_back(adam.m[i]);
                kept_adam.v.push_back(adam.v[i]);
            }
            for (auto& g : new_splats) {
                kept.push_back(std::move(g));
                kept_adam.m.emplace_back();
                kept_adam.v.emplace_back();
            }
            if (kept.empty())
                throw Error("fit_splats: densification pruned every splat at step " +
                            std::to_string(step));
            scene.splats = std::move(kept);
            adam = std::move(kept_adam);
            pos_grad_accum.assign(scene.size(), 0.0);
            steps_since_densify = 0;
        }

        report.loss_trace.push_back(l.value);
        report.splat_count_trace.push_back(scene.size());
    }

    scene.update_bounds();
    for (auto& g : scene.splats) g.rotation = g.rotation.normalized();

    report.final_splat_count = scene.size();
    report.final_view_psnr.reserve(n_views);
    for (int view = 0; view < n_views; ++view) {
        auto [rendered, aux] = render(scene, traj.poses[view], intr, background);
        report.final_view_psnr.push_back(psnr(rendered, targets.frames[view]));
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(scene), std::move(report)};
}

// fit_splats with densification capped at `budget` splats; used to
// manufacture deliberately coarse scenes.
template <class S>
std::pair<SplatScene<S>, FitReport> fit_splats_capped(const VideoClip<S>& targets,
                                                      const SplatScene<S>& init, int budget,
                                                      const OptimConfig& config) {
    if (budget < 1) throw ValueError("fit_splats_capped: budget must be >= 1");
    OptimConfig capped = config;
    capped.max_splats = std::min(config.max_splats, budget);
    return fit_splats(targets, init, capped);
}

}  // namespace splatsr
