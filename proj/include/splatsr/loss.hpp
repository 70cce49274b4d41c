#pragma once

#include "splatsr/image.hpp"
#include "splatsr/metrics.hpp"

namespace splatsr {

template <class S>
struct LossResult {
    double value = 0.0;
    Image<S> grad;  // d(loss)/d(rendered)
};

// Reconstruction loss L = (1 - lambda) * L1 + lambda * (1 - SSIM), with the
// pixel gradient the rasterizer backward pass consumes.
template <class S>
LossResult<S> loss(const Image<S>& rendered, const Image<S>& target, double lambda) {
    if (!rendered.same_size(target)) throw ValueError("loss: image dimensions differ");

    LossResult<S> out;
    out.grad = Image<S>(rendered.width, rendered.height);

    double l1 = 0.0;
    const double inv_n = 1.0 / static_cast<double>(rendered.data.size());
    for (size_t i = 0; i < rendered.data.size(); ++i) {
        const double d = static_cast<double>(rendered.data[i]) - static_cast<double>(target.data[i]);
        l1 += std::abs(d);
        const double sign = (d > 0.0) ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
        out.grad.data[i] = static_cast<S>((1.0 - lambda) * sign * inv_n);
    }
    l1 *= inv_n;

    double ssim_value = 1.0;
    if (lambda != 0.0) {
        Image<S> ssim_grad;
        ssim_value = ssim(rendered, target, &ssim_grad);
        for (size_t i = 0; i < out.grad.data.size(); ++i)
            out.grad.data[i] -= static_cast<S>(lambda) * ssim_grad.data[i];
    }

    out.value = (1.0 - lambda) * l1 + lambda * (1.0 - ssim_value);
    return out;
}

}  // namespace splatsr
