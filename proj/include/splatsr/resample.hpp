#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "splatsr/image.hpp"

namespace splatsr {

enum class FilterKind { Nearest, Bilinear, Bicubic, Lanczos3 };

namespace detail {

inline double sinc(double t) {
    if (t == 0.0) return 1.0;
    const double pt = M_PI * t;
    return std::sin(pt) / pt;
}

struct FilterSpec {
    int radius;  // taps cover (x - radius, x + radius)
    double (*weight)(double);
};

inline double bilinear_weight(double t) {
    t = std::abs(t);
    return t < 1.0 ? 1.0 - t : 0.0;
}

// Keys cubic with a = -0.5.
inline double bicubic_weight(double t) {
    t = std::abs(t);
    constexpr double a = -0.5;
    if (t <= 1.0) return (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0;
    if (t < 2.0) return a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a;
    return 0.0;
}

inline double lanczos3_weight(double t) {
    t = std::abs(t);
    return t < 3.0 ? sinc(t) * sinc(t / 3.0) : 0.0;
}

inline FilterSpec filter_spec(FilterKind kind) {
    switch (kind) {
        case FilterKind::Bilinear: return {1, bilinear_weight};
        case FilterKind::Bicubic: return {2, bicubic_weight};
        case FilterKind::Lanczos3: return {3, lanczos3_weight};
        default: throw ValueError("filter_spec: nearest has no kernel");
    }
}

}  // namespace detail

// Upsample by an integer factor. Output pixel i samples the input at
// (i - (r-1)/2) / r under pixel-center sampling, which is the inverse of the
// intrinsics convention c' = r*c + (r-1)/2. Separable filtering with edge
// clamp and per-tap weight normalization; output is clamped to [0, 1].
template <class S>
Image<S> upsample_image(const Image<S>& img, int factor, FilterKind kind) {
    if (factor < 1) throw ValueError("upsample: factor must be >= 1");
    if (factor == 1 && kind == FilterKind::Nearest) return img;

    const int w_in = img.width, h_in = img.height;
    const int w_out = w_in * factor, h_out = h_in * factor;
    const auto src_coord = [factor](int i) {
        return (i - (factor - 1) / 2.0) / factor;
    };

    if (kind == FilterKind::Nearest) {
        Image<S> out(w_out, h_out);
        for (int y = 0; y < h_out; ++y) {
            const int sy = std::clamp(static_cast<int>(std::lround(src_coord(y))), 0, h_in - 1);
            for (int x = 0; x < w_out; ++x) {
                const int sx = std::clamp(static_cast<int>(std::lround(src_coord(x))), 0, w_in - 1);
                for (int c = 0; c < 3; ++c) out.at(x, y, c) = img.at(sx, sy, c);
            }
        }
        return out;
    }

    const auto spec = detail::filter_spec(kind);

    // Horizontal pass.
    Image<S> mid(w_out, h_in);
    std::vector<double> weights(2 * spec.radius);
    for (int x = 0; x < w_out; ++x) {
        const double sx = src_coord(x);
        const int base = static_cast<int>(std::floor(sx)) - spec.radius + 1;
        double wsum = 0.0;
        for (int j = 0; j < 2 * spec.radius; ++j) {
            weights[j] = spec.weight(sx - (base + j));
            wsum += weights[j];
        }
        for (int y = 0; y < h_in; ++y)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int j = 0; j < 2 * spec.radius; ++j) {
                    const int xi = std::clamp(base + j, 0, w_in - 1);
                    acc += weights[j] * img.at(xi, y, c);
                }
                mid.at(x, y, c) = static_cast<S>(acc / wsum);
            }
    }

    // Vertical pass.
    Image<S> out(w_out, h_out);
    for (int y = 0; y < h_out; ++y) {
        const double sy = src_coord(y);
        const int base = static_cast<int>(std::floor(sy)) - spec.radius + 1;
        double wsum = 0.0;
        for (int j = 0; j < 2 * spec.radius; ++j) {
            weights[j] = spec.weight(sy - (base + j));
            wsum += weights[j];
        }
        for (int x = 0; x < w_out; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int j = 0; j < 2 * spec.radius; ++j) {
                    const int yi = std::clamp(base + j, 0, h_in - 1);
                    acc += weights[j] * mid.at(x, yi, c);
                }
                out.at(x, y, c) = static_cast<S>(std::clamp(acc / wsum, 0.0, 1.0));
            }
    }
    return out;
}

// Area-weighted reduction by an integer factor: each output pixel is the
// mean of its factor x factor source block. Dimensions must divide evenly.
template <class S>
Image<S> downsample_bilinear(const Image<S>& img, int factor) {
    if (factor < 1) throw ValueError("downsample: factor must be >= 1");
    if (img.width % factor != 0 || img.height % factor != 0)
        throw ValueError("downsample: image dimensions not divisible by factor");
    if (factor == 1) return img;

    Image<S> out(img.width / factor, img.height / factor);
    const double inv_area = 1.0 / (static_cast<double>(factor) * factor);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            for (int c = 0; c < 3; ++c) {
                double acc = 0.0;
                for (int dy = 0; dy < factor; ++dy)
                    for (int dx = 0; dx < factor; ++dx)
                        acc += img.at(x * factor + dx, y * factor + dy, c);
                out.at(x, y, c) = static_cast<S>(acc * inv_area);
            }
    return out;
}

}  // namespace splatsr
