#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "splatsr/errors.hpp"

namespace splatsr {

// H x W x 3 raster of linear color values, row-major with interleaved
// channels. Values are kept in [0, 1] by the producing operations.
template <class S>
struct Image {
    int width = 0;
    int height = 0;
    std::vector<S> data;  // size = height * width * 3

    Image() = default;
    Image(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, S(0)) {
        if (w <= 0 || h <= 0) throw ValueError("image dimensions must be positive");
    }

    static Image constant(int w, int h, S r, S g, S b) {
        Image img(w, h);
        for (int i = 0; i < w * h; ++i) {
            img.data[3 * i + 0] = r;
            img.data[3 * i + 1] = g;
            img.data[3 * i + 2] = b;
        }
        return img;
    }

    S& at(int x, int y, int c) { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
    const S& at(int x, int y, int c) const {
        return data[(static_cast<size_t>(y) * width + x) * 3 + c];
    }

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }

    bool same_size(const Image& other) const {
        return width == other.width && height == other.height;
    }

    void clamp01() {
        for (S& v : data) v = std::clamp(v, S(0), S(1));
    }

    bool all_finite() const {
        for (S v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }

    template <class T>
    Image<T> cast() const {
        Image<T> out(width, height);
        for (size_t i = 0; i < data.size(); ++i) out.data[i] = T(data[i]);
        return out;
    }
};

using ImageF = Image<float>;
using ImageD = Image<double>;

// sRGB transfer function (IEC 61966-2-1) and inverse; the library keeps
// linear values internally and converts only at 8-bit file boundaries.
template <class S>
S linear_to_srgb(S x) {
    x = std::clamp(x, S(0), S(1));
    return x <= S(0.0031308) ? S(12.92) * x
                             : S(1.055) * std::pow(x, S(1) / S(2.4)) - S(0.055);
}

template <class S>
S srgb_to_linear(S u) {
    u = std::clamp(u, S(0), S(1));
    return u <= S(0.04045) ? u / S(12.92) : std::pow((u + S(0.055)) / S(1.055), S(2.4));
}

template <class S>
std::vector<std::uint8_t> encode_srgb8(const Image<S>& img) {
    std::vector<std::uint8_t> out(img.data.size());
    for (size_t i = 0; i < img.data.size(); ++i) {
        const double s = linear_to_srgb(static_cast<double>(img.data[i]));
        out[i] = static_cast<std::uint8_t>(std::lround(s * 255.0));
    }
    return out;
}

template <class S>
Image<S> decode_srgb8(const std::uint8_t* rgb, int width, int height) {
    Image<S> img(width, height);
    for (size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<S>(srgb_to_linear(rgb[i] / 255.0));
    return img;
}

}  // namespace splatsr
