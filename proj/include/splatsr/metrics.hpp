#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "splatsr/image.hpp"

namespace splatsr {

inline constexpr double kPsnrCap = 99.0;  // reported for identical images

// Peak signal-to-noise ratio in dB over all channels, dynamic range 1.
template <class S>
double psnr(const Image<S>& a, const Image<S>& b) {
    if (!a.same_size(b)) throw ValueError("psnr: image dimensions differ");
    double mse = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        mse += d * d;
    }
    mse /= static_cast<double>(a.data.size());
    if (mse <= 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

namespace detail {

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

inline std::array<double, kSsimWindow> ssim_kernel() {
    std::array<double, kSsimWindow> k{};
    const int half = kSsimWindow / 2;
    double sum = 0.0;
    for (int i = 0; i < kSsimWindow; ++i) {
        const double d = i - half;
        k[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Valid-mode separable correlation of a W x H plane: horizontal pass shrinks
// width, vertical pass shrinks height.
inline std::vector<double> correlate_h(const std::vector<double>& in, int w, int h) {
    const int wo = w - kSsimWindow + 1;
    const auto k = ssim_kernel();
    std::vector<double> out(static_cast<size_t>(wo) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < wo; ++x) {
            double acc = 0.0;
            for (int j = 0; j < kSsimWindow; ++j) acc += k[j] * in[static_cast<size_t>(y) * w + x + j];
            out[static_cast<size_t>(y) * wo + x] = acc;
        }
    return out;
}

inline std::vector<double> correlate_v(const std::vector<double>& in, int w, int h) {
    const int ho = h - kSsimWindow + 1;
    const auto k = ssim_kernel();
    std::vector<double> out(static_cast<size_t>(w) * ho);
    for (int y = 0; y < ho; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int j = 0; j < kSsimWindow; ++j) acc += k[j] * in[static_cast<size_t>(y + j) * w + x];
            out[static_cast<size_t>(y) * w + x] = acc;
        }
    return out;
}

inline std::vector<double> filter_valid(const std::vector<double>& in, int w, int h) {
    return correlate_v(correlate_h(in, w, h), w - kSsimWindow + 1, h);
}

// Adjoints of the valid correlations (scatter back to the larger plane).
inline std::vector<double> scatter_h(const std::vector<double>& g, int wo, int h) {
    const int w = wo + kSsimWindow - 1;
    const auto k = ssim_kernel();
    std::vector<double> out(static_cast<size_t>(w) * h, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < wo; ++x) {
            const double v = g[static_cast<size_t>(y) * wo + x];
            for (int j = 0; j < kSsimWindow; ++j) out[static_cast<size_t>(y) * w + x + j] += k[j] * v;
        }
    return out;
}

inline std::vector<double> scatter_v(const std::vector<double>& g, int w, int ho) {
    const int h = ho + kSsimWindow - 1;
    const auto k = ssim_kernel();
    std::vector<double> out(static_cast<size_t>(w) * h, 0.0);
    for (int y = 0; y < ho; ++y)
        for (int x = 0; x < w; ++x) {
            const double v = g[static_cast<size_t>(y) * w + x];
            for (int j = 0; j < kSsimWindow; ++j) out[static_cast<size_t>(y + j) * w + x] += k[j] * v;
        }
    return out;
}

inline std::vector<double> scatter_valid(const std::vector<double>& g, int wo, int ho) {
    return scatter_h(scatter_v(g, wo, ho), wo, ho + kSsimWindow - 1);
}

}  // namespace detail

// Mean local SSIM (11x11 Gaussian window, sigma 1.5, K1 = 0.01, K2 = 0.03,
// dynamic range 1), computed per channel over valid windows and averaged.
// When `grad_a` is non-null it receives d(ssim)/d(a).
template <class S>
double ssim(const Image<S>& a, const Image<S>& b, Image<S>* grad_a = nullptr) {
    if (!a.same_size(b)) throw ValueError("ssim: image dimensions differ");
    if (a.width < detail::kSsimWindow || a.height < detail::kSsimWindow)
        throw ValueError("ssim: image smaller than the 11x11 window");

    const int w = a.width, h = a.height;
    const int wo = w - detail::kSsimWindow + 1;
    const int ho = h - detail::kSsimWindow + 1;
    const double c1 = detail::kSsimK1 * detail::kSsimK1;
    const double c2 = detail::kSsimK2 * detail::kSsimK2;
    const double inv_count = 1.0 / (3.0 * wo * ho);

    if (grad_a) *grad_a = Image<S>(w, h);

    double total = 0.0;
    std::vector<double> pa(static_cast<size_t>(w) * h), pb(pa.size());
    std::vector<double> paa(pa.size()), pbb(pa.size()), pab(pa.size());
    for (int c = 0; c < 3; ++c) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double va = a.at(x, y, c);
                const double vb = b.at(x, y, c);
                const size_t i = static_cast<size_t>(y) * w + x;
                pa[i] = va;
                pb[i] = vb;
                paa[i] = va * va;
                pbb[i] = vb * vb;
                pab[i] = va * vb;
            }
        const auto mu_a = detail::filter_valid(pa, w, h);
        const auto mu_b = detail::filter_valid(pb, w, h);
        const auto e_aa = detail::filter_valid(paa, w, h);
        const auto e_bb = detail::filter_valid(pbb, w, h);
        const auto e_ab = detail::filter_valid(pab, w, h);

        std::vector<double> g_mu, g_eaa, g_eab;
        if (grad_a) {
            g_mu.assign(mu_a.size(), 0.0);
            g_eaa.assign(mu_a.size(), 0.0);
            g_eab.assign(mu_a.size(), 0.0);
        }

        for (size_t i = 0; i < mu_a.size(); ++i) {
            const double ma = mu_a[i], mb = mu_b[i];
            const double a1 = 2.0 * ma * mb + c1;
            const double a2 = 2.0 * (e_ab[i] - ma * mb) + c2;
            const double b1 = ma * ma + mb * mb + c1;
            const double b2 = (e_aa[i] - ma * ma) + (e_bb[i] - mb * mb) + c2;
            const double s = (a1 * a2) / (b1 * b2);
            total += s;
            if (grad_a) {
                g_mu[i] = 2.0 * mb * (a2 - a1) / (b1 * b2) -
                          2.0 * ma * s * (1.0 / b1 - 1.0 / b2);
                g_eaa[i] = -s / b2;
                g_eab[i] = 2.0 * a1 / (b1 * b2);
            }
        }

        if (grad_a) {
            const auto s_mu = detail::scatter_valid(g_mu, wo, ho);
            const auto s_eaa = detail::scatter_valid(g_eaa, wo, ho);
            const auto s_eab = detail::scatter_valid(g_eab, wo, ho);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const size_t i = static_cast<size_t>(y) * w + x;
                    const double gp =
                        (s_mu[i] + 2.0 * pa[i] * s_eaa[i] + pb[i] * s_eab[i]) * inv_count;
                    grad_a->at(x, y, c) = static_cast<S>(gp);
                }
        }
    }
    return total * inv_count;
}

}  // namespace splatsr
