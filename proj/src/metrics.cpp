#include "warpkit/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "warpkit/errors.hpp"

namespace warpkit {

namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.width() != b.width() || a.height() != b.height() || a.channels() != b.channels())
        throw DimensionError("metric inputs must share one shape");
}

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;

std::array<double, kWindow> gaussian_taps() {
    std::array<double, kWindow> taps{};
    const double sigma = 1.5;
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kRadius;
        taps[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
        sum += taps[static_cast<std::size_t>(i)];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

// Separable horizontal-then-vertical filtering of one channel plane,
// keeping only positions where the full window fits.
struct Plane {
    int width = 0, height = 0;
    std::vector<double> data;
    double at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

Plane filter_valid(const Plane& src, const std::array<double, kWindow>& taps) {
    Plane mid;
    mid.width = src.width - 2 * kRadius;
    mid.height = src.height;
    mid.data.resize(static_cast<std::size_t>(mid.width) * mid.height);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < mid.width; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) acc += taps[static_cast<std::size_t>(k)] * src.at(y, x + k);
            mid.data[static_cast<std::size_t>(y) * mid.width + x] = acc;
        }
    }
    Plane out;
    out.width = mid.width;
    out.height = src.height - 2 * kRadius;
    out.data.resize(static_cast<std::size_t>(out.width) * out.height);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) acc += taps[static_cast<std::size_t>(k)] * mid.at(y + k, x);
            out.data[static_cast<std::size_t>(y) * out.width + x] = acc;
        }
    }
    return out;
}

} // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b, const Mask* mask) {
    require_same_shape(a, b);
    if (mask && (mask->width() != a.width() || mask->height() != a.height()))
        throw DimensionError("mask size does not match the images");

    double num = 0.0;
    double den = 0.0;
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            const double w = mask ? static_cast<double>(mask->at(y, x)) : 1.0;
            if (w == 0.0) continue;
            for (int c = 0; c < a.channels(); ++c) {
                const double d = static_cast<double>(a.at(y, x, c)) - b.at(y, x, c);
                num += w * d * d;
            }
            den += w * a.channels();
        }
    }
    if (den == 0.0) throw ValueError("mask weights sum to zero");
    const double mse = num / den;
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_shape(a, b);
    if (a.width() < kWindow || a.height() < kWindow)
        throw DimensionError("images must be at least 11x11 for the similarity window");

    const std::array<double, kWindow> taps = gaussian_taps();
    const double c1 = 0.01 * 0.01;
    const double c2 = 0.03 * 0.03;

    double total = 0.0;
    for (int ch = 0; ch < a.channels(); ++ch) {
        Plane pa, pb, paa, pbb, pab;
        pa.width = pb.width = paa.width = pbb.width = pab.width = a.width();
        pa.height = pb.height = paa.height = pbb.height = pab.height = a.height();
        const std::size_t n = static_cast<std::size_t>(a.width()) * a.height();
        pa.data.resize(n);
        pb.data.resize(n);
        paa.data.resize(n);
        pbb.data.resize(n);
        pab.data.resize(n);
        for (int y = 0; y < a.height(); ++y) {
            for (int x = 0; x < a.width(); ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * a.width() + x;
                const double va = a.at(y, x, ch);
                const double vb = b.at(y, x, ch);
                pa.data[i] = va;
                pb.data[i] = vb;
                paa.data[i] = va * va;
                pbb.data[i] = vb * vb;
                pab.data[i] = va * vb;
            }
        }
        const Plane mu_a = filter_valid(pa, taps);
        const Plane mu_b = filter_valid(pb, taps);
        const Plane m_aa = filter_valid(paa, taps);
        const Plane m_bb = filter_valid(pbb, taps);
        const Plane m_ab = filter_valid(pab, taps);

        double sum = 0.0;
        for (std::size_t i = 0; i < mu_a.data.size(); ++i) {
            const double ma = mu_a.data[i];
            const double mb = mu_b.data[i];
            const double va = m_aa.data[i] - ma * ma;
            const double vb = m_bb.data[i] - mb * mb;
            const double cov = m_ab.data[i] - ma * mb;
            sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                   ((ma * ma + mb * mb + c1) * (va + vb + c2));
        }
        total += sum / static_cast<double>(mu_a.data.size());
    }
    return total / a.channels();
}

} // namespace warpkit
