#pragma once

// Hand-rolled reference implementations the tests compare the library
// against. Everything here is deliberately written the plain, slow way and
// shares no code with the library internals (no Eigen, no shared kernels).

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "warpkit/classifier.hpp"
#include "warpkit/geometry.hpp"

namespace oracle {

// ---------------------------------------------------------------------------
// Thin-plate spline fitted in position space by plain Gaussian elimination.
// (The library solves on displacements with a packaged LU factorization;
// agreeing with this from a different route is the point of the oracle.)
// ---------------------------------------------------------------------------

struct NaiveTps {
    std::vector<warpkit::Point2> centers;
    std::vector<double> wx, wy; // nonlinear coefficients
    double ax[3] = {0, 0, 0};   // x' = ax[0] x + ax[1] y + ax[2]
    double ay[3] = {0, 0, 0};
};

inline double kernel(double r) { return r > 0.0 ? r * r * std::log(r) : 0.0; }

// Solves m sol = rhs for two right-hand sides with partial pivoting.
inline void gauss_solve(std::vector<std::vector<double>> m, std::vector<double> bx,
                        std::vector<double> by, std::vector<double>& sx,
                        std::vector<double>& sy) {
    const std::size_t n = m.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(m[r][col]) > std::fabs(m[pivot][col])) pivot = r;
        if (std::fabs(m[pivot][col]) < 1e-13) throw std::runtime_error("oracle: singular system");
        std::swap(m[col], m[pivot]);
        std::swap(bx[col], bx[pivot]);
        std::swap(by[col], by[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = m[r][col] / m[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
            bx[r] -= f * bx[col];
            by[r] -= f * by[col];
        }
    }
    sx.assign(n, 0.0);
    sy.assign(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double accx = bx[i];
        double accy = by[i];
        for (std::size_t c = i + 1; c < n; ++c) {
            accx -= m[i][c] * sx[c];
            accy -= m[i][c] * sy[c];
        }
        sx[i] = accx / m[i][i];
        sy[i] = accy / m[i][i];
    }
}

inline NaiveTps naive_solve(const std::vector<warpkit::Point2>& src,
                            const std::vector<warpkit::Point2>& dst, double reg) {
    const std::size_t n = src.size();
    const std::size_t dim = n + 3;
    std::vector<std::vector<double>> m(dim, std::vector<double>(dim, 0.0));
    std::vector<double> bx(dim, 0.0), by(dim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = src[i].x - src[j].x;
            const double dy = src[i].y - src[j].y;
            m[i][j] = kernel(std::sqrt(dx * dx + dy * dy));
        }
        m[i][i] += reg;
        m[i][n + 0] = src[i].x;
        m[i][n + 1] = src[i].y;
        m[i][n + 2] = 1.0;
        m[n + 0][i] = src[i].x;
        m[n + 1][i] = src[i].y;
        m[n + 2][i] = 1.0;
        bx[i] = dst[i].x;
        by[i] = dst[i].y;
    }
    std::vector<double> sx, sy;
    gauss_solve(std::move(m), std::move(bx), std::move(by), sx, sy);
    NaiveTps t;
    t.centers = src;
    t.wx.assign(sx.begin(), sx.begin() + static_cast<std::ptrdiff_t>(n));
    t.wy.assign(sy.begin(), sy.begin() + static_cast<std::ptrdiff_t>(n));
    for (int k = 0; k < 3; ++k) {
        t.ax[k] = sx[n + static_cast<std::size_t>(k)];
        t.ay[k] = sy[n + static_cast<std::size_t>(k)];
    }
    return t;
}

inline warpkit::Point2 naive_eval(const NaiveTps& t, warpkit::Point2 q) {
    double x = t.ax[0] * q.x + t.ax[1] * q.y + t.ax[2];
    double y = t.ay[0] * q.x + t.ay[1] * q.y + t.ay[2];
    for (std::size_t i = 0; i < t.centers.size(); ++i) {
        const double dx = t.centers[i].x - q.x;
        const double dy = t.centers[i].y - q.y;
        const double u = kernel(std::sqrt(dx * dx + dy * dy));
        x += u * t.wx[i];
        y += u * t.wy[i];
    }
    return {x, y};
}

// ---------------------------------------------------------------------------
// Straight-line classifier forward pass (plain loops, no pooling tricks).
// ---------------------------------------------------------------------------

inline std::vector<double> dense_apply(const warpkit::DenseLayer& l,
                                       const std::vector<double>& in) {
    std::vector<double> out(static_cast<std::size_t>(l.out_dim));
    for (int o = 0; o < l.out_dim; ++o) {
        double acc = l.bias[static_cast<std::size_t>(o)];
        for (int i = 0; i < l.in_dim; ++i)
            acc += l.weight[static_cast<std::size_t>(o) * l.in_dim + i] *
                   in[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(o)] = acc;
    }
    return out;
}

inline std::vector<double> reference_logits(const warpkit::ClassifierParams& p,
                                            const std::vector<warpkit::Point2>& pts,
                                            const std::vector<double>* global_feat) {
    std::vector<std::vector<double>> feats;
    feats.reserve(pts.size());
    for (const warpkit::Point2& pt : pts) {
        std::vector<double> v = {pt.x, pt.y};
        for (const warpkit::DenseLayer& layer : p.pointwise) {
            v = dense_apply(layer, v);
            for (double& e : v) e = std::max(0.0, e);
        }
        feats.push_back(std::move(v));
    }
    std::vector<double> pooled = feats.front();
    for (std::size_t i = 1; i < feats.size(); ++i)
        for (std::size_t k = 0; k < pooled.size(); ++k)
            pooled[k] = std::max(pooled[k], feats[i][k]);
    if (global_feat)
        pooled.insert(pooled.end(), global_feat->begin(), global_feat->end());
    std::vector<double> h = std::move(pooled);
    for (std::size_t l = 0; l < p.head.size(); ++l) {
        h = dense_apply(p.head[l], h);
        if (l + 1 < p.head.size())
            for (double& e : h) e = std::max(0.0, e);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Brute-force bending penalty over every consecutive edge pair.
// ---------------------------------------------------------------------------

inline double bend(warpkit::Point2 a, warpkit::Point2 b, warpkit::Point2 c) {
    const double e1x = b.x - a.x, e1y = b.y - a.y;
    const double e2x = c.x - b.x, e2y = c.y - b.y;
    const double n1 = std::sqrt(e1x * e1x + e1y * e1y);
    const double n2 = std::sqrt(e2x * e2x + e2y * e2y);
    if (n1 == 0.0 || n2 == 0.0) return 0.0;
    // normalize-first formulation (the library divides the dot product once)
    return 1.0 - ((e1x / n1) * (e2x / n2) + (e1y / n1) * (e2y / n2));
}

inline double brute_inter_grid(const warpkit::ControlGrid& g, std::size_t& pair_count) {
    double sum = 0.0;
    std::size_t m = 0;
    for (int r = 0; r < g.rows(); ++r)
        for (int c = 0; c + 2 < g.cols(); ++c) {
            sum += bend(g.at(r, c), g.at(r, c + 1), g.at(r, c + 2));
            ++m;
        }
    for (int c = 0; c < g.cols(); ++c)
        for (int r = 0; r + 2 < g.rows(); ++r) {
            sum += bend(g.at(r, c), g.at(r + 1, c), g.at(r + 2, c));
            ++m;
        }
    pair_count = m;
    return m > 0 ? sum / static_cast<double>(m) : 0.0;
}

// ---------------------------------------------------------------------------
// Reference image metrics: two-loop PSNR and direct (non-separable) 2-D
// windowed structural similarity.
// ---------------------------------------------------------------------------

inline double reference_psnr(const warpkit::ImageBuffer& a, const warpkit::ImageBuffer& b,
                             const warpkit::Mask* mask) {
    double num = 0.0, den = 0.0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            const double w = mask ? static_cast<double>(mask->at(y, x)) : 1.0;
            for (int c = 0; c < a.channels(); ++c) {
                const double d = static_cast<double>(a.at(y, x, c)) - b.at(y, x, c);
                num += w * d * d;
                den += w;
            }
        }
    const double mse = num / den;
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

inline double reference_ssim(const warpkit::ImageBuffer& a, const warpkit::ImageBuffer& b) {
    const int win = 11, rad = 5;
    double taps1[11];
    double tapsum = 0.0;
    for (int i = 0; i < win; ++i) {
        const double d = i - rad;
        taps1[i] = std::exp(-(d * d) / (2.0 * 1.5 * 1.5));
        tapsum += taps1[i];
    }
    for (double& t : taps1) t /= tapsum;
    double taps2[11][11];
    for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) taps2[i][j] = taps1[i] * taps1[j];

    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0.0;
    for (int ch = 0; ch < a.channels(); ++ch) {
        double sum = 0.0;
        std::size_t count = 0;
        for (int cy = rad; cy < a.height() - rad; ++cy)
            for (int cx = rad; cx < a.width() - rad; ++cx) {
                double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
                for (int i = 0; i < win; ++i)
                    for (int j = 0; j < win; ++j) {
                        const double w = taps2[i][j];
                        const double va = a.at(cy + i - rad, cx + j - rad, ch);
                        const double vb = b.at(cy + i - rad, cx + j - rad, ch);
                        ma += w * va;
                        mb += w * vb;
                        maa += w * va * va;
                        mbb += w * vb * vb;
                        mab += w * va * vb;
                    }
                const double va = maa - ma * ma;
                const double vb = mbb - mb * mb;
                const double cov = mab - ma * mb;
                sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                       ((ma * ma + mb * mb + c1) * (va + vb + c2));
                ++count;
            }
        total += sum / static_cast<double>(count);
    }
    return total / a.channels();
}

// ---------------------------------------------------------------------------
// Per-cell bilinear resampling of a lattice displacement field.
// ---------------------------------------------------------------------------

inline warpkit::ControlGrid bilinear_upsample(const warpkit::ControlGrid& g, int new_rows,
                                              int new_cols) {
    const warpkit::ControlGrid base = warpkit::make_regular_grid(g.rows(), g.cols());
    const warpkit::ControlGrid out_base = warpkit::make_regular_grid(new_rows, new_cols);
    std::vector<warpkit::Point2> pts(out_base.points());
    for (int r = 0; r < new_rows; ++r)
        for (int c = 0; c < new_cols; ++c) {
            const double v = static_cast<double>(r) * (g.rows() - 1) / (new_rows - 1);
            const double u = static_cast<double>(c) * (g.cols() - 1) / (new_cols - 1);
            int r0 = static_cast<int>(std::floor(v));
            int c0 = static_cast<int>(std::floor(u));
            if (r0 > g.rows() - 2) r0 = g.rows() - 2;
            if (c0 > g.cols() - 2) c0 = g.cols() - 2;
            const double tv = v - r0, tu = u - c0;
            auto disp = [&](int rr, int cc) {
                return g.at(rr, cc) - base.at(rr, cc);
            };
            const warpkit::Point2 d =
                ((1 - tv) * (1 - tu)) * disp(r0, c0) + ((1 - tv) * tu) * disp(r0, c0 + 1) +
                (tv * (1 - tu)) * disp(r0 + 1, c0) + (tv * tu) * disp(r0 + 1, c0 + 1);
            pts[static_cast<std::size_t>(r) * new_cols + c] =
                out_base.at(r, c) + d;
        }
    return warpkit::ControlGrid(new_rows, new_cols, std::move(pts));
}

} // namespace oracle
