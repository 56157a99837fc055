#include "warpkit/tps.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "warpkit/errors.hpp"

namespace warpkit {

TpsTransform::TpsTransform(std::array<std::array<double, 3>, 2> affine,
                           std::vector<Point2> weights,
                           std::vector<Point2> centers,
                           double regularization)
    : affine_(affine),
      weights_(std::move(weights)),
      centers_(std::move(centers)),
      regularization_(regularization) {
    if (weights_.size() != centers_.size())
        throw DimensionError("weight count != center count");
    if (regularization_ < 0.0) throw ValueError("regularization must be >= 0");
    for (const auto& row : affine_)
        for (double v : row)
            if (!std::isfinite(v)) throw ValueError("affine part contains a non-finite entry");

    double sw_x = 0.0, sw_y = 0.0, smx_x = 0.0, smx_y = 0.0, smy_x = 0.0, smy_y = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const Point2 w = weights_[i];
        const Point2 c = centers_[i];
        if (!std::isfinite(w.x) || !std::isfinite(w.y) || !std::isfinite(c.x) || !std::isfinite(c.y))
            throw ValueError("transform contains a non-finite entry");
        sw_x += w.x;
        sw_y += w.y;
        smx_x += w.x * c.x;
        smx_y += w.y * c.x;
        smy_x += w.x * c.y;
        smy_y += w.y * c.y;
    }
    const double worst = std::max({std::abs(sw_x), std::abs(sw_y), std::abs(smx_x),
                                   std::abs(smx_y), std::abs(smy_x), std::abs(smy_y)});
    if (worst > 1e-8)
        throw ValueError("TPS side conditions violated by " + std::to_string(worst));
}

TpsTransform TpsTransform::identity() { return TpsTransform(); }

double radial_basis(double r) {
    if (r <= 0.0) return 0.0;
    return r * r * std::log(r);
}

namespace {

double kernel_between(Point2 a, Point2 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return radial_basis(std::sqrt(dx * dx + dy * dy));
}

} // namespace

TpsTransform solve_tps(const ControlGrid& source, const ControlGrid& target, double reg) {
    const int n = source.point_count();
    if (n != target.point_count())
        throw DimensionError("source and target control point counts differ: " +
                             std::to_string(n) + " vs " + std::to_string(target.point_count()));
    if (reg < 0.0) throw ValueError("regularization must be >= 0");

    const std::vector<Point2>& centers = source.points();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double dx = centers[i].x - centers[j].x;
            const double dy = centers[i].y - centers[j].y;
            if (dx * dx + dy * dy < 1e-24)
                throw SingularSystemError("coincident control points at indices " +
                                          std::to_string(i) + " and " + std::to_string(j));
        }
    }

    // The bordered system is solvable exactly when the affine side block
    // [1, x, y] has full column rank; collinear centers lose that rank while
    // keeping the kernel block healthy enough to fool a condition estimate.
    Eigen::MatrixXd side(n, 3);
    for (int i = 0; i < n; ++i) {
        side(i, 0) = 1.0;
        side(i, 1) = centers[i].x;
        side(i, 2) = centers[i].y;
    }
    if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(side).rank() < 3)
        throw SingularSystemError("TPS system is singular (collinear or degenerate centers)");

    // Block system on displacements: identity input stays exactly identity.
    const int m = n + 3;
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m, m);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, 2);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) sys(i, j) = kernel_between(centers[i], centers[j]);
        sys(i, i) += reg;
        sys(i, n + 0) = sys(n + 0, i) = 1.0;
        sys(i, n + 1) = sys(n + 1, i) = centers[i].x;
        sys(i, n + 2) = sys(n + 2, i) = centers[i].y;
        rhs(i, 0) = target.points()[i].x - centers[i].x;
        rhs(i, 1) = target.points()[i].y - centers[i].y;
    }

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys);
    if (!(lu.rcond() > 1e-14))
        throw SingularSystemError("TPS system is singular (collinear or degenerate centers)");

    Eigen::MatrixXd sol = lu.solve(rhs);
    // One step of iterative refinement tightens the center residuals.
    sol += lu.solve(rhs - sys * sol);
    if (!sol.allFinite())
        throw SingularSystemError("TPS system is singular (collinear or degenerate centers)");

    std::vector<Point2> weights(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) weights[i] = {sol(i, 0), sol(i, 1)};

    std::array<std::array<double, 3>, 2> affine{};
    affine[0] = {1.0 + sol(n + 1, 0), sol(n + 2, 0), sol(n + 0, 0)};
    affine[1] = {sol(n + 1, 1), 1.0 + sol(n + 2, 1), sol(n + 0, 1)};

    return TpsTransform(affine, std::move(weights), centers, reg);
}

Point2 eval_tps(const TpsTransform& t, Point2 p) {
    const auto& a = t.affine();
    double x = a[0][0] * p.x + a[0][1] * p.y + a[0][2];
    double y = a[1][0] * p.x + a[1][1] * p.y + a[1][2];
    const std::vector<Point2>& centers = t.centers();
    const std::vector<Point2>& weights = t.weights();
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double u = kernel_between(centers[i], p);
        x += u * weights[i].x;
        y += u * weights[i].y;
    }
    return {x, y};
}

std::vector<Point2> eval_tps(const TpsTransform& t, const std::vector<Point2>& pts) {
    std::vector<Point2> out;
    out.reserve(pts.size());
    for (const Point2& p : pts) out.push_back(eval_tps(t, p));
    return out;
}

} // namespace warpkit
