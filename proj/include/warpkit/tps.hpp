#pragma once

#include <array>
#include <vector>

#include "warpkit/geometry.hpp"

namespace warpkit {

/// Fitted thin-plate-spline deformation
///
///   T(q) = A [q; 1] + sum_i U(|center_i - q|) w_i
///
/// with U(r) = r^2 log r. Weights satisfy the side conditions
/// sum w_i = 0, sum w_i x_i = 0, sum w_i y_i = 0, which keep the bending
/// energy square-integrable.
class TpsTransform {
public:
    TpsTransform() = default;
    TpsTransform(std::array<std::array<double, 3>, 2> affine,
                 std::vector<Point2> weights,
                 std::vector<Point2> centers,
                 double regularization);

    const std::array<std::array<double, 3>, 2>& affine() const { return affine_; }
    const std::vector<Point2>& weights() const { return weights_; }
    const std::vector<Point2>& centers() const { return centers_; }
    double regularization() const { return regularization_; }

    static TpsTransform identity();

private:
    std::array<std::array<double, 3>, 2> affine_{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}};
    std::vector<Point2> weights_;
    std::vector<Point2> centers_;
    double regularization_ = 0.0;
};

/// TPS radial kernel r^2 log r, with the removable singularity pinned to 0.
double radial_basis(double r);

/// Fits the spline interpolating target_i at source_i by solving the standard
/// block system [[K + reg I, P], [P^T, 0]] [w; a] = [d; 0] on the
/// displacements d = target - source. Centers are the source points.
/// With reg = 0 the fit is exactly interpolating.
/// Throws SingularSystemError when the system is not solvable
/// (coincident or collinear centers) and DimensionError on count mismatch.
TpsTransform solve_tps(const ControlGrid& source, const ControlGrid& target, double reg = 0.0);

/// Applies the deformation to each input point.
std::vector<Point2> eval_tps(const TpsTransform& t, const std::vector<Point2>& pts);
Point2 eval_tps(const TpsTransform& t, Point2 p);

} // namespace warpkit
