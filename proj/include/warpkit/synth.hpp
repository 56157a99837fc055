#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "warpkit/classifier.hpp"
#include "warpkit/geometry.hpp"

namespace warpkit {

/// The six distortion families. The enum value is the class label.
enum class DistortionFamily : int {
    Stitched = 0,
    WideAngleRectified = 1,
    RollingShutter = 2,
    Rotated = 3,
    Fisheye = 4,
    Portrait = 5,
};

inline constexpr int kFamilyCount = 6;

/// Stable lowercase name ("stitched", "wide-angle", "rolling-shutter",
/// "rotated", "fisheye", "portrait").
const char* family_name(DistortionFamily family);

/// Inverse of family_name; throws ValueError for an unknown name.
DistortionFamily family_from_name(const std::string& name);

/// One parametric distortion, applied to normalized [-1,1]^2 coordinates.
///
/// Family parameter layouts and legal ranges (zero-strength = identity):
///   stitched        {g}            |g| <= 0.3; projective squeeze
///                                  (x,y) -> (x, y) / (1 + g*x)
///   wide-angle      {p}            0 <= p <= 0.35; square-profile bulge
///                                  q -> q * (1 + p*m^4), m = max(|x|,|y|)
///   rolling-shutter {s}            |s| <= 0.45; row-linear skew
///                                  (x,y) -> (x + s*(y+1)/2, y)
///   rotated         {theta}        |theta| <= pi/4; rigid rotation
///   fisheye         {k1, k2}       0 <= k1 <= 0.2, 0 <= k2, 2*k1 + 4*k2 <= 0.5;
///                                  circular barrel q -> q * (1 + k1*r^2 + k2*r^4)
///   portrait        {a,cx,cy,rho}* 1..4 bumps; 0 <= a <= 0.15, sum of a <= 0.45,
///                                  |cx|,|cy| <= 0.5, 0.2 <= rho <= 0.8;
///                                  q -> q + sum a_k*(q-c_k)*exp(-|q-c_k|^2/rho_k^2)
///
/// The ranges keep every mapped [-1,1]^2 point inside [-1.5,1.5]^2 and every
/// family invertible on the image domain.
struct DistortionSpec {
    DistortionFamily family = DistortionFamily::Fisheye;
    std::vector<double> params;
    std::uint64_t seed = 0;
};

/// Throws ValueError when the family is unknown or the parameters are outside
/// the documented ranges.
void validate_spec(const DistortionSpec& spec);

/// The family's forward map T applied to one normalized point.
Point2 distort_point(const DistortionSpec& spec, Point2 q);

/// The inverse map T^-1 (closed-form where available, otherwise a fixed
/// iteration count of Newton / fixed-point steps, so results are
/// deterministic). distort_point(spec, undistort_point(spec, p)) == p to
/// near machine precision on the image domain.
Point2 undistort_point(const DistortionSpec& spec, Point2 p);

/// The family map applied to the regular rows x cols lattice. The rotated
/// family clamps the mapped points to the unit square (the others stay
/// within their documented budget without clamping).
ControlGrid generate_grid(const DistortionSpec& spec, int rows, int cols);

/// Smooth procedural RGB test image (plaid + soft blobs + gradient),
/// values within [0.02, 0.98], deterministic per seed.
ImageBuffer render_clean_image(int width, int height, std::uint64_t seed);

/// Lattice size of the grid returned by generate_sample.
inline constexpr int kSampleGridSize = 16;

struct SynthSample {
    ImageBuffer clean;      ///< undistorted source image
    ImageBuffer distorted;  ///< clean seen through the family warp
    Mask validity;          ///< where the distorted image sampled inside clean
    ControlGrid grid;       ///< family signature lattice (kSampleGridSize^2)
    FlowField recovery_flow; ///< backward flow warping distorted -> clean
};

/// Renders a full labeled sample: warping `distorted` by `recovery_flow`
/// reproduces `clean` on valid pixels up to interpolation error.
SynthSample generate_sample(const DistortionSpec& spec, int width, int height);

/// Draws family parameters from the documented sampling ranges.
DistortionSpec sample_spec(DistortionFamily family, std::uint64_t seed);

/// Balanced labeled lattice set: count_per_class grids for each of the six
/// families (class-major order), parameters randomized per grid,
/// deterministic per seed.
GridDataset generate_classifier_dataset(int count_per_class, int rows, int cols,
                                        std::uint64_t seed);

} // namespace warpkit
