#pragma once

#include <string>

#include "warpkit/classifier.hpp"
#include "warpkit/geometry.hpp"
#include "warpkit/prompt.hpp"
#include "warpkit/tps.hpp"

namespace warpkit {

/// Images: PNG (.png) and NetPBM (.pgm, .ppm, .pnm; P2/P3/P5/P6). The reader
/// sniffs the format from the file contents; the writer picks it from the
/// extension. Samples are stored as 8- or 16-bit integers (value = round
/// (sample * maxval)), so float images quantize on write; data that came
/// from an integer image round-trips bitwise.
ImageBuffer read_image(const std::string& path);
void write_image(const std::string& path, const ImageBuffer& image, int bit_depth = 8);

/// Lattice file: JSON {version, rows, cols, convention, points: [x0, y0,
/// x1, y1, ...]} with full double precision.
ControlGrid read_grid(const std::string& path);
void write_grid(const std::string& path, const ControlGrid& grid);

/// Dense flow: binary; magic "WFLO", little-endian u32 width and height,
/// then row-major interleaved (dx, dy) 32-bit little-endian floats.
/// Doubles are narrowed to 32 bits on write; 32-bit-representable values
/// round-trip bitwise.
FlowField read_flow(const std::string& path);
void write_flow(const std::string& path, const FlowField& flow);

/// Fitted spline: JSON {version, affine, centers, weights, regularization}.
TpsTransform read_transform(const std::string& path);
void write_transform(const std::string& path, const TpsTransform& t);

/// Classifier parameters: JSON {version, pointwise_dims, head_dims,
/// global_dim, seed, pointwise: [layer...], head: [layer...]} with each
/// layer {in, out, weight, bias}.
ClassifierParams read_classifier(const std::string& path);
void write_classifier(const std::string& path, const ClassifierParams& params);

/// Prompt bank: JSON {version, height, width, channels, prompts: [flat...]}.
PromptBank read_prompt_bank(const std::string& path);
void write_prompt_bank(const std::string& path, const PromptBank& bank);

/// Labeled-lattice dataset directory: index.json {version, entries:
/// [{grid: relative file name, label}]} next to the grid files.
GridDataset read_dataset_dir(const std::string& dir);
void write_dataset_dir(const std::string& dir, const GridDataset& dataset);

} // namespace warpkit
