// warpkit: command-line front end for the warping engine.
//
// Subcommands: solve, warp, classify, train-classifier, synth, eval.
// Every failure exits nonzero with a single line "error: <category>: ...".
// WARP_THREADS caps the worker threads of the per-pixel loops; outputs are
// bitwise identical for any setting.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "warpkit/classifier.hpp"
#include "warpkit/errors.hpp"
#include "warpkit/flow.hpp"
#include "warpkit/geometry.hpp"
#include "warpkit/io.hpp"
#include "warpkit/metrics.hpp"
#include "warpkit/rng.hpp"
#include "warpkit/synth.hpp"
#include "warpkit/tps.hpp"

namespace {

struct Size2 {
    int width = 0;
    int height = 0;
};

Size2 parse_size(const std::string& text) {
    Size2 s;
    char extra;
    if (std::sscanf(text.c_str(), "%dx%d%c", &s.width, &s.height, &extra) != 2 || s.width < 1 ||
        s.height < 1)
        throw warpkit::ValueError("size must look like 256x256, got '" + text + "'");
    return s;
}

std::vector<double> parse_params(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t used = 0;
        out.push_back(std::stod(text.substr(pos), &used));
        pos += used;
        if (pos < text.size()) {
            if (text[pos] != ',')
                throw warpkit::ValueError("parameters must be comma-separated numbers");
            ++pos;
        }
    }
    if (out.empty()) throw warpkit::ValueError("empty parameter list");
    return out;
}

std::string sidecar_mask_path(const std::string& out_path) {
    const std::filesystem::path p(out_path);
    std::filesystem::path side = p.parent_path() / p.stem();
    side += ".mask";
    side += p.extension();
    return side.string();
}

void write_mask_image(const std::string& path, const warpkit::Mask& mask) {
    warpkit::ImageBuffer img(mask.width(), mask.height(), 1,
                             std::vector<float>(mask.data()));
    warpkit::write_image(path, img);
}

int run_solve(const std::string& in, const std::string& grid, double reg,
              const std::string& out) {
    const warpkit::ControlGrid source = warpkit::read_grid(in);
    const warpkit::ControlGrid target = warpkit::read_grid(grid);
    const warpkit::TpsTransform t = warpkit::solve_tps(source, target, reg);
    double residual = 0.0;
    for (int i = 0; i < source.point_count(); ++i) {
        const warpkit::Point2 mapped = warpkit::eval_tps(t, source.points()[i]);
        residual = std::max(residual, std::abs(mapped.x - target.points()[i].x));
        residual = std::max(residual, std::abs(mapped.y - target.points()[i].y));
    }
    warpkit::write_transform(out, t);
    std::printf("residual max: %.6e\n", residual);
    std::printf("transform written to %s\n", out.c_str());
    return 0;
}

int run_warp(const std::string& in, const std::string& grid, const std::string& flow_path,
             const std::string& residual, const std::string& size_text,
             const std::string& mask_path, const std::string& out) {
    if (grid.empty() == flow_path.empty())
        throw warpkit::ValueError("give exactly one of --grid or --flow");
    const warpkit::ImageBuffer src = warpkit::read_image(in);

    warpkit::FlowField flow =
        grid.empty() ? warpkit::read_flow(flow_path)
                     : warpkit::densify(warpkit::read_grid(grid), src.width(), src.height());
    if (!residual.empty()) flow = warpkit::compose_flow(flow, warpkit::read_flow(residual));
    if (!size_text.empty()) {
        const Size2 size = parse_size(size_text);
        flow = warpkit::scale_flow(flow, size.width, size.height);
    }

    std::optional<warpkit::Mask> mask;
    if (!mask_path.empty()) {
        const warpkit::ImageBuffer m = warpkit::read_image(mask_path);
        if (m.channels() != 1)
            throw warpkit::ValueError("the mask image must be single-channel");
        if (m.width() != src.width() || m.height() != src.height())
            throw warpkit::DimensionError("mask size does not match the input image");
        mask.emplace(m.width(), m.height(), std::vector<float>(m.data()));
    }

    const warpkit::WarpResult result =
        warpkit::warp_image(src, flow, mask ? &*mask : nullptr);
    warpkit::write_image(out, result.image);
    const std::string side = sidecar_mask_path(out);
    write_mask_image(side, result.validity);
    std::printf("warped image written to %s\n", out.c_str());
    std::printf("validity mask written to %s\n", side.c_str());
    return 0;
}

int run_classify(const std::string& grid, const std::string& params_path) {
    const warpkit::ControlGrid points = warpkit::read_grid(grid);
    const warpkit::ClassifierParams params = warpkit::read_classifier(params_path);
    const warpkit::ForwardResult r = warpkit::classifier_forward(params, points);
    const int cls = warpkit::predict_task(params, points);
    if (r.label.size() == static_cast<std::size_t>(warpkit::kFamilyCount)) {
        std::printf("class: %d (%s)\n", cls,
                    warpkit::family_name(static_cast<warpkit::DistortionFamily>(cls)));
    } else {
        std::printf("class: %d\n", cls);
    }
    std::printf("phi:");
    for (std::size_t i = 0; i < r.label.size(); ++i) std::printf(" %.6f", r.label[i]);
    std::printf("\n");
    return 0;
}

int run_train(const std::string& dataset_dir, int epochs, double lr, int batch,
              std::uint64_t seed, double holdout_fraction, const std::string& out) {
    warpkit::GridDataset all = warpkit::read_dataset_dir(dataset_dir);
    if (all.empty()) throw warpkit::ValueError("dataset directory has no samples");
    if (holdout_fraction < 0.0 || holdout_fraction >= 1.0)
        throw warpkit::ValueError("--holdout must be in [0, 1)");

    std::vector<std::size_t> order(all.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    warpkit::shuffle_deterministic(order, rng);
    const std::size_t holdout_count =
        static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(all.size())));
    warpkit::GridDataset holdout, train;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < holdout_count ? holdout : train).push_back(all[order[i]]);

    warpkit::TrainConfig tcfg;
    tcfg.epochs = epochs;
    tcfg.learning_rate = lr;
    tcfg.batch_size = batch;
    tcfg.seed = seed;
    const warpkit::TrainResult result =
        warpkit::train_classifier(train, holdout, warpkit::ClassifierConfig{}, tcfg);

    for (std::size_t e = 0; e < result.history.size(); ++e) {
        const warpkit::EpochStats& st = result.history[e];
        if (st.holdout_accuracy) {
            std::printf("epoch %zu: loss %.6f, holdout accuracy %.2f%%\n", e + 1, st.mean_loss,
                        100.0 * *st.holdout_accuracy);
        } else {
            std::printf("epoch %zu: loss %.6f\n", e + 1, st.mean_loss);
        }
    }
    if (!result.history.empty() && result.history.back().holdout_accuracy)
        std::printf("final holdout accuracy: %.2f%%\n",
                    100.0 * *result.history.back().holdout_accuracy);
    warpkit::write_classifier(out, result.params);
    std::printf("parameters written to %s (%zu trainable values)\n", out.c_str(),
                warpkit::count_parameters(result.params));
    return 0;
}

int run_synth(const std::string& family, const std::string& params_text,
              const std::string& size_text, std::uint64_t seed, int count_per_class,
              const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    if (family == "all") {
        Size2 lattice{8, 8};
        if (!size_text.empty()) lattice = parse_size(size_text);
        const warpkit::GridDataset dataset = warpkit::generate_classifier_dataset(
            count_per_class, lattice.height, lattice.width, seed);
        warpkit::write_dataset_dir(out_dir, dataset);
        std::printf("wrote %zu labeled grids to %s\n", dataset.size(), out_dir.c_str());
        return 0;
    }

    warpkit::DistortionSpec spec;
    if (params_text.empty()) {
        spec = warpkit::sample_spec(warpkit::family_from_name(family), seed);
    } else {
        spec.family = warpkit::family_from_name(family);
        spec.params = parse_params(params_text);
        spec.seed = seed;
        warpkit::validate_spec(spec);
    }
    Size2 size{256, 256};
    if (!size_text.empty()) size = parse_size(size_text);

    const warpkit::SynthSample sample = warpkit::generate_sample(spec, size.width, size.height);
    const std::filesystem::path base(out_dir);
    warpkit::write_image((base / "clean.png").string(), sample.clean);
    warpkit::write_image((base / "distorted.png").string(), sample.distorted);
    write_mask_image((base / "mask.png").string(), sample.validity);
    warpkit::write_grid((base / "grid.json").string(), sample.grid);
    warpkit::write_flow((base / "flow.wflo").string(), sample.recovery_flow);
    std::printf("wrote sample files to %s\n", out_dir.c_str());
    return 0;
}

int run_eval(const std::string& in, const std::string& gt_path, const std::string& mask_path) {
    const warpkit::ImageBuffer pred = warpkit::read_image(in);
    const warpkit::ImageBuffer gt = warpkit::read_image(gt_path);
    std::optional<warpkit::Mask> mask;
    if (!mask_path.empty()) {
        const warpkit::ImageBuffer m = warpkit::read_image(mask_path);
        if (m.channels() != 1)
            throw warpkit::ValueError("the mask image must be single-channel");
        mask.emplace(m.width(), m.height(), std::vector<float>(m.data()));
    }
    const double p = warpkit::psnr(pred, gt, mask ? &*mask : nullptr);
    if (std::isinf(p)) {
        std::printf("PSNR: inf dB\n");
    } else {
        std::printf("PSNR: %.6f dB\n", p);
    }
    std::printf("SSIM: %.6f\n", warpkit::ssim(pred, gt));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thin-plate-spline image warping toolkit"};
    app.require_subcommand(1);

    std::string in, out, grid, flow, residual, size, mask, params, family, dataset_dir, gt;
    double reg = 0.0, lr = 0.05, holdout = 0.0;
    int epochs = 30, batch = 16, count_per_class = 1;
    std::uint64_t seed = 1;

    CLI::App* solve = app.add_subcommand("solve", "fit a spline mapping one lattice onto another");
    solve->add_option("--in", in, "source lattice (JSON grid)")->required();
    solve->add_option("--grid", grid, "target lattice (JSON grid)")->required();
    solve->add_option("--reg", reg, "kernel regularization (default 0: exact interpolation)");
    solve->add_option("--out", out, "output transform JSON")->required();

    CLI::App* warp = app.add_subcommand("warp", "warp an image by a lattice or a flow");
    warp->add_option("--in", in, "input image")->required();
    warp->add_option("--grid", grid, "deformed lattice (JSON grid)");
    warp->add_option("--flow", flow, "dense flow file");
    warp->add_option("--residual", residual, "extra flow added to the main one");
    warp->add_option("--size", size, "output size WxH (default: flow size)");
    warp->add_option("--mask", mask, "validity mask of the input image");
    warp->add_option("--out", out, "output image; a .mask sidecar is written next to it")
        ->required();

    CLI::App* classify = app.add_subcommand("classify", "predict the distortion family of a lattice");
    classify->add_option("--grid", grid, "lattice to classify (JSON grid)")->required();
    classify->add_option("--params", params, "classifier parameter file")->required();

    CLI::App* train = app.add_subcommand("train-classifier", "fit the lattice classifier");
    train->add_option("--dataset-dir", dataset_dir, "directory with index.json + grids")->required();
    train->add_option("--epochs", epochs, "training epochs (default 30)");
    train->add_option("--lr", lr, "learning rate (default 0.05)");
    train->add_option("--batch", batch, "minibatch size (default 16)");
    train->add_option("--seed", seed, "initialization/shuffle seed (default 1)");
    train->add_option("--holdout", holdout, "fraction held out for accuracy reporting (default 0)");
    train->add_option("--out", out, "output parameter JSON")->required();

    CLI::App* synth = app.add_subcommand("synth", "generate synthetic distortion data");
    synth->add_option("--family", family,
                      "stitched | wide-angle | rolling-shutter | rotated | fisheye | portrait | all")
        ->required();
    synth->add_option("--params", params, "explicit family parameters, comma-separated");
    synth->add_option("--size", size, "image size WxH (sample mode, default 256x256) or lattice "
                                      "size (all mode, default 8x8)");
    synth->add_option("--seed", seed, "generator seed (default 1)");
    synth->add_option("--count-per-class", count_per_class, "grids per family in all mode");
    synth->add_option("--out-dir", out, "output directory")->required();

    CLI::App* eval = app.add_subcommand("eval", "compare two images");
    eval->add_option("--in", in, "image under test")->required();
    eval->add_option("--gt", gt, "reference image")->required();
    eval->add_option("--mask", mask, "optional weighting mask for the error average");

    try {
        app.parse(argc, argv);
        if (solve->parsed()) return run_solve(in, grid, reg, out);
        if (warp->parsed()) return run_warp(in, grid, flow, residual, size, mask, out);
        if (classify->parsed()) return run_classify(grid, params);
        if (train->parsed())
            return run_train(dataset_dir, epochs, lr, batch, seed, holdout, out);
        if (synth->parsed()) return run_synth(family, params, size, seed, count_per_class, out);
        if (eval->parsed()) return run_eval(in, gt, mask);
        throw warpkit::ValueError("no subcommand selected");
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: usage: " << e.what() << "\n";
        return 2;
    } catch (const warpkit::Error& e) {
        std::cerr << "error: " << e.category() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 1;
    }
}
