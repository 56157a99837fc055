#include "warpkit/prompt.hpp"

#include <cmath>
#include <string>

#include "warpkit/errors.hpp"

namespace warpkit {

PromptBank::PromptBank(std::vector<FeatureMap> prompts) : prompts_(std::move(prompts)) {
    if (prompts_.empty()) throw DimensionError("prompt bank must not be empty");
    const FeatureMap& first = prompts_.front();
    for (const FeatureMap& p : prompts_) {
        if (p.height() != first.height() || p.width() != first.width() ||
            p.channels() != first.channels())
            throw DimensionError("all prompts must share one shape");
    }
}

ChannelProjection::ChannelProjection(int in_channels, int out_channels,
                                     std::vector<double> weight, std::vector<double> bias)
    : in_channels_(in_channels), out_channels_(out_channels), weight_(std::move(weight)),
      bias_(std::move(bias)) {
    if (in_channels < 1 || out_channels < 1)
        throw DimensionError("projection channel counts must be positive");
    if (weight_.size() != static_cast<std::size_t>(in_channels) * out_channels)
        throw DimensionError("projection weight length != out_channels*in_channels");
    if (bias_.size() != static_cast<std::size_t>(out_channels))
        throw DimensionError("projection bias length != out_channels");
    for (double v : weight_)
        if (!std::isfinite(v)) throw ValueError("projection weight must be finite");
    for (double v : bias_)
        if (!std::isfinite(v)) throw ValueError("projection bias must be finite");
}

FeatureMap blend_prompts(const PromptBank& bank, const TaskLabel& label) {
    if (label.size() != bank.size())
        throw DimensionError("label length " + std::to_string(label.size()) +
                             " != prompt count " + std::to_string(bank.size()));

    // Exact one-hot labels select the prompt without any arithmetic, so the
    // result is bitwise the stored tensor.
    int hot = -1;
    bool one_hot = true;
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (label[i] == 1.0 && hot < 0) {
            hot = static_cast<int>(i);
        } else if (label[i] != 0.0) {
            one_hot = false;
            break;
        }
    }
    if (one_hot && hot >= 0) return bank.prompt(static_cast<std::size_t>(hot));

    const FeatureMap& first = bank.prompt(0);
    FeatureMap out(first.height(), first.width(), first.channels());
    for (std::size_t i = 0; i < bank.size(); ++i) {
        const double phi = label[i];
        const std::vector<double>& src = bank.prompt(i).data();
        std::vector<double>& dst = out.data();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += phi * src[k];
    }
    return out;
}

FeatureMap modulate(const FeatureMap& features, const PromptBank& bank, const TaskLabel& label,
                    const ChannelProjection& proj) {
    const FeatureMap blended = blend_prompts(bank, label);
    if (blended.height() != features.height() || blended.width() != features.width())
        throw DimensionError("prompt spatial size must equal the feature map's");
    const int cf = features.channels();
    const int cp = blended.channels();
    if (proj.in_channels() != cf + cp)
        throw DimensionError("projection input width " + std::to_string(proj.in_channels()) +
                             " != feature+prompt channels " + std::to_string(cf + cp));

    FeatureMap out(features.height(), features.width(), proj.out_channels());
    std::vector<double> concat(static_cast<std::size_t>(cf) + cp);
    for (int y = 0; y < features.height(); ++y) {
        for (int x = 0; x < features.width(); ++x) {
            for (int c = 0; c < cf; ++c) concat[static_cast<std::size_t>(c)] = features.at(y, x, c);
            for (int c = 0; c < cp; ++c)
                concat[static_cast<std::size_t>(cf) + c] = blended.at(y, x, c);
            for (int o = 0; o < proj.out_channels(); ++o) {
                const double* row =
                    proj.weight().data() + static_cast<std::size_t>(o) * proj.in_channels();
                double acc = proj.bias()[static_cast<std::size_t>(o)];
                for (int i = 0; i < proj.in_channels(); ++i) acc += row[i] * concat[static_cast<std::size_t>(i)];
                out.at(y, x, o) = acc;
            }
        }
    }
    return out;
}

} // namespace warpkit
