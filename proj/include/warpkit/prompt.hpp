#pragma once

#include <vector>

#include "warpkit/classifier.hpp"
#include "warpkit/geometry.hpp"

namespace warpkit {

/// A set of learnable task prompts, all sharing one tensor shape.
class PromptBank {
public:
    PromptBank() = default;
    explicit PromptBank(std::vector<FeatureMap> prompts);

    const std::vector<FeatureMap>& prompts() const { return prompts_; }
    std::size_t size() const { return prompts_.size(); }
    const FeatureMap& prompt(std::size_t i) const { return prompts_[i]; }

private:
    std::vector<FeatureMap> prompts_;
};

/// Pointwise linear channel mixer applied independently at every spatial
/// location: out = weight * in + bias, weight row-major (out x in).
class ChannelProjection {
public:
    ChannelProjection() = default;
    ChannelProjection(int in_channels, int out_channels, std::vector<double> weight,
                      std::vector<double> bias);

    int in_channels() const { return in_channels_; }
    int out_channels() const { return out_channels_; }
    const std::vector<double>& weight() const { return weight_; }
    const std::vector<double>& bias() const { return bias_; }

private:
    int in_channels_ = 0;
    int out_channels_ = 0;
    std::vector<double> weight_;
    std::vector<double> bias_;
};

/// Convex combination of the bank's prompts weighted by the soft label.
/// A one-hot label returns that prompt bitwise; identical prompts come back
/// unchanged for any valid label. The label length must equal the bank size.
FeatureMap blend_prompts(const PromptBank& bank, const TaskLabel& label);

/// Concatenates the blended prompt onto the features along the channel axis
/// and mixes the channels with the projection at every location. Spatial
/// dimensions are unchanged; output channels = projection out_channels.
/// The projection input width must equal feature channels + prompt channels.
FeatureMap modulate(const FeatureMap& features, const PromptBank& bank, const TaskLabel& label,
                    const ChannelProjection& proj);

} // namespace warpkit
