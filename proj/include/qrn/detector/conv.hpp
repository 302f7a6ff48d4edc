// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "qrn/core/tensor.hpp"

namespace qrn::detector {

enum class Act { none, relu, sigmoid };

/// One same-padded 3x3 convolution layer. Weights are [out][in][3][3]
/// row-major, biases one per output channel.
struct ConvLayer {
    int in_ch = 0;
    int out_ch = 0;
    Act act = Act::none;
    std::vector<double> w;
    std::vector<double> b;

    static ConvLayer zeros(int in_ch, int out_ch, Act act);
    const double* kernel(int co, int ci) const {
        return w.data() + (static_cast<std::size_t>(co) * in_ch + ci) * 9;
    }
    double* kernel(int co, int ci) {
        return w.data() + (static_cast<std::size_t>(co) * in_ch + ci) * 9;
    }
};

struct ConvStack {
    std::vector<ConvLayer> layers;
};

/// Cached activations of one conv_forward pass, for the backward pass.
/// inputs[l] is the input of layer l; inputs[layers.size()] is the final
/// output (post-activation). pre[l] is layer l before its activation.
struct ConvTrace {
    std::vector<FeatureTensor> inputs;
    std::vector<FeatureTensor> pre;
};

struct ConvLayerGrads {
    std::vector<double> dw;
    std::vector<double> db;
};

struct ConvStackGrads {
    std::vector<ConvLayerGrads> layers;
    FeatureTensor d_input;
};

/// Same-padded 3x3 convolutions with per-layer activation; spatial dims are
/// preserved. Throws ArgumentError when channel counts do not chain.
FeatureTensor conv_forward(const FeatureTensor& input, const ConvStack& stack,
                           ConvTrace* trace = nullptr);

/// Analytic gradients given d(loss)/d(output) in post-activation space.
ConvStackGrads conv_backward(const ConvStack& stack, const ConvTrace& trace,
                             const FeatureTensor& d_out);

/// 2x2 average downsample with stride 2 (height and width must be even).
FeatureTensor avg_downsample_2x2(const FeatureTensor& in);
FeatureTensor avg_downsample_2x2_backward(const FeatureTensor& d_out);

/// Same-padded 3x3 convolution with stride 2 (the classical stem).
/// Output dims are ceil(H/2) x ceil(W/2).
FeatureTensor conv3x3_stride2(const FeatureTensor& input, const ConvLayer& layer,
                              FeatureTensor* pre_out = nullptr);

/// Weight/bias gradients of conv3x3_stride2 given d(loss)/d(pre-activation).
ConvLayerGrads conv3x3_stride2_grads(const FeatureTensor& input,
                                     const FeatureTensor& d_pre, const ConvLayer& layer);

/// Elementwise derivative chain: d_post -> d_pre for the given activation,
/// using the cached pre-activation values.
FeatureTensor activation_backward(const FeatureTensor& d_post, const FeatureTensor& pre,
                                  Act act);

}  // namespace qrn::detector
