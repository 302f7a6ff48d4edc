// SPDX-License-Identifier: Apache-2.0
#include "qrn/detector/conv.hpp"

#include <cmath>

#include "qrn/core/error.hpp"
#include "qrn/kernels/kernels.hpp"

namespace qrn::detector {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void apply_activation(FeatureTensor& t, Act act) {
    switch (act) {
        case Act::none: return;
        case Act::relu:
            for (double& v : t.values) v = v > 0.0 ? v : 0.0;
            return;
        case Act::sigmoid:
            for (double& v : t.values) v = sigmoid(v);
            return;
    }
}

void check_layer(const ConvLayer& l) {
    if (l.in_ch <= 0 || l.out_ch <= 0) throw ArgumentError("conv layer channels must be positive");
    if (l.w.size() != static_cast<std::size_t>(l.out_ch) * l.in_ch * 9 ||
        l.b.size() != static_cast<std::size_t>(l.out_ch))
        throw ArgumentError("conv layer weight shape mismatch");
}

FeatureTensor layer_forward(const FeatureTensor& in, const ConvLayer& l) {
    FeatureTensor out(l.out_ch, in.height, in.width);
    const std::size_t plane = static_cast<std::size_t>(in.height) * in.width;
    for (int co = 0; co < l.out_ch; ++co) {
        double* oc = out.channel(co);
        const double bias = l.b[co];
        for (std::size_t i = 0; i < plane; ++i) oc[i] = bias;
        for (int ci = 0; ci < l.in_ch; ++ci)
            kernels::conv3x3_acc(in.channel(ci), in.height, in.width, l.kernel(co, ci), oc);
    }
    return out;
}

}  // namespace

ConvLayer ConvLayer::zeros(int in_ch, int out_ch, Act act) {
    ConvLayer l;
    l.in_ch = in_ch;
    l.out_ch = out_ch;
    l.act = act;
    l.w.assign(static_cast<std::size_t>(out_ch) * in_ch * 9, 0.0);
    l.b.assign(out_ch, 0.0);
    return l;
}

FeatureTensor conv_forward(const FeatureTensor& input, const ConvStack& stack,
                           ConvTrace* trace) {
    if (stack.layers.empty()) throw ArgumentError("conv_forward: empty stack");
    if (input.channels != stack.layers.front().in_ch)
        throw ArgumentError("conv_forward: input channels (" + std::to_string(input.channels) +
                            ") do not match first layer (" +
                            std::to_string(stack.layers.front().in_ch) + ")");
    for (std::size_t l = 0; l + 1 < stack.layers.size(); ++l)
        if (stack.layers[l].out_ch != stack.layers[l + 1].in_ch)
            throw ArgumentError("conv_forward: layer channel chain mismatch at layer " +
                                std::to_string(l));

    if (trace) {
        trace->inputs.clear();
        trace->pre.clear();
        trace->inputs.push_back(input);
    }
    FeatureTensor cur = input;
    for (const ConvLayer& l : stack.layers) {
        check_layer(l);
        FeatureTensor pre = layer_forward(cur, l);
        if (trace) trace->pre.push_back(pre);
        apply_activation(pre, l.act);
        cur = std::move(pre);
        if (trace) trace->inputs.push_back(cur);
    }
    return cur;
}

FeatureTensor activation_backward(const FeatureTensor& d_post, const FeatureTensor& pre,
                                  Act act) {
    FeatureTensor d_pre = d_post;
    switch (act) {
        case Act::none: break;
        case Act::relu:
            for (std::size_t i = 0; i < d_pre.values.size(); ++i)
                if (pre.values[i] <= 0.0) d_pre.values[i] = 0.0;
            break;
        case Act::sigmoid:
            for (std::size_t i = 0; i < d_pre.values.size(); ++i) {
                const double s = sigmoid(pre.values[i]);
                d_pre.values[i] *= s * (1.0 - s);
            }
            break;
    }
    return d_pre;
}

ConvStackGrads conv_backward(const ConvStack& stack, const ConvTrace& trace,
                             const FeatureTensor& d_out) {
    const std::size_t n_layers = stack.layers.size();
    if (trace.inputs.size() != n_layers + 1 || trace.pre.size() != n_layers)
        throw ArgumentError("conv_backward: trace does not match stack");
    ConvStackGrads grads;
    grads.layers.resize(n_layers);

    FeatureTensor d_cur = d_out;
    for (std::size_t li = n_layers; li-- > 0;) {
        const ConvLayer& l = stack.layers[li];
        const FeatureTensor& in = trace.inputs[li];
        const int h = in.height, w = in.width;

        FeatureTensor d_pre = activation_backward(d_cur, trace.pre[li], l.act);

        ConvLayerGrads& lg = grads.layers[li];
        lg.dw.assign(l.w.size(), 0.0);
        lg.db.assign(l.b.size(), 0.0);
        FeatureTensor d_in(l.in_ch, h, w);

        for (int co = 0; co < l.out_ch; ++co) {
            const double* dp = d_pre.channel(co);
            double db = 0.0;
            for (std::size_t i = 0; i < static_cast<std::size_t>(h) * w; ++i) db += dp[i];
            lg.db[co] = db;

            for (int ci = 0; ci < l.in_ch; ++ci) {
                // dW: valid correlation of input with d_pre at each tap offset
                const double* ic = in.channel(ci);
                double* dk = lg.dw.data() + (static_cast<std::size_t>(co) * l.in_ch + ci) * 9;
                for (int dy = 0; dy < 3; ++dy) {
                    for (int dx = 0; dx < 3; ++dx) {
                        double s = 0.0;
                        const int y0 = std::max(0, 1 - dy), y1 = std::min(h, h + 1 - dy);
                        const int x0 = std::max(0, 1 - dx), x1 = std::min(w, w + 1 - dx);
                        for (int y = y0; y < y1; ++y) {
                            const double* drow = dp + static_cast<std::size_t>(y) * w;
                            const double* irow =
                                ic + static_cast<std::size_t>(y + dy - 1) * w + (dx - 1);
                            for (int x = x0; x < x1; ++x) s += drow[x] * irow[x];
                        }
                        dk[dy * 3 + dx] = s;
                    }
                }
                // dX: convolution of d_pre with the 180-degree flipped kernel
                const double* kk = l.kernel(co, ci);
                double kf[9];
                for (int t = 0; t < 9; ++t) kf[t] = kk[8 - t];
                kernels::conv3x3_acc(dp, h, w, kf, d_in.channel(ci));
            }
        }
        d_cur = std::move(d_in);
    }
    grads.d_input = std::move(d_cur);
    return grads;
}

FeatureTensor avg_downsample_2x2(const FeatureTensor& in) {
    if (in.height % 2 != 0 || in.width % 2 != 0)
        throw ArgumentError("avg_downsample_2x2: dims must be even");
    FeatureTensor out(in.channels, in.height / 2, in.width / 2);
    for (int c = 0; c < in.channels; ++c)
        for (int y = 0; y < out.height; ++y)
            for (int x = 0; x < out.width; ++x)
                out.at(c, y, x) = 0.25 * (in.at(c, 2 * y, 2 * x) + in.at(c, 2 * y, 2 * x + 1) +
                                          in.at(c, 2 * y + 1, 2 * x) +
                                          in.at(c, 2 * y + 1, 2 * x + 1));
    return out;
}

FeatureTensor avg_downsample_2x2_backward(const FeatureTensor& d_out) {
    FeatureTensor d_in(d_out.channels, d_out.height * 2, d_out.width * 2);
    for (int c = 0; c < d_out.channels; ++c)
        for (int y = 0; y < d_out.height; ++y)
            for (int x = 0; x < d_out.width; ++x) {
                const double g = 0.25 * d_out.at(c, y, x);
                d_in.at(c, 2 * y, 2 * x) = g;
                d_in.at(c, 2 * y, 2 * x + 1) = g;
                d_in.at(c, 2 * y + 1, 2 * x) = g;
                d_in.at(c, 2 * y + 1, 2 * x + 1) = g;
            }
    return d_in;
}

FeatureTensor conv3x3_stride2(const FeatureTensor& input, const ConvLayer& layer,
                              FeatureTensor* pre_out) {
    check_layer(layer);
    if (input.channels != layer.in_ch) throw ArgumentError("conv3x3_stride2: channel mismatch");
    const int oh = (input.height + 1) / 2, ow = (input.width + 1) / 2;
    FeatureTensor out(layer.out_ch, oh, ow);
    for (int co = 0; co < layer.out_ch; ++co) {
        for (int y = 0; y < oh; ++y) {
            for (int x = 0; x < ow; ++x) {
                double s = layer.b[co];
                for (int ci = 0; ci < layer.in_ch; ++ci) {
                    const double* k = layer.kernel(co, ci);
                    for (int dy = 0; dy < 3; ++dy) {
                        const int iy = 2 * y + dy - 1;
                        if (iy < 0 || iy >= input.height) continue;
                        for (int dx = 0; dx < 3; ++dx) {
                            const int ix = 2 * x + dx - 1;
                            if (ix < 0 || ix >= input.width) continue;
                            s += input.at(ci, iy, ix) * k[dy * 3 + dx];
                        }
                    }
                }
                out.at(co, y, x) = s;
            }
        }
    }
    if (pre_out) *pre_out = out;
    apply_activation(out, layer.act);
    return out;
}

ConvLayerGrads conv3x3_stride2_grads(const FeatureTensor& input, const FeatureTensor& d_pre,
                                     const ConvLayer& layer) {
    ConvLayerGrads g;
    g.dw.assign(layer.w.size(), 0.0);
    g.db.assign(layer.b.size(), 0.0);
    for (int co = 0; co < layer.out_ch; ++co) {
        for (int y = 0; y < d_pre.height; ++y) {
            for (int x = 0; x < d_pre.width; ++x) {
                const double d = d_pre.at(co, y, x);
                g.db[co] += d;
                for (int ci = 0; ci < layer.in_ch; ++ci) {
                    double* dk = g.dw.data() + (static_cast<std::size_t>(co) * layer.in_ch + ci) * 9;
                    for (int dy = 0; dy < 3; ++dy) {
                        const int iy = 2 * y + dy - 1;
                        if (iy < 0 || iy >= input.height) continue;
                        for (int dx = 0; dx < 3; ++dx) {
                            const int ix = 2 * x + dx - 1;
                            if (ix < 0 || ix >= input.width) continue;
                            dk[dy * 3 + dx] += d * input.at(ci, iy, ix);
                        }
                    }
                }
            }
        }
    }
    return g;
}

}  // namespace qrn::detector
