// SPDX-License-Identifier: Apache-2.0
#include "qrn/train/model.hpp"

#include <cmath>

#include "json.hpp"
#include "qrn/core/error.hpp"
#include "qrn/core/rng.hpp"

namespace qrn::train {

using nlohmann::json;

namespace {

constexpr double kPriorBias = -4.59511985013459;  // log(0.01 / 0.99)

void fill_uniform(std::vector<double>& v, Rng& rng, double lo, double hi) {
    for (double& x : v) x = rng.uniform(lo, hi);
}

detector::ConvLayer make_conv(int in_ch, int out_ch, detector::Act act, Rng& rng,
                              double out_bias = 0.0) {
    auto l = detector::ConvLayer::zeros(in_ch, out_ch, act);
    fill_uniform(l.w, rng, -0.05, 0.05);
    for (double& b : l.b) b = out_bias;
    return l;
}

detector::ConvStack make_subnet(int in_ch, int width, int out_ch, detector::Act out_act,
                                double out_bias, Rng& rng) {
    detector::ConvStack s;
    s.layers.push_back(make_conv(in_ch, width, detector::Act::relu, rng));
    for (int i = 0; i < 3; ++i)
        s.layers.push_back(make_conv(width, width, detector::Act::relu, rng));
    s.layers.push_back(make_conv(width, out_ch, out_act, rng, out_bias));
    return s;
}

const char* stem_name(StemKind s) { return s == StemKind::quantum ? "quantum" : "classical"; }
const char* encoding_name(quanv::Encoding e) {
    return e == quanv::Encoding::basis ? "basis" : "angle";
}
const char* pooling_name(quanv::Pooling p) {
    switch (p) {
        case quanv::Pooling::expectation: return "expectation";
        case quanv::Pooling::amplitude: return "amplitude";
        case quanv::Pooling::max: return "max";
        case quanv::Pooling::mean: return "mean";
        case quanv::Pooling::median: return "median";
    }
    return "?";
}
const char* activation_name(quanv::Activation a) {
    switch (a) {
        case quanv::Activation::none: return "none";
        case quanv::Activation::q_relu: return "q_relu";
        case quanv::Activation::q_sigmoid: return "q_sigmoid";
        case quanv::Activation::q_softmax: return "q_softmax";
    }
    return "?";
}

StemKind stem_from(const std::string& s) {
    if (s == "quantum") return StemKind::quantum;
    if (s == "classical") return StemKind::classical;
    throw ArgumentError("unknown stem kind '" + s + "'");
}
quanv::Encoding encoding_from(const std::string& s) {
    if (s == "basis") return quanv::Encoding::basis;
    if (s == "angle") return quanv::Encoding::angle;
    throw ArgumentError("unknown encoding '" + s + "'");
}
quanv::Pooling pooling_from(const std::string& s) {
    if (s == "expectation") return quanv::Pooling::expectation;
    if (s == "amplitude") return quanv::Pooling::amplitude;
    if (s == "max") return quanv::Pooling::max;
    if (s == "mean") return quanv::Pooling::mean;
    if (s == "median") return quanv::Pooling::median;
    throw ArgumentError("unknown pooling '" + s + "'");
}
quanv::Activation activation_from(const std::string& s) {
    if (s == "none") return quanv::Activation::none;
    if (s == "q_relu") return quanv::Activation::q_relu;
    if (s == "q_sigmoid") return quanv::Activation::q_sigmoid;
    if (s == "q_softmax") return quanv::Activation::q_softmax;
    throw ArgumentError("unknown activation '" + s + "'");
}

}  // namespace

Model init_model(const ModelConfig& config, std::uint64_t seed) {
    if (config.n_filters < 1) throw ArgumentError("model needs at least one stem filter");
    if (config.image_size % config.level_strides.front() != 0)
        throw ArgumentError("image size must be divisible by the first pyramid stride");
    const int stem_hw =
        (config.image_size - config.patch_size) / config.stride + 1;
    if (stem_hw != config.image_size / config.level_strides.front())
        throw ArgumentError("stem output (" + std::to_string(stem_hw) +
                            ") does not match the first pyramid level grid");

    Model m;
    m.config = config;
    m.init_seed = seed;
    Rng rng(mix_seed(seed, 0xC0FFEE));

    // Quantum filter angles cover the full rotation range; the near-identity
    // +-0.05 head init would make all filters nearly interchangeable.
    m.qstem.patch_size = config.patch_size;
    m.qstem.stride = config.stride;
    m.qstem.encoding = config.encoding;
    m.qstem.pooling = config.pooling;
    m.qstem.activation = config.activation;
    for (int f = 0; f < config.n_filters; ++f) {
        quanv::QuanvFilter filter;
        filter.n_qubits = config.patch_size * config.patch_size;
        filter.ansatz_layers = config.ansatz_layers;
        filter.params.resize(filter.expected_params());
        fill_uniform(filter.params, rng, -M_PI, M_PI);
        m.qstem.filters.push_back(std::move(filter));
    }

    m.cstem = make_conv(1, config.n_filters, detector::Act::relu, rng);

    m.p1_conv.layers.push_back(
        make_conv(config.n_filters, config.pyramid_channels, detector::Act::none, rng));
    m.p2_conv.layers.push_back(
        make_conv(config.pyramid_channels, config.pyramid_channels, detector::Act::none, rng));

    const int A = config.anchors_per_location();
    const int Y = config.n_classes();
    m.cls_subnet = make_subnet(config.pyramid_channels, config.subnet_channels, A * Y,
                               detector::Act::sigmoid, kPriorBias, rng);
    m.box_subnet = make_subnet(config.pyramid_channels, config.subnet_channels, A * 4,
                               detector::Act::none, 0.0, rng);

    m.anchors = detector::generate_anchors(config.image_size, config.level_strides,
                                           config.anchor_scales, config.anchor_ratios);
    return m;
}

std::vector<std::pair<std::string, std::vector<double>*>> param_refs(Model& m) {
    std::vector<std::pair<std::string, std::vector<double>*>> refs;
    if (m.config.stem == StemKind::quantum) {
        for (std::size_t f = 0; f < m.qstem.filters.size(); ++f)
            refs.emplace_back("stem.q.filter" + std::to_string(f) + ".params",
                              &m.qstem.filters[f].params);
    } else {
        refs.emplace_back("stem.c.w", &m.cstem.w);
        refs.emplace_back("stem.c.b", &m.cstem.b);
    }
    refs.emplace_back("pyr.p1.w", &m.p1_conv.layers[0].w);
    refs.emplace_back("pyr.p1.b", &m.p1_conv.layers[0].b);
    refs.emplace_back("pyr.p2.w", &m.p2_conv.layers[0].w);
    refs.emplace_back("pyr.p2.b", &m.p2_conv.layers[0].b);
    for (std::size_t l = 0; l < m.cls_subnet.layers.size(); ++l) {
        refs.emplace_back("cls." + std::to_string(l) + ".w", &m.cls_subnet.layers[l].w);
        refs.emplace_back("cls." + std::to_string(l) + ".b", &m.cls_subnet.layers[l].b);
    }
    for (std::size_t l = 0; l < m.box_subnet.layers.size(); ++l) {
        refs.emplace_back("box." + std::to_string(l) + ".w", &m.box_subnet.layers[l].w);
        refs.emplace_back("box." + std::to_string(l) + ".b", &m.box_subnet.layers[l].b);
    }
    return refs;
}

void Gradients::accumulate(const Gradients& other, double scale) {
    if (by_tensor.empty()) by_tensor.resize(other.by_tensor.size());
    if (by_tensor.size() != other.by_tensor.size())
        throw ArgumentError("gradient shape mismatch");
    for (std::size_t i = 0; i < by_tensor.size(); ++i) {
        if (by_tensor[i].empty()) by_tensor[i].assign(other.by_tensor[i].size(), 0.0);
        for (std::size_t j = 0; j < by_tensor[i].size(); ++j)
            by_tensor[i][j] += scale * other.by_tensor[i][j];
    }
}

std::string config_to_json(const ModelConfig& c) {
    json j;
    j["image_size"] = c.image_size;
    j["stem"] = stem_name(c.stem);
    j["patch_size"] = c.patch_size;
    j["stride"] = c.stride;
    j["n_filters"] = c.n_filters;
    j["ansatz_layers"] = c.ansatz_layers;
    j["encoding"] = encoding_name(c.encoding);
    j["pooling"] = pooling_name(c.pooling);
    j["activation"] = activation_name(c.activation);
    j["pyramid_channels"] = c.pyramid_channels;
    j["subnet_channels"] = c.subnet_channels;
    j["level_strides"] = c.level_strides;
    j["anchor_scales"] = c.anchor_scales;
    j["anchor_ratios"] = c.anchor_ratios;
    j["match_pos_iou"] = c.match_pos_iou;
    j["match_neg_iou"] = c.match_neg_iou;
    j["nms_iou"] = c.nms_iou;
    j["score_floor"] = c.score_floor;
    j["focal_alpha"] = c.focal_alpha;
    j["focal_gamma"] = c.focal_gamma;
    j["smooth_l1_beta"] = c.smooth_l1_beta;
    j["class_names"] = c.class_names;
    return j.dump();
}

ModelConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad config JSON: ") + e.what());
    }
    ModelConfig c;
    try {
        c.image_size = j.at("image_size").get<int>();
        c.stem = stem_from(j.at("stem").get<std::string>());
        c.patch_size = j.at("patch_size").get<int>();
        c.stride = j.at("stride").get<int>();
        c.n_filters = j.at("n_filters").get<int>();
        c.ansatz_layers = j.at("ansatz_layers").get<int>();
        c.encoding = encoding_from(j.at("encoding").get<std::string>());
        c.pooling = pooling_from(j.at("pooling").get<std::string>());
        c.activation = activation_from(j.at("activation").get<std::string>());
        c.pyramid_channels = j.at("pyramid_channels").get<int>();
        c.subnet_channels = j.at("subnet_channels").get<int>();
        c.level_strides = j.at("level_strides").get<std::vector<int>>();
        c.anchor_scales = j.at("anchor_scales").get<std::vector<double>>();
        c.anchor_ratios = j.at("anchor_ratios").get<std::vector<double>>();
        c.match_pos_iou = j.at("match_pos_iou").get<double>();
        c.match_neg_iou = j.at("match_neg_iou").get<double>();
        c.nms_iou = j.at("nms_iou").get<double>();
        c.score_floor = j.at("score_floor").get<double>();
        c.focal_alpha = j.at("focal_alpha").get<double>();
        c.focal_gamma = j.at("focal_gamma").get<double>();
        c.smooth_l1_beta = j.at("smooth_l1_beta").get<double>();
        c.class_names = j.at("class_names").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ArgumentError(std::string("bad config JSON: ") + e.what());
    }
    return c;
}

}  // namespace qrn::train
