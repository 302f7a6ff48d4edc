// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>

#include "qrn/core/error.hpp"
#include "qrn/core/parallel.hpp"
#include "qrn/core/rng.hpp"
#include "qrn/kernels/kernels.hpp"
#include "qrn/metrics/metrics.hpp"
#include "qrn/train/model.hpp"

namespace qrn::train {

namespace {

using detector::ConvTrace;

double act_scalar(double s, quanv::Activation a) {
    if (a == quanv::Activation::none) return s;
    return quanv::q_activation({s}, a)[0];
}

double act_deriv(double s, quanv::Activation a) {
    switch (a) {
        case quanv::Activation::none: return 1.0;
        case quanv::Activation::q_relu: return s > 0.0 ? 1.0 : 0.0;
        case quanv::Activation::q_sigmoid: {
            const double v = 1.0 / (1.0 + std::exp(-s));
            return v * (1.0 - v);
        }
        case quanv::Activation::q_softmax: return 0.0;  // constant 1 on a singleton
    }
    return 0.0;
}

struct HeadTrace {
    FeatureTensor stem_out;
    FeatureTensor cstem_pre;     // classical stem pre-activation
    quanv::PatchSet patches;     // quantum stem inputs
    std::vector<double> q_pre;   // quantum stem pooled pre-activations, filter-major
    detector::PyramidTrace pyr_trace;
    detector::Pyramid pyr;
    std::vector<ConvTrace> cls_traces;
    std::vector<ConvTrace> box_traces;
    std::vector<FeatureTensor> cls_maps;
    std::vector<FeatureTensor> box_maps;
};

FeatureTensor stem_forward(const Model& m, const FeatureTensor& image, HeadTrace* tr) {
    if (image.channels != 1 || image.height != m.config.image_size ||
        image.width != m.config.image_size)
        throw ArgumentError("forward: image shape does not match model configuration");

    if (m.config.stem == StemKind::classical) {
        FeatureTensor pre;
        FeatureTensor out = detector::conv3x3_stride2(image, m.cstem, &pre);
        if (tr) tr->cstem_pre = std::move(pre);
        return out;
    }

    const auto& layer = m.qstem;
    quanv::PatchSet ps = quanv::extract_patches(image, layer.patch_size, layer.stride);
    const int n_filters = static_cast<int>(layer.filters.size());
    FeatureTensor out(n_filters, ps.grid_h, ps.grid_w);
    const std::size_t n_patches = ps.patches.size();
    std::vector<double> pre(static_cast<std::size_t>(n_filters) * n_patches);
    for (int c = 0; c < n_filters; ++c) {
        for (std::size_t p = 0; p < n_patches; ++p) {
            const double s = quanv::quanv_forward_preactivation(ps.patches[p], layer, c);
            pre[c * n_patches + p] = s;
            out.values[c * n_patches + p] = act_scalar(s, layer.activation);
        }
    }
    if (tr) {
        tr->patches = std::move(ps);
        tr->q_pre = std::move(pre);
    }
    return out;
}

ForwardResult assemble(const Model& m, const std::vector<FeatureTensor>& cls_maps,
                       const std::vector<FeatureTensor>& box_maps) {
    const int A = m.config.anchors_per_location();
    const int Y = m.config.n_classes();
    ForwardResult fr;
    fr.scores.resize(m.anchors.anchors.size() * Y);
    fr.offsets.resize(m.anchors.anchors.size());
    for (std::size_t l = 0; l < m.anchors.levels.size(); ++l) {
        const auto& lv = m.anchors.levels[l];
        for (int i = 0; i < lv.h; ++i) {
            for (int j = 0; j < lv.w; ++j) {
                for (int a = 0; a < A; ++a) {
                    const std::size_t idx = lv.offset + (static_cast<std::size_t>(i) * lv.w + j) * A + a;
                    for (int c = 0; c < Y; ++c)
                        fr.scores[idx * Y + c] = cls_maps[l].at(a * Y + c, i, j);
                    for (int k = 0; k < 4; ++k)
                        fr.offsets[idx][k] = box_maps[l].at(a * 4 + k, i, j);
                }
            }
        }
    }
    return fr;
}

ForwardResult forward_full(const Model& m, const FeatureTensor& image, HeadTrace* tr) {
    HeadTrace local;
    HeadTrace* t = tr ? tr : &local;

    t->stem_out = stem_forward(m, image, t);
    t->pyr = detector::build_pyramid(t->stem_out, m.p1_conv, m.p2_conv, &t->pyr_trace);

    const int A = m.config.anchors_per_location();
    const int Y = m.config.n_classes();
    t->cls_traces.resize(2);
    t->box_traces.resize(2);
    t->cls_maps.clear();
    t->box_maps.clear();
    const FeatureTensor* levels[2] = {&t->pyr.p1, &t->pyr.p2};
    for (int l = 0; l < 2; ++l) {
        t->cls_maps.push_back(
            detector::class_subnet(*levels[l], m.cls_subnet, A, Y, &t->cls_traces[l]));
        t->box_maps.push_back(
            detector::box_subnet(*levels[l], m.box_subnet, A, &t->box_traces[l]));
    }
    return assemble(m, t->cls_maps, t->box_maps);
}

struct LossGrads {
    LossBreakdown loss;
    std::vector<FeatureTensor> d_cls;  // per level, post-activation space
    std::vector<FeatureTensor> d_box;
};

LossGrads compute_loss(const Model& m, const ForwardResult& fr,
                       const std::vector<detector::AnchorMatch>& matches,
                       const std::vector<detector::GroundTruth>& truths, bool want_grads,
                       const HeadTrace* tr) {
    const int A = m.config.anchors_per_location();
    const int Y = m.config.n_classes();
    const auto& cfg = m.config;

    LossGrads out;
    int n_pos = 0;
    for (const auto& mm : matches)
        if (mm.kind == detector::MatchKind::positive) ++n_pos;
    const double norm = std::max(1, n_pos);

    if (want_grads) {
        for (int l = 0; l < 2; ++l) {
            out.d_cls.emplace_back(tr->cls_maps[l].channels, tr->cls_maps[l].height,
                                   tr->cls_maps[l].width);
            out.d_box.emplace_back(tr->box_maps[l].channels, tr->box_maps[l].height,
                                   tr->box_maps[l].width);
        }
    }

    double cls_loss = 0.0, box_loss = 0.0;
    for (std::size_t l = 0; l < m.anchors.levels.size(); ++l) {
        const auto& lv = m.anchors.levels[l];
        for (int i = 0; i < lv.h; ++i) {
            for (int j = 0; j < lv.w; ++j) {
                for (int a = 0; a < A; ++a) {
                    const std::size_t idx =
                        lv.offset + (static_cast<std::size_t>(i) * lv.w + j) * A + a;
                    const auto& match = matches[idx];
                    if (match.kind == detector::MatchKind::ignore) continue;
                    const bool positive = match.kind == detector::MatchKind::positive;
                    const int truth_cls = positive ? truths[match.truth_index].class_index : -1;
                    for (int c = 0; c < Y; ++c) {
                        const bool is_pos = positive && truth_cls == c;
                        const double score = fr.scores[idx * Y + c];
                        cls_loss += detector::focal_loss(score, is_pos, cfg.focal_alpha,
                                                         cfg.focal_gamma);
                        if (want_grads)
                            out.d_cls[l].at(a * Y + c, i, j) =
                                detector::focal_loss_grad(score, is_pos, cfg.focal_alpha,
                                                          cfg.focal_gamma) /
                                norm;
                    }
                    if (positive) {
                        const auto target = detector::encode_box(
                            m.anchors.anchors[idx], truths[match.truth_index].box);
                        for (int k = 0; k < 4; ++k) {
                            const double pred = fr.offsets[idx][k];
                            box_loss +=
                                detector::smooth_l1(pred, target[k], cfg.smooth_l1_beta);
                            if (want_grads)
                                out.d_box[l].at(a * 4 + k, i, j) =
                                    detector::smooth_l1_grad(pred, target[k],
                                                             cfg.smooth_l1_beta) /
                                    norm;
                        }
                    }
                }
            }
        }
    }
    out.loss.cls = cls_loss / norm;
    out.loss.box = box_loss / norm;
    out.loss.total = out.loss.cls + out.loss.box;
    out.loss.n_positive = n_pos;
    return out;
}

void add_into(FeatureTensor& dst, const FeatureTensor& src) {
    kernels::axpy(1.0, src.values.data(), dst.values.data(), dst.values.size());
}

/// Gradient tensor layout matching param_refs order.
struct GradLayout {
    int stem_tensors = 0;
    int p_base = 0;
    int cls_base = 0;
    int box_base = 0;
    int total = 0;
};

GradLayout layout_of(const Model& m) {
    GradLayout L;
    L.stem_tensors = m.config.stem == StemKind::quantum ? m.config.n_filters : 2;
    L.p_base = L.stem_tensors;
    L.cls_base = L.p_base + 4;
    L.box_base = L.cls_base + 10;
    L.total = L.box_base + 10;
    return L;
}

Gradients sample_gradients(const Model& m, const data::Sample& sample, double* loss_out) {
    const auto matches = detector::match_anchors(m.anchors, sample.truths,
                                                 m.config.match_pos_iou, m.config.match_neg_iou);
    HeadTrace tr;
    const ForwardResult fr = forward_full(m, sample.image, &tr);
    LossGrads lg = compute_loss(m, fr, matches, sample.truths, true, &tr);
    *loss_out = lg.loss.total;

    const GradLayout L = layout_of(m);
    Gradients g;
    g.by_tensor.resize(L.total);

    // subnets are shared across levels: accumulate their gradients
    FeatureTensor d_levels[2];
    std::vector<std::vector<double>> cls_dw(5), cls_db(5), box_dw(5), box_db(5);
    for (int l = 0; l < 2; ++l) {
        auto g_cls = detector::conv_backward(m.cls_subnet, tr.cls_traces[l], lg.d_cls[l]);
        auto g_box = detector::conv_backward(m.box_subnet, tr.box_traces[l], lg.d_box[l]);
        for (int li = 0; li < 5; ++li) {
            if (cls_dw[li].empty()) {
                cls_dw[li] = std::move(g_cls.layers[li].dw);
                cls_db[li] = std::move(g_cls.layers[li].db);
                box_dw[li] = std::move(g_box.layers[li].dw);
                box_db[li] = std::move(g_box.layers[li].db);
            } else {
                kernels::axpy(1.0, g_cls.layers[li].dw.data(), cls_dw[li].data(), cls_dw[li].size());
                kernels::axpy(1.0, g_cls.layers[li].db.data(), cls_db[li].data(), cls_db[li].size());
                kernels::axpy(1.0, g_box.layers[li].dw.data(), box_dw[li].data(), box_dw[li].size());
                kernels::axpy(1.0, g_box.layers[li].db.data(), box_db[li].data(), box_db[li].size());
            }
        }
        d_levels[l] = std::move(g_cls.d_input);
        add_into(d_levels[l], g_box.d_input);
    }
    for (int li = 0; li < 5; ++li) {
        g.by_tensor[L.cls_base + 2 * li] = std::move(cls_dw[li]);
        g.by_tensor[L.cls_base + 2 * li + 1] = std::move(cls_db[li]);
        g.by_tensor[L.box_base + 2 * li] = std::move(box_dw[li]);
        g.by_tensor[L.box_base + 2 * li + 1] = std::move(box_db[li]);
    }

    auto g_p2 = detector::conv_backward(m.p2_conv, tr.pyr_trace.p2, d_levels[1]);
    g.by_tensor[L.p_base + 2] = std::move(g_p2.layers[0].dw);
    g.by_tensor[L.p_base + 3] = std::move(g_p2.layers[0].db);
    add_into(d_levels[0], detector::avg_downsample_2x2_backward(g_p2.d_input));

    auto g_p1 = detector::conv_backward(m.p1_conv, tr.pyr_trace.p1, d_levels[0]);
    g.by_tensor[L.p_base + 0] = std::move(g_p1.layers[0].dw);
    g.by_tensor[L.p_base + 1] = std::move(g_p1.layers[0].db);
    const FeatureTensor& d_stem = g_p1.d_input;

    if (m.config.stem == StemKind::classical) {
        const FeatureTensor d_pre =
            detector::activation_backward(d_stem, tr.cstem_pre, m.cstem.act);
        auto sg = detector::conv3x3_stride2_grads(sample.image, d_pre, m.cstem);
        g.by_tensor[0] = std::move(sg.dw);
        g.by_tensor[1] = std::move(sg.db);
    } else {
        const std::size_t n_patches = tr.patches.patches.size();
        for (int f = 0; f < m.config.n_filters; ++f) {
            auto& gf = g.by_tensor[f];
            gf.assign(m.qstem.filters[f].params.size(), 0.0);
            for (std::size_t p = 0; p < n_patches; ++p) {
                const double pre = tr.q_pre[f * n_patches + p];
                const double coeff =
                    d_stem.values[f * n_patches + p] * act_deriv(pre, m.qstem.activation);
                if (coeff == 0.0) continue;
                for (std::size_t k = 0; k < gf.size(); ++k)
                    gf[k] += coeff * quanv::param_shift_grad(tr.patches.patches[p], m.qstem,
                                                             f, static_cast<int>(k));
            }
        }
    }
    return g;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = n; i > 1; --i)
        std::swap(idx[i - 1], idx[rng.uniform_int(0, static_cast<std::int64_t>(i) - 1)]);
    return idx;
}

}  // namespace

ForwardResult forward(const Model& model, const FeatureTensor& image) {
    return forward_full(model, image, nullptr);
}

LossBreakdown sample_loss(const Model& model, const data::Sample& sample) {
    const auto matches = detector::match_anchors(model.anchors, sample.truths,
                                                 model.config.match_pos_iou,
                                                 model.config.match_neg_iou);
    HeadTrace tr;
    const ForwardResult fr = forward_full(model, sample.image, &tr);
    return compute_loss(model, fr, matches, sample.truths, false, &tr).loss;
}

BackwardResult backward(const Model& model, const std::vector<data::Sample>& batch) {
    if (batch.empty()) throw ArgumentError("backward: empty batch");
    std::vector<Gradients> per_sample(batch.size());
    std::vector<double> losses(batch.size());
    parallel_for(batch.size(), [&](std::size_t i) {
        per_sample[i] = sample_gradients(model, batch[i], &losses[i]);
    });

    BackwardResult out;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (!std::isfinite(losses[i]))
            throw DivergenceError("non-finite loss", i);
        out.grads.accumulate(per_sample[i], 1.0);
        out.mean_loss += losses[i];
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (auto& t : out.grads.by_tensor)
        for (double& v : t) v *= inv;
    out.mean_loss *= inv;
    return out;
}

std::vector<detector::Detection> infer(const Model& model, const FeatureTensor& image) {
    const ForwardResult fr = forward(model, image);
    const int Y = model.config.n_classes();
    const double S = model.config.image_size;
    std::vector<detector::Detection> dets;
    for (std::size_t a = 0; a < model.anchors.anchors.size(); ++a) {
        for (int c = 0; c < Y; ++c) {
            const double score = fr.scores[a * Y + c];
            if (score < model.config.score_floor) continue;
            detector::Box b = detector::decode_box(model.anchors.anchors[a], fr.offsets[a]);
            b.x0 = std::clamp(b.x0, 0.0, S);
            b.x1 = std::clamp(b.x1, 0.0, S);
            b.y0 = std::clamp(b.y0, 0.0, S);
            b.y1 = std::clamp(b.y1, 0.0, S);
            if (b.x1 - b.x0 <= 0.0 || b.y1 - b.y0 <= 0.0) continue;
            dets.push_back({b, c, score});
        }
    }
    auto kept = detector::nms(dets, model.config.nms_iou, model.config.score_floor);
    std::stable_sort(kept.begin(), kept.end(),
                     [](const detector::Detection& l, const detector::Detection& r) {
                         if (l.score != r.score) return l.score > r.score;
                         if (l.class_index != r.class_index) return l.class_index < r.class_index;
                         return l.box.area() < r.box.area();
                     });
    return kept;
}

double bridge_accuracy(const Model& model, const std::vector<data::Sample>& samples) {
    if (samples.empty()) return 0.0;
    std::vector<metrics::ImageEval> evals(samples.size());
    parallel_for(samples.size(), [&](std::size_t i) {
        evals[i].detections = infer(model, samples[i].image);
        evals[i].truths = samples[i].truths;
    });
    return metrics::evaluate(evals, model.config.n_classes()).accuracy;
}

FitResult fit(Model model, const std::vector<data::Sample>& dataset, const TrainConfig& cfg) {
    if (dataset.empty()) throw ArgumentError("fit: empty dataset");
    if (cfg.batch_size < 1) throw ArgumentError("fit: batch_size must be >= 1");
    if (cfg.learning_rate < 0.0) throw ArgumentError("fit: learning rate must be >= 0");
    if (cfg.epochs < 1) throw ArgumentError("fit: epochs must be >= 1");

    // 80/20 split by seeded shuffle
    Rng split_rng(mix_seed(cfg.seed, 0x517A));
    auto order = shuffled_indices(dataset.size(), split_rng);
    const std::size_t n_eval = dataset.size() / 5;
    const std::size_t n_train = dataset.size() - n_eval;
    std::vector<data::Sample> train_set, eval_set;
    for (std::size_t i = 0; i < n_train; ++i) train_set.push_back(dataset[order[i]]);
    for (std::size_t i = n_train; i < dataset.size(); ++i) eval_set.push_back(dataset[order[i]]);

    FitResult result;
    auto refs = param_refs(model);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng epoch_rng(mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(epoch)));
        auto epoch_order = shuffled_indices(train_set.size(), epoch_rng);
        double loss_sum = 0.0;
        std::size_t pos = 0;
        while (pos < epoch_order.size()) {
            const std::size_t take =
                std::min<std::size_t>(cfg.batch_size, epoch_order.size() - pos);
            std::vector<data::Sample> batch;
            batch.reserve(take);
            for (std::size_t k = 0; k < take; ++k)
                batch.push_back(train_set[epoch_order[pos + k]]);
            pos += take;
            BackwardResult br;
            try {
                br = backward(model, batch);
            } catch (const DivergenceError& e) {
                throw DivergenceError(
                    "training diverged in epoch " + std::to_string(epoch) + ": " + e.what(),
                    e.sample_index());
            }
            for (std::size_t t = 0; t < refs.size(); ++t)
                kernels::axpy(-cfg.learning_rate, br.grads.by_tensor[t].data(),
                              refs[t].second->data(), refs[t].second->size());
            loss_sum += br.mean_loss * static_cast<double>(take);
        }
        EpochLog log;
        log.epoch = epoch;
        log.mean_loss = loss_sum / static_cast<double>(train_set.size());
        log.eval_accuracy = bridge_accuracy(model, eval_set);
        result.log.push_back(log);
    }
    result.model = std::move(model);
    return result;
}

}  // namespace qrn::train
