// SPDX-License-Identifier: Apache-2.0
#include "qrn/quanv/quanv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qrn/core/error.hpp"

namespace qrn::quanv {

namespace {

const QuanvFilter& checked_filter(const QuanvLayer& layer, int filter_index) {
    if (filter_index < 0 || filter_index >= static_cast<int>(layer.filters.size()))
        throw IndexError("filter index out of range");
    const QuanvFilter& f = layer.filters[filter_index];
    if (f.n_qubits != layer.patch_size * layer.patch_size)
        throw ArgumentError("filter qubit count must equal patch_size^2");
    return f;
}

qsim::Statevector encode_patch(const std::vector<double>& patch, Encoding encoding) {
    for (double v : patch)
        if (!(v >= 0.0 && v <= 1.0))
            throw ArgumentError("patch values must lie in [0, 1]");
    if (encoding == Encoding::basis) {
        std::vector<int> bits(patch.size());
        for (std::size_t i = 0; i < patch.size(); ++i) bits[i] = patch[i] >= 0.5 ? 1 : 0;
        return qsim::encode_bits(bits);
    }
    return qsim::encode_angles(patch);
}

std::vector<double> per_qubit_expectations(const qsim::Statevector& state) {
    std::vector<double> e(state.n_qubits);
    for (int q = 0; q < state.n_qubits; ++q) e[q] = qsim::expectation_z(state, q);
    return e;
}

double pooled_scalar(const std::vector<double>& pooled) {
    if (pooled.size() == 1) return pooled[0];
    return std::accumulate(pooled.begin(), pooled.end(), 0.0) /
           static_cast<double>(pooled.size());
}

}  // namespace

PatchSet extract_patches(const FeatureTensor& image, int patch_size, int stride) {
    if (image.channels != 1) throw ArgumentError("extract_patches: image must be single channel");
    if (patch_size < 1 || stride < 1)
        throw ArgumentError("extract_patches: patch_size and stride must be >= 1");
    if (image.height < patch_size || image.width < patch_size)
        throw ArgumentError("extract_patches: image smaller than patch");
    PatchSet out;
    out.grid_h = (image.height - patch_size) / stride + 1;
    out.grid_w = (image.width - patch_size) / stride + 1;
    out.patches.reserve(static_cast<std::size_t>(out.grid_h) * out.grid_w);
    for (int i = 0; i < out.grid_h; ++i) {
        for (int j = 0; j < out.grid_w; ++j) {
            std::vector<double> p;
            p.reserve(static_cast<std::size_t>(patch_size) * patch_size);
            for (int dy = 0; dy < patch_size; ++dy)
                for (int dx = 0; dx < patch_size; ++dx)
                    p.push_back(image.at(0, i * stride + dy, j * stride + dx));
            out.patches.push_back(std::move(p));
        }
    }
    return out;
}

qsim::Circuit filter_circuit(const QuanvFilter& filter) {
    if (filter.n_qubits < 1) throw ArgumentError("filter needs at least one qubit");
    if (filter.ansatz_layers < 1) throw ArgumentError("filter needs at least one ansatz layer");
    if (filter.params.size() != filter.expected_params())
        throw ArgumentError("filter params length must be ansatz_layers * n_qubits * 2");
    for (double p : filter.params)
        if (!std::isfinite(p)) throw ArgumentError("filter params must be finite");

    const int n = filter.n_qubits;
    qsim::Circuit c;
    c.n_qubits = n;
    for (int l = 0; l < filter.ansatz_layers; ++l) {
        const std::size_t base = static_cast<std::size_t>(l) * n * 2;
        for (int q = 0; q < n; ++q) {
            c.push(qsim::Gate::ry(q, filter.params[base + 2 * q]));
            c.push(qsim::Gate::rz(q, filter.params[base + 2 * q + 1]));
        }
        if (n > 1)
            for (int q = 0; q < n; ++q) c.push(qsim::Gate::cnot(q, (q + 1) % n));
    }
    const qsim::Circuit qft = qsim::qft_circuit(n, 0, n);
    c.ops.insert(c.ops.end(), qft.ops.begin(), qft.ops.end());
    return c;
}

std::vector<double> quantum_pool(const qsim::Statevector& state, Pooling mode) {
    switch (mode) {
        case Pooling::expectation:
            return per_qubit_expectations(state);
        case Pooling::amplitude: {
            // frequency-domain power, then adjacent pairs summed to halve the
            // dimension
            const qsim::Statevector f = qsim::qft(state, 0, state.n_qubits);
            const std::vector<double> p = qsim::probabilities(f);
            std::vector<double> out(p.size() / 2);
            for (std::size_t k = 0; k < out.size(); ++k) out[k] = p[2 * k] + p[2 * k + 1];
            return out;
        }
        case Pooling::max: {
            const auto e = per_qubit_expectations(state);
            return {*std::max_element(e.begin(), e.end())};
        }
        case Pooling::mean: {
            const auto e = per_qubit_expectations(state);
            return {std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size())};
        }
        case Pooling::median: {
            auto e = per_qubit_expectations(state);
            std::sort(e.begin(), e.end());
            const std::size_t n = e.size();
            return {n % 2 == 1 ? e[n / 2] : 0.5 * (e[n / 2 - 1] + e[n / 2])};
        }
    }
    throw ArgumentError("unknown pooling mode");
}

std::vector<double> q_activation(const std::vector<double>& values, Activation kind) {
    for (double v : values)
        if (!std::isfinite(v)) throw ArgumentError("q_activation: inputs must be finite");
    std::vector<double> out(values.size());
    switch (kind) {
        case Activation::none:
            out = values;
            break;
        case Activation::q_relu:
            for (std::size_t i = 0; i < values.size(); ++i) out[i] = std::max(0.0, values[i]);
            break;
        case Activation::q_sigmoid:
            for (std::size_t i = 0; i < values.size(); ++i)
                out[i] = 1.0 / (1.0 + std::exp(-values[i]));
            break;
        case Activation::q_softmax: {
            if (values.empty()) throw ArgumentError("q_softmax: empty input");
            const double m = *std::max_element(values.begin(), values.end());
            double sum = 0.0;
            for (std::size_t i = 0; i < values.size(); ++i) {
                out[i] = std::exp(values[i] - m);
                sum += out[i];
            }
            for (double& v : out) v /= sum;
            break;
        }
    }
    return out;
}

double quanv_forward_preactivation(const std::vector<double>& patch,
                                   const QuanvLayer& layer, int filter_index) {
    const QuanvFilter& filter = checked_filter(layer, filter_index);
    if (patch.size() != static_cast<std::size_t>(layer.patch_size) * layer.patch_size)
        throw ArgumentError("patch length must equal patch_size^2");
    qsim::Statevector state = encode_patch(patch, layer.encoding);
    qsim::apply_circuit_inplace(state, filter_circuit(filter));
    return pooled_scalar(quantum_pool(state, layer.pooling));
}

double quanv_forward(const std::vector<double>& patch, const QuanvLayer& layer,
                     int filter_index) {
    const double s = quanv_forward_preactivation(patch, layer, filter_index);
    if (layer.activation == Activation::none) return s;
    return q_activation({s}, layer.activation)[0];
}

FeatureTensor layer_forward(const FeatureTensor& image, const QuanvLayer& layer) {
    if (layer.filters.empty()) throw ArgumentError("layer_forward: no filters");
    const PatchSet ps = extract_patches(image, layer.patch_size, layer.stride);
    FeatureTensor out(static_cast<int>(layer.filters.size()), ps.grid_h, ps.grid_w);
    for (int c = 0; c < out.channels; ++c) {
        for (int i = 0; i < ps.grid_h; ++i)
            for (int j = 0; j < ps.grid_w; ++j)
                out.at(c, i, j) =
                    quanv_forward(ps.patches[static_cast<std::size_t>(i) * ps.grid_w + j],
                                  layer, c);
    }
    return out;
}

double param_shift_grad(const std::vector<double>& patch, const QuanvLayer& layer,
                        int filter_index, int param_index) {
    if (layer.pooling != Pooling::expectation)
        throw ArgumentError("param_shift_grad requires expectation pooling");
    const QuanvFilter& filter = checked_filter(layer, filter_index);
    if (param_index < 0 || param_index >= static_cast<int>(filter.params.size()))
        throw IndexError("param index out of range");

    QuanvLayer shifted = layer;
    auto eval = [&](double delta) {
        shifted.filters[filter_index].params[param_index] =
            filter.params[param_index] + delta;
        return quanv_forward_preactivation(patch, shifted, filter_index);
    };
    return 0.5 * (eval(M_PI / 2) - eval(-M_PI / 2));
}

}  // namespace qrn::quanv
