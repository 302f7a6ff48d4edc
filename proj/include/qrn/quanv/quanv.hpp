// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "qrn/core/tensor.hpp"
#include "qrn/qsim/qsim.hpp"

namespace qrn::quanv {

enum class Encoding { basis, angle };
enum class Pooling { expectation, amplitude, max, mean, median };
enum class Activation { none, q_relu, q_sigmoid, q_softmax };

/**
 * @brief One parameterized filter circuit.
 *
 * params holds ansatz_layers * n_qubits * 2 angles, ordered layer-major then
 * qubit-major with the RY angle before the RZ angle:
 * params[l * 2n + 2q] is RY on qubit q in layer l, params[l * 2n + 2q + 1] RZ.
 */
struct QuanvFilter {
    int n_qubits = 4;
    int ansatz_layers = 1;
    std::vector<double> params;

    std::size_t expected_params() const {
        return static_cast<std::size_t>(ansatz_layers) * n_qubits * 2;
    }
};

/// Quanvolution layer configuration: sliding-window geometry plus the
/// encoding/pooling/activation choices applied around each filter circuit.
struct QuanvLayer {
    int patch_size = 2;
    int stride = 2;
    std::vector<QuanvFilter> filters;
    Encoding encoding = Encoding::angle;
    Pooling pooling = Pooling::expectation;
    Activation activation = Activation::none;
};

struct PatchSet {
    std::vector<std::vector<double>> patches;  // row-major patch order, row-major pixels
    int grid_h = 0;
    int grid_w = 0;
};

/// Sliding-window extraction from a single-channel image. Output grid dims
/// are (floor((H-p)/stride)+1, floor((W-p)/stride)+1); trailing rows/columns
/// that do not fit are dropped.
PatchSet extract_patches(const FeatureTensor& image, int patch_size, int stride);

/// Per ansatz layer: RY and RZ on every qubit, then a CNOT ring (qubit i
/// controls qubit (i+1) mod n; omitted for n = 1), followed by one QFT over
/// all qubits as the convolutional mixing step.
qsim::Circuit filter_circuit(const QuanvFilter& filter);

/// Pooling decode of a post-circuit state.
///  - expectation: per-qubit Z expectations (length n)
///  - amplitude:   squared magnitudes after a QFT, adjacent pairs summed
///                 (length 2^n / 2)
///  - max/mean/median: that statistic of the per-qubit Z expectations
///                 (length 1)
std::vector<double> quantum_pool(const qsim::Statevector& state, Pooling mode);

/// Classical nonlinearity applied to measured values.
std::vector<double> q_activation(const std::vector<double>& values, Activation kind);

/// Pooled scalar for one (patch, filter) pair before the activation:
/// encode -> filter circuit -> pooling decode -> mean reduction.
double quanv_forward_preactivation(const std::vector<double>& patch,
                                   const QuanvLayer& layer, int filter_index);

/// Full forward value for one (patch, filter) pair: activation applied to the
/// pooled scalar. Channel c of a quanvolution output map comes from filter c.
double quanv_forward(const std::vector<double>& patch, const QuanvLayer& layer,
                     int filter_index);

/// Whole-image quanvolution: output channel count equals the filter count,
/// spatial dims follow extract_patches.
FeatureTensor layer_forward(const FeatureTensor& image, const QuanvLayer& layer);

/// Parameter-shift gradient of quanv_forward_preactivation with respect to
/// one rotation angle: [f(t + pi/2) - f(t - pi/2)] / 2. Exact for the RY/RZ
/// generated expectations used here. Requires expectation pooling; the
/// activation chain rule is the caller's job.
double param_shift_grad(const std::vector<double>& patch, const QuanvLayer& layer,
                        int filter_index, int param_index);

}  // namespace qrn::quanv
