// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

namespace qrn::kernels {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);

/// True when this build carries AVX2 code paths and the CPU supports them.
bool avx2_supported();

/// Backend used by the dispatching entry points below. Detected once at
/// startup (QRN_SIMD=scalar|avx2 overrides detection).
Backend active_backend();

/// Force a backend, mainly for equivalence tests. Throws ArgumentError if the
/// requested backend is unsupported on this machine.
void set_backend(Backend b);

// ---------------------------------------------------------------------------
// Kernel entry points. Each dispatches to the active backend; the per-backend
// implementations are exposed under detail:: so tests can compare them.
// ---------------------------------------------------------------------------

/// Applies a 2x2 complex matrix to amplitude pairs (i, i | mask) of an
/// interleaved re/im array of n_amps complex numbers. mask is the index bit
/// of the target qubit. m holds the row-major matrix as
/// [re00, im00, re01, im01, re10, im10, re11, im11].
void apply_1q(double* amps, std::size_t n_amps, std::size_t mask, const double* m);

/// out[y][x] += sum_{dy,dx} in[y+dy-1][x+dx-1] * k[dy*3+dx], zero padded.
/// One (input channel, output channel) pair of a same-padded 3x3 convolution.
void conv3x3_acc(const double* in, int h, int w, const double* k, double* out);

/// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

namespace detail {
void apply_1q_scalar(double* amps, std::size_t n_amps, std::size_t mask, const double* m);
void apply_1q_avx2(double* amps, std::size_t n_amps, std::size_t mask, const double* m);
void conv3x3_acc_scalar(const double* in, int h, int w, const double* k, double* out);
void conv3x3_acc_avx2(const double* in, int h, int w, const double* k, double* out);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
/// True when the avx2 TU was compiled with AVX2 codegen.
bool avx2_compiled();
}  // namespace detail

}  // namespace qrn::kernels
