// SPDX-License-Identifier: Apache-2.0
#include "qrn/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "qrn/core/error.hpp"

namespace qrn::kernels {

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "?";
}

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return detail::avx2_compiled() && __builtin_cpu_supports("avx2") &&
           __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Backend detect_backend() {
    if (const char* env = std::getenv("QRN_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_supported()) return Backend::avx2;
        return Backend::scalar;
    }
    return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend> g_backend{detect_backend()};

}  // namespace

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported())
        throw ArgumentError("avx2 backend not supported on this machine");
    g_backend.store(b, std::memory_order_relaxed);
}

void apply_1q(double* amps, std::size_t n_amps, std::size_t mask, const double* m) {
    if (active_backend() == Backend::avx2)
        detail::apply_1q_avx2(amps, n_amps, mask, m);
    else
        detail::apply_1q_scalar(amps, n_amps, mask, m);
}

void conv3x3_acc(const double* in, int h, int w, const double* k, double* out) {
    if (active_backend() == Backend::avx2)
        detail::conv3x3_acc_avx2(in, h, w, k, out);
    else
        detail::conv3x3_acc_scalar(in, h, w, k, out);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    if (active_backend() == Backend::avx2)
        detail::axpy_avx2(a, x, y, n);
    else
        detail::axpy_scalar(a, x, y, n);
}

}  // namespace qrn::kernels
