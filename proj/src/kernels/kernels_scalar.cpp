// SPDX-License-Identifier: Apache-2.0
//
// Reference kernels. These are the semantic ground truth; the SIMD variants
// are equivalence-tested against them.
#include "qrn/kernels/kernels.hpp"

namespace qrn::kernels::detail {

void apply_1q_scalar(double* a, std::size_t n_amps, std::size_t mask, const double* m) {
    const double m00r = m[0], m00i = m[1], m01r = m[2], m01i = m[3];
    const double m10r = m[4], m10i = m[5], m11r = m[6], m11i = m[7];
    for (std::size_t base = 0; base < n_amps; base += 2 * mask) {
        for (std::size_t off = 0; off < mask; ++off) {
            const std::size_t i0 = 2 * (base + off);
            const std::size_t i1 = 2 * (base + off + mask);
            const double ar = a[i0], ai = a[i0 + 1];
            const double br = a[i1], bi = a[i1 + 1];
            a[i0] = m00r * ar - m00i * ai + m01r * br - m01i * bi;
            a[i0 + 1] = m00r * ai + m00i * ar + m01r * bi + m01i * br;
            a[i1] = m10r * ar - m10i * ai + m11r * br - m11i * bi;
            a[i1 + 1] = m10r * ai + m10i * ar + m11r * bi + m11i * br;
        }
    }
}

void conv3x3_acc_scalar(const double* in, int h, int w, const double* k, double* out) {
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int dy = 0; dy < 3; ++dy) {
                const int iy = y + dy - 1;
                if (iy < 0 || iy >= h) continue;
                const double* row = in + static_cast<std::size_t>(iy) * w;
                for (int dx = 0; dx < 3; ++dx) {
                    const int ix = x + dx - 1;
                    if (ix < 0 || ix >= w) continue;
                    s += row[ix] * k[dy * 3 + dx];
                }
            }
            out[static_cast<std::size_t>(y) * w + x] += s;
        }
    }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace qrn::kernels::detail
