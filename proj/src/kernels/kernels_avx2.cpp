// SPDX-License-Identifier: Apache-2.0
//
// AVX2 kernel variants. This translation unit is compiled with -mavx2 -mfma
// on x86-64; elsewhere it degrades to stubs and runtime dispatch never
// selects the avx2 backend.
#include "qrn/kernels/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

namespace qrn::kernels::detail {

bool avx2_compiled() { return true; }

void apply_1q_avx2(double* a, std::size_t n_amps, std::size_t mask, const double* m) {
    if (mask < 2) {
        // adjacent pairs; strided shuffles cost more than they save
        apply_1q_scalar(a, n_amps, mask, m);
        return;
    }
    const __m256d m00r = _mm256_set1_pd(m[0]), m00i = _mm256_set1_pd(m[1]);
    const __m256d m01r = _mm256_set1_pd(m[2]), m01i = _mm256_set1_pd(m[3]);
    const __m256d m10r = _mm256_set1_pd(m[4]), m10i = _mm256_set1_pd(m[5]);
    const __m256d m11r = _mm256_set1_pd(m[6]), m11i = _mm256_set1_pd(m[7]);
    for (std::size_t base = 0; base < n_amps; base += 2 * mask) {
        for (std::size_t off = 0; off < mask; off += 2) {
            double* p0 = a + 2 * (base + off);
            double* p1 = a + 2 * (base + off + mask);
            const __m256d va = _mm256_loadu_pd(p0);  // [ar0 ai0 ar1 ai1]
            const __m256d vb = _mm256_loadu_pd(p1);
            const __m256d sa = _mm256_permute_pd(va, 0x5);  // [ai0 ar0 ai1 ar1]
            const __m256d sb = _mm256_permute_pd(vb, 0x5);
            // even lanes: re = ar*mr - ai*mi, odd lanes: im = ai*mr + ar*mi
            __m256d r0 = _mm256_fmaddsub_pd(va, m00r, _mm256_mul_pd(sa, m00i));
            r0 = _mm256_add_pd(r0, _mm256_fmaddsub_pd(vb, m01r, _mm256_mul_pd(sb, m01i)));
            __m256d r1 = _mm256_fmaddsub_pd(va, m10r, _mm256_mul_pd(sa, m10i));
            r1 = _mm256_add_pd(r1, _mm256_fmaddsub_pd(vb, m11r, _mm256_mul_pd(sb, m11i)));
            _mm256_storeu_pd(p0, r0);
            _mm256_storeu_pd(p1, r1);
        }
    }
}

void conv3x3_acc_avx2(const double* in, int h, int w, const double* k, double* out) {
    if (w < 6) {
        conv3x3_acc_scalar(in, h, w, k, out);
        return;
    }
    __m256d kv[9];
    for (int t = 0; t < 9; ++t) kv[t] = _mm256_set1_pd(k[t]);
    for (int y = 0; y < h; ++y) {
        double* orow = out + static_cast<std::size_t>(y) * w;
        auto scalar_at = [&](int x) {
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
            orow[x] += s;
        };
        scalar_at(0);
        int x = 1;
        const int xend = w - 1;
        for (; x + 4 <= xend; x += 4) {
            __m256d acc = _mm256_loadu_pd(orow + x);
            for (int dy = 0; dy < 3; ++dy) {
                const int iy = y + dy - 1;
                if (iy < 0 || iy >= h) continue;
                const double* irow = in + static_cast<std::size_t>(iy) * w + x - 1;
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(irow), kv[dy * 3], acc);
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(irow + 1), kv[dy * 3 + 1], acc);
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(irow + 2), kv[dy * 3 + 2], acc);
            }
            _mm256_storeu_pd(orow + x, acc);
        }
        for (; x < xend; ++x) scalar_at(x);
        scalar_at(w - 1);
    }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace qrn::kernels::detail

#else  // no AVX2 codegen in this build

namespace qrn::kernels::detail {

bool avx2_compiled() { return false; }

void apply_1q_avx2(double* a, std::size_t n_amps, std::size_t mask, const double* m) {
    apply_1q_scalar(a, n_amps, mask, m);
}
void conv3x3_acc_avx2(const double* in, int h, int w, const double* k, double* out) {
    conv3x3_acc_scalar(in, h, w, k, out);
}
void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
    axpy_scalar(a, x, y, n);
}

}  // namespace qrn::kernels::detail

#endif
