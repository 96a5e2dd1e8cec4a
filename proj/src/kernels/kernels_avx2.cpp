#ifdef TGVC_HAVE_AVX2

#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

// Elementwise kernels must round exactly like the scalar reference: plain
// mul/add per lane, no FMA. This file is compiled with -ffp-contract=off.

namespace tgvc::kernels::detail {

std::uint64_t sad_u8_avx2(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        acc = _mm256_add_epi64(acc, _mm256_sad_epu8(va, vb));
    }
    std::uint64_t total = 0;
    total += static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 0));
    total += static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 1));
    total += static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 2));
    total += static_cast<std::uint64_t>(_mm256_extract_epi64(acc, 3));
    for (; i < n; ++i) {
        int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
        total += static_cast<std::uint64_t>(d < 0 ? -d : d);
    }
    return total;
}

double l1_f64_avx2(const double* a, const double* b, std::size_t n) {
    const __m256d signmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_and_pd(signmask, _mm256_sub_pd(va, vb)));
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double total = ((lanes[0] + lanes[1]) + lanes[2]) + lanes[3];
    for (; i < n; ++i) total += std::fabs(a[i] - b[i]);
    return total;
}

void axpy_f64_avx2(double* y, double a, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, vx));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void lincomb_f64_avx2(double* out, double c1, const double* x, double c2, const double* y,
                      std::size_t n) {
    const __m256d v1 = _mm256_set1_pd(c1);
    const __m256d v2 = _mm256_set1_pd(c2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_mul_pd(v1, _mm256_loadu_pd(x + i));
        __m256d vy = _mm256_mul_pd(v2, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(out + i, _mm256_add_pd(vx, vy));
    }
    for (; i < n; ++i) out[i] = c1 * x[i] + c2 * y[i];
}

void scale_sub_f64_avx2(double* out, const double* z, double c1, const double* e, double c2,
                        std::size_t n) {
    const __m256d v1 = _mm256_set1_pd(c1);
    const __m256d v2 = _mm256_set1_pd(c2);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vz = _mm256_loadu_pd(z + i);
        __m256d ve = _mm256_mul_pd(v1, _mm256_loadu_pd(e + i));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_sub_pd(vz, ve), v2));
    }
    for (; i < n; ++i) out[i] = (z[i] - c1 * e[i]) * c2;
}

}  // namespace tgvc::kernels::detail

#endif  // TGVC_HAVE_AVX2
