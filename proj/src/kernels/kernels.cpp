#include "tgvc/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>

#include "kernels_impl.hpp"

namespace tgvc::kernels {

namespace detail {

std::uint64_t sad_u8_scalar(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int d = static_cast<int>(a[i]) - static_cast<int>(b[i]);
        acc += static_cast<std::uint64_t>(d < 0 ? -d : d);
    }
    return acc;
}

double l1_f64_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i] - b[i]);
    return acc;
}

void axpy_f64_scalar(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void lincomb_f64_scalar(double* out, double c1, const double* x, double c2, const double* y,
                        std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = c1 * x[i] + c2 * y[i];
}

void scale_sub_f64_scalar(double* out, const double* z, double c1, const double* e, double c2,
                          std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (z[i] - c1 * e[i]) * c2;
}

}  // namespace detail

namespace {

Backend detect() {
#ifdef TGVC_HAVE_AVX2
    const char* env = std::getenv("TGVC_SIMD");
    if (env && std::string_view(env) == "scalar") return Backend::scalar;
    if (__builtin_cpu_supports("avx2")) return Backend::avx2;
#endif
    return Backend::scalar;
}

std::atomic<Backend> g_backend{detect()};

}  // namespace

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

bool backend_supported(Backend b) {
    if (b == Backend::scalar) return true;
#ifdef TGVC_HAVE_AVX2
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

void force_backend(Backend b) {
    if (backend_supported(b)) g_backend.store(b, std::memory_order_relaxed);
}

void reset_backend() { g_backend.store(detect(), std::memory_order_relaxed); }

#ifdef TGVC_HAVE_AVX2
#define TGVC_DISPATCH(fn, ...)                                        \
    (active_backend() == Backend::avx2 ? detail::fn##_avx2(__VA_ARGS__) \
                                       : detail::fn##_scalar(__VA_ARGS__))
#else
#define TGVC_DISPATCH(fn, ...) detail::fn##_scalar(__VA_ARGS__)
#endif

std::uint64_t sad_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    return TGVC_DISPATCH(sad_u8, a, b, n);
}

double l1_f64(const double* a, const double* b, std::size_t n) {
    return TGVC_DISPATCH(l1_f64, a, b, n);
}

void axpy_f64(double* y, double a, const double* x, std::size_t n) {
    TGVC_DISPATCH(axpy_f64, y, a, x, n);
}

void lincomb_f64(double* out, double c1, const double* x, double c2, const double* y,
                 std::size_t n) {
    TGVC_DISPATCH(lincomb_f64, out, c1, x, c2, y, n);
}

void scale_sub_f64(double* out, const double* z, double c1, const double* e, double c2,
                   std::size_t n) {
    TGVC_DISPATCH(scale_sub_f64, out, z, c1, e, c2, n);
}

#undef TGVC_DISPATCH

}  // namespace tgvc::kernels
