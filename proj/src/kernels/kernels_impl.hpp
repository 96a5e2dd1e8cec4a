#pragma once

#include <cstddef>
#include <cstdint>

// Internal linkage glue between the dispatcher and the per-ISA translation
// units. Not installed; include only from src/kernels.

namespace tgvc::kernels::detail {

std::uint64_t sad_u8_scalar(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
double l1_f64_scalar(const double* a, const double* b, std::size_t n);
void axpy_f64_scalar(double* y, double a, const double* x, std::size_t n);
void lincomb_f64_scalar(double* out, double c1, const double* x, double c2, const double* y,
                        std::size_t n);
void scale_sub_f64_scalar(double* out, const double* z, double c1, const double* e, double c2,
                          std::size_t n);

#ifdef TGVC_HAVE_AVX2
std::uint64_t sad_u8_avx2(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
double l1_f64_avx2(const double* a, const double* b, std::size_t n);
void axpy_f64_avx2(double* y, double a, const double* x, std::size_t n);
void lincomb_f64_avx2(double* out, double c1, const double* x, double c2, const double* y,
                      std::size_t n);
void scale_sub_f64_avx2(double* out, const double* z, double c1, const double* e, double c2,
                        std::size_t n);
#endif

}  // namespace tgvc::kernels::detail
