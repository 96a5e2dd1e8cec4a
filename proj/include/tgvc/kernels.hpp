#pragma once

#include <cstddef>
#include <cstdint>

namespace tgvc::kernels {

// Arithmetic inner loops used by the block matcher and the latent-space math.
// Each kernel has a scalar reference implementation and an AVX2 variant; the
// active one is picked at runtime from CPU features. force_backend() pins a
// specific implementation (used by the equivalence tests and honored only if
// the backend is supported).

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_supported(Backend b);
void force_backend(Backend b);
void reset_backend();

/// Sum of absolute differences over 8-bit samples.
std::uint64_t sad_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);

/// sum_i |a[i] - b[i]|
double l1_f64(const double* a, const double* b, std::size_t n);

/// y[i] += a * x[i]
void axpy_f64(double* y, double a, const double* x, std::size_t n);

/// out[i] = c1 * x[i] + c2 * y[i]
void lincomb_f64(double* out, double c1, const double* x, double c2, const double* y,
                 std::size_t n);

/// out[i] = (z[i] - c1 * e[i]) * c2
void scale_sub_f64(double* out, const double* z, double c1, const double* e, double c2,
                   std::size_t n);

}  // namespace tgvc::kernels
