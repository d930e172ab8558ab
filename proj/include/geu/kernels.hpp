#pragma once

#include <cstddef>

namespace geu::kernels {

enum class Backend { Auto, Scalar, Avx2 };

// Dense inner-loop kernels used by the graph builders, the uncertainty
// estimators and the k-NN classifier. The active variant is picked once at
// load time from cpuid; all variants of one kernel agree to floating-point
// roundoff and are equivalence-tested against the scalar reference.
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);

// Pins a variant (tests only; call before any concurrent use). Returns false
// if the requested backend is not available on this machine.
bool set_backend(Backend backend);
const char* active_backend();
bool avx2_available();

// Scalar reference implementations, always compiled.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

}  // namespace geu::kernels
