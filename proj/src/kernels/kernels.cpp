#include "geu/kernels.hpp"

#include <atomic>

namespace geu::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
    }
    if (i < n) s0 += a[i] * b[i];
    return s0 + s1;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const double d0 = a[i] - b[i];
        const double d1 = a[i + 1] - b[i + 1];
        s0 += d0 * d0;
        s1 += d1 * d1;
    }
    if (i < n) {
        const double d = a[i] - b[i];
        s0 += d * d;
    }
    return s0 + s1;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace scalar

#if defined(GEU_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double squared_distance(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

namespace {

struct DispatchTable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*squared_distance)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    const char* name;
};

constexpr DispatchTable kScalarTable{scalar::dot, scalar::squared_distance,
                                     scalar::axpy, "scalar"};

#if defined(GEU_HAVE_AVX2)
constexpr DispatchTable kAvx2Table{avx2::dot, avx2::squared_distance,
                                   avx2::axpy, "avx2"};
#endif

bool detect_avx2() {
#if defined(GEU_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const DispatchTable* best_table() {
#if defined(GEU_HAVE_AVX2)
    if (detect_avx2()) return &kAvx2Table;
#endif
    return &kScalarTable;
}

std::atomic<const DispatchTable*> g_table{best_table()};

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    return g_table.load(std::memory_order_relaxed)->dot(a, b, n);
}

double squared_distance(const double* a, const double* b, std::size_t n) {
    return g_table.load(std::memory_order_relaxed)->squared_distance(a, b, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    g_table.load(std::memory_order_relaxed)->axpy(alpha, x, y, n);
}

bool avx2_available() { return detect_avx2(); }

bool set_backend(Backend backend) {
    switch (backend) {
        case Backend::Auto:
            g_table.store(best_table());
            return true;
        case Backend::Scalar:
            g_table.store(&kScalarTable);
            return true;
        case Backend::Avx2:
#if defined(GEU_HAVE_AVX2)
            if (detect_avx2()) {
                g_table.store(&kAvx2Table);
                return true;
            }
#endif
            return false;
    }
    return false;
}

const char* active_backend() {
    return g_table.load(std::memory_order_relaxed)->name;
}

}  // namespace geu::kernels
