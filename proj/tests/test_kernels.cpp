#include <doctest.h>

#include <random>
#include <vector>

#include "geu/kernels.hpp"

namespace k = geu::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, size_t n) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

}  // namespace

TEST_CASE("scalar kernels against naive loops") {
    std::mt19937_64 rng(7);
    for (size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 31u, 100u}) {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);
        double dot = 0, sq = 0;
        for (size_t i = 0; i < n; ++i) {
            dot += a[i] * b[i];
            const double d = a[i] - b[i];
            sq += d * d;
        }
        CHECK(k::scalar::dot(a.data(), b.data(), n) == doctest::Approx(dot).epsilon(1e-13));
        CHECK(k::scalar::squared_distance(a.data(), b.data(), n) ==
              doctest::Approx(sq).epsilon(1e-13));

        auto y = b;
        k::scalar::axpy(0.75, a.data(), y.data(), n);
        for (size_t i = 0; i < n; ++i) {
            CHECK(y[i] == doctest::Approx(b[i] + 0.75 * a[i]).epsilon(1e-14));
        }
    }
}

TEST_CASE("dispatched kernels match the scalar reference") {
    // Covers the SIMD variant when the machine has it, including remainder
    // lengths around the vector width.
    std::mt19937_64 rng(21);
    INFO("active backend: ", k::active_backend());
    for (size_t n = 0; n <= 67; ++n) {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);
        const double dot_ref = k::scalar::dot(a.data(), b.data(), n);
        const double sq_ref = k::scalar::squared_distance(a.data(), b.data(), n);
        CHECK(k::dot(a.data(), b.data(), n) == doctest::Approx(dot_ref).epsilon(1e-12));
        CHECK(k::squared_distance(a.data(), b.data(), n) ==
              doctest::Approx(sq_ref).epsilon(1e-12));

        auto y1 = b, y2 = b;
        k::axpy(-1.25, a.data(), y1.data(), n);
        k::scalar::axpy(-1.25, a.data(), y2.data(), n);
        for (size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));
    }
}

TEST_CASE("backend pinning") {
    REQUIRE(k::set_backend(k::Backend::Scalar));
    CHECK(std::string(k::active_backend()) == "scalar");
    if (k::avx2_available()) {
        REQUIRE(k::set_backend(k::Backend::Avx2));
        CHECK(std::string(k::active_backend()) == "avx2");

        std::mt19937_64 rng(3);
        const auto a = random_vec(rng, 37);
        const auto b = random_vec(rng, 37);
        const double avx = k::squared_distance(a.data(), b.data(), 37);
        REQUIRE(k::set_backend(k::Backend::Scalar));
        const double sca = k::squared_distance(a.data(), b.data(), 37);
        CHECK(avx == doctest::Approx(sca).epsilon(1e-12));
    } else {
        CHECK_FALSE(k::set_backend(k::Backend::Avx2));
    }
    REQUIRE(k::set_backend(k::Backend::Auto));
}
