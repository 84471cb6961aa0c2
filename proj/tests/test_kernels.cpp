#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "robustmd/kernels.hpp"

#include <omp.h>

#include <random>
#include <vector>

using namespace robustmd;

TEST_CASE("parallel pivot matches the serial reference") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int threads : {1, 2, 4}) {
        omp_set_num_threads(threads);
        for (std::size_t rows : {3u, 17u, 120u}) {
            const std::size_t cols = rows + 9, stride = cols + 3;
            std::vector<double> a(rows * stride);
            for (auto& x : a) x = u(rng);
            auto b = a;
            const std::size_t pr = rows / 2, pc = cols / 3;
            a[pr * stride + pc] = b[pr * stride + pc] = 0.75;
            kernels::pivot({a.data(), rows, cols, stride}, pr, pc);
            kernels::pivot_reference({b.data(), rows, cols, stride}, pr, pc);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) CHECK(a[i * stride + j] == doctest::Approx(b[i * stride + j]).epsilon(1e-14));
            CHECK(a[pr * stride + pc] == doctest::Approx(1.0));
            for (std::size_t i = 0; i < rows; ++i)
                if (i != pr) CHECK(std::abs(a[i * stride + pc]) < 1e-14);
        }
    }
}

TEST_CASE("parallel windowed min matches the serial reference and brute force") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int threads : {1, 3}) {
        omp_set_num_threads(threads);
        for (std::size_t n : {1u, 2u, 50u, 5000u}) {
            std::vector<double> pts(n), vals(n), out(n), ref(n);
            double x = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                x += 0.001 + u(rng) * 0.01;
                pts[i] = x;
                vals[i] = u(rng);
            }
            for (double h : {0.0, 0.003, 0.05}) {
                kernels::windowed_min(pts, vals, h, out);
                kernels::windowed_min_reference(pts, vals, h, ref);
                CHECK(out == ref);
                if (n <= 50) {
                    for (std::size_t i = 0; i < n; ++i) {
                        double m = vals[i];
                        for (std::size_t j = 0; j < n; ++j)
                            if (std::abs(pts[j] - pts[i]) <= h) m = std::min(m, vals[j]);
                        CHECK(out[i] == m);
                    }
                }
            }
        }
    }
}
