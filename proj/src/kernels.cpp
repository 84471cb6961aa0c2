#include "robustmd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <omp.h>

namespace robustmd::kernels {

namespace {
// Below this many updated entries the thread fork costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 15;
constexpr double kWindowSlack = 1e-12;
} // namespace

void pivot(TableauView t, std::size_t pr, std::size_t pc) {
    double* prow = t.row(pr);
    const double inv = 1.0 / prow[pc];
#pragma omp simd
    for (std::size_t c = 0; c < t.cols; ++c) prow[c] *= inv;
    prow[pc] = 1.0;

    const long rows = static_cast<long>(t.rows);
    const bool wide = t.rows * t.cols >= kParallelWork;
#pragma omp parallel for schedule(static) if (wide)
    for (long r = 0; r < rows; ++r) {
        if (static_cast<std::size_t>(r) == pr) continue;
        double* row = t.row(static_cast<std::size_t>(r));
        const double factor = row[pc];
        if (factor == 0.0) continue;
#pragma omp simd
        for (std::size_t c = 0; c < t.cols; ++c) row[c] -= factor * prow[c];
        row[pc] = 0.0;
    }
}

void pivot_reference(TableauView t, std::size_t pr, std::size_t pc) {
    double* prow = t.row(pr);
    const double inv = 1.0 / prow[pc];
    for (std::size_t c = 0; c < t.cols; ++c) prow[c] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r < t.rows; ++r) {
        if (r == pr) continue;
        double* row = t.row(r);
        const double factor = row[pc];
        if (factor == 0.0) continue;
        for (std::size_t c = 0; c < t.cols; ++c) row[c] -= factor * prow[c];
        row[pc] = 0.0;
    }
}

void windowed_min(std::span<const double> points, std::span<const double> values, double h,
                  std::span<double> out) {
    const long n = static_cast<long>(points.size());
    const double reach = h + kWindowSlack;
#pragma omp parallel for schedule(static) if (n > 4096)
    for (long i = 0; i < n; ++i) {
        const double x = points[i];
        auto lo = std::lower_bound(points.begin(), points.begin() + i, x - reach);
        auto hi = std::upper_bound(points.begin() + i, points.end(), x + reach);
        const auto first = values.begin() + (lo - points.begin());
        const auto last = values.begin() + (hi - points.begin());
        out[i] = *std::min_element(first, last);
    }
}

void windowed_min_reference(std::span<const double> points, std::span<const double> values,
                            double h, std::span<double> out) {
    const std::size_t n = points.size();
    for (std::size_t i = 0; i < n; ++i) {
        double m = values[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(points[j] - points[i]) <= h + kWindowSlack) m = std::min(m, values[j]);
        }
        out[i] = m;
    }
}

} // namespace robustmd::kernels
