#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a plain serial twin kept
// as the reference the tests compare against.

#include <cstddef>
#include <span>

namespace robustmd::kernels {

/// Dense row-major tableau view: rows x cols doubles with row stride `stride`.
struct TableauView {
    double* data;
    std::size_t rows;
    std::size_t cols;
    std::size_t stride;

    double* row(std::size_t r) const { return data + r * stride; }
    double& at(std::size_t r, std::size_t c) const { return data[r * stride + c]; }
};

/// Gauss-Jordan pivot on (pr, pc): scales the pivot row to a unit pivot and
/// eliminates column pc from every other row.
void pivot(TableauView t, std::size_t pr, std::size_t pc);
void pivot_reference(TableauView t, std::size_t pr, std::size_t pc);

/// out[i] = min{ values[j] : |points[j] - points[i]| <= h }. `points` must be
/// increasing.
void windowed_min(std::span<const double> points, std::span<const double> values, double h,
                  std::span<double> out);
void windowed_min_reference(std::span<const double> points, std::span<const double> values,
                            double h, std::span<double> out);

} // namespace robustmd::kernels
