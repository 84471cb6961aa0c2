#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace robustmd {

/// Finite, strictly increasing set of nonnegative states standing in for a
/// truncated interval of the state space.
class Grid {
public:
    explicit Grid(std::vector<double> points);

    /// Uniform grid lo, lo + spacing, ... up to hi (inclusive), with the extra
    /// points inserted exactly. Uniform points within 1e-9 of an extra point
    /// are replaced by it.
    static std::shared_ptr<const Grid> uniform(double lo, double hi, double spacing,
                                               const std::vector<double>& extra = {});

    std::size_t size() const { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    std::span<const double> points() const { return points_; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }

    double max_spacing() const { return max_spacing_; }

    /// Index of the grid point equal to x within tol, or -1.
    long index_of(double x, double tol = 1e-9) const;
    /// Index of the grid point nearest to x.
    std::size_t nearest(double x) const;

    bool operator==(const Grid& other) const { return points_ == other.points_; }

private:
    std::vector<double> points_;
    double max_spacing_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Throws std::invalid_argument unless both grids are the same object or hold
/// identical points.
void require_same_grid(const GridPtr& a, const GridPtr& b, const char* what);

/// Probability weights on a grid.
///
/// Negative weights above -1e-12 are clamped to zero; anything more negative
/// is rejected, as is a total mass outside [1 - 1e-10, 1 + 1e-10].
class DiscretePrior {
public:
    DiscretePrior(GridPtr grid, std::vector<double> weights);

    static DiscretePrior point_mass(GridPtr grid, std::size_t index);
    /// Atoms given as (state, mass); every state must lie on the grid.
    static DiscretePrior from_atoms(GridPtr grid, const std::vector<std::pair<double, double>>& atoms);
    static DiscretePrior uniform(GridPtr grid);
    /// Weights from an LP solution: rescales a total within 1e-6 of one.
    static DiscretePrior normalized(GridPtr grid, std::vector<double> weights);

    const GridPtr& grid() const { return grid_; }
    std::span<const double> weights() const { return weights_; }
    double operator[](std::size_t i) const { return weights_[i]; }
    std::size_t size() const { return weights_.size(); }

    /// Indices carrying mass above tol.
    std::vector<std::size_t> support(double tol = 1e-12) const;
    double mean() const;

private:
    GridPtr grid_;
    std::vector<double> weights_;
};

/// Finite weights of any sign; the difference of two priors.
class SignedWeights {
public:
    SignedWeights(GridPtr grid, std::vector<double> weights);
    static SignedWeights difference(const DiscretePrior& a, const DiscretePrior& b);

    const GridPtr& grid() const { return grid_; }
    std::span<const double> weights() const { return weights_; }
    double total_variation_norm() const;

private:
    GridPtr grid_;
    std::vector<double> weights_;
};

/// Designer payoff as a function of the state, sampled on a grid.
class ValueFunction {
public:
    ValueFunction(GridPtr grid, std::vector<double> values);

    template <class F> static ValueFunction from_function(GridPtr grid, F&& f) {
        std::vector<double> v(grid->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f((*grid)[i]);
        return ValueFunction(std::move(grid), std::move(v));
    }
    static ValueFunction constant(GridPtr grid, double c);

    const GridPtr& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    double sup_norm() const { return sup_norm_; }
    double min() const;

    ValueFunction operator-() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
    double sup_norm_ = 0.0;
};

double expectation(const ValueFunction& v, const DiscretePrior& prior);

/// Half the l1 distance between weight vectors.
double tv_distance(const DiscretePrior& a, const DiscretePrior& b);

/// Wasserstein-1 distance on the line, computed as the area between the two
/// step CDFs over the grid partition.
double wasserstein1(const DiscretePrior& a, const DiscretePrior& b);

/// Windowed minimum w_i = min{ v_j : |theta_j - theta_i| <= h }; the grid
/// proxy for the lower semicontinuous envelope. h = 0 returns v.
ValueFunction lsc_envelope(const ValueFunction& v, double h);

/// Indices where v exceeds its envelope at window h by more than eps.
std::vector<std::size_t> lsc_defect_indices(const ValueFunction& v, double h, double eps);

/// Moves mass m from one grid index to another.
DiscretePrior push_mass(const DiscretePrior& prior, std::size_t from, std::size_t to, double m);

/// Hausdorff distance between two finite sets of priors under wasserstein1.
double hausdorff_distance(std::span<const DiscretePrior> a, std::span<const DiscretePrior> b);

/// Default window schedule h_k = h0 / 2^k, k = 0..levels, with h0 = 2^levels
/// times the largest grid spacing so that the smallest window is one cell.
std::vector<double> window_schedule(const Grid& grid, int levels = 2);

} // namespace robustmd
