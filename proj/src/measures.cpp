#include "robustmd/measures.hpp"

#include "robustmd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace robustmd {

namespace {
constexpr double kClampNegative = 1e-12;
constexpr double kMassTolerance = 1e-10;
constexpr double kMergeTolerance = 1e-9;
} // namespace

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) throw std::invalid_argument("Grid: need at least two points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]) || points_[i] < 0.0)
            throw std::invalid_argument("Grid: points must be finite and nonnegative");
        if (i > 0) {
            if (!(points_[i] > points_[i - 1]))
                throw std::invalid_argument("Grid: points must be strictly increasing");
            max_spacing_ = std::max(max_spacing_, points_[i] - points_[i - 1]);
        }
    }
}

std::shared_ptr<const Grid> Grid::uniform(double lo, double hi, double spacing,
                                          const std::vector<double>& extra) {
    if (!(spacing > 0.0) || !(hi > lo)) throw std::invalid_argument("Grid::uniform: bad range");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / spacing + 1e-9));
    std::vector<double> pts;
    pts.reserve(count + 2 + extra.size());
    for (std::size_t k = 0; k <= count; ++k) pts.push_back(lo + static_cast<double>(k) * spacing);
    if (hi - pts.back() > kMergeTolerance) pts.push_back(hi);

    std::vector<double> sorted_extra;
    for (double x : extra)
        if (x >= lo - kMergeTolerance && x <= hi + kMergeTolerance) sorted_extra.push_back(x);
    std::sort(sorted_extra.begin(), sorted_extra.end());

    // Extra points win over nearby uniform points so that structural values are exact.
    std::vector<double> merged;
    merged.reserve(pts.size() + sorted_extra.size());
    std::size_t e = 0;
    for (double p : pts) {
        while (e < sorted_extra.size() && sorted_extra[e] < p - kMergeTolerance) {
            merged.push_back(sorted_extra[e++]);
        }
        if (e < sorted_extra.size() && std::abs(sorted_extra[e] - p) <= kMergeTolerance) {
            merged.push_back(sorted_extra[e++]);
        } else {
            merged.push_back(p);
        }
    }
    while (e < sorted_extra.size()) merged.push_back(sorted_extra[e++]);

    std::vector<double> unique;
    unique.reserve(merged.size());
    for (double x : merged)
        if (unique.empty() || x - unique.back() > kMergeTolerance) unique.push_back(x);
    return std::make_shared<const Grid>(std::move(unique));
}

long Grid::index_of(double x, double tol) const {
    const std::size_t i = nearest(x);
    return std::abs(points_[i] - x) <= tol ? static_cast<long>(i) : -1;
}

std::size_t Grid::nearest(double x) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), x);
    if (it == points_.end()) return points_.size() - 1;
    const auto i = static_cast<std::size_t>(it - points_.begin());
    if (i > 0 && x - points_[i - 1] <= points_[i] - x) return i - 1;
    return i;
}

void require_same_grid(const GridPtr& a, const GridPtr& b, const char* what) {
    if (!a || !b) throw std::invalid_argument(std::string(what) + ": missing grid");
    if (a != b && !(*a == *b)) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

DiscretePrior::DiscretePrior(GridPtr grid, std::vector<double> weights)
    : grid_(std::move(grid)), weights_(std::move(weights)) {
    if (!grid_) throw std::invalid_argument("DiscretePrior: missing grid");
    if (weights_.size() != grid_->size())
        throw std::invalid_argument("DiscretePrior: weight count differs from grid size");
    double total = 0.0;
    for (double& w : weights_) {
        if (!std::isfinite(w)) throw std::invalid_argument("DiscretePrior: non-finite weight");
        if (w < 0.0) {
            if (w < -kClampNegative)
                throw std::invalid_argument("DiscretePrior: negative weight " + std::to_string(w));
            w = 0.0;
        }
        total += w;
    }
    if (std::abs(total - 1.0) > kMassTolerance)
        throw std::invalid_argument("DiscretePrior: total mass " + std::to_string(total));
}

DiscretePrior DiscretePrior::point_mass(GridPtr grid, std::size_t index) {
    std::vector<double> w(grid->size(), 0.0);
    w.at(index) = 1.0;
    return DiscretePrior(std::move(grid), std::move(w));
}

DiscretePrior DiscretePrior::from_atoms(GridPtr grid,
                                        const std::vector<std::pair<double, double>>& atoms) {
    std::vector<double> w(grid->size(), 0.0);
    for (const auto& [x, m] : atoms) {
        const long i = grid->index_of(x);
        if (i < 0) throw std::invalid_argument("DiscretePrior::from_atoms: state off grid");
        w[static_cast<std::size_t>(i)] += m;
    }
    return DiscretePrior(std::move(grid), std::move(w));
}

DiscretePrior DiscretePrior::uniform(GridPtr grid) {
    const double m = 1.0 / static_cast<double>(grid->size());
    std::vector<double> w(grid->size(), m);
    return DiscretePrior(std::move(grid), std::move(w));
}

DiscretePrior DiscretePrior::normalized(GridPtr grid, std::vector<double> weights) {
    double total = 0.0;
    for (double& w : weights) {
        if (w < 0.0 && w >= -1e-9) w = 0.0;
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-6)
        throw std::invalid_argument("DiscretePrior::normalized: total mass " + std::to_string(total));
    for (double& w : weights) w /= total;
    return DiscretePrior(std::move(grid), std::move(weights));
}

std::vector<std::size_t> DiscretePrior::support(double tol) const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < weights_.size(); ++i)
        if (weights_[i] > tol) s.push_back(i);
    return s;
}

double DiscretePrior::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) m += weights_[i] * (*grid_)[i];
    return m;
}

SignedWeights::SignedWeights(GridPtr grid, std::vector<double> weights)
    : grid_(std::move(grid)), weights_(std::move(weights)) {
    if (!grid_ || weights_.size() != grid_->size())
        throw std::invalid_argument("SignedWeights: size mismatch");
    for (double w : weights_)
        if (!std::isfinite(w)) throw std::invalid_argument("SignedWeights: non-finite weight");
}

SignedWeights SignedWeights::difference(const DiscretePrior& a, const DiscretePrior& b) {
    require_same_grid(a.grid(), b.grid(), "SignedWeights::difference");
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
    return SignedWeights(a.grid(), std::move(d));
}

double SignedWeights::total_variation_norm() const {
    double s = 0.0;
    for (double w : weights_) s += std::abs(w);
    return s;
}

ValueFunction::ValueFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_ || values_.size() != grid_->size())
        throw std::invalid_argument("ValueFunction: size mismatch");
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("ValueFunction: non-finite value");
        sup_norm_ = std::max(sup_norm_, std::abs(v));
    }
}

ValueFunction ValueFunction::constant(GridPtr grid, double c) {
    std::vector<double> v(grid->size(), c);
    return ValueFunction(std::move(grid), std::move(v));
}

double ValueFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }

ValueFunction ValueFunction::operator-() const {
    std::vector<double> v(values_.size());
    std::transform(values_.begin(), values_.end(), v.begin(), [](double x) { return -x; });
    return ValueFunction(grid_, std::move(v));
}

double expectation(const ValueFunction& v, const DiscretePrior& prior) {
    require_same_grid(v.grid(), prior.grid(), "expectation");
    return std::inner_product(v.values().begin(), v.values().end(), prior.weights().begin(), 0.0);
}

double tv_distance(const DiscretePrior& a, const DiscretePrior& b) {
    require_same_grid(a.grid(), b.grid(), "tv_distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

double wasserstein1(const DiscretePrior& a, const DiscretePrior& b) {
    require_same_grid(a.grid(), b.grid(), "wasserstein1");
    const Grid& g = *a.grid();
    double fa = 0.0, fb = 0.0, area = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        fa += a[i];
        fb += b[i];
        area += std::abs(fa - fb) * (g[i + 1] - g[i]);
    }
    return area;
}

ValueFunction lsc_envelope(const ValueFunction& v, double h) {
    if (h < 0.0) throw std::invalid_argument("lsc_envelope: negative window");
    if (h == 0.0) return v;
    std::vector<double> w(v.size());
    kernels::windowed_min(v.grid()->points(), v.values(), h, w);
    return ValueFunction(v.grid(), std::move(w));
}

std::vector<std::size_t> lsc_defect_indices(const ValueFunction& v, double h, double eps) {
    if (!(h > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("lsc_defect_indices: window and threshold must be positive");
    const ValueFunction w = lsc_envelope(v, h);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] - w[i] > eps) out.push_back(i);
    return out;
}

DiscretePrior push_mass(const DiscretePrior& prior, std::size_t from, std::size_t to, double m) {
    if (from >= prior.size() || to >= prior.size())
        throw std::out_of_range("push_mass: index out of range");
    if (m < 0.0 || m > prior[from] + kClampNegative)
        throw std::invalid_argument("push_mass: mass exceeds the source atom");
    std::vector<double> w(prior.weights().begin(), prior.weights().end());
    m = std::min(m, w[from]);
    w[from] -= m;
    w[to] += m;
    return DiscretePrior(prior.grid(), std::move(w));
}

double hausdorff_distance(std::span<const DiscretePrior> a, std::span<const DiscretePrior> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff_distance: empty set");
    auto directed = [](std::span<const DiscretePrior> from, std::span<const DiscretePrior> to) {
        double sup = 0.0;
        for (const auto& p : from) {
            double inf = std::numeric_limits<double>::infinity();
            for (const auto& q : to) inf = std::min(inf, wasserstein1(p, q));
            sup = std::max(sup, inf);
        }
        return sup;
    };
    return std::max(directed(a, b), directed(b, a));
}

std::vector<double> window_schedule(const Grid& grid, int levels) {
    if (levels < 0) throw std::invalid_argument("window_schedule: negative level count");
    std::vector<double> h;
    const double h0 = std::ldexp(grid.max_spacing(), levels);
    for (int k = 0; k <= levels; ++k) h.push_back(std::ldexp(h0, -k));
    return h;
}

} // namespace robustmd
