#include "robustmd/guarantee.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>

namespace robustmd {

namespace {

constexpr double kActiveTol = 1e-9;
constexpr double kTieSlack = 1e-9;

std::vector<std::size_t> binding_rows(const LinearProgram& lp, const std::vector<double>& x) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
        const auto& row = lp.rows[i];
        double s = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) s += row.coeffs[j] * x[j];
        if (row.relation == Relation::Equal || std::abs(s - row.rhs) <= kActiveTol * (1.0 + std::abs(row.rhs)))
            active.push_back(i);
    }
    return active;
}

// Among optimal priors, reports the one with the smallest mean so that ties
// resolve the same way whatever path the simplex took.
GuaranteeReport from_weights_lp(const LinearProgram& lp, const GridPtr& grid) {
    const auto sol = solve_lp(lp);
    GuaranteeReport rep;
    rep.status = sol.status;
    rep.iterations = sol.iterations;
    if (!sol.optimal()) return rep;
    rep.value = sol.value;
    rep.active_constraints = binding_rows(lp, sol.x);

    LinearProgram tie = lp;
    tie.add_row(lp.objective, Relation::LessEqual, sol.value + kTieSlack * std::max(1.0, std::abs(sol.value)));
    const auto& pts = grid->points();
    tie.objective.assign(pts.begin(), pts.end());
    const auto second = solve_lp(tie);
    rep.iterations += second.iterations;
    rep.worst_prior = DiscretePrior::normalized(grid, second.optimal() ? second.x : sol.x);
    return rep;
}

GuaranteeReport closed_form_support_ball(const ValueFunction& v, const SupportInterval& s, double r) {
    const GridPtr& grid = v.grid();
    const Grid& g = *grid;
    const std::size_t n = g.size();
    LinearProgram lp(n);
    for (std::size_t i = 0; i < n; ++i) lp.objective[i] = v[i];
    std::vector<double> dist(n, 0.0);
    bool any_inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (g[i] < s.a - 1e-9) dist[i] = s.a - g[i];
        else if (g[i] > s.b + 1e-9) dist[i] = g[i] - s.b;
        else any_inside = true;
    }
    if (!any_inside) {
        GuaranteeReport rep;
        rep.status = LpStatus::Infeasible;
        return rep;
    }
    lp.add_row(std::vector<double>(n, 1.0), Relation::Equal, 1.0);
    lp.add_row(std::move(dist), Relation::LessEqual, r);
    return from_weights_lp(lp, grid);
}

GuaranteeReport coupling_ball(const ValueFunction& v, const BaseSet& base, double r) {
    const GridPtr& grid = v.grid();
    const Grid& g = *grid;
    const std::size_t n = g.size();
    if (n > kMaxCouplingGrid)
        throw std::invalid_argument("worst_case_ball: coupling LP needs a grid of at most " +
                                    std::to_string(kMaxCouplingGrid) + " points");
    // Targets restricted to the interval for support bases; all states otherwise.
    std::vector<std::size_t> targets;
    const auto* support = std::get_if<SupportInterval>(&base);
    for (std::size_t j = 0; j < n; ++j)
        if (!support || (g[j] >= support->a - 1e-9 && g[j] <= support->b + 1e-9)) targets.push_back(j);
    GuaranteeReport rep;
    if (targets.empty()) {
        rep.status = LpStatus::Infeasible;
        return rep;
    }
    const std::size_t t = targets.size();
    LinearProgram lp(n * t);
    std::vector<double> cost(n * t), mass(n * t, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < t; ++k) {
            lp.objective[i * t + k] = v[i];
            cost[i * t + k] = std::abs(g[i] - g[targets[k]]);
        }
    }
    lp.add_row(std::move(mass), Relation::Equal, 1.0);
    lp.add_row(std::move(cost), Relation::LessEqual, r);
    if (!support) {
        for (const auto& row : base_rows(base, grid)) {
            std::vector<double> a(n * t, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < t; ++k) a[i * t + k] = row.coeffs[targets[k]];
            lp.add_row(std::move(a), row.relation, row.rhs);
        }
    }
    const auto sol = solve_lp(lp);
    rep.status = sol.status;
    rep.iterations = sol.iterations;
    if (!sol.optimal()) return rep;
    rep.value = sol.value;
    std::vector<double> p(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < t; ++k) p[i] += sol.x[i * t + k];
    rep.worst_prior = DiscretePrior::normalized(grid, std::move(p));
    rep.active_constraints = binding_rows(lp, sol.x);
    return rep;
}

} // namespace

GuaranteeReport worst_case(const ValueFunction& v, const AmbiguitySet& set) {
    if (set.is_ball()) return worst_case_ball(v, set.base, *set.radius);
    const GridPtr& grid = v.grid();
    if (const auto* s = std::get_if<Singleton>(&set.base)) {
        require_same_grid(grid, s->prior.grid(), "worst_case");
        GuaranteeReport rep;
        rep.status = LpStatus::Optimal;
        rep.value = expectation(v, s->prior);
        rep.worst_prior = s->prior;
        for (std::size_t i = 0; i < grid->size(); ++i) rep.active_constraints.push_back(i);
        return rep;
    }
    const std::size_t n = grid->size();
    LinearProgram lp(n);
    for (std::size_t i = 0; i < n; ++i) lp.objective[i] = v[i];
    lp.rows = base_rows(set.base, grid);
    lp.add_row(std::vector<double>(n, 1.0), Relation::Equal, 1.0);
    return from_weights_lp(lp, grid);
}

GuaranteeReport worst_case_ball(const ValueFunction& v, const BaseSet& base, double r, BallMethod method) {
    if (r < 0.0 || !std::isfinite(r)) throw std::invalid_argument("worst_case_ball: radius must be >= 0");
    if (r == 0.0) return worst_case(v, AmbiguitySet(base));
    const auto* support = std::get_if<SupportInterval>(&base);
    if (method == BallMethod::ClosedForm) {
        if (!support) throw std::invalid_argument("worst_case_ball: closed form needs a support interval");
        return closed_form_support_ball(v, *support, r);
    }
    if (method == BallMethod::Coupling || !support) return coupling_ball(v, base, r);

    GuaranteeReport rep = closed_form_support_ball(v, *support, r);
    if (rep.optimal() && v.size() <= kMaxCouplingGrid) {
        const auto other = coupling_ball(v, base, r);
        if (other.optimal()) rep.cross_check = std::abs(other.value - rep.value);
    }
    return rep;
}

RadiusSweep radius_sweep(const ValueFunction& v, const BaseSet& base, const std::vector<double>& radii,
                         BallMethod method) {
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0)) throw std::invalid_argument("radius_sweep: radii must be positive");
        if (k > 0 && !(radii[k] > radii[k - 1])) throw std::invalid_argument("radius_sweep: radii must increase");
    }
    const long count = static_cast<long>(radii.size());
    std::vector<double> values(radii.size(), 0.0);
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < count; ++k) {
        try {
            const auto rep = worst_case_ball(v, base, radii[k], method);
            if (!rep.optimal()) throw std::runtime_error("radius_sweep: LP " + to_string(rep.status));
            values[k] = rep.value;
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    RadiusSweep out;
    const double bound = 2.0 * v.sup_norm();
    for (std::size_t k = 0; k < radii.size(); ++k) {
        out.curve.emplace_back(radii[k], values[k]);
        if (k == 0) continue;
        const double dv = std::abs(values[k] - values[k - 1]);
        const double dr = radii[k] - radii[k - 1];
        // The bound holds with either endpoint as the reference radius.
        const double slack = 1e-9;
        if (dv > bound / radii[k] * dr + slack || dv > bound / radii[k - 1] * dr + slack)
            ++out.equicontinuity_violations;
        if (values[k] > values[k - 1] + 1e-9) out.nonincreasing = false;
    }
    return out;
}

double variational_value(const ValueFunction& v, const BaseSet& base, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("variational_value: lambda must be >= 0");
    const GridPtr& grid = v.grid();
    const Grid& g = *grid;
    const std::size_t n = g.size();
    if (const auto* s = std::get_if<SupportInterval>(&base)) {
        // W(p, support) = sum_i p_i dist(theta_i, [a, b]), so the minimum sits on one atom.
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const double d = g[i] < s->a ? s->a - g[i] : (g[i] > s->b ? g[i] - s->b : 0.0);
            best = std::min(best, v[i] + lambda * d);
        }
        return best;
    }
    if (n > kMaxCouplingGrid)
        throw std::invalid_argument("variational_value: coupling LP needs a grid of at most " +
                                    std::to_string(kMaxCouplingGrid) + " points");
    LinearProgram lp(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lp.objective[i * n + j] = v[i] + lambda * std::abs(g[i] - g[j]);
    lp.add_row(std::vector<double>(n * n, 1.0), Relation::Equal, 1.0);
    for (const auto& row : base_rows(base, grid)) {
        std::vector<double> a(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a[i * n + j] = row.coeffs[j];
        lp.add_row(std::move(a), row.relation, row.rhs);
    }
    const auto sol = solve_lp(lp);
    if (!sol.optimal()) throw std::runtime_error("variational_value: LP " + to_string(sol.status));
    return sol.value;
}

} // namespace robustmd
