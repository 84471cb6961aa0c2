#include "robustmd/ambiguity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace robustmd {

namespace {

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kGridTol = 1e-9;

// Innermost grid points of [a, b]; empty range when none lies inside.
std::pair<long, long> interval_indices(const Grid& g, double a, double b) {
    long lo = -1, hi = -1;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] >= a - kGridTol && g[i] <= b + kGridTol) {
            if (lo < 0) lo = static_cast<long>(i);
            hi = static_cast<long>(i);
        }
    }
    return {lo, hi};
}

double activity(const LpRow& row, std::span<const double> w) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += row.coeffs[i] * w[i];
    return s;
}

double violation(const LpRow& row, double act) {
    switch (row.relation) {
    case Relation::LessEqual: return std::max(0.0, act - row.rhs);
    case Relation::GreaterEqual: return std::max(0.0, row.rhs - act);
    case Relation::Equal: return std::abs(act - row.rhs);
    }
    return 0.0;
}

std::vector<double> ones(std::size_t n) { return std::vector<double>(n, 1.0); }

// Coupling LP from the atoms of `prior` to a target in `base`:
// variables gamma_(s, j) for source atoms s and all grid targets j.
struct CouplingResult {
    LpSolution sol;
    std::vector<std::size_t> sources;
};

CouplingResult coupling_distance_lp(const BaseSet& base, const DiscretePrior& prior) {
    const GridPtr& grid = prior.grid();
    const Grid& g = *grid;
    const std::size_t n = g.size();
    if (n > kMaxCouplingGrid)
        throw std::invalid_argument("coupling LP: grid larger than " + std::to_string(kMaxCouplingGrid));
    const auto sources = prior.support();
    const std::size_t k = sources.size();
    LinearProgram lp(k * n);
    for (std::size_t s = 0; s < k; ++s)
        for (std::size_t j = 0; j < n; ++j) lp.objective[s * n + j] = std::abs(g[sources[s]] - g[j]);
    for (std::size_t s = 0; s < k; ++s) {
        std::vector<double> a(k * n, 0.0);
        for (std::size_t j = 0; j < n; ++j) a[s * n + j] = 1.0;
        lp.add_row(std::move(a), Relation::Equal, prior[sources[s]]);
    }
    for (const auto& row : base_rows(base, grid)) {
        std::vector<double> a(k * n, 0.0);
        for (std::size_t s = 0; s < k; ++s)
            for (std::size_t j = 0; j < n; ++j) a[s * n + j] = row.coeffs[j];
        lp.add_row(std::move(a), row.relation, row.rhs);
    }
    return {solve_lp(lp), sources};
}

} // namespace

bool LinearSet::equality_only() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const MomentRow& r) { return std::isfinite(r.lo) && r.lo == r.hi; });
}

AmbiguitySet AmbiguitySet::ball(BaseSet b, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("AmbiguitySet::ball: radius must be positive");
    AmbiguitySet s(std::move(b));
    s.radius = r;
    return s;
}

LinearSet mean_set(const GridPtr& grid, double mean) {
    LinearSet s;
    s.rows.push_back(MomentRow{ValueFunction::from_function(grid, [](double t) { return t; }), mean, mean});
    s.continuous_moments = true;
    return s;
}

QuantileSet median_set(double median) { return QuantileSet{{{median, 0.5}}}; }

void validate(const QuantileSet& q, const Grid& grid) {
    if (q.pairs.empty()) throw std::invalid_argument("QuantileSet: no pairs");
    for (std::size_t j = 0; j < q.pairs.size(); ++j) {
        const auto [x, a] = q.pairs[j];
        if (!(x > grid.front() && x < grid.back()))
            throw std::invalid_argument("QuantileSet: quantile point outside the grid interior");
        if (a < 0.0 || a > 1.0) throw std::invalid_argument("QuantileSet: level outside [0, 1]");
        if (j > 0 && !(x > q.pairs[j - 1].first && a > q.pairs[j - 1].second))
            throw std::invalid_argument("QuantileSet: points and levels must increase strictly");
    }
}

std::string describe(const BaseSet& base) {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const LinearSet& s) { os << "LinearSet(" << s.rows.size() << " rows)"; },
                   [&](const SupportInterval& s) { os << "SupportInterval[" << s.a << ", " << s.b << "]"; },
                   [&](const QuantileSet& s) {
                       os << "QuantileSet{";
                       for (const auto& [x, a] : s.pairs) os << "(" << x << ", " << a << ")";
                       os << "}";
                   },
                   [&](const HalfSpace& s) { os << "HalfSpace(level " << s.level << ")"; },
                   [&](const Singleton&) { os << "Singleton"; },
               },
               base);
    return os.str();
}

std::vector<LpRow> base_rows(const BaseSet& base, const GridPtr& grid) {
    const Grid& g = *grid;
    const std::size_t n = g.size();
    std::vector<LpRow> rows;
    std::visit(overloaded{
                   [&](const LinearSet& s) {
                       for (const auto& mr : s.rows) {
                           require_same_grid(mr.g.grid(), grid, "LinearSet");
                           std::vector<double> a(mr.g.values().begin(), mr.g.values().end());
                           if (std::isfinite(mr.lo) && mr.lo == mr.hi) {
                               rows.push_back({a, Relation::Equal, mr.lo});
                               continue;
                           }
                           if (std::isfinite(mr.lo)) rows.push_back({a, Relation::GreaterEqual, mr.lo});
                           if (std::isfinite(mr.hi)) rows.push_back({a, Relation::LessEqual, mr.hi});
                       }
                   },
                   [&](const SupportInterval& s) {
                       if (s.a > s.b) throw std::invalid_argument("SupportInterval: a > b");
                       std::vector<double> a(n, 0.0);
                       for (std::size_t i = 0; i < n; ++i)
                           if (g[i] < s.a - kGridTol || g[i] > s.b + kGridTol) a[i] = 1.0;
                       rows.push_back({std::move(a), Relation::Equal, 0.0});
                   },
                   [&](const QuantileSet& s) {
                       validate(s, g);
                       for (const auto& [x, alpha] : s.pairs) {
                           std::vector<double> below(n, 0.0), above(n, 0.0);
                           for (std::size_t i = 0; i < n; ++i) {
                               if (g[i] <= x + kGridTol) below[i] = 1.0;
                               if (g[i] >= x - kGridTol) above[i] = 1.0;
                           }
                           rows.push_back({std::move(below), Relation::GreaterEqual, alpha});
                           rows.push_back({std::move(above), Relation::GreaterEqual, 1.0 - alpha});
                       }
                   },
                   [&](const HalfSpace& s) {
                       require_same_grid(s.v.grid(), grid, "HalfSpace");
                       rows.push_back({std::vector<double>(s.v.values().begin(), s.v.values().end()),
                                       Relation::GreaterEqual, s.level});
                   },
                   [&](const Singleton& s) {
                       require_same_grid(s.prior.grid(), grid, "Singleton");
                       for (std::size_t i = 0; i < n; ++i) {
                           std::vector<double> a(n, 0.0);
                           a[i] = 1.0;
                           rows.push_back({std::move(a), Relation::Equal, s.prior[i]});
                       }
                   },
               },
               base);
    return rows;
}

ConstraintSystem to_constraints(const AmbiguitySet& set, const GridPtr& grid) {
    const std::size_t n = grid->size();
    ConstraintSystem cs;
    cs.weight_vars = n;
    if (!set.is_ball()) {
        cs.total_vars = n;
        cs.rows = base_rows(set.base, grid);
        cs.rows.push_back({ones(n), Relation::Equal, 1.0});
        return cs;
    }
    if (n > kMaxCouplingGrid)
        throw std::invalid_argument("to_constraints: ball coupling needs a grid of at most " +
                                    std::to_string(kMaxCouplingGrid) + " points");
    const Grid& g = *grid;
    cs.total_vars = n + n * n;
    auto gamma = [n](std::size_t i, std::size_t j) { return n + i * n + j; };
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> a(cs.total_vars, 0.0);
        a[i] = -1.0;
        for (std::size_t j = 0; j < n; ++j) a[gamma(i, j)] = 1.0;
        cs.rows.push_back({std::move(a), Relation::Equal, 0.0});
    }
    for (const auto& row : base_rows(set.base, grid)) {
        std::vector<double> a(cs.total_vars, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) a[gamma(i, j)] = row.coeffs[j];
        cs.rows.push_back({std::move(a), row.relation, row.rhs});
    }
    std::vector<double> cost(cs.total_vars, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cost[gamma(i, j)] = std::abs(g[i] - g[j]);
    cs.rows.push_back({std::move(cost), Relation::LessEqual, *set.radius});
    std::vector<double> mass(cs.total_vars, 0.0);
    std::fill(mass.begin(), mass.begin() + static_cast<long>(n), 1.0);
    cs.rows.push_back({std::move(mass), Relation::Equal, 1.0});
    return cs;
}

double constraint_residual(const BaseSet& base, const DiscretePrior& prior) {
    double worst = 0.0;
    for (const auto& row : base_rows(base, prior.grid()))
        worst = std::max(worst, violation(row, activity(row, prior.weights())));
    return worst;
}

bool contains(const AmbiguitySet& set, const DiscretePrior& prior, double tol) {
    if (!set.is_ball()) return constraint_residual(set.base, prior) <= tol;
    try {
        return distance_to(set.base, prior) <= *set.radius + tol;
    } catch (const std::domain_error&) {
        return false;
    }
}

BaseProjection project(const BaseSet& base, const DiscretePrior& prior) {
    const GridPtr& grid = prior.grid();
    const Grid& g = *grid;
    if (const auto* s = std::get_if<SupportInterval>(&base)) {
        const auto [lo, hi] = interval_indices(g, s->a, s->b);
        if (lo < 0) throw std::domain_error("project: support interval holds no grid point");
        std::vector<double> w(g.size(), 0.0);
        double d = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (prior[i] == 0.0) continue;
            std::size_t target = i;
            if (static_cast<long>(i) < lo) target = static_cast<std::size_t>(lo);
            if (static_cast<long>(i) > hi) target = static_cast<std::size_t>(hi);
            d += prior[i] * std::abs(g[i] - g[target]);
            w[target] += prior[i];
        }
        return {d, DiscretePrior(grid, std::move(w))};
    }
    if (const auto* s = std::get_if<Singleton>(&base)) {
        require_same_grid(s->prior.grid(), grid, "project");
        return {wasserstein1(prior, s->prior), s->prior};
    }
    auto [sol, sources] = coupling_distance_lp(base, prior);
    if (sol.status == LpStatus::Infeasible) throw std::domain_error("project: base set is empty on the grid");
    if (!sol.optimal()) throw std::runtime_error("project: coupling LP failed: " + to_string(sol.status));
    const std::size_t n = g.size();
    std::vector<double> w(n, 0.0);
    for (std::size_t s = 0; s < sources.size(); ++s)
        for (std::size_t j = 0; j < n; ++j) w[j] += sol.x[s * n + j];
    return {std::max(sol.value, 0.0), DiscretePrior::normalized(grid, std::move(w))};
}

double distance_to(const BaseSet& base, const DiscretePrior& prior) { return project(base, prior).distance; }

double tv_distance_to(const BaseSet& base, const DiscretePrior& prior) {
    // p = prior + u - w with u >= 0 and 0 <= w <= prior; minimize (sum u + sum w) / 2.
    const GridPtr& grid = prior.grid();
    const std::size_t n = grid->size();
    const auto supp = prior.support(0.0);
    const std::size_t k = supp.size();
    LinearProgram lp(n + k);
    for (std::size_t j = 0; j < n + k; ++j) lp.objective[j] = 0.5;
    for (std::size_t s = 0; s < k; ++s) lp.upper[n + s] = prior[supp[s]];
    for (const auto& row : base_rows(base, grid)) {
        std::vector<double> a(n + k, 0.0);
        for (std::size_t i = 0; i < n; ++i) a[i] = row.coeffs[i];
        for (std::size_t s = 0; s < k; ++s) a[n + s] = -row.coeffs[supp[s]];
        lp.add_row(std::move(a), row.relation, row.rhs - activity(row, prior.weights()));
    }
    std::vector<double> bal(n + k, 1.0);
    for (std::size_t s = 0; s < k; ++s) bal[n + s] = -1.0;
    lp.add_row(std::move(bal), Relation::Equal, 0.0);
    const auto sol = solve_lp(lp);
    if (sol.status == LpStatus::Infeasible) throw std::domain_error("tv_distance_to: base set is empty on the grid");
    if (!sol.optimal()) throw std::runtime_error("tv_distance_to: LP failed: " + to_string(sol.status));
    return sol.value;
}

RichProjection rich_project_ball(const AmbiguitySet& ball, const DiscretePrior& prior,
                                 const DiscretePrior& zeta) {
    if (!ball.is_ball()) throw std::invalid_argument("rich_project_ball: set is not a ball");
    require_same_grid(prior.grid(), zeta.grid(), "rich_project_ball");
    if (constraint_residual(ball.base, zeta) > 1e-8)
        throw std::invalid_argument("rich_project_ball: zeta is not in the base set");
    const double r = *ball.radius;
    const double d = wasserstein1(zeta, prior);
    const double alpha = std::min(std::max(d - r, 0.0) / r, 1.0);
    if (alpha == 0.0) return {prior, 0.0};
    std::vector<double> w(prior.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1.0 - alpha) * prior[i] + alpha * zeta[i];
    return {DiscretePrior(prior.grid(), std::move(w)), alpha};
}

double moment_interiority_margin(const LinearSet& set, const GridPtr& grid) {
    if (!set.equality_only()) throw std::invalid_argument("moment_interiority_margin: equality rows only");
    const std::size_t n = grid->size();
    const std::size_t m = set.rows.size();
    const std::size_t blocks = 2 * m;
    const std::size_t delta = blocks * n;
    LinearProgram lp(delta + 1);
    lp.objective[delta] = -1.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t dir = b / 2;
        const double sign = (b % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t k = 0; k < m; ++k) {
            std::vector<double> a(delta + 1, 0.0);
            const auto& g = set.rows[k].g;
            require_same_grid(g.grid(), grid, "moment_interiority_margin");
            for (std::size_t i = 0; i < n; ++i) a[b * n + i] = g[i];
            if (k == dir) a[delta] = -sign;
            lp.add_row(std::move(a), Relation::Equal, set.rows[k].lo);
        }
        std::vector<double> mass(delta + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) mass[b * n + i] = 1.0;
        lp.add_row(std::move(mass), Relation::Equal, 1.0);
    }
    const auto sol = solve_lp(lp);
    if (!sol.optimal()) return 0.0;
    return std::max(sol.x[delta], 0.0);
}

MomentProjection rich_project_moment(const LinearSet& set, const DiscretePrior& prior) {
    if (!set.continuous_moments)
        throw std::invalid_argument("rich_project_moment: moment functions are not continuous");
    if (!set.equality_only()) throw std::invalid_argument("rich_project_moment: equality rows only");
    const GridPtr& grid = prior.grid();
    const std::size_t n = grid->size();
    const std::size_t m = set.rows.size();

    MomentProjection out;
    std::vector<double> excess(m);
    for (std::size_t k = 0; k < m; ++k) {
        excess[k] = expectation(set.rows[k].g, prior) - set.rows[k].lo;
        out.residual += std::abs(excess[k]);
    }
    out.margin = moment_interiority_margin(set, grid);
    if (out.residual <= 1e-12) {
        out.ok = true;
        out.prior = prior;
        return out;
    }
    if (out.margin <= 1e-12) {
        out.margin = 0.0;
        out.reason = "target moments lie on the boundary of the achievable set";
        return out;
    }

    // zeta maximizes t subject to G zeta + t * excess = target; then
    // alpha = 1 / (1 + t) and (1 - alpha) G pi + alpha G zeta = target.
    LinearProgram lp(n + 1);
    lp.objective[n] = -1.0;
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<double> a(n + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) a[i] = set.rows[k].g[i];
        a[n] = excess[k];
        lp.add_row(std::move(a), Relation::Equal, set.rows[k].lo);
    }
    std::vector<double> mass(n + 1, 1.0);
    mass[n] = 0.0;
    lp.add_row(std::move(mass), Relation::Equal, 1.0);
    const auto sol = solve_lp(lp);
    if (!sol.optimal() || !(sol.x[n] > 0.0)) {
        out.reason = "no mixing partner restores the moments";
        return out;
    }
    const double t = sol.x[n];
    out.alpha = 1.0 / (1.0 + t);
    std::vector<double> z(sol.x.begin(), sol.x.begin() + static_cast<long>(n));
    out.zeta = DiscretePrior::normalized(grid, z);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = (1.0 - out.alpha) * prior[i] + out.alpha * z[i];
    out.prior = DiscretePrior::normalized(grid, std::move(w));
    out.ok = true;
    return out;
}

} // namespace robustmd
