#pragma once

#include "robustmd/measures.hpp"
#include "robustmd/optim.hpp"

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace robustmd {

/// Bounds lo <= <g, pi> <= hi on one moment; an equality when lo == hi.
struct MomentRow {
    ValueFunction g;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

/// Priors satisfying finitely many moment bounds.
struct LinearSet {
    std::vector<MomentRow> rows;
    /// True iff every g is the grid sample of a continuous function. Set by
    /// the caller; the grid cannot tell.
    bool continuous_moments = false;

    bool equality_only() const;
};

/// Priors concentrating on [a, b].
struct SupportInterval {
    double a = 0.0;
    double b = 0.0;
};

/// Priors with x_j an alpha_j-quantile for every pair: P(theta <= x_j) >=
/// alpha_j and P(theta >= x_j) >= 1 - alpha_j.
struct QuantileSet {
    std::vector<std::pair<double, double>> pairs;
};

/// Priors with <v, pi> >= level.
struct HalfSpace {
    ValueFunction v;
    double level = 0.0;
};

struct Singleton {
    DiscretePrior prior;
};

/// Any set form other than a Wasserstein neighborhood.
using BaseSet = std::variant<LinearSet, SupportInterval, QuantileSet, HalfSpace, Singleton>;

/// A base set, or its closed Wasserstein-1 neighborhood of radius r > 0.
struct AmbiguitySet {
    BaseSet base;
    std::optional<double> radius;

    AmbiguitySet(BaseSet b) : base(std::move(b)) {}
    static AmbiguitySet ball(BaseSet b, double r);

    bool is_ball() const { return radius.has_value(); }
};

// Factories for the common shapes.
LinearSet mean_set(const GridPtr& grid, double mean);
QuantileSet median_set(double median);
/// Validates the quantile invariants against the grid.
void validate(const QuantileSet& q, const Grid& grid);
std::string describe(const BaseSet& base);

/// Linear rows over the prior weights (one variable per grid point). The
/// simplex row sum(p) = 1 is not included.
std::vector<LpRow> base_rows(const BaseSet& base, const GridPtr& grid);

/// Full constraint system of a set over the prior weights p (first n
/// variables). Balls add n*n coupling variables gamma_ij (row i = source
/// state of p, column j = target state in the base set) after the weights.
struct ConstraintSystem {
    std::size_t weight_vars = 0;
    std::size_t total_vars = 0;
    std::vector<LpRow> rows;
};

ConstraintSystem to_constraints(const AmbiguitySet& set, const GridPtr& grid);

/// Largest coupling grid accepted by the n^2-variable formulations.
constexpr std::size_t kMaxCouplingGrid = 200;

/// Membership up to tol on every constraint residual. Balls are checked
/// through distance_to(base) <= r + tol.
bool contains(const AmbiguitySet& set, const DiscretePrior& prior, double tol = 1e-8);

/// Worst residual of the base rows at a prior (0 for members).
double constraint_residual(const BaseSet& base, const DiscretePrior& prior);

struct BaseProjection {
    double distance = 0.0;
    std::optional<DiscretePrior> nearest; // unset when the base set is infeasible
};

/// Wasserstein-1 distance from a prior to a base set and a nearest member.
/// Support intervals use the closed form sum_i p_i dist(theta_i, [a, b]);
/// singletons use wasserstein1; the other shapes solve the coupling LP.
/// Throws std::domain_error when the base set is empty on the grid.
BaseProjection project(const BaseSet& base, const DiscretePrior& prior);
double distance_to(const BaseSet& base, const DiscretePrior& prior);

/// Total-variation distance from a prior to a base set (LP).
double tv_distance_to(const BaseSet& base, const DiscretePrior& prior);

struct RichProjection {
    DiscretePrior prior;
    double alpha = 0.0;
};

/// Mixture (1 - alpha) pi + alpha zeta with
/// alpha = min{ (D(zeta, pi) - r)_+ / r, 1 }, D = wasserstein1. zeta must
/// belong to the base set of the ball.
RichProjection rich_project_ball(const AmbiguitySet& ball, const DiscretePrior& prior,
                                 const DiscretePrior& zeta);

struct MomentProjection {
    bool ok = false;
    std::optional<DiscretePrior> prior;
    std::optional<DiscretePrior> zeta;
    double alpha = 0.0;
    double residual = 0.0; // l1 norm of the moment violation of the input
    double margin = 0.0;   // interiority margin of the target moments
    std::string reason;
};

/// Restores the equality moments of a continuous-moment LinearSet by mixing
/// the prior with a finitely supported zeta found by LP. zeta is chosen to
/// push the moments as far as possible against the violation, which gives
/// the smallest mixing weight; that weight never exceeds
/// residual / (residual + margin). Throws std::invalid_argument for sets
/// flagged with discontinuous moments or with inequality rows.
MomentProjection rich_project_moment(const LinearSet& set, const DiscretePrior& prior);

/// Interiority margin of the target moments: the largest delta such that the
/// l1 ball of that radius around the target lies in the achievable moment
/// polytope of the grid.
double moment_interiority_margin(const LinearSet& set, const GridPtr& grid);

} // namespace robustmd
