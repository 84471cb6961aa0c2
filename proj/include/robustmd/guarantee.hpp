#pragma once

#include "robustmd/ambiguity.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace robustmd {

/// Worst-case expected payoff of a value function over an ambiguity set.
struct GuaranteeReport {
    double value = 0.0;
    std::optional<DiscretePrior> worst_prior;
    LpStatus status = LpStatus::NumericalFailure;
    /// Indices of constraint rows binding at the optimum.
    std::vector<std::size_t> active_constraints;
    long iterations = 0;
    /// |closed form - coupling| when both ball formulations were solved.
    std::optional<double> cross_check;

    bool optimal() const { return status == LpStatus::Optimal; }
};

enum class BallMethod {
    Auto,       // closed form for support intervals (plus coupling cross-check on small grids), coupling otherwise
    Coupling,   // always the n^2 coupling LP
    ClosedForm, // support-interval bases only
};

GuaranteeReport worst_case(const ValueFunction& v, const AmbiguitySet& set);

/// Worst case over the Wasserstein-1 neighborhood of radius r around a base
/// set; r = 0 reduces to the base set.
GuaranteeReport worst_case_ball(const ValueFunction& v, const BaseSet& base, double r,
                                BallMethod method = BallMethod::Auto);

struct RadiusSweep {
    std::vector<std::pair<double, double>> curve; // (r, V(r))
    /// Consecutive pairs breaking |V(r') - V(r)| <= (2 |v|_inf / r) |r - r'|.
    int equicontinuity_violations = 0;
    bool nonincreasing = true;
};

/// V(r) on an increasing list of positive radii. Independent radii are solved
/// in parallel.
RadiusSweep radius_sweep(const ValueFunction& v, const BaseSet& base, const std::vector<double>& radii,
                         BallMethod method = BallMethod::Auto);

/// inf over priors of <v, p> + lambda * W(p, base), as one LP over couplings.
/// lambda = 0 gives min_i v_i.
double variational_value(const ValueFunction& v, const BaseSet& base, double lambda);

} // namespace robustmd
