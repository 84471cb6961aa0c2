#pragma once

#include "robustmd/guarantee.hpp"

#include <optional>
#include <string>
#include <vector>

namespace robustmd {

enum class Verdict { Robust, NonRobust, Inconclusive };
std::string to_string(Verdict v);

struct WitnessPrior {
    DiscretePrior prior;
    double payoff = 0.0;
    double distance = 0.0; // wasserstein1 to the envelope worst prior, a member of the set
};

struct RobustnessCertificate {
    Verdict verdict = Verdict::Inconclusive;
    double guarantee = 0.0;
    double envelope_value = 0.0; // envelope worst case at the smallest window
    double gap = 0.0;            // guarantee - envelope_value
    double tolerance = 0.0;      // decision threshold at the smallest window
    double lipschitz = 0.0;      // slope proxy of v away from jumps
    std::vector<double> h_schedule; // decreasing
    std::vector<double> gaps;       // one per window
    std::optional<DiscretePrior> envelope_prior;
    std::vector<WitnessPrior> witness; // filled for NonRobust only
};

struct RobustOptions {
    int levels = 2;          // windows 2^levels * s, ..., s
    double min_tol = 1e-4;
    std::size_t witnesses = 4;
};

/// Compares the worst case of v with the worst case of its windowed-min
/// envelope over the same set.
///
/// With tol(h) = max(2 h L, min_tol) and gaps g(h) on the schedule:
/// Robust when g(s) <= tol(s) or the linear extrapolation 2 g(s) - g(2s) to
/// h = 0 is within tol(s); NonRobust when g(s), g(2s) and the extrapolation
/// all exceed their tolerances; Inconclusive otherwise. Moving every atom by
/// at most h keeps a ball of radius r inside the ball of radius r + h, and
/// keeps a continuous moment within its oscillation over h of its bound, so
/// on those sets tol(h) also carries the matching drop of the worst case:
/// V(r) - V(r + h), or the worst case minus that over the widened bounds.
/// This absorbs the one-cell error of the grid LP itself.
RobustnessCertificate check_robust(const ValueFunction& v, const AmbiguitySet& set, const RobustOptions& opts = {});

/// Lipschitz proxy: largest |dv/dtheta| over adjacent grid cells whose jump
/// stays below max(1, |v|_inf) * sqrt(s). Larger jumps count as
/// discontinuities.
double lipschitz_proxy(const ValueFunction& v);

/// k perturbations of the envelope worst prior. Defective atoms move by
/// h_j = (k + 1 - j) s toward the low side of the window, so the distances to
/// the worst prior strictly decrease. Throws std::logic_error unless the
/// certificate is NonRobust.
std::vector<WitnessPrior> perturbation_witness(const ValueFunction& v, const RobustnessCertificate& cert,
                                               std::size_t k);
/// Runs check_robust first.
std::vector<WitnessPrior> perturbation_witness(const ValueFunction& v, const AmbiguitySet& set, std::size_t k);

struct SaddleFragility {
    bool applicable = false;
    double theta0 = 0.0;
    double atom_mass = 0.0;
    std::vector<DiscretePrior> sequence; // weaker states approaching theta0
    std::vector<double> payoffs;
    double drop = 0.0;          // payoff loss of the last prior in the sequence
    double transfer_drop = 0.0; // loss of expected transfers for the same prior
    bool outside_set = false;   // every prior of the sequence lies outside the set
};

/// Replaces the atom of pi_hat at theta0 by the grid states just below it
/// while the payoff there stays <= 0. Picks the atom with the largest
/// pi_hat(theta0) * v(theta0). Throws std::invalid_argument when
/// <v, pi_hat> <= 0, when pi_hat has more than max_atoms atoms above 1e-9,
/// or when pi_hat is not in the set.
SaddleFragility saddle_fragility(const ValueFunction& v, const DiscretePrior& pi_hat, const ValueFunction& transfers,
                                 const AmbiguitySet& set, std::size_t max_atoms = 32);

struct QuantileCounterexample {
    ValueFunction v;
    DiscretePrior prior;  // member of the set
    double guarantee = 0.0;
    std::vector<DiscretePrior> witnesses; // top atom moved just above x_m
    std::vector<double> witness_payoffs;
};

/// Indicator of theta <= x_m for the largest quantile point x_m, a member of
/// the set attaining it, and perturbations that keep only alpha_{m-1}.
/// Throws std::invalid_argument when alpha_m = 0.
QuantileCounterexample quantile_counterexample(const QuantileSet& set, const GridPtr& grid, std::size_t k = 4);

struct HausdorffProbe {
    double base_value = 0.0;
    std::vector<double> perturbed_values; // min over the set plus one perturbation
    double jump = 0.0;                    // base_value - min(perturbed_values)
};

/// Min payoff over a finite set of priors and over the set enlarged by each
/// whole-atom move of at most `scale`. Scale 0 leaves the set unchanged.
HausdorffProbe hausdorff_lsc_probe(const ValueFunction& v, const std::vector<DiscretePrior>& set, double scale);

} // namespace robustmd
