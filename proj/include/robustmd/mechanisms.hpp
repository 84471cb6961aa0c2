#pragma once

#include "robustmd/ambiguity.hpp"

#include <string>
#include <vector>

namespace robustmd {

enum class Objective { Revenue, NegRegret };

/// Value of a posted price p: revenue p 1{theta >= p}, or that revenue minus
/// theta. The buyer purchases at theta = p.
ValueFunction posted_price_value(double p, const GridPtr& grid, Objective objective);

/// Right-continuous CDF of a random posted price sampled on a grid; q_i is
/// the purchase probability of type theta_i.
struct PriceCdf {
    GridPtr grid;
    std::vector<double> q;

    PriceCdf(GridPtr grid, std::vector<double> q);
};

/// Revenue(theta_i) = sum_{j <= i} theta_j (q_j - q_{j-1}); regret is theta
/// minus revenue.
ValueFunction cdf_value(const PriceCdf& q, Objective objective);

/// Regret from the integrated form theta (1 - q(theta)) + int_0^theta q, with
/// q constant between grid points.
ValueFunction cdf_regret_integrated(const PriceCdf& q);

/// Minimax-regret price distribution for values supported on [theta_bar, 1].
PriceCdf bs_optimal_cdf(double theta_bar, const GridPtr& grid);

/// theta_bar - (1/2) sqrt(theta_bar / e) (3 + ln theta_bar), for 1/e < theta_bar < 1.
double critical_radius(double theta_bar);

/// psi(theta_bar, alpha) = theta_bar - theta_bar (theta_bar e)^(-1/alpha) (alpha + 1 + ln theta_bar) / alpha.
double psi(double theta_bar, double alpha);

/// The alpha > 2 with psi(theta_bar, alpha) = r, for 0 < r < critical_radius.
double solve_alpha(double theta_bar, double r);

/// The beta >= 1 with sqrt(theta_bar / e) (ln beta + 1/beta - 1) = r - critical_radius,
/// for r >= critical_radius.
double solve_beta(double theta_bar, double r);

enum class PricingCase { LowThetaBar, SmallRadius, LargeRadius };
std::string to_string(PricingCase c);

struct RobustifiedPricing {
    double theta_bar = 0.0;
    double r = 0.0;
    PricingCase case_tag = PricingCase::LowThetaBar;
    double alpha = 0.0;
    double kappa = 0.0;
    double beta = 0.0; // LargeRadius only
    /// Top of the worst prior's support: 1 for SmallRadius, the top of the
    /// grid for LowThetaBar, and for LargeRadius the point
    /// exp((r - r_hat) / kappa) at which its transport cost to the base set
    /// equals r. The atom there costs (top - 1) kappa / top, which the beta
    /// equation leaves out, so the two differ.
    double prior_top = 1.0;
    double r_hat = 0.0;
    double r0 = 0.0;   // regret plateau on [theta_bar, 1]
    double guarantee = 0.0; // regret guarantee over the neighborhood
    PriceCdf qhat;
    DiscretePrior worst_prior;
};

/// Grid on [0, max(1 + 10 r, 2)] with the given spacing and every structural
/// point of the robustified solution for (theta_bar, r) inserted.
GridPtr monopoly_grid(double theta_bar, double r, double spacing = 1.0 / 400.0);

/// Minimax-regret pricing over the radius-r Wasserstein neighborhood of the
/// priors on [theta_bar, 1]. The grid must contain the structural points;
/// use monopoly_grid. For theta_bar <= 1/e the reported prior mixes the
/// unperturbed worst prior with an atom at the top of the grid, which comes
/// within r / (e (theta_max - 1)) of a designer best response.
RobustifiedPricing robustify(double theta_bar, double r, const GridPtr& grid);

struct SaddleReport {
    double designer_slack = 0.0;      // best posted-price revenue minus revenue of qhat, under the prior
    double nature_slack = 0.0;        // neighborhood worst-case regret minus regret under the prior
    double wasserstein_residual = 0.0; // |W(prior, base) - r|
    double prior_regret = 0.0;
    double ball_regret = 0.0;
};

SaddleReport verify_saddle(const RobustifiedPricing& sol);

/// (theta + (1 - theta) alpha / (1 - alpha)) 1{theta >= alpha}, 0 < alpha < 1/2.
ValueFunction persuasion_value(double alpha, const GridPtr& grid);

/// Priors on [lo, hi] with the given mean.
LinearSet support_mean_set(const GridPtr& grid, double lo, double hi, double mean);

struct MedianExample {
    ValueFunction v;
    AmbiguitySet set;
    DiscretePrior pi_hat;
    double expected_guarantee = 0.0;
};

/// Posted price lambda, the median-lambda set and 1/2 delta_0 + 1/2 delta_lambda.
MedianExample median_example_bundle(double lambda, const GridPtr& grid);

} // namespace robustmd
