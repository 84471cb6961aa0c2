#include "robustmd/mechanisms.hpp"

#include "robustmd/guarantee.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace robustmd {

namespace {

const double kInvE = std::exp(-1.0);

void require_on_grid(const Grid& g, double x, const char* what) {
    if (g.index_of(x) < 0) throw std::invalid_argument(std::string("robustify: grid lacks ") + what);
}

// Mass of the cell [theta_i, theta_{i+1}) placed at theta_i, from the left
// limit F(theta-) of a CDF. Posted-price revenue p P(theta >= p) is then exact
// at grid prices.
DiscretePrior left_discretize(const GridPtr& grid, const std::function<double(double)>& f_left) {
    const Grid& g = *grid;
    std::vector<double> w(g.size());
    for (std::size_t i = 0; i + 1 < g.size(); ++i) w[i] = f_left(g[i + 1]) - f_left(g[i]);
    w.back() = 1.0 - f_left(g.back());
    return DiscretePrior::normalized(grid, std::move(w));
}

} // namespace

ValueFunction posted_price_value(double p, const GridPtr& grid, Objective objective) {
    if (p < 0.0) throw std::invalid_argument("posted_price_value: negative price");
    return ValueFunction::from_function(grid, [&](double t) {
        const double rev = t >= p - 1e-12 ? p : 0.0;
        return objective == Objective::Revenue ? rev : rev - t;
    });
}

PriceCdf::PriceCdf(GridPtr g, std::vector<double> values) : grid(std::move(g)), q(std::move(values)) {
    if (!grid || q.size() != grid->size()) throw std::invalid_argument("PriceCdf: size mismatch");
    for (std::size_t i = 0; i < q.size(); ++i) {
        if (!(q[i] >= -1e-12 && q[i] <= 1.0 + 1e-12)) throw std::invalid_argument("PriceCdf: value outside [0, 1]");
        if (i > 0 && q[i] < q[i - 1] - 1e-12) throw std::invalid_argument("PriceCdf: not nondecreasing");
        q[i] = std::clamp(q[i], 0.0, 1.0);
    }
    if (std::abs(q.back() - 1.0) > 1e-12) throw std::invalid_argument("PriceCdf: must reach 1 on the grid");
}

ValueFunction cdf_value(const PriceCdf& q, Objective objective) {
    const Grid& g = *q.grid;
    std::vector<double> v(g.size());
    double rev = 0.0, prev = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        rev += g[i] * (q.q[i] - prev);
        prev = q.q[i];
        v[i] = objective == Objective::Revenue ? rev : rev - g[i];
    }
    return ValueFunction(q.grid, std::move(v));
}

ValueFunction cdf_regret_integrated(const PriceCdf& q) {
    const Grid& g = *q.grid;
    std::vector<double> v(g.size());
    double integral = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i > 0) integral += q.q[i - 1] * (g[i] - g[i - 1]);
        v[i] = g[i] * (1.0 - q.q[i]) + integral;
    }
    return ValueFunction(q.grid, std::move(v));
}

PriceCdf bs_optimal_cdf(double theta_bar, const GridPtr& grid) {
    if (!(theta_bar >= 0.0 && theta_bar < 1.0)) throw std::invalid_argument("bs_optimal_cdf: theta_bar must be in [0, 1)");
    const double start = std::max(theta_bar, kInvE);
    std::vector<double> q(grid->size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double t = (*grid)[i];
        if (t < start - 1e-12) q[i] = 0.0;
        else if (t < 1.0 - 1e-12) q[i] = 1.0 + std::log(t);
        else q[i] = 1.0;
    }
    return PriceCdf(grid, std::move(q));
}

double critical_radius(double theta_bar) {
    if (!(theta_bar > kInvE && theta_bar < 1.0))
        throw std::invalid_argument("critical_radius: theta_bar must be in (1/e, 1)");
    return theta_bar - 0.5 * std::sqrt(theta_bar * kInvE) * (3.0 + std::log(theta_bar));
}

double psi(double theta_bar, double alpha) {
    return theta_bar -
           theta_bar * std::pow(theta_bar * std::exp(1.0), -1.0 / alpha) * (alpha + 1.0 + std::log(theta_bar)) / alpha;
}

double solve_alpha(double theta_bar, double r) {
    const double r_hat = critical_radius(theta_bar);
    if (!(r > 0.0)) throw std::invalid_argument("solve_alpha: radius must be positive");
    if (r >= r_hat) throw std::invalid_argument("solve_alpha: radius at or above the critical radius");
    auto f = [&](double a) { return psi(theta_bar, a) - r; };
    double hi = 4.0;
    while (f(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw std::domain_error("solve_alpha: no bracket");
    }
    return solve_bracketed(f, 2.0, hi, 1e-13);
}

double solve_beta(double theta_bar, double r) {
    const double r_hat = critical_radius(theta_bar);
    if (r < r_hat) throw std::invalid_argument("solve_beta: radius below the critical radius");
    const double target = (r - r_hat) / std::sqrt(theta_bar * kInvE);
    if (target == 0.0) return 1.0;
    auto f = [&](double b) { return std::log(b) + 1.0 / b - 1.0 - target; };
    double hi = 2.0;
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e300) throw std::domain_error("solve_beta: no bracket");
    }
    return solve_bracketed(f, 1.0, hi, 1e-13);
}

std::string to_string(PricingCase c) {
    switch (c) {
    case PricingCase::LowThetaBar: return "LowThetaBar";
    case PricingCase::SmallRadius: return "SmallRadius";
    case PricingCase::LargeRadius: return "LargeRadius";
    }
    return "?";
}

GridPtr monopoly_grid(double theta_bar, double r, double spacing) {
    if (!(theta_bar >= 0.0 && theta_bar < 1.0) || !(r >= 0.0))
        throw std::invalid_argument("monopoly_grid: bad parameters");
    std::vector<double> extra{kInvE, 1.0};
    if (theta_bar > 0.0) extra.push_back(theta_bar);
    if (theta_bar > kInvE) {
        const double r_hat = critical_radius(theta_bar);
        if (r == 0.0) {
            // nothing beyond theta_bar
        } else if (r < r_hat) {
            const double a = solve_alpha(theta_bar, r);
            extra.push_back(theta_bar * std::pow(theta_bar * std::exp(1.0), -1.0 / a));
        } else {
            const double kappa = std::sqrt(theta_bar * kInvE);
            extra.push_back(kappa);
            extra.push_back(solve_beta(theta_bar, r));
            extra.push_back(std::exp((r - r_hat) / kappa));
        }
    }
    return Grid::uniform(0.0, std::max(1.0 + 10.0 * r, 2.0), spacing, extra);
}

RobustifiedPricing robustify(double theta_bar, double r, const GridPtr& grid) {
    if (!(theta_bar >= 0.0 && theta_bar < 1.0)) throw std::invalid_argument("robustify: theta_bar must be in [0, 1)");
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("robustify: radius must be positive");
    const Grid& g = *grid;
    require_on_grid(g, 1.0, "theta = 1");
    if (g.back() < 1.0 + r) throw std::invalid_argument("robustify: grid must extend past 1 + r");

    const double e = std::exp(1.0);
    double alpha = 0.0, kappa = 0.0, beta = 0.0, r_hat = 0.0, r0 = 0.0, guarantee = 0.0, upper = 1.0;
    PricingCase tag;
    std::function<double(double)> f_left;
    std::vector<double> q(g.size());

    if (theta_bar <= kInvE) {
        tag = PricingCase::LowThetaBar;
        require_on_grid(g, kInvE, "1/e");
        r0 = kInvE;
        guarantee = kInvE + r;
        const double top = g.back();
        upper = top;
        const double eps = r / (top - 1.0);
        f_left = [=](double t) {
            const double base = t <= kInvE ? 0.0 : (t <= 1.0 ? 1.0 - kInvE / t : 1.0);
            return (1.0 - eps) * base + (t > top ? eps : 0.0);
        };
        for (std::size_t i = 0; i < g.size(); ++i)
            q[i] = g[i] < kInvE - 1e-12 ? 0.0 : (g[i] < 1.0 - 1e-12 ? 1.0 + std::log(g[i]) : 1.0);
    } else {
        require_on_grid(g, theta_bar, "theta_bar");
        r_hat = critical_radius(theta_bar);
        if (r < r_hat) {
            tag = PricingCase::SmallRadius;
            alpha = solve_alpha(theta_bar, r);
            kappa = theta_bar * std::pow(theta_bar * e, -1.0 / alpha);
            r0 = kappa - (alpha - 1.0) * (theta_bar - kappa);
            guarantee = r0 + (alpha - 1.0) * r;
        } else {
            tag = PricingCase::LargeRadius;
            alpha = 2.0;
            kappa = std::sqrt(theta_bar / e);
            beta = solve_beta(theta_bar, r);
            r0 = 2.0 * kappa - theta_bar;
            guarantee = r0 + r;
            upper = std::exp((r - r_hat) / kappa);
            require_on_grid(g, upper, "the worst prior's top atom");
        }
        require_on_grid(g, kappa, "kappa");
        f_left = [=](double t) { return t <= kappa ? 0.0 : (t <= upper ? 1.0 - kappa / t : 1.0); };
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double t = g[i];
            if (t < kappa - 1e-12) q[i] = 0.0;
            else if (t < theta_bar - 1e-12) q[i] = std::min(1.0, alpha * std::log(t / kappa));
            else if (t < 1.0 - 1e-12) q[i] = 1.0 + std::log(t);
            else q[i] = 1.0;
        }
    }

    DiscretePrior prior = left_discretize(grid, f_left);
    // Discretization can push the prior slightly past the radius; pull it back
    // toward its projection so it stays in the neighborhood.
    const SupportInterval base{theta_bar, 1.0};
    const auto proj = project(base, prior);
    if (proj.distance > r && proj.nearest) {
        const double t = r / proj.distance;
        std::vector<double> w(g.size());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = t * prior[i] + (1.0 - t) * (*proj.nearest)[i];
        prior = DiscretePrior::normalized(grid, std::move(w));
    }

    return RobustifiedPricing{theta_bar, r, tag, alpha, kappa, beta, upper, r_hat, r0, guarantee,
                              PriceCdf(grid, std::move(q)), std::move(prior)};
}

SaddleReport verify_saddle(const RobustifiedPricing& sol) {
    const GridPtr& grid = sol.qhat.grid;
    const Grid& g = *grid;
    const DiscretePrior& prior = sol.worst_prior;
    SaddleReport out;

    double best = 0.0, tail = 1.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        best = std::max(best, g[k] * tail); // tail = P(theta >= theta_k)
        tail -= prior[k];
    }
    const ValueFunction revenue = cdf_value(sol.qhat, Objective::Revenue);
    out.designer_slack = best - expectation(revenue, prior);

    const ValueFunction neg_regret = cdf_value(sol.qhat, Objective::NegRegret);
    const SupportInterval base{sol.theta_bar, 1.0};
    const auto rep = worst_case_ball(neg_regret, base, sol.r, BallMethod::ClosedForm);
    if (!rep.optimal()) throw std::runtime_error("verify_saddle: ball LP " + to_string(rep.status));
    out.ball_regret = -rep.value;
    out.prior_regret = -expectation(neg_regret, prior);
    out.nature_slack = out.ball_regret - out.prior_regret;
    out.wasserstein_residual = std::abs(distance_to(base, prior) - sol.r);
    return out;
}

ValueFunction persuasion_value(double alpha, const GridPtr& grid) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("persuasion_value: alpha must be in (0, 1/2)");
    const double c = alpha / (1.0 - alpha);
    return ValueFunction::from_function(grid, [=](double t) { return t >= alpha - 1e-12 ? t + (1.0 - t) * c : 0.0; });
}

LinearSet support_mean_set(const GridPtr& grid, double lo, double hi, double mean) {
    if (!(lo <= mean && mean <= hi)) throw std::invalid_argument("support_mean_set: mean outside the support");
    LinearSet set = mean_set(grid, mean);
    set.continuous_moments = false;
    MomentRow outside{ValueFunction::from_function(grid, [=](double t) {
                          return (t < lo - 1e-12 || t > hi + 1e-12) ? 1.0 : 0.0;
                      }),
                      0.0, 0.0};
    set.rows.push_back(std::move(outside));
    return set;
}

MedianExample median_example_bundle(double lambda, const GridPtr& grid) {
    if (grid->index_of(lambda) < 0) throw std::invalid_argument("median_example_bundle: lambda off the grid");
    if (grid->index_of(0.0) < 0) throw std::invalid_argument("median_example_bundle: grid must contain 0");
    return MedianExample{posted_price_value(lambda, grid, Objective::Revenue), AmbiguitySet(median_set(lambda)),
                         DiscretePrior::from_atoms(grid, {{0.0, 0.5}, {lambda, 0.5}}), 0.5 * lambda};
}

} // namespace robustmd
