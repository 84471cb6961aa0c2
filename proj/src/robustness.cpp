#include "robustmd/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

namespace robustmd {

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::Robust: return "Robust";
    case Verdict::NonRobust: return "NonRobust";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

double lipschitz_proxy(const ValueFunction& v) {
    const Grid& g = *v.grid();
    const double jump = std::max(1.0, v.sup_norm()) * std::sqrt(g.max_spacing());
    double L = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        const double dv = std::abs(v[i + 1] - v[i]);
        if (dv <= jump) L = std::max(L, dv / (g[i + 1] - g[i]));
    }
    return L;
}

namespace {

double solve_value(const ValueFunction& v, const AmbiguitySet& set, std::optional<DiscretePrior>* prior = nullptr) {
    auto rep = worst_case(v, set);
    if (!rep.optimal()) throw std::runtime_error("check_robust: worst case LP " + to_string(rep.status));
    if (prior) *prior = std::move(rep.worst_prior);
    return rep.value;
}

// Index of the smallest v within the window around i; ties go to the nearest.
std::size_t window_argmin(const ValueFunction& v, std::size_t i, double h) {
    const Grid& g = *v.grid();
    std::size_t best = i;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double d = std::abs(g[j] - g[i]);
        if (d > h + 1e-12) continue;
        if (v[j] < v[best] || (v[j] == v[best] && d < std::abs(g[best] - g[i]))) best = j;
    }
    return best;
}

// Largest change of g across any window of width h.
double oscillation(const ValueFunction& g, double h) {
    const ValueFunction lo = lsc_envelope(g, h);
    const ValueFunction hi = -lsc_envelope(-g, h);
    double w = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) w = std::max(w, hi[i] - lo[i]);
    return w;
}

// How far the worst case can fall when every atom may move by h: on a ball
// that is at most V(r) - V(r + h); on a set of continuous moments, at most
// the drop from widening each moment bound by its oscillation over h.
// Zero for the other sets.
double window_modulus(const ValueFunction& v, const AmbiguitySet& set, double h, double guarantee) {
    GuaranteeReport wider;
    if (set.is_ball()) {
        const auto method =
            std::holds_alternative<SupportInterval>(set.base) ? BallMethod::ClosedForm : BallMethod::Coupling;
        wider = worst_case_ball(v, set.base, *set.radius + h, method);
    } else if (const auto* ls = std::get_if<LinearSet>(&set.base); ls && ls->continuous_moments) {
        LinearSet relaxed = *ls;
        for (auto& row : relaxed.rows) {
            const double w = oscillation(row.g, h);
            row.lo -= w;
            row.hi += w;
        }
        wider = worst_case(v, AmbiguitySet(std::move(relaxed)));
    } else {
        return 0.0;
    }
    if (!wider.optimal()) throw std::runtime_error("check_robust: worst case LP " + to_string(wider.status));
    return std::max(0.0, guarantee - wider.value);
}

} // namespace

RobustnessCertificate check_robust(const ValueFunction& v, const AmbiguitySet& set, const RobustOptions& opts) {
    RobustnessCertificate cert;
    const Grid& g = *v.grid();
    cert.h_schedule = window_schedule(g, opts.levels);
    cert.lipschitz = lipschitz_proxy(v);
    auto tol = [&](double h) { return std::max(2.0 * h * cert.lipschitz, opts.min_tol); };

    cert.guarantee = solve_value(v, set);
    std::vector<double> modulus;
    for (double h : cert.h_schedule) modulus.push_back(window_modulus(v, set, h, cert.guarantee));
    auto tol_at = [&](std::size_t k) { return tol(cert.h_schedule[k]) + modulus[k]; };
    for (std::size_t k = 0; k < cert.h_schedule.size(); ++k) {
        const bool last = k + 1 == cert.h_schedule.size();
        const double env = solve_value(lsc_envelope(v, cert.h_schedule[k]), set, last ? &cert.envelope_prior : nullptr);
        // The envelope never exceeds v, so negative gaps are LP noise.
        cert.gaps.push_back(std::max(0.0, cert.guarantee - env));
        if (last) cert.envelope_value = env;
    }
    const std::size_t m = cert.gaps.size();
    cert.gap = cert.gaps.back();
    cert.tolerance = tol_at(m - 1);

    const double g1 = cert.gaps[m - 1];
    const double g2 = m >= 2 ? cert.gaps[m - 2] : g1;
    const double tol2 = m >= 2 ? tol_at(m - 2) : cert.tolerance;
    const double extrapolated = 2.0 * g1 - g2;
    if (g1 <= cert.tolerance || extrapolated <= cert.tolerance) {
        cert.verdict = Verdict::Robust;
    } else if (g2 > tol2) {
        cert.verdict = Verdict::NonRobust;
        cert.witness = perturbation_witness(v, cert, opts.witnesses);
    } else {
        cert.verdict = Verdict::Inconclusive;
    }
    return cert;
}

std::vector<WitnessPrior> perturbation_witness(const ValueFunction& v, const RobustnessCertificate& cert,
                                               std::size_t k) {
    if (cert.verdict != Verdict::NonRobust || !cert.envelope_prior)
        throw std::logic_error("perturbation_witness: needs a NonRobust certificate");
    if (k == 0) return {};
    const GridPtr& grid = v.grid();
    const Grid& g = *grid;
    const double s = g.max_spacing();
    const DiscretePrior& base = *cert.envelope_prior;
    const ValueFunction w = lsc_envelope(v, s);

    // Atoms whose value drops within one cell, with the side of the drop.
    std::vector<std::pair<std::size_t, int>> defects;
    for (std::size_t i : base.support(1e-12)) {
        if (v[i] - w[i] <= cert.tolerance) continue;
        const std::size_t j = window_argmin(v, i, s);
        defects.emplace_back(i, j < i ? -1 : 1);
    }
    if (defects.empty()) throw std::logic_error("perturbation_witness: worst prior charges no defect state");

    std::vector<WitnessPrior> out;
    const double bound = cert.guarantee - 0.5 * cert.gap;
    for (std::size_t step = k; step >= 1; --step) {
        auto build = [&](bool by_argmin) {
            DiscretePrior p = base;
            for (auto [i, side] : defects) {
                std::size_t target;
                if (by_argmin) {
                    target = window_argmin(v, i, static_cast<double>(step) * s);
                } else {
                    const long t = static_cast<long>(i) + side * static_cast<long>(step);
                    target = static_cast<std::size_t>(std::clamp(t, 0L, static_cast<long>(g.size()) - 1));
                }
                if (target != i) p = push_mass(p, i, target, p[i]);
            }
            return p;
        };
        DiscretePrior p = build(false);
        if (expectation(v, p) > bound) p = build(true);
        WitnessPrior wp{p, expectation(v, p), wasserstein1(p, base)};
        out.push_back(std::move(wp));
    }
    return out;
}

std::vector<WitnessPrior> perturbation_witness(const ValueFunction& v, const AmbiguitySet& set, std::size_t k) {
    RobustOptions opts;
    opts.witnesses = k;
    const auto cert = check_robust(v, set, opts);
    if (cert.verdict != Verdict::NonRobust)
        throw std::logic_error("perturbation_witness: guarantee is " + to_string(cert.verdict));
    return cert.witness;
}

SaddleFragility saddle_fragility(const ValueFunction& v, const DiscretePrior& pi_hat, const ValueFunction& transfers,
                                 const AmbiguitySet& set, std::size_t max_atoms) {
    require_same_grid(v.grid(), pi_hat.grid(), "saddle_fragility");
    require_same_grid(v.grid(), transfers.grid(), "saddle_fragility");
    const double base = expectation(v, pi_hat);
    if (!(base > 0.0)) throw std::invalid_argument("saddle_fragility: needs a positive payoff under pi_hat");
    const auto atoms = pi_hat.support(1e-9);
    if (atoms.size() > max_atoms) throw std::invalid_argument("saddle_fragility: pi_hat is not finitely supported");
    if (!contains(set, pi_hat)) throw std::invalid_argument("saddle_fragility: pi_hat is not in the set");

    SaddleFragility out;
    std::size_t best = 0;
    double best_loss = 0.0;
    for (std::size_t i : atoms) {
        if (i == 0 || !(v[i] > 0.0) || v[i - 1] > 0.0) continue;
        const double loss = pi_hat[i] * v[i];
        if (loss > best_loss) {
            best_loss = loss;
            best = i;
        }
    }
    if (best_loss <= 0.0) return out;

    const Grid& g = *v.grid();
    out.applicable = true;
    out.theta0 = g[best];
    out.atom_mass = pi_hat[best];
    // Weaker states below theta0 with nonpositive payoff, farthest first.
    std::size_t lowest = best - 1;
    while (lowest > 0 && v[lowest - 1] <= 0.0 && best - lowest < 8) --lowest;
    const double base_transfer = expectation(transfers, pi_hat);
    out.outside_set = true;
    for (std::size_t j = lowest; j < best; ++j) {
        DiscretePrior p = push_mass(pi_hat, best, j, pi_hat[best]);
        out.payoffs.push_back(expectation(v, p));
        if (contains(set, p)) out.outside_set = false;
        if (j + 1 == best) {
            out.drop = base - out.payoffs.back();
            out.transfer_drop = base_transfer - expectation(transfers, p);
        }
        out.sequence.push_back(std::move(p));
    }
    return out;
}

QuantileCounterexample quantile_counterexample(const QuantileSet& set, const GridPtr& grid, std::size_t k) {
    validate(set, *grid);
    auto pairs = set.pairs;
    std::sort(pairs.begin(), pairs.end());
    const auto [xm, am] = pairs.back();
    if (!(am > 0.0)) throw std::invalid_argument("quantile_counterexample: alpha_m must be positive");
    const double below = pairs.size() >= 2 ? pairs[pairs.size() - 2].second : 0.0;

    std::vector<std::pair<double, double>> atoms;
    double prev = 0.0;
    for (std::size_t j = 0; j + 1 < pairs.size(); ++j) {
        atoms.emplace_back(pairs[j].first, pairs[j].second - prev);
        prev = pairs[j].second;
    }
    atoms.emplace_back(xm, 1.0 - below);
    DiscretePrior prior = DiscretePrior::from_atoms(grid, atoms);

    const Grid& g = *grid;
    ValueFunction v = ValueFunction::from_function(grid, [xm = xm](double t) { return t <= xm + 1e-12 ? 1.0 : 0.0; });
    const auto rep = worst_case(v, AmbiguitySet(set));
    if (!rep.optimal()) throw std::runtime_error("quantile_counterexample: worst case LP " + to_string(rep.status));

    QuantileCounterexample out{v, prior, rep.value, {}, {}};
    const auto im = static_cast<std::size_t>(g.index_of(xm));
    for (std::size_t step = k; step >= 1; --step) {
        const std::size_t target = std::min(im + step, g.size() - 1);
        if (target == im) break;
        DiscretePrior p = push_mass(prior, im, target, prior[im]);
        out.witness_payoffs.push_back(expectation(v, p));
        out.witnesses.push_back(std::move(p));
    }
    return out;
}

HausdorffProbe hausdorff_lsc_probe(const ValueFunction& v, const std::vector<DiscretePrior>& set, double scale) {
    if (set.empty()) throw std::invalid_argument("hausdorff_lsc_probe: empty set");
    if (scale < 0.0) throw std::invalid_argument("hausdorff_lsc_probe: negative scale");
    HausdorffProbe out;
    out.base_value = std::numeric_limits<double>::infinity();
    for (const auto& p : set) out.base_value = std::min(out.base_value, expectation(v, p));
    if (scale == 0.0) {
        out.perturbed_values.push_back(out.base_value);
        return out;
    }
    const Grid& g = *v.grid();
    for (const auto& p : set) {
        for (std::size_t i : p.support()) {
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (j == i || std::abs(g[j] - g[i]) > scale + 1e-12) continue;
                const double val = expectation(v, push_mass(p, i, j, p[i]));
                out.perturbed_values.push_back(std::min(out.base_value, val));
            }
        }
    }
    if (out.perturbed_values.empty()) out.perturbed_values.push_back(out.base_value);
    out.jump = out.base_value - *std::min_element(out.perturbed_values.begin(), out.perturbed_values.end());
    return out;
}

} // namespace robustmd
