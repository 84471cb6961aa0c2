#include "robustmd/optim.hpp"

#include "robustmd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace robustmd {

LinearProgram::LinearProgram(std::size_t variables)
    : objective(variables, 0.0), lower(variables, 0.0),
      upper(variables, std::numeric_limits<double>::infinity()) {}

void LinearProgram::add_row(std::vector<double> coeffs, Relation rel, double rhs) {
    rows.push_back(LpRow{std::move(coeffs), rel, rhs});
}

std::string to_string(LpStatus s) {
    switch (s) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::NumericalFailure: return "NumericalFailure";
    }
    return "Unknown";
}

namespace {

// Standard form after shifting x = lo + x' and flipping rows to b >= 0.
struct StandardForm {
    std::size_t n = 0;                    // structural columns
    std::size_t m = 0;                    // rows, user rows first
    std::size_t user_rows = 0;
    std::vector<const std::vector<double>*> user_coeffs;
    std::vector<long> bound_var;          // for internal rows: variable index, else -1
    std::vector<double> sign;             // +1 or -1 applied to the row
    std::vector<Relation> rel;            // after flipping
    std::vector<double> rhs;              // after shifting and flipping

    double coeff(std::size_t row, std::size_t col) const {
        if (row < user_rows) return sign[row] * (*user_coeffs[row])[col];
        return static_cast<std::size_t>(bound_var[row]) == col ? 1.0 : 0.0;
    }
};

Relation flip(Relation r) {
    if (r == Relation::LessEqual) return Relation::GreaterEqual;
    if (r == Relation::GreaterEqual) return Relation::LessEqual;
    return r;
}

void validate(const LinearProgram& lp) {
    const std::size_t n = lp.variables();
    if (lp.lower.size() != n || lp.upper.size() != n)
        throw std::invalid_argument("solve_lp: bound vectors must match the variable count");
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(lp.objective[j])) throw std::invalid_argument("solve_lp: non-finite cost");
        if (!std::isfinite(lp.lower[j])) throw std::invalid_argument("solve_lp: lower bounds must be finite");
        if (std::isnan(lp.upper[j]) || lp.upper[j] < lp.lower[j])
            throw std::invalid_argument("solve_lp: upper bound below lower bound");
    }
    for (const auto& row : lp.rows) {
        if (row.coeffs.size() != n) throw std::invalid_argument("solve_lp: row length differs from variable count");
        if (!std::isfinite(row.rhs)) throw std::invalid_argument("solve_lp: non-finite right-hand side");
        for (double a : row.coeffs)
            if (!std::isfinite(a)) throw std::invalid_argument("solve_lp: non-finite coefficient");
    }
}

StandardForm standardize(const LinearProgram& lp) {
    StandardForm sf;
    sf.n = lp.variables();
    sf.user_rows = lp.rows.size();
    for (const auto& row : lp.rows) {
        double b = row.rhs;
        for (std::size_t j = 0; j < sf.n; ++j) b -= row.coeffs[j] * lp.lower[j];
        const double s = b < 0.0 ? -1.0 : 1.0;
        sf.user_coeffs.push_back(&row.coeffs);
        sf.bound_var.push_back(-1);
        sf.sign.push_back(s);
        sf.rel.push_back(s < 0.0 ? flip(row.relation) : row.relation);
        sf.rhs.push_back(s * b);
    }
    for (std::size_t j = 0; j < sf.n; ++j) {
        if (!std::isfinite(lp.upper[j])) continue;
        sf.user_coeffs.push_back(nullptr);
        sf.bound_var.push_back(static_cast<long>(j));
        sf.sign.push_back(1.0);
        sf.rel.push_back(Relation::LessEqual);
        sf.rhs.push_back(lp.upper[j] - lp.lower[j]);
    }
    sf.m = sf.rhs.size();
    return sf;
}

class Tableau {
public:
    Tableau(const StandardForm& sf, const LpOptions& opts) : sf_(sf), opts_(opts) {
        const std::size_t m = sf.m;
        n_ = sf.n;
        // Column layout: structural | slack/surplus per inequality row | artificial per >=/= row.
        slack_col_.assign(m, -1);
        art_col_.assign(m, -1);
        std::size_t col = n_;
        for (std::size_t i = 0; i < m; ++i)
            if (sf.rel[i] != Relation::Equal) slack_col_[i] = static_cast<long>(col++);
        first_art_ = col;
        for (std::size_t i = 0; i < m; ++i)
            if (sf.rel[i] != Relation::LessEqual) art_col_[i] = static_cast<long>(col++);
        cols_ = col;
        stride_ = cols_ + 1;
        data_.assign((m + 1) * stride_, 0.0);
        basis_.assign(m, 0);
        for (std::size_t i = 0; i < m; ++i) {
            double* row = &data_[i * stride_];
            if (i < sf.user_rows) {
                const auto& a = *sf.user_coeffs[i];
                for (std::size_t j = 0; j < n_; ++j) row[j] = sf.sign[i] * a[j];
            } else {
                row[static_cast<std::size_t>(sf.bound_var[i])] = 1.0;
            }
            if (slack_col_[i] >= 0) row[slack_col_[i]] = sf.rel[i] == Relation::LessEqual ? 1.0 : -1.0;
            if (art_col_[i] >= 0) row[art_col_[i]] = 1.0;
            row[cols_] = sf.rhs[i];
            basis_[i] = static_cast<std::size_t>(sf.rel[i] == Relation::LessEqual ? slack_col_[i] : art_col_[i]);
        }
    }

    std::size_t identity_col(std::size_t i) const {
        return static_cast<std::size_t>(sf_.rel[i] == Relation::LessEqual ? slack_col_[i] : art_col_[i]);
    }
    bool is_artificial(std::size_t c) const { return c >= first_art_; }

    // Entry of column c in row i of the original (unpivoted) standard form.
    double column_entry(std::size_t i, std::size_t c) const {
        if (c < n_) return sf_.coeff(i, c);
        if (static_cast<long>(c) == slack_col_[i]) return sf_.rel[i] == Relation::LessEqual ? 1.0 : -1.0;
        if (static_cast<long>(c) == art_col_[i]) return 1.0;
        return 0.0;
    }
    bool has_artificials() const { return first_art_ < cols_; }
    double* row(std::size_t r) { return &data_[r * stride_]; }
    double* obj() { return row(sf_.m); }
    double rhs(std::size_t r) const { return data_[r * stride_ + cols_]; }
    const std::vector<std::size_t>& basis() const { return basis_; }
    std::size_t cols() const { return cols_; }
    long iterations() const { return iterations_; }

    void set_objective(const std::vector<double>& cost) {
        double* z = obj();
        std::fill(z, z + stride_, 0.0);
        for (std::size_t j = 0; j < cols_; ++j) z[j] = cost[j];
        for (std::size_t i = 0; i < sf_.m; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            const double* r = row(i);
            for (std::size_t j = 0; j <= cols_; ++j) z[j] -= cb * r[j];
        }
    }

    double objective_value() { return -obj()[cols_]; }

    enum class Outcome { Optimal, Unbounded, IterationLimit };

    Outcome run(bool allow_artificial) {
        const std::size_t m = sf_.m;
        const long limit = 50 * static_cast<long>(m + cols_) + 1000;
        bool bland = false;
        int degenerate_run = 0;
        for (long it = 0; it < limit; ++it) {
            const double* z = obj();
            long enter = -1;
            double best = -opts_.optimality_tol;
            for (std::size_t j = 0; j < cols_; ++j) {
                if (!allow_artificial && is_artificial(j)) continue;
                if (z[j] < -opts_.optimality_tol) {
                    if (bland) { enter = static_cast<long>(j); break; }
                    if (z[j] < best) { best = z[j]; enter = static_cast<long>(j); }
                }
            }
            if (enter < 0) return Outcome::Optimal;
            const std::size_t ec = static_cast<std::size_t>(enter);

            long leave = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m; ++i) {
                const double a = data_[i * stride_ + ec];
                if (a <= opts_.pivot_tol) continue;
                const double q = std::max(rhs(i), 0.0) / a;
                if (leave < 0 || q < ratio - 1e-12 ||
                    (q <= ratio + 1e-12 && basis_[i] < basis_[static_cast<std::size_t>(leave)])) {
                    ratio = std::min(ratio, q);
                    leave = static_cast<long>(i);
                }
            }
            if (leave < 0) return Outcome::Unbounded;

            if (ratio <= 1e-12) {
                if (++degenerate_run >= opts_.degenerate_switch) bland = true;
            } else {
                degenerate_run = 0;
            }
            pivot(static_cast<std::size_t>(leave), ec);
        }
        return Outcome::IterationLimit;
    }

    void pivot(std::size_t r, std::size_t c) {
        kernels::TableauView view{data_.data(), sf_.m + 1, stride_, stride_};
        if (opts_.parallel) kernels::pivot(view, r, c);
        else kernels::pivot_reference(view, r, c);
        basis_[r] = c;
        ++iterations_;
    }

    // Pivots zero-level artificials out of the basis where a non-artificial
    // column has a usable entry; rows without one are redundant.
    void expel_artificials() {
        for (std::size_t i = 0; i < sf_.m; ++i) {
            if (!is_artificial(basis_[i])) continue;
            const double* r = row(i);
            long best = -1;
            double mag = 1e-9;
            for (std::size_t j = 0; j < first_art_; ++j) {
                if (std::abs(r[j]) > mag) { mag = std::abs(r[j]); best = static_cast<long>(j); }
            }
            if (best >= 0) pivot(i, static_cast<std::size_t>(best));
        }
    }

private:
    const StandardForm& sf_;
    const LpOptions& opts_;
    std::size_t n_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::size_t first_art_ = 0;
    std::vector<long> slack_col_;
    std::vector<long> art_col_;
    std::vector<double> data_;
    std::vector<std::size_t> basis_;
    long iterations_ = 0;
};

// Solves the square system M z = rhs in place by partial pivoting; false if singular.
bool gauss_solve(std::vector<double>& mat, std::vector<double>& rhs, std::size_t k) {
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::abs(mat[r * k + c]) > std::abs(mat[p * k + c])) p = r;
        if (std::abs(mat[p * k + c]) < 1e-12) return false;
        if (p != c) {
            for (std::size_t j = 0; j < k; ++j) std::swap(mat[p * k + j], mat[c * k + j]);
            std::swap(rhs[p], rhs[c]);
        }
        for (std::size_t r = c + 1; r < k; ++r) {
            const double f = mat[r * k + c] / mat[c * k + c];
            if (f == 0.0) continue;
            for (std::size_t j = c; j < k; ++j) mat[r * k + j] -= f * mat[c * k + j];
            rhs[r] -= f * rhs[c];
        }
    }
    for (std::size_t c = k; c-- > 0;) {
        double s = rhs[c];
        for (std::size_t j = c + 1; j < k; ++j) s -= mat[c * k + j] * rhs[j];
        rhs[c] = s / mat[c * k + c];
    }
    return true;
}

double row_activity(const LpRow& row, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += row.coeffs[j] * x[j];
    return s;
}

double row_violation(const LpRow& row, double activity) {
    switch (row.relation) {
    case Relation::LessEqual: return std::max(0.0, activity - row.rhs);
    case Relation::GreaterEqual: return std::max(0.0, row.rhs - activity);
    case Relation::Equal: return std::abs(activity - row.rhs);
    }
    return 0.0;
}

double primal_violation(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (const auto& row : lp.rows) {
        const double scale = 1.0 + std::abs(row.rhs);
        worst = std::max(worst, row_violation(row, row_activity(row, x)) / scale);
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        worst = std::max(worst, lp.lower[j] - x[j]);
        worst = std::max(worst, x[j] - lp.upper[j]);
    }
    return worst;
}

} // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts) {
    validate(lp);
    const StandardForm sf = standardize(lp);
    Tableau tab(sf, opts);
    LpSolution sol;

    if (tab.has_artificials()) {
        std::vector<double> phase1(tab.cols(), 0.0);
        for (std::size_t c = 0; c < tab.cols(); ++c)
            if (tab.is_artificial(c)) phase1[c] = 1.0;
        tab.set_objective(phase1);
        if (tab.run(true) == Tableau::Outcome::IterationLimit) {
            sol.iterations = tab.iterations();
            return sol;
        }
        double bscale = 1.0;
        for (double b : sf.rhs) bscale = std::max(bscale, std::abs(b));
        if (tab.objective_value() > opts.feasibility_tol * bscale) {
            sol.status = LpStatus::Infeasible;
            sol.iterations = tab.iterations();
            return sol;
        }
        tab.expel_artificials();
    }

    std::vector<double> cost(tab.cols(), 0.0);
    for (std::size_t j = 0; j < sf.n; ++j) cost[j] = lp.objective[j];
    tab.set_objective(cost);
    const auto outcome = tab.run(false);
    sol.iterations = tab.iterations();
    if (outcome == Tableau::Outcome::Unbounded) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }
    if (outcome == Tableau::Outcome::IterationLimit) return sol;

    const std::size_t m = sf.m;
    const auto& basis = tab.basis();
    std::vector<double> xs(sf.n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < sf.n) xs[basis[i]] = std::max(tab.rhs(i), 0.0);
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) y[i] = -tab.obj()[tab.identity_col(i)];

    auto assemble = [&](const std::vector<double>& shifted) {
        std::vector<double> x(sf.n);
        for (std::size_t j = 0; j < sf.n; ++j) x[j] = lp.lower[j] + shifted[j];
        return x;
    };
    std::vector<double> x = assemble(xs);

    if (primal_violation(lp, x) > opts.feasibility_tol) {
        // Refactorize: rebuild B from the original columns and solve for the
        // basic values and the multipliers.
        std::vector<double> B(m * m, 0.0), Bt(m * m, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t i = 0; i < m; ++i) {
                const double a = tab.column_entry(i, basis[k]);
                B[i * m + k] = a;
                Bt[k * m + i] = a;
            }
        }
        std::vector<double> xb = sf.rhs;
        std::vector<double> cb(m, 0.0);
        for (std::size_t k = 0; k < m; ++k) cb[k] = basis[k] < sf.n ? lp.objective[basis[k]] : 0.0;
        if (!gauss_solve(B, xb, m) || !gauss_solve(Bt, cb, m)) {
            sol.status = LpStatus::NumericalFailure;
            return sol;
        }
        std::fill(xs.begin(), xs.end(), 0.0);
        for (std::size_t k = 0; k < m; ++k)
            if (basis[k] < sf.n) xs[basis[k]] = std::max(xb[k], 0.0);
        x = assemble(xs);
        y = cb;
        if (primal_violation(lp, x) > opts.feasibility_tol) {
            sol.status = LpStatus::NumericalFailure;
            return sol;
        }
    }

    sol.status = LpStatus::Optimal;
    sol.x = std::move(x);
    sol.value = 0.0;
    for (std::size_t j = 0; j < sf.n; ++j) sol.value += lp.objective[j] * sol.x[j];
    sol.dual.resize(sf.user_rows);
    for (std::size_t i = 0; i < sf.user_rows; ++i) sol.dual[i] = sf.sign[i] * y[i];
    sol.reduced_costs.assign(sf.n, 0.0);
    for (std::size_t j = 0; j < sf.n; ++j) {
        double d = lp.objective[j];
        for (std::size_t i = 0; i < sf.user_rows; ++i) d -= lp.rows[i].coeffs[j] * sol.dual[i];
        sol.reduced_costs[j] = d;
    }
    return sol;
}

LpDiagnostics diagnose(const LinearProgram& lp, const LpSolution& sol) {
    LpDiagnostics d;
    if (!sol.optimal()) return d;
    d.primal_residual = primal_violation(lp, sol.x);
    for (std::size_t i = 0; i < lp.rows.size(); ++i) {
        const auto& row = lp.rows[i];
        const double y = sol.dual[i];
        if (row.relation == Relation::LessEqual) d.dual_residual = std::max(d.dual_residual, y);
        if (row.relation == Relation::GreaterEqual) d.dual_residual = std::max(d.dual_residual, -y);
        const double slack = row_activity(row, sol.x) - row.rhs;
        d.complementarity = std::max(d.complementarity, std::abs(y * slack));
        d.dual_value += row.rhs * y;
    }
    for (std::size_t j = 0; j < sol.x.size(); ++j) {
        const double rc = sol.reduced_costs[j];
        if (rc > 0.0) {
            d.complementarity = std::max(d.complementarity, rc * (sol.x[j] - lp.lower[j]));
            d.dual_value += rc * lp.lower[j];
        } else if (rc < 0.0) {
            if (std::isfinite(lp.upper[j])) {
                d.complementarity = std::max(d.complementarity, -rc * (lp.upper[j] - sol.x[j]));
                d.dual_value += rc * lp.upper[j];
            } else {
                d.dual_residual = std::max(d.dual_residual, -rc);
            }
        }
    }
    return d;
}

RootResult bisect(const std::function<double(double)>& f, double lo, double hi, double tol) {
    if (!(hi > lo) || !(tol > 0.0)) throw std::invalid_argument("bisect: need lo < hi and tol > 0");
    double flo = f(lo);
    const double fhi = f(hi);
    if (std::abs(flo) <= tol) return {lo, 0};
    if (std::abs(fhi) <= tol) return {hi, 0};
    if ((flo < 0.0) == (fhi < 0.0)) throw std::invalid_argument("bisect: bracket does not change sign");
    int it = 0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        ++it;
        if (fm == 0.0) return {mid, it};
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return {0.5 * (lo + hi), it};
}

} // namespace robustmd
