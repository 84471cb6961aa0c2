#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace robustmd {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LpRow {
    std::vector<double> coeffs;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
};

/// min c'x subject to dense rows and per-variable bounds lo <= x <= hi.
///
/// Lower bounds must be finite (default 0); upper bounds default to +inf.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<LpRow> rows;
    std::vector<double> lower;
    std::vector<double> upper;

    explicit LinearProgram(std::size_t variables = 0);

    std::size_t variables() const { return objective.size(); }
    void add_row(std::vector<double> coeffs, Relation rel, double rhs);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

std::string to_string(LpStatus s);

struct LpSolution {
    LpStatus status = LpStatus::NumericalFailure;
    std::vector<double> x;
    double value = std::numeric_limits<double>::quiet_NaN();
    /// One multiplier per user row, sign convention of min c'x: y <= 0 on <=
    /// rows, y >= 0 on >= rows.
    std::vector<double> dual;
    /// c - A'y over the user rows.
    std::vector<double> reduced_costs;
    long iterations = 0;

    bool optimal() const { return status == LpStatus::Optimal; }
};

struct LpOptions {
    double feasibility_tol = 1e-8;
    double pivot_tol = 1e-10;
    double optimality_tol = 1e-9;
    /// Consecutive degenerate pivots tolerated under the largest-coefficient
    /// rule before the phase switches to Bland's rule for good.
    int degenerate_switch = 50;
    bool parallel = true;
};

/// Two-phase dense tableau simplex.
///
/// Entering columns follow the largest-coefficient rule with lowest-index tie
/// breaking; a run of degenerate pivots switches the phase to Bland's rule,
/// which guarantees termination. The final basis is checked against the
/// original rows and refactorized once by Gaussian elimination when the
/// tableau has drifted; a basis that is still infeasible or singular yields
/// NumericalFailure.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts = {});

struct LpDiagnostics {
    double primal_residual = 0.0;   // worst row or bound violation
    double dual_residual = 0.0;     // worst dual sign violation
    double complementarity = 0.0;   // worst |multiplier * slack|
    double dual_value = 0.0;
};

/// Optimality certificate residuals for an Optimal solution.
LpDiagnostics diagnose(const LinearProgram& lp, const LpSolution& sol);

struct RootResult {
    double root = 0.0;
    int iterations = 0;
};

/// Bisection for a sign change of f on [lo, hi] until hi - lo <= tol.
/// Throws std::invalid_argument when f(lo) and f(hi) share a sign and neither
/// endpoint is within tol of a root.
RootResult bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10);

inline double solve_bracketed(const std::function<double(double)>& f, double lo, double hi,
                              double tol = 1e-10) {
    return bisect(f, lo, hi, tol).root;
}

} // namespace robustmd
