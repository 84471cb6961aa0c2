#include "robustmd/guarantee.hpp"
#include "robustmd/mechanisms.hpp"
#include "robustmd/problem_spec.hpp"
#include "robustmd/report.hpp"
#include "robustmd/robustness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace robustmd;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kMalformed = 1, kInfeasible = 2, kNonRobust = 3, kInconclusive = 4 };

enum class LogLevel { Quiet, Info, Debug };
LogLevel g_log = LogLevel::Info;

void log_at(LogLevel level, const std::string& msg) {
    if (static_cast<int>(level) <= static_cast<int>(g_log) && g_log != LogLevel::Quiet)
        std::cerr << "[robustmd] " << msg << "\n";
}

void init_logging() {
    const char* env = std::getenv("ROBUSTMD_LOG");
    if (!env) return;
    const std::string s = env;
    if (s == "quiet") g_log = LogLevel::Quiet;
    else if (s == "info") g_log = LogLevel::Info;
    else if (s == "debug") g_log = LogLevel::Debug;
    else std::cerr << "[robustmd] ignoring ROBUSTMD_LOG=" << s << " (expected quiet, info or debug)\n";
}

struct Flags {
    std::string spec_path;
    std::string out_dir;
    std::optional<double> grid_spacing;
    std::optional<double> tol;
    std::optional<double> theta_bar;
    std::optional<double> radius;
    std::string figure;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot read spec file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ProblemSpec load_spec(const Flags& f, const std::string& command, bool required) {
    ProblemSpec spec;
    spec.command = command;
    if (!f.spec_path.empty()) {
        spec = parse_problem_spec(read_file(f.spec_path));
        if (spec.command != command)
            throw SpecError("spec command '" + spec.command + "' does not match '" + command + "'");
    } else if (required) {
        throw SpecError(command + " needs --spec");
    }
    if (f.grid_spacing) {
        if (!(*f.grid_spacing > 0.0)) throw SpecError("--grid-spacing must be positive");
        spec.grid.spacing = *f.grid_spacing;
    }
    if (f.tol) {
        if (!(*f.tol > 0.0)) throw SpecError("--tol must be positive");
        spec.options.tol = *f.tol;
    }
    if (f.theta_bar) spec.options.theta_bar = *f.theta_bar;
    if (f.radius) spec.options.radius = *f.radius;
    return spec;
}

json provenance(const Grid& grid, const ProblemSpec& spec, long iterations) {
    const LpOptions lp;
    return {{"grid", grid_json(grid)},
            {"tolerances",
             {{"robustTol", spec.options.tol},
              {"lpFeasibility", lp.feasibility_tol},
              {"lpPivot", lp.pivot_tol},
              {"lpOptimality", lp.optimality_tol}}},
            {"iterations", iterations}};
}

std::vector<double> grid_column(const Grid& g) { return {g.points().begin(), g.points().end()}; }
std::vector<double> values_column(const ValueFunction& v) { return {v.values().begin(), v.values().end()}; }
std::vector<double> weights_column(const DiscretePrior& p) { return {p.weights().begin(), p.weights().end()}; }

std::vector<double> cdf_column(const DiscretePrior& p) {
    std::vector<double> out(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) out[i] = std::min(1.0, acc += p[i]);
    return out;
}

void finish(const Flags& f, const json& report, const std::map<std::string, CsvTable>& tables) {
    if (!all_finite(report)) throw std::domain_error("report holds a non-finite number");
    if (!f.out_dir.empty()) {
        write_outputs(f.out_dir, report, tables);
        log_at(LogLevel::Info, "wrote " + std::to_string(tables.size() + 1) + " files to " + f.out_dir);
    }
    std::cout << report.dump(2) << "\n";
}

int cmd_guarantee(const Flags& f) {
    const ProblemSpec spec = load_spec(f, "guarantee", true);
    const GridPtr grid = build_grid(spec);
    const ValueFunction v = build_value(*spec.value, grid);
    const AmbiguitySet set = build_ambiguity(*spec.ambiguity, grid, v);
    log_at(LogLevel::Debug, "grid has " + std::to_string(grid->size()) + " points; set " + describe(set.base));
    const GuaranteeReport rep = worst_case(v, set);
    log_at(LogLevel::Info, "worst case LP " + to_string(rep.status));

    json report{{"command", "guarantee"},
                {"spec", json::parse(serialize(spec))},
                {"result", guarantee_json(rep)},
                {"provenance", provenance(*grid, spec, rep.iterations)}};
    std::map<std::string, CsvTable> tables;
    CsvTable value;
    value.add("theta", grid_column(*grid));
    value.add("value", values_column(v));
    tables["value"] = std::move(value);
    if (rep.worst_prior) {
        CsvTable prior;
        prior.add("theta", grid_column(*grid));
        prior.add("mass", weights_column(*rep.worst_prior));
        tables["worst_prior"] = std::move(prior);
    }
    finish(f, report, tables);
    if (rep.status == LpStatus::Infeasible) return kInfeasible;
    if (!rep.optimal()) throw std::runtime_error("worst case LP " + to_string(rep.status));
    return kOk;
}

int cmd_check_robust(const Flags& f) {
    const ProblemSpec spec = load_spec(f, "check-robust", true);
    const GridPtr grid = build_grid(spec);
    const ValueFunction v = build_value(*spec.value, grid);
    const AmbiguitySet set = build_ambiguity(*spec.ambiguity, grid, v);
    const GuaranteeReport base = worst_case(v, set);
    if (base.status == LpStatus::Infeasible) {
        json report{{"command", "check-robust"}, {"spec", json::parse(serialize(spec))}, {"result", guarantee_json(base)}};
        finish(f, report, {});
        return kInfeasible;
    }
    RobustOptions opts;
    opts.min_tol = spec.options.tol;
    opts.levels = spec.options.levels;
    opts.witnesses = static_cast<std::size_t>(spec.options.witnesses);
    const RobustnessCertificate cert = check_robust(v, set, opts);
    log_at(LogLevel::Info, "verdict " + to_string(cert.verdict) + ", gap " + format_number(cert.gap));

    json report{{"command", "check-robust"},
                {"spec", json::parse(serialize(spec))},
                {"result", certificate_json(cert)},
                {"provenance", provenance(*grid, spec, base.iterations)}};
    std::map<std::string, CsvTable> tables;
    CsvTable env;
    env.add("theta", grid_column(*grid));
    env.add("value", values_column(v));
    env.add("envelope", values_column(lsc_envelope(v, cert.h_schedule.back())));
    tables["envelope"] = std::move(env);
    if (!cert.witness.empty()) {
        CsvTable w;
        w.add("theta", grid_column(*grid));
        for (std::size_t k = 0; k < cert.witness.size(); ++k)
            w.add("witness_" + std::to_string(k + 1), weights_column(cert.witness[k].prior));
        tables["witness"] = std::move(w);
    }
    finish(f, report, tables);
    switch (cert.verdict) {
    case Verdict::Robust: return kOk;
    case Verdict::NonRobust: return kNonRobust;
    case Verdict::Inconclusive: return kInconclusive;
    }
    return kInconclusive;
}

int cmd_robustify(const Flags& f) {
    const ProblemSpec spec = load_spec(f, "robustify", false);
    const double tb = spec.options.theta_bar, r = spec.options.radius;
    if (!(tb >= 0.0 && tb < 1.0) || !(r > 0.0)) throw SpecError("robustify needs 0 <= thetaBar < 1 and radius > 0");
    const GridPtr grid = monopoly_grid(tb, r, spec.grid.spacing);
    const RobustifiedPricing sol = robustify(tb, r, grid);
    const SaddleReport saddle = verify_saddle(sol);
    log_at(LogLevel::Info, to_string(sol.case_tag) + " guarantee " + format_number(sol.guarantee));

    json report{{"command", "robustify"},
                {"spec", json::parse(serialize(spec))},
                {"result", pricing_json(sol)},
                {"saddle", saddle_json(saddle)},
                {"worstPrior", prior_json(sol.worst_prior, 1e-9)},
                {"provenance", provenance(*grid, spec, 0)}};
    CsvTable t;
    t.add("theta", grid_column(*grid));
    t.add("qhat", sol.qhat.q);
    t.add("regret", values_column(-cdf_value(sol.qhat, Objective::NegRegret)));
    t.add("worst_prior_cdf", cdf_column(sol.worst_prior));
    finish(f, report, {{"robustify", std::move(t)}});
    return kOk;
}

int cmd_figure(const Flags& f) {
    ProblemSpec spec = load_spec(f, "figure", false);
    const std::string name = !f.figure.empty() ? f.figure : spec.options.figure;
    spec.options.figure = name;
    const double s = spec.grid.spacing;
    json report{{"command", "figure"}, {"figure", name}, {"spec", json::parse(serialize(spec))}};
    CsvTable t;

    if (name == "fig1") {
        const double lambda = 0.4;
        const GridPtr grid = Grid::uniform(0.0, 1.0, s, {lambda});
        const MedianExample ex = median_example_bundle(lambda, grid);
        const auto rep = worst_case(ex.v, ex.set);
        t.add("theta", grid_column(*grid));
        t.add("value", values_column(ex.v));
        t.add("prior_cdf", cdf_column(ex.pi_hat));
        report["guarantee"] = rep.value;
        report["provenance"] = provenance(*grid, spec, rep.iterations);
    } else if (name == "fig2") {
        const double tb = 0.5;
        const GridPtr grid = Grid::uniform(0.0, 1.5, s, {tb, std::exp(-1.0), 1.0});
        const PriceCdf q = bs_optimal_cdf(tb, grid);
        const ValueFunction regret = -cdf_value(q, Objective::NegRegret);
        t.add("theta", grid_column(*grid));
        t.add("qhat", q.q);
        t.add("regret", values_column(regret));
        report["plateau"] = regret[static_cast<std::size_t>(grid->index_of(tb))];
        report["atom"] = q.q[static_cast<std::size_t>(grid->index_of(tb))];
        report["provenance"] = provenance(*grid, spec, 0);
    } else if (name == "fig3") {
        const double alpha = 0.3;
        const GridPtr grid = Grid::uniform(0.0, 1.0, s, {alpha, 0.6});
        const ValueFunction v = persuasion_value(alpha, grid);
        t.add("theta", grid_column(*grid));
        t.add("value", values_column(v));
        report["valueAtAlpha"] = v[static_cast<std::size_t>(grid->index_of(alpha))];
        report["provenance"] = provenance(*grid, spec, 0);
    } else if (name == "fig4") {
        const double tb = 0.5;
        const std::vector<double> radii{0.0, 0.001, 0.003, 0.006};
        std::vector<double> extra{tb, std::exp(-1.0), 1.0};
        for (double r : radii) {
            if (r == 0.0) continue;
            const GridPtr g = monopoly_grid(tb, r, s);
            for (double x : g->points())
                if (std::abs(x / s - std::round(x / s)) > 1e-9) extra.push_back(x);
        }
        const GridPtr grid = Grid::uniform(0.0, 2.0, s, extra);
        t.add("theta", grid_column(*grid));
        json curves = json::array();
        for (double r : radii) {
            const std::string tag = format_number(r);
            if (r == 0.0) {
                const PriceCdf q = bs_optimal_cdf(tb, grid);
                const ValueFunction regret = -cdf_value(q, Objective::NegRegret);
                t.add("qhat_r" + tag, q.q);
                t.add("regret_r" + tag, values_column(regret));
                curves.push_back({{"r", r}, {"kink", tb}, {"plateau", regret[static_cast<std::size_t>(grid->index_of(tb))]}});
            } else {
                const RobustifiedPricing sol = robustify(tb, r, grid);
                t.add("qhat_r" + tag, sol.qhat.q);
                t.add("regret_r" + tag, values_column(-cdf_value(sol.qhat, Objective::NegRegret)));
                curves.push_back({{"r", r}, {"kink", sol.kappa}, {"plateau", sol.r0}, {"case", to_string(sol.case_tag)}});
            }
        }
        report["curves"] = curves;
        report["provenance"] = provenance(*grid, spec, 0);
    } else {
        throw SpecError("unknown figure '" + name + "' (expected fig1, fig2, fig3 or fig4)");
    }
    finish(f, report, {{name, std::move(t)}});
    return kOk;
}

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--spec", f.spec_path, "JSON problem spec");
    sub->add_option("--out", f.out_dir, "output directory for report.json and CSV files");
    sub->add_option("--grid-spacing", f.grid_spacing, "override the grid spacing");
    sub->add_option("--tol", f.tol, "override the robustness tolerance");
}

} // namespace

int main(int argc, char** argv) {
    init_logging();
    CLI::App app{"Payoff guarantees and robustness checks for mechanisms under ambiguity"};
    app.require_subcommand(1);
    Flags f;
    auto* g = app.add_subcommand("guarantee", "worst-case payoff over an ambiguity set");
    auto* c = app.add_subcommand("check-robust", "robustness verdict with perturbation witnesses");
    auto* r = app.add_subcommand("robustify", "robustified minimax-regret pricing");
    auto* fig = app.add_subcommand("figure", "data series for fig1 .. fig4");
    for (auto* sub : {g, c, r, fig}) add_common(sub, f);
    r->add_option("--theta-bar", f.theta_bar, "lower end of the value support");
    r->add_option("--radius", f.radius, "Wasserstein radius");
    fig->add_option("name", f.figure, "fig1, fig2, fig3 or fig4");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kMalformed;
    }

    try {
        if (g->parsed()) return cmd_guarantee(f);
        if (c->parsed()) return cmd_check_robust(f);
        if (r->parsed()) return cmd_robustify(f);
        return cmd_figure(f);
    } catch (const SpecError& e) {
        std::cerr << "robustmd: malformed input: " << e.what() << "\n";
        return kMalformed;
    } catch (const std::invalid_argument& e) {
        std::cerr << "robustmd: invalid parameters: " << e.what() << "\n";
        return kMalformed;
    } catch (const std::exception& e) {
        std::cerr << "robustmd: error: " << e.what() << "\n";
        return kMalformed;
    }
}
