#include "robustmd/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace robustmd {

using nlohmann::json;

void CsvTable::add(std::string name, std::vector<double> values) {
    if (!columns.empty() && values.size() != columns.front().size())
        throw std::invalid_argument("CsvTable: column '" + name + "' has the wrong length");
    header.push_back(std::move(name));
    columns.push_back(std::move(values));
}

std::string format_number(double x) {
    if (!std::isfinite(x)) throw std::domain_error("format_number: non-finite value");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x == 0.0 ? 0.0 : x); // drop negative zero
    return buf;
}

std::string format_csv(const CsvTable& t) {
    std::string out;
    for (std::size_t c = 0; c < t.header.size(); ++c) out += (c ? "," : "") + t.header[c];
    out += '\n';
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            if (c) out += ',';
            out += format_number(t.columns[c][r]);
        }
        out += '\n';
    }
    return out;
}

json prior_json(const DiscretePrior& prior, double tol) {
    json atoms = json::array();
    for (std::size_t i : prior.support(tol)) atoms.push_back({(*prior.grid())[i], prior[i]});
    return atoms;
}

json grid_json(const Grid& g) {
    return {{"lo", g.front()}, {"hi", g.back()}, {"size", g.size()}, {"maxSpacing", g.max_spacing()}};
}

json guarantee_json(const GuaranteeReport& rep) {
    json j{{"status", to_string(rep.status)}, {"iterations", rep.iterations}};
    if (rep.optimal()) {
        j["value"] = rep.value;
        j["activeConstraints"] = rep.active_constraints;
        if (rep.worst_prior) j["worstPrior"] = prior_json(*rep.worst_prior);
    }
    if (rep.cross_check) j["crossCheck"] = *rep.cross_check;
    return j;
}

json certificate_json(const RobustnessCertificate& c) {
    json j{{"verdict", to_string(c.verdict)},
           {"guarantee", c.guarantee},
           {"envelopeValue", c.envelope_value},
           {"gap", c.gap},
           {"tolerance", c.tolerance},
           {"lipschitz", c.lipschitz},
           {"hSchedule", c.h_schedule},
           {"gaps", c.gaps}};
    if (c.envelope_prior) j["envelopePrior"] = prior_json(*c.envelope_prior);
    json w = json::array();
    for (const auto& wp : c.witness)
        w.push_back({{"payoff", wp.payoff}, {"distance", wp.distance}, {"prior", prior_json(wp.prior)}});
    j["witness"] = std::move(w);
    return j;
}

json pricing_json(const RobustifiedPricing& s) {
    json j{{"thetaBar", s.theta_bar}, {"r", s.r},           {"case", to_string(s.case_tag)},
           {"alpha", s.alpha},        {"kappa", s.kappa},   {"rHat", s.r_hat},
           {"r0", s.r0},              {"guarantee", s.guarantee}};
    if (s.case_tag == PricingCase::LargeRadius) j["beta"] = s.beta;
    return j;
}

json saddle_json(const SaddleReport& r) {
    return {{"designerSlack", r.designer_slack},
            {"natureSlack", r.nature_slack},
            {"wassersteinResidual", r.wasserstein_residual},
            {"priorRegret", r.prior_regret},
            {"ballRegret", r.ball_regret}};
}

bool all_finite(const json& j) {
    if (j.is_number_float()) return std::isfinite(j.get<double>());
    if (j.is_structured()) {
        for (const auto& x : j)
            if (!all_finite(x)) return false;
    }
    return true;
}

void write_outputs(const std::filesystem::path& dir, const json& report, const std::map<std::string, CsvTable>& tables) {
    if (!all_finite(report)) throw std::domain_error("write_outputs: report holds a non-finite number");
    std::vector<std::pair<std::filesystem::path, std::string>> files;
    files.emplace_back(dir / "report.json", report.dump(2) + "\n");
    for (const auto& [name, table] : tables) files.emplace_back(dir / (name + ".csv"), format_csv(table));

    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> temps;
    try {
        for (const auto& [path, body] : files) {
            auto tmp = path;
            tmp += ".tmp";
            std::ofstream out(tmp, std::ios::binary);
            temps.push_back(tmp);
            out << body;
            if (!out.flush()) throw std::runtime_error("write_outputs: cannot write " + tmp.string());
        }
    } catch (...) {
        for (const auto& t : temps) std::filesystem::remove(t);
        throw;
    }
    for (std::size_t k = 0; k < files.size(); ++k) std::filesystem::rename(temps[k], files[k].first);
}

} // namespace robustmd
