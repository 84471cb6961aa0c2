#pragma once

#include "robustmd/guarantee.hpp"
#include "robustmd/mechanisms.hpp"
#include "robustmd/robustness.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace robustmd {

/// Columns of equal length; the first is conventionally theta.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;

    void add(std::string name, std::vector<double> values);
    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

/// Numbers are written with 9 significant digits.
std::string format_csv(const CsvTable& table);
std::string format_number(double x);

nlohmann::json prior_json(const DiscretePrior& prior, double tol = 1e-12);
nlohmann::json grid_json(const Grid& grid);
nlohmann::json guarantee_json(const GuaranteeReport& rep);
nlohmann::json certificate_json(const RobustnessCertificate& cert);
nlohmann::json pricing_json(const RobustifiedPricing& sol);
nlohmann::json saddle_json(const SaddleReport& rep);

/// True iff every number in the document is finite.
bool all_finite(const nlohmann::json& j);

/// Writes report.json and every table as <name>.csv into dir. Everything is
/// formatted and checked first, then written to temporary names and renamed,
/// so a failure leaves no partial CSV behind.
void write_outputs(const std::filesystem::path& dir, const nlohmann::json& report,
                   const std::map<std::string, CsvTable>& tables);

} // namespace robustmd
