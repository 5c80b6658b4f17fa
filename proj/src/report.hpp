#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "logit.hpp"
#include "selection.hpp"
#include "simulation.hpp"

namespace catinfo {

// A finished analysis: one set of numbers rendered both ways. Text and JSON
// are built from the same structs, so they always agree.
struct Report {
    nlohmann::json json;
    std::string text;
    std::vector<std::string> warnings;
};

// Each builder takes the echo of the options the caller resolved (alpha,
// seeds, inputs, ...) which lands in the JSON under "options" and in the
// text header, making every report self-describing.
Report describe_report(const ContingencyTable& table, double alpha,
                       const nlohmann::json& options);

Report decomposition_report(const ContingencyTable& table,
                            const DecompositionReport& decomposition,
                            const std::string& title, const nlohmann::json& options);

Report loglinear_fit_report(const ContingencyTable& table, const LoglinearFit& fit,
                            double alpha, const nlohmann::json& options);

Report selection_report(const ContingencyTable& table, const InformationModel& model,
                        const std::vector<CandidateModel>& candidates,
                        const nlohmann::json& options);

Report logit_fit_report(const ContingencyTable& table, const LogitFit& fit, double alpha,
                        const nlohmann::json& options);

Report mi_logit_report(const ContingencyTable& table, const MiLogitResult& construction,
                       const LogitFit& fit, double alpha, const nlohmann::json& options);

Report aic_search_report(const ContingencyTable& table, const AicSearchResult& search,
                         const std::string& base_model, const nlohmann::json& options);

Report simulation_report(const AcceptanceReport& report, const nlohmann::json& options);

// Text formatting shared with the CLI: p-values below 1e-16 print as
// "<1e-16"; stored JSON keeps full precision.
std::string format_p(double p);

} // namespace catinfo
