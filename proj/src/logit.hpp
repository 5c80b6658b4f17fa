#pragma once

#include <optional>
#include <string>
#include <vector>

#include "info.hpp"
#include "table.hpp"

namespace catinfo {

// Grouped binary logit model: predictor term subsets (main effects are
// singletons) plus an implicit intercept. Terms are kept hierarchical and
// sorted by (order, mask) so model text is canonical.
struct LogitModel {
    int target = -1;
    std::vector<VarSet> terms;

    VarSet predictor_set() const;
};

LogitModel make_logit_model(const ContingencyTable& table, int target,
                            std::vector<VarSet> terms);

// Text syntax: "S ~ D + A + D:A + M"; "S ~ 1" is intercept-only.
LogitModel parse_logit_model(const std::string& text, const ContingencyTable& table);
std::string logit_model_text(const LogitModel& model,
                             const std::vector<VariableSpec>& vars);

struct LogitFit {
    LogitModel model;
    std::vector<std::string> coef_names; // intercept first
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    double log_likelihood = 0.0;
    InfoStat deviance; // vs the saturated grouped model
    std::size_t n_params = 0;
    std::size_t n_patterns = 0; // covariate patterns with at least 1 observation
    double aic = 0.0;           // -2 log_likelihood + 2 n_params, exactly
    bool converged = false;
    bool separation = false;
    int iterations = 0;
};

struct LogitOptions {
    double tol = 1e-10;
    int max_iter = 100;
    double separation_bound = 30.0; // |beta| beyond this flags separation
};

// Newton ascent on the grouped binomial log-likelihood with step-halving;
// the likelihood never decreases across iterations. Rank deficiency throws
// a NumericError naming the collinear column; separation is flagged, not
// thrown. Level coding is 0/1 dummies against each variable's first level.
LogitFit fit_logit(const ContingencyTable& table, const LogitModel& model,
                   const LogitOptions& options = {});

// Probability of the target's level-1 outcome at every cell of `table`'s
// margin over the model's predictors (laid out like marginalize()).
std::vector<double> fitted_pattern_probabilities(const ContingencyTable& table,
                                                 const LogitFit& fit);

struct MiLogitResult {
    LogitModel model;
    DecompositionReport report; // per-predictor CMI with Int/Par splits
    std::vector<int> dropped;   // predictors removed in stage 1
};

// The MI construction: greedily peel the target's CMI chain, drop predictors
// whose full-order CMI is insignificant unless their partial association is
// significant, then assemble main effects from significant Par components and
// interaction terms from significant Int components decomposed to the lowest
// significant order.
MiLogitResult mi_logit_construct(const ContingencyTable& table, int target,
                                 double alpha, double alpha_int);

struct AicSearchStep {
    std::string action; // "add" or "remove"
    std::string term;
    double aic = 0.0;
};

struct AicSearchResult {
    LogitFit fit;
    std::vector<AicSearchStep> steps;
    std::vector<std::string> diagnostics;
};

// Greedy best-first AIC descent: at each step fit all single-term additions
// (from candidate_terms) and removals (of any term not supporting a larger
// one), accept the best improving move, stop at a local minimum.
AicSearchResult aic_neighborhood_search(const ContingencyTable& table,
                                        const LogitModel& base,
                                        const std::vector<VarSet>& candidate_terms,
                                        const LogitOptions& options = {});

// Fit the logit model directly and through its log-linear equivalent (model
// terms joined with the target plus the saturated predictor margin), and
// return the maximum absolute coefficient discrepancy between the routes.
double loglinear_equivalence_check(const ContingencyTable& table,
                                   const LogitModel& model);

} // namespace catinfo
