#pragma once

#include <optional>

#include "loglinear.hpp"

namespace catinfo {

// Greedy chain decomposition of I(focus; others): at each step the remaining
// conditioner with the largest CMI p-value is peeled (ties broken by variable
// declaration order), so the most dispensable terms surface first.
DecompositionReport peel_decompose(const ContingencyTable& table, VarSet focus,
                                   VarSet others, double alpha);

struct DispensabilityScore {
    int variable = -1;
    int leading_insignificant = 0;   // flagged terms before the first significant one
    double first_significant_p = 2.0; // sentinel 2.0 when no term is significant
};

// Variables of `active`, most dispensable first.
std::vector<DispensabilityScore> rank_dispensability(const ContingencyTable& table,
                                                     VarSet active, double alpha);

// One CMI term of the selection narrative: I(lhs; rhs | conditioner).
struct SelectionTerm {
    int lhs = -1; // the peeled (focus) variable
    int rhs = -1;
    VarSet conditioner = 0;
    InfoStat stat;
    bool sparse = false;
    std::optional<TwoStepResult> two_step; // retained terms with a conditioner
};

struct InformationModel {
    std::vector<SelectionTerm> retained;
    std::vector<SelectionTerm> deleted;
    std::vector<int> peel_order;
    std::vector<DecompositionReport> peels; // one narrative per peeled variable
    InfoStat total;                         // all-singletons multiway MI
};

// Backward CMI deletion over the whole table: repeatedly peel the most
// dispensable variable, deleting its insignificant terms and retaining the
// significant ones (annotated with the two-step split). Decomposition runs
// to the last pair so retained + deleted account for the total MI exactly.
InformationModel backward_select(const ContingencyTable& table, double alpha,
                                 double alpha_int);

struct CandidateModel {
    ModelFormula formula;
    LoglinearFit fit;
    bool acceptable = false; // converged and deviance p >= alpha_fit
    std::string note;        // diagnostics (non-convergence etc.)
};

struct CandidateOptions {
    double alpha_fit = 0.05;
    int refine_depth = 2;          // rounds of single-generator replacements
    std::size_t max_candidates = 200;
    IpfOptions ipf;
};

// Map retained terms to hierarchical model candidates: each term contributes
// {lhs,rhs} plus its conditioner when the interaction component is
// significant; singletons keep every variable in the model. Refinement
// enumerates single-generator replacements (two-way margins, lhs-anchored
// pairs, and per-conditioner three-way reductions), fits every distinct
// candidate, and sorts by (acceptable desc, AIC asc, formula text).
std::vector<CandidateModel> terms_to_candidates(const InformationModel& model,
                                                const ContingencyTable& table,
                                                const CandidateOptions& options = {});

} // namespace catinfo
