#pragma once

#include "formula.hpp"
#include "info.hpp"
#include "table.hpp"

namespace catinfo {

struct IpfOptions {
    double tol = 1e-8;  // max absolute margin discrepancy
    int max_iter = 1000; // full cycles over the generators
};

struct LoglinearFit {
    ModelFormula formula;
    ContingencyTable fitted;  // fractional cells, Provenance::Fitted
    InfoStat deviance;        // G2 vs saturated, df = cells - n_params
    std::size_t n_params = 0;
    double aic = 0.0;         // deviance + 2 * n_params
    bool converged = false;
    int iterations = 0;
    double max_margin_gap = 0.0;
};

// Iterative proportional fitting: cyclic adjustment to each generator margin
// until every fitted margin matches the observed one within tol. Zero
// observed margins pin the corresponding fitted cells at zero.
// Non-convergence is reported via the flag, not an exception.
LoglinearFit ipf_fit(const ContingencyTable& table, const ModelFormula& formula,
                     const IpfOptions& options = {});

struct InteractionStat {
    InfoStat stat;
    bool ipf_converged = true;
};

// Int(A;B;C): deviance of the no-three-factor-interaction model {AB,AC,BC}
// on the (A,B,C) margin with each group compounded to a single variable.
// df = (a-1)(b-1)(c-1).
InteractionStat interaction_stat(const ContingencyTable& table, VarSet a, VarSet b,
                                 VarSet c);

// Par(A;B|C) = CMI - Int, clamped at zero; df = (a-1)(b-1).
InfoStat partial_association(const ContingencyTable& table, VarSet a, VarSet b, VarSet c);

// Gated two-step LR test: no-interaction first at alpha_int; uniform
// association tested only when no interaction is found.
TwoStepResult two_step_test(const ContingencyTable& table, VarSet a, VarSet b, VarSet c,
                            double alpha_int, double alpha_par);

} // namespace catinfo
