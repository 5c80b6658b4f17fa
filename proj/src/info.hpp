#pragma once

#include <optional>
#include <string>
#include <vector>

#include "table.hpp"

namespace catinfo {

// A likelihood-ratio-scale statistic on the 2N * natural-log scale, directly
// chi-square referenced. df == 0 carries p = 1 by convention.
struct InfoStat {
    double value = 0.0;
    long df = 0;
    double p_value = 1.0;
};

InfoStat make_info_stat(double value, long df);

// Disjoint nonempty variable groups; the arguments of a grouped MI.
struct GroupPartition {
    std::vector<VarSet> groups;

    static GroupPartition of(std::vector<VarSet> groups); // validates
};

// Marginal Shannon entropy of `subset` in nats.
double entropy(const ProbabilityTable& pdf, VarSet subset);

// 2N * sum f log(f / prod_g f_g) over the partition's groups.
// df = prod(c_g) - 1 - sum(c_g - 1) where c_g are joint group cardinalities.
InfoStat mutual_information(const ContingencyTable& table, const GroupPartition& partition);

// 2N-scale LR statistic for conditional independence of A and B given C.
// C may be empty (plain MI). df = (a-1)(b-1)*c with nominal cardinalities.
InfoStat conditional_mutual_information(const ContingencyTable& table, VarSet a,
                                        VarSet b, VarSet c);

// Fraction of conditioning slices (joint conditioner levels) with zero
// total; used to annotate sparse CMI terms in reports.
double empty_slice_fraction(const ContingencyTable& table, VarSet conditioner);

// Orthogonal split of a CMI term plus the gated two-step LR test: the interaction
// is tested first, the partial association only when no interaction is found.
struct TwoStepResult {
    InfoStat cmi;
    InfoStat interaction;
    InfoStat partial;
    bool interaction_significant = false;
    bool partial_tested = false;
    bool partial_significant = false;
    bool ipf_converged = true;
};

// One chain-rule CMI term I(lhs; rhs | conditioner).
struct DecompTerm {
    VarSet lhs = 0;
    VarSet rhs = 0;
    VarSet conditioner = 0;
    InfoStat stat;
    bool flagged = false; // insignificant at the report's alpha
    bool sparse = false;  // more than half of the conditioning slices empty
    std::optional<TwoStepResult> two_step;
};

// Ordered chain decomposition; term values sum to `total` and dfs add exactly.
struct DecompositionReport {
    std::vector<DecompTerm> terms;
    InfoStat total;
    double alpha = 0.05;
};

// Explicit-order chain rule: term i is I(target; predictors[i] | union of the
// later predictors), listed largest conditioner first.
DecompositionReport chain_decompose(const ContingencyTable& table, VarSet target,
                                    const std::vector<VarSet>& predictors,
                                    double alpha);

} // namespace catinfo
