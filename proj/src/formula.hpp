#pragma once

#include <string>
#include <vector>

#include "table.hpp"

namespace catinfo {

// Hierarchical log-linear model given by its generating class. Generators
// are kept maximal (non-nested) in the order supplied; IPF cycles them in
// that order, so the order is part of the reproducible fit description.
struct ModelFormula {
    std::vector<VarSet> generators;

    static ModelFormula from_generators(std::vector<VarSet> gens); // prunes nested

    // All nonempty subsets contained in some generator, ascending as masks.
    std::vector<VarSet> closure() const;

    bool same_model_as(const ModelFormula& other) const; // closure equality
};

// Text syntax: comma-separated generators; a generator is either a single
// variable name, a '*'-joined list (multi-character names), or a string of
// single-character variable names, e.g. "ACS,ADG,GM" or "A*C*S, G*M".
ModelFormula parse_formula(const std::string& text, const std::vector<VariableSpec>& vars);

std::string formula_text(const ModelFormula& formula, const std::vector<VariableSpec>& vars);

// 1 + sum over the closure of prod_{v in s} (card(v) - 1).
std::size_t n_parameters(const ModelFormula& formula, const std::vector<VariableSpec>& vars);

// Residual df of the fitted model: cell count minus parameter count.
long residual_df(const ModelFormula& formula, const std::vector<VariableSpec>& vars);

} // namespace catinfo
