#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "varset.hpp"

namespace catinfo {

// One categorical variable: a name plus its ordered level labels.
struct VariableSpec {
    std::string name;
    std::vector<std::string> levels;

    std::size_t cardinality() const { return levels.size(); }
    // Throws SchemaError if the label is not a declared level.
    int level_index(std::string_view label) const;
};

void validate_schema(const std::vector<VariableSpec>& vars);

enum class Provenance { Observed, Fitted };

// A named level assignment, e.g. {{"X","0"},{"Y","1"}}.
using Assignment = std::vector<std::pair<std::string, std::string>>;

struct ProbabilityTable;

// Dense multi-way table of nonnegative cell weights.
//
// Layout: row-major over the variable list, the last-listed variable varies
// fastest; cell index = sum_k level[k] * stride[k] with stride[last] = 1.
// Tables are immutable after construction and safe for concurrent reads.
class ContingencyTable {
public:
    static constexpr std::size_t kMaxVariables = 32;
    static constexpr std::size_t kMaxCells = std::size_t{1} << 24;

    ContingencyTable(std::vector<VariableSpec> vars, std::vector<double> cells,
                     Provenance provenance);

    // Sparse construction: unmentioned cells are zero, duplicates are summed.
    static ContingencyTable from_cell_counts(
        const std::vector<VariableSpec>& schema,
        const std::vector<std::pair<Assignment, double>>& rows);

    // Tally of subject-level records; each record must assign every variable.
    static ContingencyTable from_records(const std::vector<VariableSpec>& schema,
                                         const std::vector<Assignment>& records);

    const std::vector<VariableSpec>& variables() const { return vars_; }
    std::size_t n_variables() const { return vars_.size(); }
    std::size_t n_cells() const { return cells_.size(); }
    const std::vector<double>& cells() const { return cells_; }
    double total() const { return total_; }
    Provenance provenance() const { return provenance_; }
    bool observed() const { return provenance_ == Provenance::Observed; }

    VarSet all_variables() const;
    int variable_index(std::string_view name) const; // throws SchemaError
    VarSet variable_set(std::span<const std::string> names) const;
    // Re-express a subset of `other`'s variables (matched by name) in this
    // table's index space; used after marginalize/compound re-indexing.
    VarSet variable_set_from(const ContingencyTable& other, VarSet s) const;
    std::string set_label(VarSet s) const; // "{A,B}" or "A" for singletons

    std::size_t stride(std::size_t var) const { return strides_[var]; }
    std::size_t cell_index(std::span<const int> levels) const;
    void unravel(std::size_t index, std::span<int> levels_out) const;

    // Product of cardinalities over a subset.
    std::size_t joint_cardinality(VarSet s) const;

    // Sum over all variables not in `keep`; kept variables stay in their
    // original order and the grand total is preserved.
    ContingencyTable marginalize(VarSet keep) const;
    ContingencyTable marginalize(std::span<const std::string> keep) const;

    // Replace >=2 variables by a single variable whose levels are the tuples
    // of constituent levels. Pure re-indexing; the compound variable takes
    // the position of the group's first member.
    ContingencyTable compound(VarSet group, const std::string& new_name) const;

    ProbabilityTable to_pdf() const; // throws NumericError when total == 0

private:
    std::vector<VariableSpec> vars_;
    std::vector<double> cells_;
    std::vector<std::size_t> strides_;
    double total_ = 0.0;
    Provenance provenance_ = Provenance::Observed;
};

// Same shape as ContingencyTable, cells sum to 1.
struct ProbabilityTable {
    std::vector<VariableSpec> variables;
    std::vector<double> cells;

    std::size_t joint_cardinality(VarSet s) const;
};

// For every cell of `table`, the index of its bucket in the margin over
// `keep` (margin laid out like marginalize(keep)); used by the information
// measures and IPF, which repeatedly fold cells onto margins.
std::vector<std::uint32_t> margin_map(const std::vector<VariableSpec>& vars,
                                      VarSet keep);

} // namespace catinfo
