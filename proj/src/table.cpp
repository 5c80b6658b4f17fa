#include "table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace catinfo {

int VariableSpec::level_index(std::string_view label) const
{
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i] == label)
            return static_cast<int>(i);
    throw SchemaError("unknown level '" + std::string(label) + "' for variable '" +
                      name + "'");
}

void validate_schema(const std::vector<VariableSpec>& vars)
{
    if (vars.empty())
        throw SchemaError("schema declares no variables");
    if (vars.size() > ContingencyTable::kMaxVariables)
        throw SchemaError("schema declares more than 32 variables");
    std::unordered_set<std::string> names;
    for (const auto& v : vars) {
        if (v.name.empty())
            throw SchemaError("variable with empty name");
        if (!names.insert(v.name).second)
            throw SchemaError("duplicate variable name '" + v.name + "'");
        if (v.cardinality() < 2)
            throw SchemaError("variable '" + v.name + "' needs at least 2 levels");
        std::unordered_set<std::string> lv;
        for (const auto& l : v.levels)
            if (!lv.insert(l).second)
                throw SchemaError("duplicate level '" + l + "' in variable '" +
                                  v.name + "'");
    }
}

namespace {

std::vector<std::size_t> make_strides(const std::vector<VariableSpec>& vars)
{
    std::vector<std::size_t> strides(vars.size());
    std::size_t acc = 1;
    for (std::size_t i = vars.size(); i-- > 0;) {
        strides[i] = acc;
        acc *= vars[i].cardinality();
        if (acc > ContingencyTable::kMaxCells)
            throw DomainError("table exceeds the dense cell cap (2^24 cells)");
    }
    return strides;
}

std::size_t cell_count(const std::vector<VariableSpec>& vars)
{
    std::size_t n = 1;
    for (const auto& v : vars)
        n *= v.cardinality();
    return n;
}

} // namespace

ContingencyTable::ContingencyTable(std::vector<VariableSpec> vars,
                                   std::vector<double> cells, Provenance provenance)
    : vars_(std::move(vars)), cells_(std::move(cells)), provenance_(provenance)
{
    validate_schema(vars_);
    strides_ = make_strides(vars_);
    if (cells_.size() != cell_count(vars_))
        throw DomainError("cell array length does not match the schema shape");
    for (double c : cells_) {
        if (!(c >= 0.0) || !std::isfinite(c))
            throw DomainError("cell weights must be finite and nonnegative");
    }
    total_ = std::accumulate(cells_.begin(), cells_.end(), 0.0);
}

ContingencyTable ContingencyTable::from_cell_counts(
    const std::vector<VariableSpec>& schema,
    const std::vector<std::pair<Assignment, double>>& rows)
{
    validate_schema(schema);
    std::vector<double> cells(cell_count(schema), 0.0);
    const auto strides = make_strides(schema);
    bool integral = true;
    for (const auto& [assignment, count] : rows) {
        if (!(count >= 0.0) || !std::isfinite(count))
            throw DomainError("negative or non-finite cell count");
        if (assignment.size() != schema.size())
            throw SchemaError("cell row must assign each schema variable exactly once");
        std::size_t idx = 0;
        std::uint32_t seen = 0;
        for (const auto& [var, level] : assignment) {
            std::size_t vi = schema.size();
            for (std::size_t i = 0; i < schema.size(); ++i)
                if (schema[i].name == var) { vi = i; break; }
            if (vi == schema.size())
                throw SchemaError("unknown variable '" + var + "' in cell row");
            if (seen & (1u << vi))
                throw SchemaError("variable '" + var + "' assigned twice in one row");
            seen |= 1u << vi;
            idx += static_cast<std::size_t>(schema[vi].level_index(level)) * strides[vi];
        }
        cells[idx] += count;
        if (std::floor(count) != count)
            integral = false;
    }
    return ContingencyTable(schema, std::move(cells),
                            integral ? Provenance::Observed : Provenance::Fitted);
}

ContingencyTable ContingencyTable::from_records(
    const std::vector<VariableSpec>& schema, const std::vector<Assignment>& records)
{
    std::vector<std::pair<Assignment, double>> rows;
    rows.reserve(records.size());
    for (const auto& r : records)
        rows.emplace_back(r, 1.0);
    return from_cell_counts(schema, rows);
}

VarSet ContingencyTable::all_variables() const
{
    return vars_.size() == kMaxVariables
               ? ~VarSet{0}
               : (VarSet{1} << vars_.size()) - 1;
}

int ContingencyTable::variable_index(std::string_view name) const
{
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name)
            return static_cast<int>(i);
    throw SchemaError("unknown variable '" + std::string(name) + "'");
}

VarSet ContingencyTable::variable_set(std::span<const std::string> names) const
{
    VarSet s = 0;
    for (const auto& n : names) {
        VarSet bit = vs_single(variable_index(n));
        if (s & bit)
            throw DomainError("variable '" + n + "' listed twice");
        s |= bit;
    }
    return s;
}

VarSet ContingencyTable::variable_set_from(const ContingencyTable& other, VarSet s) const
{
    VarSet out = 0;
    for (int i : vs_indices(s))
        out |= vs_single(variable_index(other.variables()[static_cast<std::size_t>(i)].name));
    return out;
}

std::string ContingencyTable::set_label(VarSet s) const
{
    const auto idx = vs_indices(s);
    if (idx.size() == 1)
        return vars_[static_cast<std::size_t>(idx[0])].name;
    std::string out = "{";
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i) out += ",";
        out += vars_[static_cast<std::size_t>(idx[i])].name;
    }
    return out + "}";
}

std::size_t ContingencyTable::cell_index(std::span<const int> levels) const
{
    std::size_t idx = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i)
        idx += static_cast<std::size_t>(levels[i]) * strides_[i];
    return idx;
}

void ContingencyTable::unravel(std::size_t index, std::span<int> levels_out) const
{
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        levels_out[i] = static_cast<int>(index / strides_[i]);
        index %= strides_[i];
    }
}

std::size_t ContingencyTable::joint_cardinality(VarSet s) const
{
    std::size_t n = 1;
    for (int i : vs_indices(s))
        n *= vars_[static_cast<std::size_t>(i)].cardinality();
    return n;
}

std::size_t ProbabilityTable::joint_cardinality(VarSet s) const
{
    std::size_t n = 1;
    for (int i : vs_indices(s))
        n *= variables[static_cast<std::size_t>(i)].cardinality();
    return n;
}

std::vector<std::uint32_t> margin_map(const std::vector<VariableSpec>& vars, VarSet keep)
{
    std::vector<std::size_t> kept_stride(vars.size(), 0);
    std::size_t acc = 1;
    for (std::size_t i = vars.size(); i-- > 0;) {
        if (vs_contains(keep, static_cast<int>(i))) {
            kept_stride[i] = acc;
            acc *= vars[i].cardinality();
        }
    }
    const std::size_t n = cell_count(vars);
    std::vector<std::uint32_t> map(n);
    std::vector<int> levels(vars.size(), 0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        std::size_t m = 0;
        for (std::size_t i = 0; i < vars.size(); ++i)
            m += static_cast<std::size_t>(levels[i]) * kept_stride[i];
        map[idx] = static_cast<std::uint32_t>(m);
        // odometer increment, last variable fastest
        for (std::size_t i = vars.size(); i-- > 0;) {
            if (++levels[i] < static_cast<int>(vars[i].cardinality()))
                break;
            levels[i] = 0;
        }
    }
    return map;
}

ContingencyTable ContingencyTable::marginalize(VarSet keep) const
{
    if (keep == 0)
        throw DomainError("marginalize requires a nonempty variable subset");
    if ((keep & ~all_variables()) != 0)
        throw DomainError("marginalize subset references unknown variables");
    if (keep == all_variables())
        return *this;

    std::vector<VariableSpec> kept;
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vs_contains(keep, static_cast<int>(i)))
            kept.push_back(vars_[i]);

    const auto map = margin_map(vars_, keep);
    std::vector<double> out(cell_count(kept), 0.0);
    for (std::size_t i = 0; i < cells_.size(); ++i)
        out[map[i]] += cells_[i];
    return ContingencyTable(std::move(kept), std::move(out), provenance_);
}

ContingencyTable ContingencyTable::marginalize(std::span<const std::string> keep) const
{
    return marginalize(variable_set(keep));
}

ContingencyTable ContingencyTable::compound(VarSet group, const std::string& new_name) const
{
    if (vs_size(group) < 2)
        throw DomainError("compound requires a group of at least 2 variables");
    if ((group & ~all_variables()) != 0)
        throw DomainError("compound group references unknown variables");

    const auto members = vs_indices(group); // ascending original order
    VariableSpec comp;
    comp.name = new_name;

    // Compound level order mirrors the table layout: the last member varies
    // fastest. Labels are the tuples of constituent labels.
    std::size_t comp_card = 1;
    for (int m : members)
        comp_card *= vars_[static_cast<std::size_t>(m)].cardinality();
    comp.levels.reserve(comp_card);
    std::vector<int> lv(members.size(), 0);
    for (std::size_t k = 0; k < comp_card; ++k) {
        std::string label = "(";
        for (std::size_t i = 0; i < members.size(); ++i) {
            if (i) label += ",";
            label += vars_[static_cast<std::size_t>(members[i])]
                         .levels[static_cast<std::size_t>(lv[i])];
        }
        label += ")";
        comp.levels.push_back(std::move(label));
        for (std::size_t i = members.size(); i-- > 0;) {
            if (++lv[i] <
                static_cast<int>(vars_[static_cast<std::size_t>(members[i])].cardinality()))
                break;
            lv[i] = 0;
        }
    }

    std::vector<VariableSpec> new_vars;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (static_cast<int>(i) == members.front())
            new_vars.push_back(comp);
        else if (!vs_contains(group, static_cast<int>(i)))
            new_vars.push_back(vars_[i]);
    }

    // Strides in the new layout.
    std::vector<std::size_t> new_strides(new_vars.size());
    std::size_t acc = 1;
    for (std::size_t i = new_vars.size(); i-- > 0;) {
        new_strides[i] = acc;
        acc *= new_vars[i].cardinality();
    }

    std::vector<double> out(cells_.size(), 0.0);
    std::vector<int> levels(vars_.size(), 0);
    for (std::size_t idx = 0; idx < cells_.size(); ++idx) {
        std::size_t comp_level = 0;
        for (int m : members)
            comp_level = comp_level * vars_[static_cast<std::size_t>(m)].cardinality() +
                         static_cast<std::size_t>(levels[static_cast<std::size_t>(m)]);
        std::size_t out_idx = 0;
        std::size_t pos = 0;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (static_cast<int>(i) == members.front()) {
                out_idx += comp_level * new_strides[pos++];
            } else if (!vs_contains(group, static_cast<int>(i))) {
                out_idx += static_cast<std::size_t>(levels[i]) * new_strides[pos++];
            }
        }
        out[out_idx] = cells_[idx];
        for (std::size_t i = vars_.size(); i-- > 0;) {
            if (++levels[i] < static_cast<int>(vars_[i].cardinality()))
                break;
            levels[i] = 0;
        }
    }
    return ContingencyTable(std::move(new_vars), std::move(out), provenance_);
}

ProbabilityTable ContingencyTable::to_pdf() const
{
    if (!(total_ > 0.0))
        throw NumericError("degenerate table: total weight is zero");
    ProbabilityTable pdf;
    pdf.variables = vars_;
    pdf.cells.resize(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i)
        pdf.cells[i] = cells_[i] / total_;
    return pdf;
}

} // namespace catinfo
