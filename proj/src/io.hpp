#pragma once

#include <array>
#include <string>
#include <vector>

#include "table.hpp"

namespace catinfo {

// Cutoff binning for a raw numeric column: values below the cutoff map to
// labels[0], values at or above it to labels[1].
struct BinRule {
    std::string column;
    double cutoff = 0.0;
    std::array<std::string, 2> labels;
};

struct Schema {
    std::vector<VariableSpec> variables;
    std::vector<BinRule> binning;

    const BinRule* rule_for(const std::string& column) const;
};

Schema parse_schema_json(const std::string& text, const std::string& context);
Schema load_schema(const std::string& path);

enum class InputKind { Cells, Records };

// Cells CSV: header = variable names plus a literal `count` column, one row
// per cell. Records CSV: header = variable names, one row per subject.
// Binned columns hold raw numeric values. Errors carry file:line context.
ContingencyTable load_table_csv(const Schema& schema, const std::string& path,
                                InputKind kind);

} // namespace catinfo
