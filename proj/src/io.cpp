#include "io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace catinfo {

const BinRule* Schema::rule_for(const std::string& column) const
{
    for (const auto& r : binning)
        if (r.column == column)
            return &r;
    return nullptr;
}

Schema parse_schema_json(const std::string& text, const std::string& context)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(context + ": invalid JSON: " + e.what());
    }

    Schema schema;
    try {
        if (!j.contains("variables") || !j["variables"].is_array())
            throw ParseError(context + ": schema needs a 'variables' array");
        for (const auto& v : j["variables"]) {
            VariableSpec spec;
            spec.name = v.at("name").get<std::string>();
            for (const auto& l : v.at("levels"))
                spec.levels.push_back(l.is_string() ? l.get<std::string>()
                                                    : l.dump());
            schema.variables.push_back(std::move(spec));
        }
        if (j.contains("binning")) {
            for (const auto& b : j["binning"]) {
                BinRule rule;
                rule.column = b.at("column").get<std::string>();
                rule.cutoff = b.at("cutoff").get<double>();
                const auto& labels = b.at("labels");
                if (!labels.is_array() || labels.size() != 2)
                    throw ParseError(context +
                                     ": binning rule needs exactly 2 labels");
                rule.labels[0] = labels[0].get<std::string>();
                rule.labels[1] = labels[1].get<std::string>();
                schema.binning.push_back(std::move(rule));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(context + ": malformed schema: " + e.what());
    }

    validate_schema(schema.variables);
    for (const auto& rule : schema.binning) {
        bool found = false;
        for (const auto& v : schema.variables) {
            if (v.name != rule.column)
                continue;
            found = true;
            for (const auto& label : rule.labels)
                v.level_index(label); // throws if the label is undeclared
        }
        if (!found)
            throw SchemaError(context + ": binning rule references unknown column '" +
                              rule.column + "'");
    }
    return schema;
}

Schema load_schema(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open schema file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_schema_json(buf.str(), path);
}

namespace {

// Minimal CSV: comma separation, optional double-quoted fields with doubled
// quotes, surrounding whitespace of unquoted fields trimmed.
std::vector<std::string> split_csv_line(const std::string& line, const std::string& where)
{
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    while (i <= line.size()) {
        if (i == line.size()) {
            fields.push_back(field);
            break;
        }
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else {
            field += c;
        }
        ++i;
    }
    if (quoted)
        throw ParseError(where + ": unterminated quoted field");
    for (auto& f : fields) {
        const std::size_t b = f.find_first_not_of(" \t\r");
        const std::size_t e = f.find_last_not_of(" \t\r");
        f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
    }
    return fields;
}

double parse_number(const std::string& s, const std::string& where)
{
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ParseError(where + ": '" + s + "' is not a number");
    return v;
}

std::string level_for(const Schema& schema, const VariableSpec& var,
                      const std::string& raw, const std::string& where)
{
    if (const BinRule* rule = schema.rule_for(var.name)) {
        const double v = parse_number(raw, where);
        return v < rule->cutoff ? rule->labels[0] : rule->labels[1];
    }
    var.level_index(raw); // validates; throws SchemaError
    return raw;
}

} // namespace

ContingencyTable load_table_csv(const Schema& schema, const std::string& path,
                                InputKind kind)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open input file '" + path + "'");

    std::string line;
    if (!std::getline(in, line))
        throw ParseError(path + ":1: missing header row");
    const auto header = split_csv_line(line, path + ":1");

    // Resolve header columns against the schema.
    std::vector<int> var_of_column(header.size(), -1);
    int count_column = -1;
    std::vector<bool> seen(schema.variables.size(), false);
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (kind == InputKind::Cells && header[c] == "count") {
            if (count_column >= 0)
                throw SchemaError(path + ":1: duplicate 'count' column");
            count_column = static_cast<int>(c);
            continue;
        }
        bool matched = false;
        for (std::size_t v = 0; v < schema.variables.size(); ++v) {
            if (schema.variables[v].name == header[c]) {
                if (seen[v])
                    throw SchemaError(path + ":1: duplicate column '" + header[c] + "'");
                seen[v] = true;
                var_of_column[c] = static_cast<int>(v);
                matched = true;
                break;
            }
        }
        if (!matched)
            throw SchemaError(path + ":1: column '" + header[c] +
                              "' is not declared in the schema");
    }
    for (std::size_t v = 0; v < schema.variables.size(); ++v)
        if (!seen[v])
            throw SchemaError(path + ":1: missing column for variable '" +
                              schema.variables[v].name + "'");
    if (kind == InputKind::Cells && count_column < 0)
        throw SchemaError(path + ":1: cells input needs a 'count' column");

    std::vector<std::pair<Assignment, double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        const std::string where = path + ":" + std::to_string(line_no);
        const auto fields = split_csv_line(line, where);
        if (fields.size() != header.size())
            throw ParseError(where + ": expected " + std::to_string(header.size()) +
                             " fields, got " + std::to_string(fields.size()));
        Assignment assignment;
        double count = 1.0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (static_cast<int>(c) == count_column) {
                count = parse_number(fields[c], where);
                if (count < 0.0)
                    throw DomainError(where + ": negative count");
                continue;
            }
            const auto& var =
                schema.variables[static_cast<std::size_t>(var_of_column[c])];
            try {
                assignment.emplace_back(var.name,
                                        level_for(schema, var, fields[c], where));
            } catch (const SchemaError& e) {
                throw SchemaError(where + ": " + e.what());
            }
        }
        rows.emplace_back(std::move(assignment), count);
    }
    return ContingencyTable::from_cell_counts(schema.variables, rows);
}

} // namespace catinfo
