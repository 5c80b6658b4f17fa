#include "formula.hpp"

#include <algorithm>
#include <set>

namespace catinfo {

ModelFormula ModelFormula::from_generators(std::vector<VarSet> gens)
{
    if (gens.empty())
        throw DomainError("model requires at least one generator");
    for (VarSet g : gens)
        if (g == 0)
            throw DomainError("empty generator");

    // Keep maximal generators only, first occurrence wins.
    std::vector<VarSet> maximal;
    for (VarSet g : gens) {
        bool nested = false;
        for (VarSet h : gens)
            if (g != h && (g & ~h) == 0 && (h & ~g) != 0) { nested = true; break; }
        if (!nested && std::find(maximal.begin(), maximal.end(), g) == maximal.end())
            maximal.push_back(g);
    }
    ModelFormula f;
    f.generators = std::move(maximal);
    return f;
}

std::vector<VarSet> ModelFormula::closure() const
{
    std::set<VarSet> cl;
    for (VarSet g : generators)
        for (VarSet sub = g; sub != 0; sub = (sub - 1) & g)
            cl.insert(sub);
    return {cl.begin(), cl.end()};
}

bool ModelFormula::same_model_as(const ModelFormula& other) const
{
    return closure() == other.closure();
}

namespace {

std::string trim(const std::string& s)
{
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

int find_variable(const std::vector<VariableSpec>& vars, const std::string& name)
{
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].name == name)
            return static_cast<int>(i);
    return -1;
}

VarSet parse_generator(const std::string& token, const std::vector<VariableSpec>& vars)
{
    VarSet g = 0;
    if (token.find('*') != std::string::npos) {
        std::size_t pos = 0;
        while (pos <= token.size()) {
            std::size_t next = token.find('*', pos);
            std::string part = trim(token.substr(pos, next - pos));
            int v = find_variable(vars, part);
            if (v < 0)
                throw ParseError("unknown variable '" + part + "' in generator '" +
                                 token + "'");
            if (vs_contains(g, v))
                throw ParseError("variable '" + part + "' repeated in generator '" +
                                 token + "'");
            g |= vs_single(v);
            if (next == std::string::npos)
                break;
            pos = next + 1;
        }
        return g;
    }
    // Exact variable name, then single-character concatenation.
    if (int v = find_variable(vars, token); v >= 0)
        return vs_single(v);
    for (char c : token) {
        int v = find_variable(vars, std::string(1, c));
        if (v < 0)
            throw ParseError("cannot parse generator '" + token +
                             "': no variable named '" + std::string(1, c) + "'");
        if (vs_contains(g, v))
            throw ParseError("variable '" + std::string(1, c) +
                             "' repeated in generator '" + token + "'");
        g |= vs_single(v);
    }
    return g;
}

} // namespace

ModelFormula parse_formula(const std::string& text, const std::vector<VariableSpec>& vars)
{
    std::vector<VarSet> gens;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t next = text.find(',', pos);
        std::string token = trim(text.substr(pos, next - pos));
        if (token.empty())
            throw ParseError("empty generator at position " + std::to_string(pos) +
                             " in formula '" + text + "'");
        gens.push_back(parse_generator(token, vars));
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return ModelFormula::from_generators(std::move(gens));
}

std::string formula_text(const ModelFormula& formula, const std::vector<VariableSpec>& vars)
{
    bool single_char = std::all_of(vars.begin(), vars.end(), [](const VariableSpec& v) {
        return v.name.size() == 1;
    });
    std::string out;
    for (std::size_t i = 0; i < formula.generators.size(); ++i) {
        if (i) out += ",";
        // Generator members print alphabetically, the conventional notation.
        std::vector<std::string> names;
        for (int v : vs_indices(formula.generators[i]))
            names.push_back(vars[static_cast<std::size_t>(v)].name);
        std::sort(names.begin(), names.end());
        for (std::size_t j = 0; j < names.size(); ++j) {
            if (j && !single_char) out += "*";
            out += names[j];
        }
    }
    return out;
}

std::size_t n_parameters(const ModelFormula& formula, const std::vector<VariableSpec>& vars)
{
    std::size_t n = 1;
    for (VarSet s : formula.closure()) {
        std::size_t term = 1;
        for (int v : vs_indices(s))
            term *= vars[static_cast<std::size_t>(v)].cardinality() - 1;
        n += term;
    }
    return n;
}

long residual_df(const ModelFormula& formula, const std::vector<VariableSpec>& vars)
{
    std::size_t cells = 1;
    for (const auto& v : vars)
        cells *= v.cardinality();
    return static_cast<long>(cells) - static_cast<long>(n_parameters(formula, vars));
}

} // namespace catinfo
