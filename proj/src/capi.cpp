#include "catinfo.h"

#include <cstring>
#include <string>

#include <json.hpp>

#include "chisq.hpp"
#include "io.hpp"
#include "report.hpp"
#include "version.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

catinfo_status fail(catinfo_status code, const std::string& message)
{
    g_last_error = message;
    return code;
}

catinfo_status from_exception()
{
    try {
        throw;
    } catch (const catinfo::IoError& e) {
        return fail(CATINFO_ERR_IO, e.what());
    } catch (const catinfo::ParseError& e) {
        return fail(CATINFO_ERR_PARSE, e.what());
    } catch (const catinfo::SchemaError& e) {
        return fail(CATINFO_ERR_SCHEMA, e.what());
    } catch (const catinfo::DomainError& e) {
        return fail(CATINFO_ERR_DOMAIN, e.what());
    } catch (const catinfo::NumericError& e) {
        return fail(CATINFO_ERR_NUMERIC, e.what());
    } catch (const json::exception& e) {
        return fail(CATINFO_ERR_PARSE, e.what());
    } catch (const std::exception& e) {
        return fail(CATINFO_ERR_INVALID_ARGUMENT, e.what());
    }
}

// Resolved per-call options with their JSON echo for report provenance.
struct Options {
    double alpha = 0.05;
    double alpha_int = 0.05;
    double alpha_fit = 0.05;
    std::uint64_t seed = catinfo::kDefaultSeed;
    int threads = 1;
    int refine_depth = 2;
    json raw;
};

Options parse_options(const char* options_json)
{
    Options o;
    o.raw = json::object();
    if (options_json != nullptr && options_json[0] != '\0') {
        o.raw = json::parse(options_json);
        if (!o.raw.is_object())
            throw catinfo::ParseError("options must be a JSON object");
    }
    o.alpha = o.raw.value("alpha", 0.05);
    o.alpha_int = o.raw.value("alpha_int", o.alpha);
    o.alpha_fit = o.raw.value("alpha_fit", 0.05);
    o.seed = o.raw.value("seed", catinfo::kDefaultSeed);
    o.threads = o.raw.value("threads", 1);
    o.refine_depth = o.raw.value("refine_depth", 2);
    if (!(o.alpha > 0.0 && o.alpha < 1.0))
        throw catinfo::DomainError("alpha must lie in (0,1)");
    if (!(o.alpha_int > 0.0 && o.alpha_int < 1.0))
        throw catinfo::DomainError("alpha_int must lie in (0,1)");
    if (!(o.alpha_fit > 0.0 && o.alpha_fit < 1.0))
        throw catinfo::DomainError("alpha_fit must lie in (0,1)");
    // Echo the resolved defaults so reports are self-describing.
    o.raw["alpha"] = o.alpha;
    return o;
}

std::vector<std::string> split_names(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t next = text.find(sep, pos);
        std::string token = text.substr(pos, next - pos);
        const std::size_t b = token.find_first_not_of(" \t");
        const std::size_t e = token.find_last_not_of(" \t");
        token = b == std::string::npos ? std::string{} : token.substr(b, e - b + 1);
        if (!token.empty())
            out.push_back(token);
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return out;
}

} // namespace

struct catinfo_schema {
    catinfo::Schema schema;
};

struct catinfo_table {
    catinfo::ContingencyTable table;
};

struct catinfo_report {
    catinfo::Report report;
};

extern "C" {

const char* catinfo_version(void) { return catinfo::kVersion; }

const char* catinfo_last_error(void) { return g_last_error.c_str(); }

catinfo_status catinfo_schema_load(const char* path, catinfo_schema** out)
{
    if (path == nullptr || out == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        *out = new catinfo_schema{catinfo::load_schema(path)};
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

catinfo_status catinfo_schema_parse(const char* json_text, catinfo_schema** out)
{
    if (json_text == nullptr || out == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        *out = new catinfo_schema{catinfo::parse_schema_json(json_text, "schema")};
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

void catinfo_schema_free(catinfo_schema* schema) { delete schema; }

catinfo_status catinfo_table_load_csv(const catinfo_schema* schema, const char* path,
                                      catinfo_input_kind kind, catinfo_table** out)
{
    if (schema == nullptr || path == nullptr || out == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    if (kind != CATINFO_KIND_CELLS && kind != CATINFO_KIND_RECORDS)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "invalid input kind");
    try {
        *out = new catinfo_table{catinfo::load_table_csv(
            schema->schema, path,
            kind == CATINFO_KIND_CELLS ? catinfo::InputKind::Cells
                                       : catinfo::InputKind::Records)};
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

void catinfo_table_free(catinfo_table* table) { delete table; }

double catinfo_table_total(const catinfo_table* table)
{
    return table ? table->table.total() : 0.0;
}

int catinfo_table_variable_count(const catinfo_table* table)
{
    return table ? static_cast<int>(table->table.n_variables()) : 0;
}

size_t catinfo_table_cell_count(const catinfo_table* table)
{
    return table ? table->table.n_cells() : 0;
}

catinfo_status catinfo_chi_square_sf(double x, long df, double* p)
{
    if (p == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        *p = catinfo::chi_square_sf(x, df);
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

catinfo_status catinfo_mutual_information(const catinfo_table* table, const char* groups,
                                          double* value, long* df, double* p)
{
    if (table == nullptr || groups == nullptr || value == nullptr || df == nullptr ||
        p == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        std::vector<catinfo::VarSet> parts;
        for (const auto& group : split_names(groups, '|')) {
            const auto names = split_names(group, ',');
            parts.push_back(table->table.variable_set(names));
        }
        const auto stat = catinfo::mutual_information(
            table->table, catinfo::GroupPartition::of(std::move(parts)));
        *value = stat.value;
        *df = stat.df;
        *p = stat.p_value;
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

catinfo_status catinfo_cmi(const catinfo_table* table, const char* a, const char* b,
                           const char* cond, double* value, long* df, double* p)
{
    if (table == nullptr || a == nullptr || b == nullptr || value == nullptr ||
        df == nullptr || p == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const auto na = split_names(a, ',');
        const auto nb = split_names(b, ',');
        const auto nc = split_names(cond == nullptr ? "" : cond, ',');
        const auto stat = catinfo::conditional_mutual_information(
            table->table, table->table.variable_set(na), table->table.variable_set(nb),
            table->table.variable_set(nc));
        *value = stat.value;
        *df = stat.df;
        *p = stat.p_value;
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

catinfo_status catinfo_describe(const catinfo_table* table, const char* options_json,
                                catinfo_report** out)
{
    if (table == nullptr || out == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const Options o = parse_options(options_json);
        *out = new catinfo_report{catinfo::describe_report(table->table, o.alpha, o.raw)};
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

catinfo_status catinfo_decompose(const catinfo_table* table, const char* target,
                                 const char* options_json, catinfo_report** out)
{
    if (table == nullptr || target == nullptr || out == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const Options o = parse_options(options_json);
        const auto& t = table->table;
        const catinfo::VarSet target_set = catinfo::vs_single(t.variable_index(target));

        catinfo::VarSet predictors = t.all_variables() & ~target_set;
        if (o.raw.contains("predictors")) {
            const auto names = o.raw["predictors"].get<std::vector<std::string>>();
            predictors = t.variable_set(names);
        }
        if (predictors == 0 || (predictors & target_set))
            throw catinfo::DomainError("predictors must be nonempty and exclude the target");

        catinfo::DecompositionReport rep;
        if (o.raw.contains("order")) {
            const auto names = o.raw["order"].get<std::vector<std::string>>();
            std::vector<catinfo::VarSet> chain;
            catinfo::VarSet seen = 0;
            for (const auto& n : names) {
                const catinfo::VarSet v = catinfo::vs_single(t.variable_index(n));
                chain.push_back(v);
                seen |= v;
            }
            if (seen != predictors)
                throw catinfo::DomainError("order must list each predictor exactly once");
            rep = catinfo::chain_decompose(t, target_set, chain, o.alpha);
        } else {
            rep = catinfo::peel_decompose(t, target_set, predictors, o.alpha);
        }
        const std::string title =
            "I(" + t.set_label(predictors) + ";" + t.set_label(target_set) + ")";
        *out = new catinfo_report{catinfo::decomposition_report(t, rep, title, o.raw)};
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

catinfo_status catinfo_loglinear_fit(const catinfo_table* table, const char* formula,
                                     const char* options_json, catinfo_report** out)
{
    if (table == nullptr || formula == nullptr || out == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const Options o = parse_options(options_json);
        const auto f = catinfo::parse_formula(formula, table->table.variables());
        catinfo::IpfOptions ipf;
        ipf.tol = o.raw.value("tol", ipf.tol);
        ipf.max_iter = o.raw.value("max_iter", ipf.max_iter);
        const auto fit = catinfo::ipf_fit(table->table, f, ipf);
        *out = new catinfo_report{
            catinfo::loglinear_fit_report(table->table, fit, o.alpha, o.raw)};
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

catinfo_status catinfo_loglinear_select(const catinfo_table* table,
                                        const char* options_json, catinfo_report** out)
{
    if (table == nullptr || out == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const Options o = parse_options(options_json);
        const auto model =
            catinfo::backward_select(table->table, o.alpha, o.alpha_int);
        catinfo::CandidateOptions copts;
        copts.alpha_fit = o.alpha_fit;
        copts.refine_depth = o.refine_depth;
        const auto candidates = catinfo::terms_to_candidates(model, table->table, copts);
        *out = new catinfo_report{
            catinfo::selection_report(table->table, model, candidates, o.raw)};
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

catinfo_status catinfo_logit_fit(const catinfo_table* table, const char* model,
                                 const char* options_json, catinfo_report** out)
{
    if (table == nullptr || model == nullptr || out == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const Options o = parse_options(options_json);
        const auto m = catinfo::parse_logit_model(model, table->table);
        const auto fit = catinfo::fit_logit(table->table, m);
        *out = new catinfo_report{
            catinfo::logit_fit_report(table->table, fit, o.alpha, o.raw)};
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

catinfo_status catinfo_logit_select(const catinfo_table* table, const char* target,
                                    const char* options_json, catinfo_report** out)
{
    if (table == nullptr || target == nullptr || out == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const Options o = parse_options(options_json);
        const int t = table->table.variable_index(target);
        const auto construction =
            catinfo::mi_logit_construct(table->table, t, o.alpha, o.alpha_int);
        const auto fit = catinfo::fit_logit(table->table, construction.model);
        *out = new catinfo_report{
            catinfo::mi_logit_report(table->table, construction, fit, o.alpha, o.raw)};
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

catinfo_status catinfo_logit_aic_search(const catinfo_table* table, const char* model,
                                        const char* candidate_terms,
                                        const char* options_json, catinfo_report** out)
{
    if (table == nullptr || model == nullptr || candidate_terms == nullptr ||
        out == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const Options o = parse_options(options_json);
        const auto base = catinfo::parse_logit_model(model, table->table);
        std::vector<catinfo::VarSet> candidates;
        for (const auto& token : split_names(candidate_terms, ',')) {
            const auto names = split_names(token, ':');
            candidates.push_back(table->table.variable_set(names));
        }
        const auto result =
            catinfo::aic_neighborhood_search(table->table, base, candidates);
        *out = new catinfo_report{
            catinfo::aic_search_report(table->table, result, model, o.raw)};
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

catinfo_status catinfo_simulate(const catinfo_table* table, const char* config_json,
                                const char* options_json, catinfo_report** out)
{
    if (table == nullptr || config_json == nullptr || out == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const Options o = parse_options(options_json);
        json cfg = json::parse(config_json);

        catinfo::SimulationConfig config;
        for (const auto& d : cfg.at("designs")) {
            const std::string name = d.get<std::string>();
            if (name == "model_parametric")
                config.designs.push_back(catinfo::Design::ModelParametric);
            else if (name == "empirical_multinomial")
                config.designs.push_back(catinfo::Design::EmpiricalMultinomial);
            else if (name == "subset_without_replacement")
                config.designs.push_back(catinfo::Design::SubsetWithoutReplacement);
            else
                throw catinfo::ParseError("unknown design '" + name + "'");
        }
        for (const auto& m : cfg.at("models"))
            config.models.push_back(catinfo::SimModelSpec{
                m.at("name").get<std::string>(), m.at("formula").get<std::string>()});
        config.replicates = cfg.value("replicates", 1000);
        config.sample_sizes = cfg.at("sample_sizes").get<std::vector<std::size_t>>();
        config.alpha_fit = cfg.value("alpha_fit", 0.05);
        config.master_seed = cfg.value("master_seed", catinfo::kDefaultSeed);
        if (o.raw.contains("seed"))
            config.master_seed = o.seed;

        std::vector<catinfo::LogitFit> fits;
        for (const auto& m : config.models)
            fits.push_back(catinfo::fit_logit(
                table->table, catinfo::parse_logit_model(m.formula, table->table)));

        const auto report =
            catinfo::run_acceptance_study(config, table->table, fits, o.threads);
        // The worker-thread count never changes the numbers, so it stays out
        // of the report echo; identical configs render byte-identically.
        json echo = o.raw;
        echo.erase("threads");
        *out = new catinfo_report{catinfo::simulation_report(report, echo)};
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

catinfo_status catinfo_report_render(const catinfo_report* report, catinfo_format format,
                                     char** out)
{
    if (report == nullptr || out == nullptr)
        return fail(CATINFO_ERR_INVALID_ARGUMENT, "null argument");
    try {
        const std::string s = format == CATINFO_FORMAT_JSON
                                  ? report->report.json.dump(2) + "\n"
                                  : report->report.text;
        char* buf = new char[s.size() + 1];
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *out = buf;
        return CATINFO_OK;
    } catch (...) {
        return from_exception();
    }
}

int catinfo_report_has_warnings(const catinfo_report* report)
{
    return report != nullptr && !report->report.warnings.empty() ? 1 : 0;
}

void catinfo_report_free(catinfo_report* report) { delete report; }

void catinfo_string_free(char* s) { delete[] s; }

} // extern "C"
