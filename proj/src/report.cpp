#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "version.hpp"

namespace catinfo {

namespace {

using nlohmann::json;

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

json info_json(const InfoStat& s)
{
    return json{{"value", s.value}, {"df", s.df}, {"p", s.p_value}};
}

std::string info_text(const InfoStat& s)
{
    return num(s.value) + "  df=" + std::to_string(s.df) + "  p=" + format_p(s.p_value);
}

json term_json(const ContingencyTable& table, const DecompTerm& t)
{
    json j{{"lhs", table.set_label(t.lhs)},
           {"rhs", table.set_label(t.rhs)},
           {"conditioner", json::array()},
           {"value", t.stat.value},
           {"df", t.stat.df},
           {"p", t.stat.p_value},
           {"flagged", t.flagged}};
    for (int v : vs_indices(t.conditioner))
        j["conditioner"].push_back(table.variables()[static_cast<std::size_t>(v)].name);
    if (t.sparse)
        j["sparse"] = true;
    if (t.two_step) {
        const auto& ts = *t.two_step;
        j["two_step"] = json{{"interaction", info_json(ts.interaction)},
                             {"partial", info_json(ts.partial)},
                             {"interaction_significant", ts.interaction_significant},
                             {"partial_tested", ts.partial_tested},
                             {"partial_significant", ts.partial_significant},
                             {"ipf_converged", ts.ipf_converged}};
    }
    return j;
}

std::string term_label(const ContingencyTable& table, const DecompTerm& t)
{
    std::string s = "I(" + table.set_label(t.lhs) + ";" + table.set_label(t.rhs);
    if (t.conditioner != 0)
        s += "|" + table.set_label(t.conditioner);
    return s + ")";
}

void append_term_lines(std::ostringstream& out, const ContingencyTable& table,
                       const DecompositionReport& rep)
{
    for (const auto& t : rep.terms) {
        out << "  " << term_label(table, t) << (t.flagged ? "*" : " ") << " = "
            << info_text(t.stat);
        if (t.sparse)
            out << "  [sparse]";
        out << "\n";
        if (t.two_step) {
            const auto& ts = *t.two_step;
            out << "      Int = " << info_text(ts.interaction)
                << (ts.interaction_significant ? "  (significant)" : "") << "\n";
            out << "      Par = " << info_text(ts.partial)
                << (ts.partial_tested
                        ? (ts.partial_significant ? "  (significant)" : "")
                        : "  (not tested)")
                << "\n";
        }
    }
}

json base_json(const std::string& command, const json& options)
{
    return json{{"catinfo_version", kVersion}, {"command", command}, {"options", options}};
}

std::string header_text(const std::string& command, const json& options)
{
    std::string s = "catinfo " + command + " (v" + std::string(kVersion) + ")";
    if (!options.is_null() && !options.empty())
        s += "  options: " + options.dump();
    return s + "\n";
}

json table_json(const ContingencyTable& table)
{
    json vars = json::array();
    for (const auto& v : table.variables())
        vars.push_back(json{{"name", v.name}, {"levels", v.levels}});
    return json{{"variables", vars},
                {"cells", table.n_cells()},
                {"total", table.total()},
                {"observed", table.observed()}};
}

} // namespace

std::string format_p(double p)
{
    if (p < 1e-16)
        return "<1e-16";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", p);
    return buf;
}

Report describe_report(const ContingencyTable& table, double alpha, const json& options)
{
    Report r;
    r.json = base_json("describe", options);
    r.json["table"] = table_json(table);

    std::ostringstream out;
    out << header_text("describe", options);
    out << "table: " << table.n_variables() << " variables, " << table.n_cells()
        << " cells, N = " << num(table.total()) << "\n";
    out << "variables:";
    for (const auto& v : table.variables())
        out << " " << v.name << "(" << v.cardinality() << ")";
    out << "\n";

    json pairs = json::array();
    out << "pairwise mutual information (2N scale):\n";
    for (std::size_t i = 0; i < table.n_variables(); ++i) {
        for (std::size_t j = i + 1; j < table.n_variables(); ++j) {
            const auto stat = mutual_information(
                table, GroupPartition::of({vs_single(static_cast<int>(i)),
                                           vs_single(static_cast<int>(j))}));
            json pj{{"a", table.variables()[i].name},
                    {"b", table.variables()[j].name},
                    {"value", stat.value},
                    {"df", stat.df},
                    {"p", stat.p_value},
                    {"significant", stat.p_value < alpha}};
            pairs.push_back(pj);
            out << "  I(" << table.variables()[i].name << ";"
                << table.variables()[j].name << ")"
                << (stat.p_value < alpha ? " " : "*") << " = " << info_text(stat)
                << "\n";
        }
    }
    out << "(* not significant at alpha=" << num(alpha) << ")\n";
    r.json["pairwise"] = pairs;
    r.text = out.str();
    return r;
}

Report decomposition_report(const ContingencyTable& table,
                            const DecompositionReport& rep, const std::string& title,
                            const json& options)
{
    Report r;
    r.json = base_json("decompose", options);
    r.json["total"] = info_json(rep.total);
    r.json["alpha"] = rep.alpha;
    json terms = json::array();
    for (const auto& t : rep.terms)
        terms.push_back(term_json(table, t));
    r.json["terms"] = terms;

    std::ostringstream out;
    out << header_text("decompose", options);
    out << title << " = " << info_text(rep.total) << "\n";
    append_term_lines(out, table, rep);
    out << "(* not significant at alpha=" << num(rep.alpha) << ")\n";
    double sum = 0.0;
    for (const auto& t : rep.terms)
        sum += t.stat.value;
    out << "sum of terms = " << num(sum) << "\n";
    r.text = out.str();
    return r;
}

Report loglinear_fit_report(const ContingencyTable& table, const LoglinearFit& fit,
                            double alpha, const json& options)
{
    Report r;
    r.json = base_json("loglinear fit", options);
    r.json["formula"] = formula_text(fit.formula, table.variables());
    r.json["deviance"] = info_json(fit.deviance);
    r.json["n_params"] = fit.n_params;
    r.json["aic"] = fit.aic;
    r.json["converged"] = fit.converged;
    r.json["iterations"] = fit.iterations;
    r.json["max_margin_gap"] = fit.max_margin_gap;

    if (!fit.converged)
        r.warnings.push_back("IPF did not converge");
    if (fit.deviance.df > 0 && fit.deviance.p_value < alpha)
        r.warnings.push_back("lack of fit at alpha=" + num(alpha));

    std::ostringstream out;
    out << header_text("loglinear fit", options);
    out << "model {" << formula_text(fit.formula, table.variables()) << "}\n";
    out << "residual deviance = " << info_text(fit.deviance) << "\n";
    out << "parameters = " << fit.n_params << ", AIC = " << num(fit.aic) << "\n";
    out << (fit.converged ? "IPF converged in " : "IPF DID NOT converge after ")
        << fit.iterations << " cycles (max margin gap " << num(fit.max_margin_gap)
        << ")\n";
    for (const auto& w : r.warnings)
        out << "warning: " << w << "\n";
    r.json["warnings"] = r.warnings;
    r.text = out.str();
    return r;
}

Report selection_report(const ContingencyTable& table, const InformationModel& model,
                        const std::vector<CandidateModel>& candidates,
                        const json& options)
{
    Report r;
    r.json = base_json("loglinear select", options);
    r.json["total_mi"] = info_json(model.total);

    json peel_order = json::array();
    for (int v : model.peel_order)
        peel_order.push_back(table.variables()[static_cast<std::size_t>(v)].name);
    r.json["peel_order"] = peel_order;

    json peels = json::array();
    for (const auto& rep : model.peels) {
        json terms = json::array();
        for (const auto& t : rep.terms)
            terms.push_back(term_json(table, t));
        peels.push_back(json{{"total", info_json(rep.total)}, {"terms", terms}});
    }
    r.json["peels"] = peels;

    auto selection_terms = [&](const std::vector<SelectionTerm>& terms) {
        json arr = json::array();
        for (const auto& t : terms) {
            DecompTerm d;
            d.lhs = vs_single(t.lhs);
            d.rhs = vs_single(t.rhs);
            d.conditioner = t.conditioner;
            d.stat = t.stat;
            d.sparse = t.sparse;
            d.two_step = t.two_step;
            arr.push_back(term_json(table, d));
        }
        return arr;
    };
    r.json["retained"] = selection_terms(model.retained);
    r.json["deleted"] = selection_terms(model.deleted);

    json cands = json::array();
    for (const auto& c : candidates) {
        cands.push_back(json{{"formula", formula_text(c.formula, table.variables())},
                             {"deviance", info_json(c.fit.deviance)},
                             {"n_params", c.fit.n_params},
                             {"aic", c.fit.aic},
                             {"acceptable", c.acceptable},
                             {"converged", c.fit.converged},
                             {"note", c.note}});
    }
    r.json["candidates"] = cands;

    bool any_acceptable = false;
    for (const auto& c : candidates)
        any_acceptable = any_acceptable || c.acceptable;
    if (!any_acceptable)
        r.warnings.push_back("no acceptable candidate model");
    r.json["warnings"] = r.warnings;

    std::ostringstream out;
    out << header_text("loglinear select", options);
    out << "total MI " << info_text(model.total) << "\n";
    for (std::size_t i = 0; i < model.peels.size(); ++i) {
        const auto& rep = model.peels[i];
        const auto& first = rep.terms.front();
        out << "peel " << table.set_label(first.lhs) << ": I("
            << table.set_label(first.lhs) << ";...) = " << info_text(rep.total) << "\n";
        append_term_lines(out, table, rep);
    }
    out << "retained identity: ";
    for (std::size_t i = 0; i < model.retained.size(); ++i) {
        const auto& t = model.retained[i];
        if (i)
            out << " + ";
        out << "I(" << table.variables()[static_cast<std::size_t>(t.lhs)].name << ";"
            << table.variables()[static_cast<std::size_t>(t.rhs)].name;
        if (t.conditioner != 0)
            out << "|" << table.set_label(t.conditioner);
        out << ")";
    }
    out << "\n\ncandidate models (acceptable first, then AIC):\n";
    out << "  formula | deviance | df | p | AIC | acceptable\n";
    for (const auto& c : candidates) {
        out << "  {" << formula_text(c.formula, table.variables()) << "} | "
            << num(c.fit.deviance.value) << " | " << c.fit.deviance.df << " | "
            << format_p(c.fit.deviance.p_value) << " | " << num(c.fit.aic) << " | "
            << (c.acceptable ? "yes" : "no");
        if (!c.note.empty())
            out << " (" << c.note << ")";
        out << "\n";
    }
    for (const auto& w : r.warnings)
        out << "warning: " << w << "\n";
    r.text = out.str();
    return r;
}

Report logit_fit_report(const ContingencyTable& table, const LogitFit& fit, double alpha,
                        const json& options)
{
    Report r;
    r.json = base_json("logit fit", options);
    r.json["model"] = logit_model_text(fit.model, table.variables());
    json coefs = json::array();
    for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
        const double se = fit.std_errors[i];
        const double z = se > 0.0 ? fit.coefficients[i] / se : 0.0;
        coefs.push_back(json{{"term", fit.coef_names[i]},
                             {"estimate", fit.coefficients[i]},
                             {"std_error", se},
                             {"z", z}});
    }
    r.json["coefficients"] = coefs;
    r.json["log_likelihood"] = fit.log_likelihood;
    r.json["deviance"] = info_json(fit.deviance);
    r.json["n_params"] = fit.n_params;
    r.json["n_patterns"] = fit.n_patterns;
    r.json["aic"] = fit.aic;
    r.json["converged"] = fit.converged;
    r.json["separation"] = fit.separation;

    if (fit.separation)
        r.warnings.push_back("separation detected; estimates diverge");
    else if (!fit.converged)
        r.warnings.push_back("Newton iterations did not converge");
    if (fit.deviance.df > 0 && fit.deviance.p_value < alpha)
        r.warnings.push_back("lack of fit at alpha=" + num(alpha));
    r.json["warnings"] = r.warnings;

    std::ostringstream out;
    out << header_text("logit fit", options);
    out << "model: " << logit_model_text(fit.model, table.variables()) << "\n";
    out << "  term | estimate | std.err | z\n";
    for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
        const double se = fit.std_errors[i];
        out << "  " << fit.coef_names[i] << " | " << num(fit.coefficients[i]) << " | "
            << num(se) << " | " << num(se > 0.0 ? fit.coefficients[i] / se : 0.0)
            << "\n";
    }
    out << "log-likelihood = " << num(fit.log_likelihood) << "\n";
    out << "residual deviance = " << info_text(fit.deviance) << " over "
        << fit.n_patterns << " covariate patterns\n";
    out << "AIC = " << num(fit.aic) << " (" << fit.n_params << " parameters)\n";
    for (const auto& w : r.warnings)
        out << "warning: " << w << "\n";
    r.text = out.str();
    return r;
}

Report mi_logit_report(const ContingencyTable& table, const MiLogitResult& construction,
                       const LogitFit& fit, double alpha, const json& options)
{
    Report partition =
        decomposition_report(table, construction.report, "target CMI partition", options);
    Report fit_report = logit_fit_report(table, fit, alpha, options);

    Report r;
    r.json = base_json("logit select", options);
    r.json["dropped"] = json::array();
    for (int v : construction.dropped)
        r.json["dropped"].push_back(table.variables()[static_cast<std::size_t>(v)].name);
    r.json["partition"] = partition.json["terms"];
    r.json["partition_total"] = partition.json["total"];
    r.json["model"] = logit_model_text(construction.model, table.variables());
    r.json["fit"] = fit_report.json;
    r.warnings = fit_report.warnings;
    r.json["warnings"] = r.warnings;

    std::ostringstream out;
    out << header_text("logit select", options);
    if (!construction.dropped.empty()) {
        out << "dropped predictors:";
        for (int v : construction.dropped)
            out << " " << table.variables()[static_cast<std::size_t>(v)].name;
        out << "\n";
    }
    out << "partitioned CMI terms (CMI / Int / Par):\n";
    append_term_lines(out, table, construction.report);
    out << "constructed model: " << logit_model_text(construction.model, table.variables())
        << "\n\n";
    out << fit_report.text;
    r.text = out.str();
    return r;
}

Report aic_search_report(const ContingencyTable& table, const AicSearchResult& search,
                         const std::string& base_model, const json& options)
{
    Report fit_report = logit_fit_report(table, search.fit, 0.05, options);

    Report r;
    r.json = base_json("logit aic-search", options);
    r.json["base_model"] = base_model;
    json steps = json::array();
    for (const auto& s : search.steps)
        steps.push_back(json{{"action", s.action}, {"term", s.term}, {"aic", s.aic}});
    r.json["steps"] = steps;
    r.json["diagnostics"] = search.diagnostics;
    r.json["fit"] = fit_report.json;
    r.warnings = fit_report.warnings;
    r.json["warnings"] = r.warnings;

    std::ostringstream out;
    out << header_text("logit aic-search", options);
    out << "base model: " << base_model << "\n";
    if (search.steps.empty()) {
        out << "base model is already a local AIC minimum\n";
    } else {
        for (const auto& s : search.steps)
            out << "  " << s.action << " " << s.term << " -> AIC " << num(s.aic) << "\n";
    }
    for (const auto& d : search.diagnostics)
        out << "  note: " << d << "\n";
    out << "\n" << fit_report.text;
    r.text = out.str();
    return r;
}

Report simulation_report(const AcceptanceReport& report, const json& options)
{
    Report r;
    r.json = base_json("simulate", options);

    json cfg;
    cfg["designs"] = json::array();
    for (Design d : report.config.designs)
        cfg["designs"].push_back(design_name(d));
    cfg["models"] = json::array();
    for (const auto& m : report.config.models)
        cfg["models"].push_back(json{{"name", m.name}, {"formula", m.formula}});
    cfg["replicates"] = report.config.replicates;
    cfg["sample_sizes"] = report.config.sample_sizes;
    cfg["alpha_fit"] = report.config.alpha_fit;
    cfg["master_seed"] = report.config.master_seed;
    r.json["config"] = cfg;

    json cells = json::array();
    int failed = 0;
    for (const auto& c : report.cells) {
        cells.push_back(json{{"design", design_name(c.design)},
                             {"generator", c.generator},
                             {"model", c.model},
                             {"sample_size", c.sample_size},
                             {"replicates", c.replicates},
                             {"accepted", c.accepted},
                             {"failed_fits", c.failed_fits},
                             {"proportion", c.proportion},
                             {"mean_deviance", c.mean_deviance}});
        failed += c.failed_fits;
    }
    r.json["cells"] = cells;
    if (failed > 0)
        r.warnings.push_back(std::to_string(failed) + " replicate fits failed");
    r.json["warnings"] = r.warnings;

    // Table-2 shape: one row per (model, n), one column per design column.
    std::vector<std::pair<std::string, std::string>> columns; // (design, generator)
    std::vector<std::pair<std::string, std::size_t>> rows;    // (model, n)
    for (const auto& c : report.cells) {
        const std::pair<std::string, std::string> col{design_name(c.design), c.generator};
        if (std::find(columns.begin(), columns.end(), col) == columns.end())
            columns.push_back(col);
        const std::pair<std::string, std::size_t> row{c.model, c.sample_size};
        if (std::find(rows.begin(), rows.end(), row) == rows.end())
            rows.push_back(row);
    }

    std::ostringstream out;
    out << header_text("simulate", options);
    out << "acceptance proportions (" << report.config.replicates
        << " replicates, alpha=" << num(report.config.alpha_fit) << ")\n";
    out << "tested model / n";
    for (const auto& [d, g] : columns)
        out << " | " << d << (g.empty() ? "" : " (" + g + ")");
    out << "\n";
    for (const auto& [model, n] : rows) {
        out << model << " / " << n;
        for (const auto& [d, g] : columns) {
            double prop = 0.0;
            for (const auto& c : report.cells)
                if (design_name(c.design) == d && c.generator == g && c.model == model &&
                    c.sample_size == n)
                    prop = c.proportion;
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.4f", prop);
            out << " | " << buf;
        }
        out << "\n";
    }
    for (const auto& w : r.warnings)
        out << "warning: " << w << "\n";
    r.text = out.str();
    return r;
}

} // namespace catinfo
