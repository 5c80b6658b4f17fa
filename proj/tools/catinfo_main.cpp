// catinfo command-line interface. Everything goes through the public C API;
// this translation unit deliberately includes no library internals.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "catinfo.h"

namespace {

// Exit codes: 0 clean, 1 analysis warnings only (lack of fit,
// non-convergence), 2 input errors, 3 numerical failures.
constexpr int kExitOk = 0;
constexpr int kExitWarnings = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(catinfo_status status)
{
    switch (status) {
    case CATINFO_OK:
        return kExitOk;
    case CATINFO_ERR_NUMERIC:
        return kExitNumeric;
    default:
        return kExitInput;
    }
}

struct CommonArgs {
    std::string input;
    std::string schema;
    std::string kind = "cells";
    std::string format = "text";
    double alpha = 0.05;
    double alpha_int = -1.0; // defaults to alpha
    std::uint64_t seed = 20080531;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_input = true)
{
    auto* input = cmd->add_option("--input", args.input, "input CSV file");
    auto* schema = cmd->add_option("--schema", args.schema, "schema JSON file");
    if (needs_input) {
        input->required();
        schema->required();
    }
    cmd->add_option("--kind", args.kind, "input kind: cells|records")
        ->check(CLI::IsMember({"cells", "records"}));
    cmd->add_option("--format", args.format, "output format: text|json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--alpha", args.alpha, "significance level (default 0.05)");
    cmd->add_option("--alpha-int", args.alpha_int,
                    "interaction-test level (defaults to --alpha)");
    cmd->add_option("--seed", args.seed, "master RNG seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
}

std::string json_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out;
}

std::string options_json(const CommonArgs& args, const std::string& extra = "")
{
    std::string j = "{";
    j += "\"alpha\":" + std::to_string(args.alpha);
    if (args.alpha_int > 0.0)
        j += ",\"alpha_int\":" + std::to_string(args.alpha_int);
    if (args.seed_set) // an explicit --seed overrides a config master_seed
        j += ",\"seed\":" + std::to_string(args.seed);
    j += ",\"input\":\"" + json_escape(args.input) + "\"";
    j += ",\"kind\":\"" + args.kind + "\"";
    if (!extra.empty())
        j += "," + extra;
    j += "}";
    return j;
}

struct TableHandle {
    catinfo_schema* schema = nullptr;
    catinfo_table* table = nullptr;

    ~TableHandle()
    {
        catinfo_table_free(table);
        catinfo_schema_free(schema);
    }
};

int load_table(const CommonArgs& args, TableHandle& h)
{
    catinfo_status status = catinfo_schema_load(args.schema.c_str(), &h.schema);
    if (status != CATINFO_OK) {
        std::fprintf(stderr, "error: %s\n", catinfo_last_error());
        return exit_code_for(status);
    }
    const catinfo_input_kind kind =
        args.kind == "records" ? CATINFO_KIND_RECORDS : CATINFO_KIND_CELLS;
    status = catinfo_table_load_csv(h.schema, args.input.c_str(), kind, &h.table);
    if (status != CATINFO_OK) {
        std::fprintf(stderr, "error: %s\n", catinfo_last_error());
        return exit_code_for(status);
    }
    return kExitOk;
}

int emit(catinfo_report* report, const CommonArgs& args)
{
    const catinfo_format fmt =
        args.format == "json" ? CATINFO_FORMAT_JSON : CATINFO_FORMAT_TEXT;
    char* text = nullptr;
    const catinfo_status status = catinfo_report_render(report, fmt, &text);
    if (status != CATINFO_OK) {
        std::fprintf(stderr, "error: %s\n", catinfo_last_error());
        catinfo_report_free(report);
        return exit_code_for(status);
    }
    std::fputs(text, stdout);
    catinfo_string_free(text);
    const int code =
        catinfo_report_has_warnings(report) ? kExitWarnings : kExitOk;
    catinfo_report_free(report);
    return code;
}

int run_report_command(const CommonArgs& args,
                       catinfo_status (*invoke)(const catinfo_table*, const char*,
                                                catinfo_report**),
                       const std::string& opts)
{
    TableHandle h;
    if (int code = load_table(args, h); code != kExitOk)
        return code;
    catinfo_report* report = nullptr;
    const catinfo_status status = invoke(h.table, opts.c_str(), &report);
    if (status != CATINFO_OK) {
        std::fprintf(stderr, "error: %s\n", catinfo_last_error());
        return exit_code_for(status);
    }
    return emit(report, args);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"catinfo — information-theoretic log-linear and logit modeling "
                 "of categorical data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", catinfo_version());

    // describe
    CommonArgs describe_args;
    auto* describe = app.add_subcommand("describe", "table shape and pairwise MI");
    add_common(describe, describe_args);

    // decompose
    CommonArgs decompose_args;
    std::string decompose_target;
    std::string decompose_predictors;
    std::string decompose_order;
    auto* decompose =
        app.add_subcommand("decompose", "chain decomposition of I(target;predictors)");
    add_common(decompose, decompose_args);
    decompose->add_option("--target", decompose_target, "target variable")->required();
    decompose->add_option("--predictors", decompose_predictors,
                          "comma-separated predictors (default: all others)");
    decompose->add_option("--order", decompose_order,
                          "explicit peel order (comma-separated; default greedy)");

    // loglinear fit|select
    auto* loglinear = app.add_subcommand("loglinear", "hierarchical log-linear models");
    loglinear->require_subcommand(1);
    CommonArgs llfit_args;
    std::string llfit_formula;
    auto* llfit = loglinear->add_subcommand("fit", "IPF fit of a model formula");
    add_common(llfit, llfit_args);
    llfit->add_option("--formula", llfit_formula, "e.g. ACS,ADG,GM or A*C*S,G*M")
        ->required();
    CommonArgs llsel_args;
    double llsel_alpha_fit = 0.05;
    int llsel_refine = 2;
    auto* llsel = loglinear->add_subcommand(
        "select", "backward CMI deletion and candidate models");
    add_common(llsel, llsel_args);
    llsel->add_option("--alpha-fit", llsel_alpha_fit,
                      "goodness-of-fit acceptance level (default 0.05)");
    llsel->add_option("--refine-depth", llsel_refine,
                      "generator replacement rounds (default 2)");

    // logit fit|select|aic-search
    auto* logit = app.add_subcommand("logit", "grouped binary logit models");
    logit->require_subcommand(1);
    CommonArgs lgfit_args;
    std::string lgfit_model;
    auto* lgfit = logit->add_subcommand("fit", "Newton fit of a logit model");
    add_common(lgfit, lgfit_args);
    lgfit->add_option("--model", lgfit_model, "e.g. \"S ~ D + A + D:A\"")->required();
    CommonArgs lgsel_args;
    std::string lgsel_target;
    auto* lgsel = logit->add_subcommand("select", "MI construction of a logit model");
    add_common(lgsel, lgsel_args);
    lgsel->add_option("--target", lgsel_target, "binary target variable")->required();
    CommonArgs lgaic_args;
    std::string lgaic_model;
    std::string lgaic_candidates;
    auto* lgaic = logit->add_subcommand("aic-search",
                                        "greedy AIC descent around a base model");
    add_common(lgaic, lgaic_args);
    lgaic->add_option("--model", lgaic_model, "base logit model")->required();
    lgaic->add_option("--candidates", lgaic_candidates,
                      "two-way terms to consider, e.g. M:A,M:D,M:H")
        ->required();

    // simulate
    CommonArgs sim_args;
    std::string sim_config;
    int sim_threads = 1;
    auto* simulate =
        app.add_subcommand("simulate", "bootstrap goodness-of-fit study");
    add_common(simulate, sim_args);
    simulate->add_option("--config", sim_config, "study config JSON file")->required();
    simulate->add_option("--threads", sim_threads, "worker threads (default 1)");

    CLI11_PARSE(app, argc, argv);

    if (describe->parsed())
        return run_report_command(describe_args, catinfo_describe,
                                  options_json(describe_args));

    if (decompose->parsed()) {
        std::string extra = "\"target\":\"" + json_escape(decompose_target) + "\"";
        auto csv_to_json_list = [](const std::string& csv) {
            std::string out = "[";
            std::size_t pos = 0;
            bool first = true;
            while (pos <= csv.size()) {
                std::size_t next = csv.find(',', pos);
                std::string token = csv.substr(pos, next - pos);
                const std::size_t b = token.find_first_not_of(" \t");
                const std::size_t e = token.find_last_not_of(" \t");
                if (b != std::string::npos) {
                    if (!first)
                        out += ",";
                    out += "\"" + json_escape(token.substr(b, e - b + 1)) + "\"";
                    first = false;
                }
                if (next == std::string::npos)
                    break;
                pos = next + 1;
            }
            return out + "]";
        };
        if (!decompose_predictors.empty())
            extra += ",\"predictors\":" + csv_to_json_list(decompose_predictors);
        if (!decompose_order.empty())
            extra += ",\"order\":" + csv_to_json_list(decompose_order);

        TableHandle h;
        if (int code = load_table(decompose_args, h); code != kExitOk)
            return code;
        catinfo_report* report = nullptr;
        const catinfo_status status =
            catinfo_decompose(h.table, decompose_target.c_str(),
                              options_json(decompose_args, extra).c_str(), &report);
        if (status != CATINFO_OK) {
            std::fprintf(stderr, "error: %s\n", catinfo_last_error());
            return exit_code_for(status);
        }
        return emit(report, decompose_args);
    }

    if (llfit->parsed()) {
        TableHandle h;
        if (int code = load_table(llfit_args, h); code != kExitOk)
            return code;
        catinfo_report* report = nullptr;
        const std::string extra = "\"formula\":\"" + json_escape(llfit_formula) + "\"";
        const catinfo_status status =
            catinfo_loglinear_fit(h.table, llfit_formula.c_str(),
                                  options_json(llfit_args, extra).c_str(), &report);
        if (status != CATINFO_OK) {
            std::fprintf(stderr, "error: %s\n", catinfo_last_error());
            return exit_code_for(status);
        }
        return emit(report, llfit_args);
    }

    if (llsel->parsed()) {
        const std::string extra = "\"alpha_fit\":" + std::to_string(llsel_alpha_fit) +
                                  ",\"refine_depth\":" + std::to_string(llsel_refine);
        return run_report_command(llsel_args, catinfo_loglinear_select,
                                  options_json(llsel_args, extra));
    }

    if (lgfit->parsed()) {
        TableHandle h;
        if (int code = load_table(lgfit_args, h); code != kExitOk)
            return code;
        catinfo_report* report = nullptr;
        const std::string extra = "\"model\":\"" + json_escape(lgfit_model) + "\"";
        const catinfo_status status =
            catinfo_logit_fit(h.table, lgfit_model.c_str(),
                              options_json(lgfit_args, extra).c_str(), &report);
        if (status != CATINFO_OK) {
            std::fprintf(stderr, "error: %s\n", catinfo_last_error());
            return exit_code_for(status);
        }
        return emit(report, lgfit_args);
    }

    if (lgsel->parsed()) {
        TableHandle h;
        if (int code = load_table(lgsel_args, h); code != kExitOk)
            return code;
        catinfo_report* report = nullptr;
        const std::string extra = "\"target\":\"" + json_escape(lgsel_target) + "\"";
        const catinfo_status status =
            catinfo_logit_select(h.table, lgsel_target.c_str(),
                                 options_json(lgsel_args, extra).c_str(), &report);
        if (status != CATINFO_OK) {
            std::fprintf(stderr, "error: %s\n", catinfo_last_error());
            return exit_code_for(status);
        }
        return emit(report, lgsel_args);
    }

    if (lgaic->parsed()) {
        TableHandle h;
        if (int code = load_table(lgaic_args, h); code != kExitOk)
            return code;
        catinfo_report* report = nullptr;
        const std::string extra = "\"model\":\"" + json_escape(lgaic_model) +
                                  "\",\"candidates\":\"" +
                                  json_escape(lgaic_candidates) + "\"";
        const catinfo_status status = catinfo_logit_aic_search(
            h.table, lgaic_model.c_str(), lgaic_candidates.c_str(),
            options_json(lgaic_args, extra).c_str(), &report);
        if (status != CATINFO_OK) {
            std::fprintf(stderr, "error: %s\n", catinfo_last_error());
            return exit_code_for(status);
        }
        return emit(report, lgaic_args);
    }

    if (simulate->parsed()) {
        TableHandle h;
        if (int code = load_table(sim_args, h); code != kExitOk)
            return code;

        std::FILE* f = std::fopen(sim_config.c_str(), "rb");
        if (f == nullptr) {
            std::fprintf(stderr, "error: cannot open config file '%s'\n",
                         sim_config.c_str());
            return kExitInput;
        }
        std::string config;
        char buf[4096];
        std::size_t got;
        while ((got = std::fread(buf, 1, sizeof buf, f)) > 0)
            config.append(buf, got);
        std::fclose(f);

        std::string extra = "\"threads\":" + std::to_string(sim_threads) +
                            ",\"config\":\"" + json_escape(sim_config) + "\"";
        catinfo_report* report = nullptr;
        const catinfo_status status =
            catinfo_simulate(h.table, config.c_str(),
                             options_json(sim_args, extra).c_str(), &report);
        if (status != CATINFO_OK) {
            std::fprintf(stderr, "error: %s\n", catinfo_last_error());
            return exit_code_for(status);
        }
        return emit(report, sim_args);
    }

    return kExitInput;
}
