#include "simulation.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace catinfo {

namespace {

std::vector<double> cumulative_weights(const std::vector<double>& w)
{
    std::vector<double> cdf(w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        cdf[i] = acc;
    }
    if (!(acc > 0.0))
        throw NumericError("cannot sample from a zero-mass distribution");
    return cdf;
}

} // namespace

ContingencyTable sample_model_parametric(const LogitFit& fit,
                                         const ContingencyTable& covariate_source,
                                         std::size_t n, Rng& rng, VarSet pattern_vars)
{
    const VarSet tmask = vs_single(fit.model.target);
    const VarSet preds = fit.model.predictor_set() | (pattern_vars & ~tmask);

    if (preds == 0) {
        // Intercept-only: the target is the whole sampled table.
        const double p1 = fitted_pattern_probabilities(covariate_source, fit)[0];
        std::vector<double> cells(2, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            cells[rng.bernoulli(p1) ? 1 : 0] += 1.0;
        return ContingencyTable(
            {covariate_source.variables()[static_cast<std::size_t>(fit.model.target)]},
            std::move(cells), Provenance::Observed);
    }

    const auto pattern_margin = covariate_source.marginalize(preds);
    const auto cdf = cumulative_weights(pattern_margin.cells());

    // Fitted success probability per extended pattern: fold each pattern onto
    // the model's own predictor margin.
    const auto p_model = fitted_pattern_probabilities(covariate_source, fit);
    std::vector<std::uint32_t> to_model;
    {
        std::vector<VariableSpec> pvars;
        for (int v : vs_indices(preds))
            pvars.push_back(covariate_source.variables()[static_cast<std::size_t>(v)]);
        VarSet local_model_preds = 0;
        const auto model_pred_idx = vs_indices(fit.model.predictor_set());
        for (std::size_t i = 0, j = 0; i < pvars.size(); ++i) {
            if (j < model_pred_idx.size() &&
                pvars[i].name ==
                    covariate_source
                        .variables()[static_cast<std::size_t>(model_pred_idx[j])]
                        .name) {
                local_model_preds |= vs_single(static_cast<int>(i));
                ++j;
            }
        }
        if (fit.model.predictor_set() == 0)
            to_model.assign(pattern_margin.n_cells(), 0);
        else
            to_model = margin_map(pvars, local_model_preds);
    }

    // Output layout: preds | target in the source's variable order.
    std::vector<VariableSpec> out_vars;
    std::vector<int> out_of_source;
    for (std::size_t i = 0; i < covariate_source.n_variables(); ++i) {
        if (vs_contains(preds | tmask, static_cast<int>(i))) {
            out_vars.push_back(covariate_source.variables()[i]);
            out_of_source.push_back(static_cast<int>(i));
        }
    }
    std::vector<std::size_t> out_strides(out_vars.size());
    std::size_t acc = 1;
    for (std::size_t i = out_vars.size(); i-- > 0;) {
        out_strides[i] = acc;
        acc *= out_vars[i].cardinality();
    }

    // Per pattern: base output index and the stride of the target variable.
    const auto pred_idx = vs_indices(preds);
    std::vector<std::size_t> pstrides(pred_idx.size());
    std::size_t pacc = 1;
    for (std::size_t i = pred_idx.size(); i-- > 0;) {
        pstrides[i] = pacc;
        pacc *= covariate_source.variables()[static_cast<std::size_t>(pred_idx[i])]
                    .cardinality();
    }
    std::size_t target_stride = 0;
    for (std::size_t i = 0; i < out_of_source.size(); ++i)
        if (out_of_source[i] == fit.model.target)
            target_stride = out_strides[i];

    std::vector<std::size_t> base(pattern_margin.n_cells(), 0);
    for (std::size_t p = 0; p < base.size(); ++p) {
        std::size_t rem = p;
        std::size_t idx = 0;
        for (std::size_t i = 0; i < pred_idx.size(); ++i) {
            const int level = static_cast<int>(rem / pstrides[i]);
            rem %= pstrides[i];
            for (std::size_t o = 0; o < out_of_source.size(); ++o)
                if (out_of_source[o] == pred_idx[i])
                    idx += static_cast<std::size_t>(level) * out_strides[o];
        }
        base[p] = idx;
    }

    std::vector<double> cells(acc, 0.0);
    for (std::size_t draw = 0; draw < n; ++draw) {
        const std::size_t p = rng.categorical(cdf);
        const bool success = rng.bernoulli(p_model[to_model[p]]);
        cells[base[p] + (success ? target_stride : 0)] += 1.0;
    }
    return ContingencyTable(std::move(out_vars), std::move(cells), Provenance::Observed);
}

ContingencyTable sample_empirical_multinomial(const ContingencyTable& table,
                                              std::size_t n, Rng& rng)
{
    if (!(table.total() > 0.0))
        throw NumericError("degenerate table: total weight is zero");
    const auto cdf = cumulative_weights(table.cells());
    std::vector<double> cells(table.n_cells(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        cells[rng.categorical(cdf)] += 1.0;
    return ContingencyTable(table.variables(), std::move(cells), Provenance::Observed);
}

ContingencyTable sample_subset(const ContingencyTable& table, std::size_t n, Rng& rng)
{
    if (!table.observed())
        throw DomainError("subset sampling requires observed integer counts");
    if (n == 0)
        throw DomainError("subset sample size must be positive");

    // Expand cells to one entry per subject.
    std::vector<std::uint32_t> subjects;
    subjects.reserve(static_cast<std::size_t>(table.total()));
    for (std::size_t i = 0; i < table.n_cells(); ++i) {
        const double c = table.cells()[i];
        if (std::floor(c) != c)
            throw DomainError("subset sampling requires integer counts");
        for (long k = 0; k < static_cast<long>(c); ++k)
            subjects.push_back(static_cast<std::uint32_t>(i));
    }
    if (n > subjects.size())
        throw DomainError("subset sample size exceeds the record count");

    // Partial Fisher-Yates: the first n slots become the sample.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(subjects.size() - i));
        std::swap(subjects[i], subjects[j]);
    }
    std::vector<double> cells(table.n_cells(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        cells[subjects[i]] += 1.0;
    return ContingencyTable(table.variables(), std::move(cells), Provenance::Observed);
}

const char* design_name(Design d)
{
    switch (d) {
    case Design::ModelParametric: return "model_parametric";
    case Design::EmpiricalMultinomial: return "empirical_multinomial";
    case Design::SubsetWithoutReplacement: return "subset_without_replacement";
    }
    return "?";
}

namespace {

struct ReplicateOutcome {
    bool fitted = false;
    bool accepted = false;
    double deviance = 0.0;
};

struct TaskGroup {
    Design design{};
    int generator = -1; // index into fits for the parametric design
    std::size_t model = 0;
    std::size_t size_index = 0;
};

} // namespace

AcceptanceReport run_acceptance_study(const SimulationConfig& config,
                                      const ContingencyTable& data,
                                      const std::vector<LogitFit>& fits, int threads)
{
    if (config.designs.empty())
        throw DomainError("simulation config lists no designs");
    if (config.models.empty())
        throw DomainError("simulation config lists no models");
    if (config.sample_sizes.empty())
        throw DomainError("simulation config lists no sample sizes");
    if (config.replicates < 0)
        throw DomainError("replicate count must be nonnegative");
    if (fits.size() != config.models.size())
        throw DomainError("one fitted model per config model is required");
    if (threads < 1)
        threads = 1;

    for (Design d : config.designs)
        if (d == Design::SubsetWithoutReplacement)
            for (std::size_t n : config.sample_sizes)
                if (static_cast<double>(n) > data.total())
                    throw DomainError("subset design sample size exceeds the record count");

    std::vector<TaskGroup> groups;
    for (std::size_t di = 0; di < config.designs.size(); ++di) {
        const Design d = config.designs[di];
        const int n_gen =
            d == Design::ModelParametric ? static_cast<int>(config.models.size()) : 1;
        for (int g = 0; g < n_gen; ++g)
            for (std::size_t m = 0; m < config.models.size(); ++m)
                for (std::size_t s = 0; s < config.sample_sizes.size(); ++s)
                    groups.push_back(TaskGroup{
                        d, d == Design::ModelParametric ? g : -1, m, s});
    }

    // Covariates every model under test needs, so parametric replicates can
    // refit all of them.
    VarSet all_model_vars = 0;
    for (const auto& spec : config.models) {
        const auto m = parse_logit_model(spec.formula, data);
        all_model_vars |= m.predictor_set();
    }

    AcceptanceReport report;
    report.config = config;

    for (const auto& group : groups) {
        const std::size_t n = config.sample_sizes[group.size_index];
        const int replicates = config.replicates;
        std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(replicates));

        auto run_replicate = [&](int r) {
            const std::uint64_t seed = derive_stream(
                config.master_seed,
                {static_cast<std::uint64_t>(group.design),
                 static_cast<std::uint64_t>(group.generator + 1),
                 static_cast<std::uint64_t>(group.model),
                 static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r)});
            Rng rng(seed);
            ReplicateOutcome out;
            try {
                ContingencyTable replicate = [&] {
                    switch (group.design) {
                    case Design::ModelParametric:
                        return sample_model_parametric(
                            fits[static_cast<std::size_t>(group.generator)], data, n,
                            rng, all_model_vars);
                    case Design::EmpiricalMultinomial:
                        return sample_empirical_multinomial(data, n, rng);
                    case Design::SubsetWithoutReplacement:
                    default:
                        return sample_subset(data, n, rng);
                    }
                }();
                const auto model =
                    parse_logit_model(config.models[group.model].formula, replicate);
                const auto fit = fit_logit(replicate, model);
                if (fit.converged) {
                    out.fitted = true;
                    out.deviance = fit.deviance.value;
                    out.accepted = fit.deviance.p_value >= config.alpha_fit;
                }
            } catch (const Error&) {
                // failed replicate fits count as rejections
            }
            outcomes[static_cast<std::size_t>(r)] = out;
        };

        if (threads == 1 || replicates < 2) {
            for (int r = 0; r < replicates; ++r)
                run_replicate(r);
        } else {
            std::atomic<int> next{0};
            std::vector<std::thread> pool;
            const int n_workers = std::min<int>(threads, replicates);
            pool.reserve(static_cast<std::size_t>(n_workers));
            for (int w = 0; w < n_workers; ++w)
                pool.emplace_back([&] {
                    for (int r = next.fetch_add(1); r < replicates;
                         r = next.fetch_add(1))
                        run_replicate(r);
                });
            for (auto& t : pool)
                t.join();
        }

        AcceptanceCell cell;
        cell.design = group.design;
        cell.generator =
            group.generator >= 0
                ? config.models[static_cast<std::size_t>(group.generator)].name
                : "";
        cell.model = config.models[group.model].name;
        cell.sample_size = n;
        cell.replicates = replicates;
        double dev_sum = 0.0;
        int fitted = 0;
        for (const auto& out : outcomes) {
            if (out.fitted) {
                ++fitted;
                dev_sum += out.deviance;
                if (out.accepted)
                    ++cell.accepted;
            } else {
                ++cell.failed_fits;
            }
        }
        cell.proportion = replicates > 0 ? static_cast<double>(cell.accepted) /
                                               static_cast<double>(replicates)
                                         : 0.0;
        cell.mean_deviance = fitted > 0 ? dev_sum / static_cast<double>(fitted) : 0.0;
        report.cells.push_back(std::move(cell));
    }
    return report;
}

} // namespace catinfo
