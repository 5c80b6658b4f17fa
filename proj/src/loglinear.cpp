#include "loglinear.hpp"

#include <cmath>

namespace catinfo {

LoglinearFit ipf_fit(const ContingencyTable& table, const ModelFormula& formula,
                     const IpfOptions& options)
{
    if (!(table.total() > 0.0))
        throw NumericError("degenerate table: total weight is zero");
    if (!(options.tol > 0.0))
        throw DomainError("IPF tolerance must be positive");
    for (VarSet g : formula.generators)
        if ((g & ~table.all_variables()) != 0)
            throw DomainError("formula references unknown variables");

    const auto& observed = table.cells();
    const std::size_t n_cells = observed.size();

    struct GeneratorPlan {
        std::vector<std::uint32_t> map;
        std::vector<double> target; // observed margin
        std::vector<double> work;   // fitted margin scratch
    };
    std::vector<GeneratorPlan> plans;
    plans.reserve(formula.generators.size());
    for (VarSet g : formula.generators) {
        GeneratorPlan plan;
        plan.map = margin_map(table.variables(), g);
        plan.target.assign(table.joint_cardinality(g), 0.0);
        for (std::size_t i = 0; i < n_cells; ++i)
            plan.target[plan.map[i]] += observed[i];
        plan.work.assign(plan.target.size(), 0.0);
        plans.push_back(std::move(plan));
    }

    std::vector<double> fitted(n_cells, 1.0);
    bool converged = false;
    int iterations = 0;
    double gap = 0.0;

    for (int iter = 0; iter < options.max_iter; ++iter) {
        for (auto& plan : plans) {
            std::fill(plan.work.begin(), plan.work.end(), 0.0);
            for (std::size_t i = 0; i < n_cells; ++i)
                plan.work[plan.map[i]] += fitted[i];
            for (std::size_t i = 0; i < n_cells; ++i) {
                const std::uint32_t b = plan.map[i];
                fitted[i] = plan.work[b] > 0.0
                                ? fitted[i] * (plan.target[b] / plan.work[b])
                                : 0.0;
            }
        }
        iterations = iter + 1;

        gap = 0.0;
        for (auto& plan : plans) {
            std::fill(plan.work.begin(), plan.work.end(), 0.0);
            for (std::size_t i = 0; i < n_cells; ++i)
                plan.work[plan.map[i]] += fitted[i];
            for (std::size_t b = 0; b < plan.work.size(); ++b)
                gap = std::max(gap, std::fabs(plan.work[b] - plan.target[b]));
        }
        if (gap < options.tol) {
            converged = true;
            break;
        }
    }

    double g2 = 0.0;
    for (std::size_t i = 0; i < n_cells; ++i)
        if (observed[i] > 0.0)
            g2 += observed[i] * std::log(observed[i] / fitted[i]);
    g2 *= 2.0;
    if (g2 < 0.0 && g2 > -1e-9)
        g2 = 0.0;

    LoglinearFit fit{formula,
                     ContingencyTable(table.variables(), std::move(fitted),
                                      Provenance::Fitted),
                     {},
                     n_parameters(formula, table.variables()),
                     0.0,
                     converged,
                     iterations,
                     gap};
    fit.deviance = make_info_stat(g2, residual_df(formula, table.variables()));
    fit.aic = fit.deviance.value + 2.0 * static_cast<double>(fit.n_params);
    return fit;
}

namespace {

// Marginalize to A|B|C, compound multi-variable groups, and return the
// 3-variable table plus the local masks (each a single variable).
struct ThreeWay {
    ContingencyTable table;
    VarSet a, b, c;
};

ThreeWay three_way_view(const ContingencyTable& table, VarSet a, VarSet b, VarSet c)
{
    if (a == 0 || b == 0 || c == 0)
        throw DomainError("interaction requires nonempty A, B, C");
    if ((a & b) || (a & c) || (b & c))
        throw DomainError("interaction arguments must be pairwise disjoint");

    ContingencyTable sub = table.marginalize(a | b | c);
    auto fresh_name = [&](const char* base) {
        std::string n = base;
        auto taken = [&](const std::string& s) {
            for (const auto& v : sub.variables())
                if (v.name == s)
                    return true;
            return false;
        };
        while (taken(n))
            n += "_";
        return n;
    };
    std::string names[3];
    const VarSet groups[3] = {a, b, c};
    const char* bases[3] = {"&A", "&B", "&C"};
    for (int k = 0; k < 3; ++k) {
        VarSet local = sub.variable_set_from(table, groups[k]);
        if (vs_size(local) > 1) {
            names[k] = fresh_name(bases[k]);
            sub = sub.compound(local, names[k]);
        } else {
            names[k] = table.variables()[static_cast<std::size_t>(
                                             vs_indices(groups[k]).front())]
                           .name;
        }
    }
    const VarSet la = vs_single(sub.variable_index(names[0]));
    const VarSet lb = vs_single(sub.variable_index(names[1]));
    const VarSet lc = vs_single(sub.variable_index(names[2]));
    return ThreeWay{std::move(sub), la, lb, lc};
}

} // namespace

InteractionStat interaction_stat(const ContingencyTable& table, VarSet a, VarSet b,
                                 VarSet c)
{
    const ThreeWay v = three_way_view(table, a, b, c);
    const auto formula =
        ModelFormula::from_generators({v.a | v.b, v.a | v.c, v.b | v.c});
    IpfOptions opts;
    opts.tol = 1e-10;
    opts.max_iter = 5000;
    const auto fit = ipf_fit(v.table, formula, opts);
    InteractionStat out;
    out.stat = fit.deviance; // df = (a-1)(b-1)(c-1) by the closure arithmetic
    out.ipf_converged = fit.converged;
    return out;
}

InfoStat partial_association(const ContingencyTable& table, VarSet a, VarSet b, VarSet c)
{
    const InfoStat cmi = conditional_mutual_information(table, a, b, c);
    const InteractionStat inter = interaction_stat(table, a, b, c);
    double par = cmi.value - inter.stat.value;
    if (par < 0.0)
        par = 0.0;
    const long ca = static_cast<long>(table.joint_cardinality(a));
    const long cb = static_cast<long>(table.joint_cardinality(b));
    return make_info_stat(par, (ca - 1) * (cb - 1));
}

TwoStepResult two_step_test(const ContingencyTable& table, VarSet a, VarSet b, VarSet c,
                            double alpha_int, double alpha_par)
{
    if (!(alpha_int > 0.0 && alpha_int < 1.0 && alpha_par > 0.0 && alpha_par < 1.0))
        throw DomainError("significance levels must lie in (0,1)");
    TwoStepResult r;
    r.cmi = conditional_mutual_information(table, a, b, c);
    const InteractionStat inter = interaction_stat(table, a, b, c);
    r.interaction = inter.stat;
    r.ipf_converged = inter.ipf_converged;
    double par = r.cmi.value - r.interaction.value;
    if (par < 0.0)
        par = 0.0;
    const long ca = static_cast<long>(table.joint_cardinality(a));
    const long cb = static_cast<long>(table.joint_cardinality(b));
    r.partial = make_info_stat(par, (ca - 1) * (cb - 1));
    r.interaction_significant = r.interaction.p_value < alpha_int;
    r.partial_tested = !r.interaction_significant;
    r.partial_significant = r.partial_tested && r.partial.p_value < alpha_par;
    return r;
}

} // namespace catinfo
