#include "selection.hpp"

#include <algorithm>
#include <set>

namespace catinfo {

DecompositionReport peel_decompose(const ContingencyTable& table, VarSet focus,
                                   VarSet others, double alpha)
{
    if (focus == 0 || others == 0)
        throw DomainError("peel decomposition requires a focus and conditioners");
    if (focus & others)
        throw DomainError("focus must not appear among the conditioners");

    DecompositionReport report;
    report.alpha = alpha;
    VarSet remaining = others;
    while (remaining != 0) {
        int peel = -1;
        InfoStat peel_stat;
        if (vs_size(remaining) == 1) {
            peel = vs_indices(remaining).front();
            peel_stat = conditional_mutual_information(table, focus, vs_single(peel), 0);
        } else {
            double best_p = -1.0;
            for (int u : vs_indices(remaining)) {
                const VarSet rest = remaining & ~vs_single(u);
                const InfoStat s =
                    conditional_mutual_information(table, focus, vs_single(u), rest);
                if (s.p_value > best_p) {
                    best_p = s.p_value;
                    peel = u;
                    peel_stat = s;
                }
            }
        }
        const VarSet rest = remaining & ~vs_single(peel);
        DecompTerm term;
        term.lhs = focus;
        term.rhs = vs_single(peel);
        term.conditioner = rest;
        term.stat = peel_stat;
        term.flagged = peel_stat.p_value > alpha;
        term.sparse = empty_slice_fraction(table, rest) > 0.5;
        report.terms.push_back(std::move(term));
        remaining = rest;
    }
    report.total = mutual_information(table, GroupPartition::of({focus, others}));
    return report;
}

std::vector<DispensabilityScore> rank_dispensability(const ContingencyTable& table,
                                                     VarSet active, double alpha)
{
    if (vs_size(active) < 3)
        throw DomainError("dispensability ranking requires at least 3 active variables");

    std::vector<DispensabilityScore> scores;
    for (int v : vs_indices(active)) {
        const auto report =
            peel_decompose(table, vs_single(v), active & ~vs_single(v), alpha);
        DispensabilityScore s;
        s.variable = v;
        for (const auto& term : report.terms) {
            if (term.flagged) {
                ++s.leading_insignificant;
            } else {
                s.first_significant_p = term.stat.p_value;
                break;
            }
        }
        scores.push_back(s);
    }
    // Most dispensable first; stable, so ties fall back to declaration order.
    std::stable_sort(scores.begin(), scores.end(),
                     [](const DispensabilityScore& x, const DispensabilityScore& y) {
                         if (x.leading_insignificant != y.leading_insignificant)
                             return x.leading_insignificant > y.leading_insignificant;
                         return x.first_significant_p > y.first_significant_p;
                     });
    return scores;
}

namespace {

SelectionTerm to_selection_term(const ContingencyTable& table, const DecompTerm& term,
                                double alpha, double alpha_int, bool annotate)
{
    SelectionTerm s;
    s.lhs = vs_indices(term.lhs).front();
    s.rhs = vs_indices(term.rhs).front();
    s.conditioner = term.conditioner;
    s.stat = term.stat;
    s.sparse = term.sparse;
    if (annotate && term.conditioner != 0)
        s.two_step = two_step_test(table, term.lhs, term.rhs, term.conditioner,
                                   alpha_int, alpha);
    return s;
}

} // namespace

InformationModel backward_select(const ContingencyTable& table, double alpha,
                                 double alpha_int)
{
    if (table.n_variables() < 3)
        throw DomainError("backward selection requires at least 3 variables");

    InformationModel model;
    VarSet active = table.all_variables();

    while (vs_size(active) >= 3) {
        const auto ranked = rank_dispensability(table, active, alpha);
        const int v = ranked.front().variable;
        auto report = peel_decompose(table, vs_single(v), active & ~vs_single(v), alpha);
        for (auto& term : report.terms) {
            SelectionTerm s = to_selection_term(table, term, alpha, alpha_int,
                                                /*annotate=*/!term.flagged);
            term.two_step = s.two_step; // surface the split in the narrative
            if (term.flagged)
                model.deleted.push_back(std::move(s));
            else
                model.retained.push_back(std::move(s));
        }
        model.peels.push_back(std::move(report));
        model.peel_order.push_back(v);
        active &= ~vs_single(v);
    }

    // Final pair: the residual two-way MI closes the accounting identity.
    {
        const auto pair = vs_indices(active);
        DecompTerm term;
        term.lhs = vs_single(pair[0]);
        term.rhs = vs_single(pair[1]);
        term.conditioner = 0;
        term.stat = conditional_mutual_information(table, term.lhs, term.rhs, 0);
        term.flagged = term.stat.p_value > alpha;
        SelectionTerm s = to_selection_term(table, term, alpha, alpha_int, false);
        DecompositionReport rep;
        rep.alpha = alpha;
        rep.total = term.stat;
        rep.terms.push_back(term);
        model.peels.push_back(std::move(rep));
        model.peel_order.push_back(pair[0]);
        if (term.flagged)
            model.deleted.push_back(std::move(s));
        else
            model.retained.push_back(std::move(s));
    }

    std::vector<VarSet> singletons;
    for (std::size_t i = 0; i < table.n_variables(); ++i)
        singletons.push_back(vs_single(static_cast<int>(i)));
    model.total = mutual_information(table, GroupPartition::of(singletons));
    return model;
}

namespace {

// A candidate is carried as its pre-maximality generator pool so that a
// replaced generator lets previously absorbed terms re-emerge as maximal.
struct PoolEntry {
    VarSet mask = 0;
    int lhs = -1; // source term's focus variable, -1 for structural entries
    int rhs = -1;
    VarSet conditioner = 0;
};

ModelFormula pool_formula(const std::vector<PoolEntry>& pool)
{
    std::vector<VarSet> gens;
    gens.reserve(pool.size());
    for (const auto& e : pool)
        gens.push_back(e.mask);
    auto formula = ModelFormula::from_generators(std::move(gens));
    std::sort(formula.generators.begin(), formula.generators.end());
    return formula;
}

std::vector<VarSet> closure_key(const ModelFormula& f) { return f.closure(); }

} // namespace

std::vector<CandidateModel> terms_to_candidates(const InformationModel& model,
                                                const ContingencyTable& table,
                                                const CandidateOptions& options)
{
    std::vector<PoolEntry> base_pool;
    for (const auto& t : model.retained) {
        PoolEntry e;
        e.lhs = t.lhs;
        e.rhs = t.rhs;
        e.conditioner = t.conditioner;
        const bool escalate =
            t.two_step.has_value() && t.two_step->interaction_significant;
        e.mask = vs_single(t.lhs) | vs_single(t.rhs) | (escalate ? t.conditioner : 0);
        base_pool.push_back(e);
    }
    // Every variable keeps at least its main effect.
    for (std::size_t i = 0; i < table.n_variables(); ++i)
        base_pool.push_back(PoolEntry{vs_single(static_cast<int>(i)), -1, -1, 0});

    std::vector<CandidateModel> candidates;
    std::set<std::vector<VarSet>> seen;

    auto add_candidate = [&](const std::vector<PoolEntry>& pool) -> bool {
        if (candidates.size() >= options.max_candidates)
            return false;
        auto formula = pool_formula(pool);
        auto key = closure_key(formula);
        if (!seen.insert(key).second)
            return false;
        LoglinearFit fit = ipf_fit(table, formula, options.ipf);
        const bool acceptable =
            fit.converged && fit.deviance.p_value >= options.alpha_fit;
        std::string note = fit.converged ? "" : "IPF did not converge";
        candidates.push_back(CandidateModel{std::move(formula), std::move(fit),
                                            acceptable, std::move(note)});
        return true;
    };

    std::vector<std::vector<PoolEntry>> frontier{base_pool};
    add_candidate(base_pool);

    for (int depth = 0; depth < options.refine_depth; ++depth) {
        std::vector<std::vector<PoolEntry>> next;
        for (const auto& pool : frontier) {
            const auto formula = pool_formula(pool);
            for (std::size_t gi = 0; gi < pool.size(); ++gi) {
                const PoolEntry& entry = pool[gi];
                if (vs_size(entry.mask) < 3 || entry.lhs < 0)
                    continue;
                // Replacement must target a maximal generator of this model.
                if (std::find(formula.generators.begin(), formula.generators.end(),
                              entry.mask) == formula.generators.end())
                    continue;

                std::vector<std::vector<VarSet>> replacements;
                // (a) all two-way margins
                {
                    std::vector<VarSet> pairs;
                    const auto idx = vs_indices(entry.mask);
                    for (std::size_t i = 0; i < idx.size(); ++i)
                        for (std::size_t j = i + 1; j < idx.size(); ++j)
                            pairs.push_back(vs_single(idx[i]) | vs_single(idx[j]));
                    replacements.push_back(std::move(pairs));
                }
                // (b) pairs anchored on the source term's focus variable
                {
                    std::vector<VarSet> pairs;
                    for (int x : vs_indices(entry.mask & ~vs_single(entry.lhs)))
                        pairs.push_back(vs_single(entry.lhs) | vs_single(x));
                    replacements.push_back(std::move(pairs));
                }
                // (c) keep the association pair with a single conditioner
                for (int w : vs_indices(entry.conditioner))
                    replacements.push_back(
                        {vs_single(entry.lhs) | vs_single(entry.rhs) | vs_single(w)});

                for (const auto& repl : replacements) {
                    std::vector<PoolEntry> variant;
                    variant.reserve(pool.size() + repl.size());
                    for (std::size_t k = 0; k < pool.size(); ++k)
                        if (k != gi)
                            variant.push_back(pool[k]);
                    for (VarSet m : repl) {
                        PoolEntry e;
                        e.mask = m;
                        e.lhs = entry.lhs;
                        e.rhs = entry.rhs;
                        variant.push_back(e);
                    }
                    if (add_candidate(variant))
                        next.push_back(std::move(variant));
                }
            }
        }
        frontier = std::move(next);
        if (frontier.empty())
            break;
    }

    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const CandidateModel& x, const CandidateModel& y) {
                         if (x.acceptable != y.acceptable)
                             return x.acceptable > y.acceptable;
                         if (x.fit.aic != y.fit.aic)
                             return x.fit.aic < y.fit.aic;
                         return formula_text(x.formula, table.variables()) <
                                formula_text(y.formula, table.variables());
                     });
    return candidates;
}

} // namespace catinfo
