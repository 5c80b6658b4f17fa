#include "logit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "linalg.hpp"
#include "loglinear.hpp"
#include "selection.hpp"

namespace catinfo {

namespace {

double softplus(double t) { return t > 30.0 ? t : std::log1p(std::exp(t)); }
double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

} // namespace

VarSet LogitModel::predictor_set() const
{
    VarSet s = 0;
    for (VarSet t : terms)
        s |= t;
    return s;
}

LogitModel make_logit_model(const ContingencyTable& table, int target,
                            std::vector<VarSet> terms)
{
    if (target < 0 || static_cast<std::size_t>(target) >= table.n_variables())
        throw DomainError("logit target index out of range");
    if (table.variables()[static_cast<std::size_t>(target)].cardinality() != 2)
        throw DomainError("logit target '" +
                          table.variables()[static_cast<std::size_t>(target)].name +
                          "' must be binary");

    std::set<VarSet> closed;
    for (VarSet t : terms) {
        if (t == 0)
            throw DomainError("empty logit term");
        if (vs_contains(t, target))
            throw DomainError("logit terms must exclude the target");
        if ((t & ~table.all_variables()) != 0)
            throw DomainError("logit term references unknown variables");
        for (VarSet sub = t; sub != 0; sub = (sub - 1) & t)
            closed.insert(sub); // hierarchy: include every lower-order term
    }
    LogitModel m;
    m.target = target;
    m.terms.assign(closed.begin(), closed.end());
    std::sort(m.terms.begin(), m.terms.end(), [](VarSet x, VarSet y) {
        if (vs_size(x) != vs_size(y))
            return vs_size(x) < vs_size(y);
        return x < y;
    });
    return m;
}

namespace {

std::string trim_copy(const std::string& s)
{
    std::size_t b = s.find_first_not_of(" \t");
    std::size_t e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

} // namespace

LogitModel parse_logit_model(const std::string& text, const ContingencyTable& table)
{
    const std::size_t tilde = text.find('~');
    if (tilde == std::string::npos)
        throw ParseError("logit model must have the form 'TARGET ~ terms': '" + text +
                         "'");
    const std::string target_name = trim_copy(text.substr(0, tilde));
    const int target = table.variable_index(target_name);

    std::vector<VarSet> terms;
    std::string rhs = text.substr(tilde + 1);
    std::size_t pos = 0;
    while (pos <= rhs.size()) {
        std::size_t next = rhs.find('+', pos);
        std::string token = trim_copy(rhs.substr(pos, next - pos));
        if (token.empty())
            throw ParseError("empty term in logit model '" + text + "'");
        if (token != "1") {
            VarSet t = 0;
            std::size_t p2 = 0;
            while (p2 <= token.size()) {
                std::size_t n2 = token.find(':', p2);
                std::string name = trim_copy(token.substr(p2, n2 - p2));
                const int v = table.variable_index(name);
                if (vs_contains(t, v))
                    throw ParseError("variable '" + name + "' repeated in term '" +
                                     token + "'");
                t |= vs_single(v);
                if (n2 == std::string::npos)
                    break;
                p2 = n2 + 1;
            }
            terms.push_back(t);
        }
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return make_logit_model(table, target, std::move(terms));
}

std::string logit_model_text(const LogitModel& model, const std::vector<VariableSpec>& vars)
{
    std::string out = vars[static_cast<std::size_t>(model.target)].name + " ~ ";
    if (model.terms.empty())
        return out + "1";
    for (std::size_t i = 0; i < model.terms.size(); ++i) {
        if (i) out += " + ";
        const auto idx = vs_indices(model.terms[i]);
        for (std::size_t j = 0; j < idx.size(); ++j) {
            if (j) out += ":";
            out += vars[static_cast<std::size_t>(idx[j])].name;
        }
    }
    return out;
}

namespace {

// One design column: a term plus one dummy-level combination.
struct Column {
    VarSet term = 0;                            // 0 for the intercept
    std::vector<std::pair<int, int>> levels;    // (variable index, level >= 1)
    std::string name;
};

std::vector<Column> build_columns(const std::vector<VariableSpec>& vars,
                                  const LogitModel& model)
{
    std::vector<Column> cols;
    cols.push_back(Column{0, {}, "(intercept)"});
    for (VarSet t : model.terms) {
        const auto idx = vs_indices(t);
        std::vector<int> lv(idx.size(), 1);
        while (true) {
            Column c;
            c.term = t;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                c.levels.emplace_back(idx[i], lv[i]);
                if (!c.name.empty())
                    c.name += ":";
                const auto& v = vars[static_cast<std::size_t>(idx[i])];
                c.name += v.cardinality() == 2 ? v.name
                                               : v.name + "=" + v.levels[static_cast<std::size_t>(lv[i])];
            }
            cols.push_back(std::move(c));
            // odometer over 1..card-1, last variable fastest
            std::size_t i = idx.size();
            while (i-- > 0) {
                if (++lv[i] <
                    static_cast<int>(vars[static_cast<std::size_t>(idx[i])].cardinality()))
                    break;
                lv[i] = 1;
                if (i == 0)
                    goto done;
            }
            if (idx.empty())
                break;
            continue;
        done:
            break;
        }
    }
    return cols;
}

// Grouped data: covariate patterns are the cells of the predictor margin.
struct GroupedData {
    std::vector<double> y; // successes per pattern
    std::vector<double> n; // totals per pattern
    std::vector<double> x; // n_patterns x n_cols design, row-major
    std::size_t n_patterns = 0;
    std::size_t n_cols = 0;
    std::size_t support = 0; // patterns with n > 0
};

GroupedData build_grouped(const ContingencyTable& table, const LogitModel& model,
                          const std::vector<Column>& cols)
{
    const VarSet preds = model.predictor_set();
    const VarSet tmask = vs_single(model.target);

    GroupedData g;
    g.n_cols = cols.size();

    if (preds == 0) {
        const auto tm = table.marginalize(tmask);
        g.n_patterns = 1;
        g.y = {tm.cells()[1]};
        g.n = {tm.cells()[0] + tm.cells()[1]};
        g.x = {1.0};
        g.support = g.n[0] > 0.0 ? 1 : 0;
        return g;
    }

    const auto sub = table.marginalize(preds | tmask);
    const VarSet local_preds = sub.variable_set_from(table, preds);
    const int local_target = sub.variable_index(
        table.variables()[static_cast<std::size_t>(model.target)].name);

    const auto pattern_of = margin_map(sub.variables(), local_preds);
    g.n_patterns = sub.joint_cardinality(local_preds);
    g.y.assign(g.n_patterns, 0.0);
    g.n.assign(g.n_patterns, 0.0);
    std::vector<int> levels(sub.n_variables());
    for (std::size_t i = 0; i < sub.cells().size(); ++i) {
        sub.unravel(i, levels);
        g.n[pattern_of[i]] += sub.cells()[i];
        if (levels[static_cast<std::size_t>(local_target)] == 1)
            g.y[pattern_of[i]] += sub.cells()[i];
    }
    for (double n : g.n)
        if (n > 0.0)
            ++g.support;

    // Pattern levels in the original table's variable index space.
    const auto pred_idx = vs_indices(preds);
    std::vector<VariableSpec> pred_vars;
    for (int v : pred_idx)
        pred_vars.push_back(table.variables()[static_cast<std::size_t>(v)]);
    std::vector<std::size_t> pstrides(pred_vars.size());
    std::size_t acc = 1;
    for (std::size_t i = pred_vars.size(); i-- > 0;) {
        pstrides[i] = acc;
        acc *= pred_vars[i].cardinality();
    }

    g.x.assign(g.n_patterns * g.n_cols, 0.0);
    std::vector<int> full_levels(table.n_variables(), 0);
    for (std::size_t p = 0; p < g.n_patterns; ++p) {
        std::size_t rem = p;
        for (std::size_t i = 0; i < pred_vars.size(); ++i) {
            full_levels[static_cast<std::size_t>(pred_idx[i])] =
                static_cast<int>(rem / pstrides[i]);
            rem %= pstrides[i];
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
            double v = 1.0;
            for (const auto& [var, level] : cols[c].levels)
                if (full_levels[static_cast<std::size_t>(var)] != level) {
                    v = 0.0;
                    break;
                }
            g.x[p * g.n_cols + c] = v;
        }
    }
    return g;
}

double grouped_loglik(const GroupedData& g, const std::vector<double>& beta)
{
    double ll = 0.0;
    for (std::size_t p = 0; p < g.n_patterns; ++p) {
        if (g.n[p] <= 0.0)
            continue;
        double eta = 0.0;
        for (std::size_t c = 0; c < g.n_cols; ++c)
            eta += g.x[p * g.n_cols + c] * beta[c];
        // y log p + (n - y) log(1 - p), numerically stable in both tails
        ll += -g.y[p] * softplus(-eta) - (g.n[p] - g.y[p]) * softplus(eta);
    }
    return ll;
}

double saturated_loglik(const GroupedData& g)
{
    double ll = 0.0;
    for (std::size_t p = 0; p < g.n_patterns; ++p) {
        const double n = g.n[p];
        if (n <= 0.0)
            continue;
        const double y = g.y[p];
        if (y > 0.0)
            ll += y * std::log(y / n);
        if (n - y > 0.0)
            ll += (n - y) * std::log((n - y) / n);
    }
    return ll;
}

} // namespace

LogitFit fit_logit(const ContingencyTable& table, const LogitModel& model,
                   const LogitOptions& options)
{
    const auto cols = build_columns(table.variables(), model);
    const auto g = build_grouped(table, model, cols);
    const std::size_t k = cols.size();

    LogitFit fit;
    fit.model = model;
    fit.n_params = k;
    fit.n_patterns = g.support;
    for (const auto& c : cols)
        fit.coef_names.push_back(c.name);

    std::vector<double> beta(k, 0.0);
    double ll = grouped_loglik(g, beta);
    std::vector<double> grad(k), hess(k * k);
    bool converged = false;
    bool separation = false;
    int iterations = 0;

    for (int iter = 0; iter < options.max_iter; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        std::fill(hess.begin(), hess.end(), 0.0);
        for (std::size_t p = 0; p < g.n_patterns; ++p) {
            if (g.n[p] <= 0.0)
                continue;
            double eta = 0.0;
            for (std::size_t c = 0; c < k; ++c)
                eta += g.x[p * k + c] * beta[c];
            const double mu = logistic(eta);
            const double r = g.y[p] - g.n[p] * mu;
            const double w = g.n[p] * mu * (1.0 - mu);
            for (std::size_t c = 0; c < k; ++c) {
                const double xc = g.x[p * k + c];
                if (xc == 0.0)
                    continue;
                grad[c] += r * xc;
                for (std::size_t d = 0; d <= c; ++d)
                    hess[c * k + d] += w * xc * g.x[p * k + d];
            }
        }
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t d = c + 1; d < k; ++d)
                hess[c * k + d] = hess[d * k + c];

        double gmax = 0.0;
        for (double v : grad)
            gmax = std::max(gmax, std::fabs(v));
        if (gmax < options.tol) {
            converged = true;
            break;
        }

        const auto chol = Cholesky::decompose(hess, k);
        if (!chol.ok()) {
            if (iter == 0)
                throw NumericError("logit design is rank deficient: column '" +
                                   cols[static_cast<std::size_t>(chol.bad_column())].name +
                                   "' is collinear with earlier columns");
            break; // late-iteration degeneracy: report non-convergence
        }
        const auto delta = chol.solve(grad);

        double lambda = 1.0;
        std::vector<double> candidate(k);
        double ll_new = -std::numeric_limits<double>::infinity();
        for (int halving = 0; halving < 50; ++halving) {
            for (std::size_t c = 0; c < k; ++c)
                candidate[c] = beta[c] + lambda * delta[c];
            ll_new = grouped_loglik(g, candidate);
            if (ll_new >= ll - 1e-13)
                break;
            lambda *= 0.5;
        }
        const double gain = ll_new - ll;
        beta = candidate;
        ll = ll_new;
        iterations = iter + 1;

        for (double b : beta)
            if (std::fabs(b) > options.separation_bound)
                separation = true;
        if (separation)
            break;
        if (gain >= 0.0 && gain < options.tol) {
            converged = true;
            break;
        }
    }

    fit.coefficients = beta;
    fit.log_likelihood = ll;
    fit.converged = converged && !separation;
    fit.separation = separation;
    fit.iterations = iterations;

    const double dev = 2.0 * (saturated_loglik(g) - ll);
    long df = static_cast<long>(g.support) - static_cast<long>(k);
    if (df < 0)
        df = 0;
    fit.deviance = make_info_stat(dev > 0.0 ? dev : 0.0, df);
    fit.aic = -2.0 * fit.log_likelihood + 2.0 * static_cast<double>(fit.n_params);

    // Standard errors from the observed information at the optimum.
    fit.std_errors.assign(k, 0.0);
    {
        std::fill(hess.begin(), hess.end(), 0.0);
        for (std::size_t p = 0; p < g.n_patterns; ++p) {
            if (g.n[p] <= 0.0)
                continue;
            double eta = 0.0;
            for (std::size_t c = 0; c < k; ++c)
                eta += g.x[p * k + c] * beta[c];
            const double mu = logistic(eta);
            const double w = g.n[p] * mu * (1.0 - mu);
            for (std::size_t c = 0; c < k; ++c)
                for (std::size_t d = 0; d <= c; ++d)
                    hess[c * k + d] += w * g.x[p * k + c] * g.x[p * k + d];
        }
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t d = c + 1; d < k; ++d)
                hess[c * k + d] = hess[d * k + c];
        const auto chol = Cholesky::decompose(hess, k);
        if (chol.ok()) {
            const auto diag = chol.inverse_diagonal();
            for (std::size_t c = 0; c < k; ++c)
                fit.std_errors[c] = std::sqrt(std::max(diag[c], 0.0));
        }
    }
    return fit;
}

std::vector<double> fitted_pattern_probabilities(const ContingencyTable& table,
                                                 const LogitFit& fit)
{
    const auto cols = build_columns(table.variables(), fit.model);
    const VarSet preds = fit.model.predictor_set();
    if (preds == 0)
        return {logistic(fit.coefficients[0])};

    const auto pred_idx = vs_indices(preds);
    std::vector<std::size_t> pstrides(pred_idx.size());
    std::size_t acc = 1;
    for (std::size_t i = pred_idx.size(); i-- > 0;) {
        pstrides[i] = acc;
        acc *= table.variables()[static_cast<std::size_t>(pred_idx[i])].cardinality();
    }
    std::vector<double> out(acc, 0.0);
    std::vector<int> full_levels(table.n_variables(), 0);
    for (std::size_t p = 0; p < acc; ++p) {
        std::size_t rem = p;
        for (std::size_t i = 0; i < pred_idx.size(); ++i) {
            full_levels[static_cast<std::size_t>(pred_idx[i])] =
                static_cast<int>(rem / pstrides[i]);
            rem %= pstrides[i];
        }
        double eta = 0.0;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            double v = fit.coefficients[c];
            for (const auto& [var, level] : cols[c].levels)
                if (full_levels[static_cast<std::size_t>(var)] != level) {
                    v = 0.0;
                    break;
                }
            eta += v;
        }
        out[p] = logistic(eta);
    }
    return out;
}

namespace {

// Minimal conditioner subsets whose interaction with (target, v) is
// significant; the full set when no proper subset reaches significance.
std::vector<VarSet> decompose_interaction(const ContingencyTable& table, VarSet target,
                                          VarSet v, VarSet w, double alpha_int)
{
    const int size = vs_size(w);
    for (int k = 1; k <= size; ++k) {
        std::vector<VarSet> found;
        for (VarSet sub : vs_subsets(w)) {
            if (vs_size(sub) != k)
                continue;
            if (interaction_stat(table, target, v, sub).stat.p_value < alpha_int)
                found.push_back(sub);
        }
        if (!found.empty())
            return found;
    }
    return {w};
}

} // namespace

MiLogitResult mi_logit_construct(const ContingencyTable& table, int target, double alpha,
                                 double alpha_int)
{
    const VarSet tmask = vs_single(target);
    VarSet survivors = table.all_variables() & ~tmask;
    if (survivors == 0)
        throw DomainError("mi-logit construction requires at least one predictor");
    if (table.variables()[static_cast<std::size_t>(target)].cardinality() != 2)
        throw DomainError("logit target must be binary");

    MiLogitResult result;
    DecompositionReport rep;
    rep.alpha = alpha;

    // Stage 1: peel and drop predictors with an insignificant full-order CMI,
    // unless the partial association alone is significant.
    while (survivors != 0) {
        rep = peel_decompose(table, tmask, survivors, alpha);
        const auto& first = rep.terms.front();
        if (!first.flagged)
            break;
        bool keep = false;
        if (first.conditioner != 0) {
            const auto ts = two_step_test(table, first.lhs, first.rhs,
                                          first.conditioner, alpha_int, alpha);
            keep = ts.partial_tested && ts.partial_significant;
        }
        if (keep)
            break;
        result.dropped.push_back(vs_indices(first.rhs).front());
        survivors &= ~first.rhs;
        if (survivors == 0) {
            rep = DecompositionReport{};
            rep.alpha = alpha;
        }
    }

    // Stage 2: annotate every surviving term with its Int/Par split.
    for (auto& term : rep.terms)
        if (term.conditioner != 0)
            term.two_step = two_step_test(table, term.lhs, term.rhs, term.conditioner,
                                          alpha_int, alpha);

    // Stage 3: main effects from significant Par components; interaction
    // terms from significant Int components at their lowest significant order.
    std::vector<VarSet> terms;
    for (const auto& term : rep.terms) {
        bool main_significant;
        if (term.conditioner == 0) {
            main_significant = !term.flagged;
        } else {
            main_significant =
                term.two_step->partial_tested && term.two_step->partial_significant;
        }
        if (main_significant)
            terms.push_back(term.rhs);
        if (term.conditioner != 0 && term.two_step->interaction_significant) {
            for (VarSet comp :
                 decompose_interaction(table, tmask, term.rhs, term.conditioner,
                                       alpha_int))
                terms.push_back(term.rhs | comp);
        }
    }

    result.model = make_logit_model(table, target, std::move(terms));
    result.report = std::move(rep);
    return result;
}

AicSearchResult aic_neighborhood_search(const ContingencyTable& table,
                                        const LogitModel& base,
                                        const std::vector<VarSet>& candidate_terms,
                                        const LogitOptions& options)
{
    const VarSet preds = base.predictor_set();
    for (VarSet c : candidate_terms) {
        if (vs_size(c) != 2)
            throw DomainError("candidate terms must be two-way");
        if ((c & ~preds) != 0)
            throw DomainError("candidate terms must use the base model's predictors");
    }

    AicSearchResult result;
    result.fit = fit_logit(table, base, options);
    LogitModel current = base;

    const std::size_t max_steps = candidate_terms.size() + base.terms.size() + 8;
    for (std::size_t step = 0; step < max_steps; ++step) {
        double best_aic = result.fit.aic;
        std::optional<LogitFit> best;
        std::string best_action, best_term;

        auto consider = [&](LogitModel trial, const std::string& action,
                            const std::string& term_name) {
            try {
                LogitFit f = fit_logit(table, trial, options);
                if (!f.converged) {
                    result.diagnostics.push_back(action + " " + term_name +
                                                 ": fit did not converge, skipped");
                    return;
                }
                if (f.aic < best_aic) {
                    best_aic = f.aic;
                    best = std::move(f);
                    best_action = action;
                    best_term = term_name;
                }
            } catch (const Error& e) {
                result.diagnostics.push_back(action + " " + term_name + ": " +
                                             e.what() + ", skipped");
            }
        };

        for (VarSet c : candidate_terms) {
            if (std::find(current.terms.begin(), current.terms.end(), c) !=
                current.terms.end())
                continue;
            auto terms = current.terms;
            terms.push_back(c);
            consider(make_logit_model(table, current.target, std::move(terms)), "add",
                     table.set_label(c));
        }
        for (VarSet t : current.terms) {
            bool supports_larger = false;
            for (VarSet u : current.terms)
                if (u != t && (t & ~u) == 0)
                    supports_larger = true;
            if (supports_larger)
                continue;
            std::vector<VarSet> terms;
            for (VarSet u : current.terms)
                if (u != t)
                    terms.push_back(u);
            consider(make_logit_model(table, current.target, std::move(terms)),
                     "remove", table.set_label(t));
        }

        if (!best)
            break;
        current = best->model;
        result.fit = std::move(*best);
        result.steps.push_back(AicSearchStep{best_action, best_term, best_aic});
    }
    return result;
}

double loglinear_equivalence_check(const ContingencyTable& table, const LogitModel& model)
{
    LogitOptions opts;
    opts.tol = 1e-12;
    opts.max_iter = 200;
    const LogitFit direct = fit_logit(table, model, opts);
    if (!direct.converged)
        throw NumericError("logit fit did not converge; equivalence check aborted");

    const VarSet preds = model.predictor_set();
    const VarSet tmask = vs_single(model.target);
    const auto sub = table.marginalize(preds | tmask);
    const VarSet local_preds = sub.variable_set_from(table, preds);
    const int local_target = sub.variable_index(
        table.variables()[static_cast<std::size_t>(model.target)].name);

    std::vector<VarSet> gens;
    if (local_preds != 0)
        gens.push_back(local_preds); // predictor margin is unconstrained
    gens.push_back(vs_single(local_target));
    for (VarSet t : model.terms)
        gens.push_back(sub.variable_set_from(table, t) | vs_single(local_target));

    IpfOptions ipf;
    ipf.tol = 1e-11;
    ipf.max_iter = 20000;
    const auto llfit = ipf_fit(sub, ModelFormula::from_generators(std::move(gens)), ipf);
    if (!llfit.converged)
        throw NumericError("IPF did not converge; equivalence check aborted");

    // Implied logit coefficients from fitted log odds at the corner patterns
    // (Moebius differences against the all-reference pattern).
    const auto cols = build_columns(table.variables(), model);
    std::vector<int> levels(sub.n_variables(), 0);
    auto log_odds_at = [&](const std::vector<std::pair<int, int>>& assign) {
        std::fill(levels.begin(), levels.end(), 0);
        for (const auto& [var, level] : assign) {
            const int local = sub.variable_index(
                table.variables()[static_cast<std::size_t>(var)].name);
            levels[static_cast<std::size_t>(local)] = level;
        }
        levels[static_cast<std::size_t>(local_target)] = 1;
        const double m1 = llfit.fitted.cells()[sub.cell_index(levels)];
        levels[static_cast<std::size_t>(local_target)] = 0;
        const double m0 = llfit.fitted.cells()[sub.cell_index(levels)];
        if (!(m1 > 0.0) || !(m0 > 0.0))
            throw NumericError("zero fitted cell at a corner pattern; implied "
                               "coefficients are undefined");
        return std::log(m1) - std::log(m0);
    };

    double max_gap = 0.0;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto& col = cols[c];
        double implied = 0.0;
        const std::size_t m = col.levels.size();
        for (std::size_t pick = 0; pick < (std::size_t{1} << m); ++pick) {
            std::vector<std::pair<int, int>> assign;
            for (std::size_t i = 0; i < m; ++i)
                if (pick & (std::size_t{1} << i))
                    assign.push_back(col.levels[i]);
            const int sign = ((m - std::popcount(pick)) % 2 == 0) ? 1 : -1;
            implied += sign * log_odds_at(assign);
        }
        max_gap = std::max(max_gap, std::fabs(implied - direct.coefficients[c]));
    }
    return max_gap;
}

} // namespace catinfo
