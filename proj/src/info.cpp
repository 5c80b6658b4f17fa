#include "info.hpp"

#include <cmath>
#include <utility>

#include "chisq.hpp"

namespace catinfo {

InfoStat make_info_stat(double value, long df)
{
    InfoStat s;
    s.value = value;
    s.df = df;
    s.p_value = df > 0 ? chi_square_sf(value > 0.0 ? value : 0.0, df) : 1.0;
    return s;
}

GroupPartition GroupPartition::of(std::vector<VarSet> groups)
{
    VarSet seen = 0;
    for (VarSet g : groups) {
        if (g == 0)
            throw DomainError("partition group must be nonempty");
        if (g & seen)
            throw DomainError("partition groups must be disjoint");
        seen |= g;
    }
    GroupPartition p;
    p.groups = std::move(groups);
    return p;
}

double entropy(const ProbabilityTable& pdf, VarSet subset)
{
    if (subset == 0)
        throw DomainError("entropy requires a nonempty variable subset");
    const auto map = margin_map(pdf.variables, subset);
    std::vector<double> margin(pdf.joint_cardinality(subset), 0.0);
    for (std::size_t i = 0; i < pdf.cells.size(); ++i)
        margin[map[i]] += pdf.cells[i];
    double h = 0.0;
    for (double p : margin)
        if (p > 0.0)
            h -= p * std::log(p);
    return h;
}

InfoStat mutual_information(const ContingencyTable& table, const GroupPartition& partition)
{
    if (partition.groups.size() < 2)
        throw DomainError("mutual information requires at least 2 groups");
    VarSet all = 0;
    for (VarSet g : partition.groups) {
        if (g == 0 || (g & all))
            throw DomainError("partition groups must be nonempty and disjoint");
        if ((g & ~table.all_variables()) != 0)
            throw DomainError("partition references unknown variables");
        if (table.joint_cardinality(g) < 2)
            throw DomainError("partition group has cardinality 1");
        all |= g;
    }
    if (!(table.total() > 0.0))
        throw NumericError("degenerate table: total weight is zero");

    const auto sub = table.marginalize(all);
    const double n_total = sub.total();
    const double log_n = std::log(n_total);
    const std::size_t k = partition.groups.size();

    std::vector<std::vector<std::uint32_t>> maps;
    std::vector<std::vector<double>> margins;
    maps.reserve(k);
    margins.reserve(k);
    for (VarSet g : partition.groups) {
        VarSet local = sub.variable_set_from(table, g);
        maps.push_back(margin_map(sub.variables(), local));
        std::vector<double> m(sub.joint_cardinality(local), 0.0);
        const auto& map = maps.back();
        for (std::size_t i = 0; i < sub.cells().size(); ++i)
            m[map[i]] += sub.cells()[i];
        margins.push_back(std::move(m));
    }

    double value = 0.0;
    for (std::size_t i = 0; i < sub.cells().size(); ++i) {
        const double n = sub.cells()[i];
        if (n <= 0.0)
            continue;
        double log_ratio = std::log(n) + static_cast<double>(k - 1) * log_n;
        for (std::size_t g = 0; g < k; ++g)
            log_ratio -= std::log(margins[g][maps[g][i]]);
        value += n * log_ratio;
    }
    value *= 2.0;

    long df = 1;
    long sum_minus = 0;
    for (VarSet g : partition.groups) {
        const long c = static_cast<long>(table.joint_cardinality(g));
        df *= c;
        sum_minus += c - 1;
    }
    df = df - 1 - sum_minus;
    return make_info_stat(value, df);
}

InfoStat conditional_mutual_information(const ContingencyTable& table, VarSet a,
                                        VarSet b, VarSet c)
{
    if (a == 0 || b == 0)
        throw DomainError("CMI requires nonempty A and B");
    if ((a & b) || (a & c) || (b & c))
        throw DomainError("CMI arguments must be pairwise disjoint");
    if (b < a)
        std::swap(a, b); // canonical order makes the symmetry exact
    if (c == 0)
        return mutual_information(table, GroupPartition::of({a, b}));
    if (((a | b | c) & ~table.all_variables()) != 0)
        throw DomainError("CMI references unknown variables");
    if (!(table.total() > 0.0))
        throw NumericError("degenerate table: total weight is zero");

    const auto sub = table.marginalize(a | b | c);
    VarSet la = sub.variable_set_from(table, a);
    VarSet lb = sub.variable_set_from(table, b);
    VarSet lc = sub.variable_set_from(table, c);

    const auto map_ac = margin_map(sub.variables(), la | lc);
    const auto map_bc = margin_map(sub.variables(), lb | lc);
    const auto map_c = margin_map(sub.variables(), lc);
    std::vector<double> m_ac(sub.joint_cardinality(la | lc), 0.0);
    std::vector<double> m_bc(sub.joint_cardinality(lb | lc), 0.0);
    std::vector<double> m_c(sub.joint_cardinality(lc), 0.0);
    for (std::size_t i = 0; i < sub.cells().size(); ++i) {
        const double n = sub.cells()[i];
        m_ac[map_ac[i]] += n;
        m_bc[map_bc[i]] += n;
        m_c[map_c[i]] += n;
    }

    double value = 0.0;
    for (std::size_t i = 0; i < sub.cells().size(); ++i) {
        const double n = sub.cells()[i];
        if (n <= 0.0)
            continue;
        value += n * (std::log(n) + std::log(m_c[map_c[i]]) -
                      std::log(m_ac[map_ac[i]]) - std::log(m_bc[map_bc[i]]));
    }
    value *= 2.0;

    const long ca = static_cast<long>(table.joint_cardinality(a));
    const long cb = static_cast<long>(table.joint_cardinality(b));
    const long cc = static_cast<long>(table.joint_cardinality(c));
    return make_info_stat(value, (ca - 1) * (cb - 1) * cc);
}

double empty_slice_fraction(const ContingencyTable& table, VarSet conditioner)
{
    if (conditioner == 0)
        return 0.0;
    const auto slice = table.marginalize(conditioner);
    std::size_t empty = 0;
    for (double v : slice.cells())
        if (v <= 0.0)
            ++empty;
    return static_cast<double>(empty) / static_cast<double>(slice.cells().size());
}

DecompositionReport chain_decompose(const ContingencyTable& table, VarSet target,
                                    const std::vector<VarSet>& predictors, double alpha)
{
    if (target == 0)
        throw DomainError("chain decomposition requires a nonempty target");
    if (predictors.empty())
        throw DomainError("chain decomposition requires at least one predictor group");
    VarSet all = target;
    for (VarSet p : predictors) {
        if (p == 0 || (p & all))
            throw DomainError("predictor groups must be nonempty, pairwise disjoint, "
                              "and disjoint from the target");
        all |= p;
    }

    DecompositionReport report;
    report.alpha = alpha;
    VarSet rest = all & ~target;
    for (const VarSet p : predictors) {
        rest &= ~p;
        DecompTerm term;
        term.lhs = target;
        term.rhs = p;
        term.conditioner = rest;
        term.stat = conditional_mutual_information(table, target, p, rest);
        term.flagged = term.stat.p_value > alpha;
        term.sparse = empty_slice_fraction(table, rest) > 0.5;
        report.terms.push_back(std::move(term));
    }
    report.total = mutual_information(
        table, GroupPartition::of({target, all & ~target}));
    return report;
}

} // namespace catinfo
