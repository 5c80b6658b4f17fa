#include <doctest.h>

#include <cmath>

#include "selection.hpp"
#include "test_util.hpp"

using namespace catinfo;
using test::binary_schema;
using test::loglinear_probs;
using test::random_table;
using test::sample_from_probs;

namespace {

// Exact factorized table: p(f,u,w) = p(f,u) p(w|u), so F and W are
// conditionally independent given U.
ContingencyTable chain_table()
{
    const double p_fu[2][2] = {{0.35, 0.15}, {0.1, 0.4}};
    const double p_w_u[2][2] = {{0.8, 0.2}, {0.25, 0.75}};
    std::vector<double> cells(8, 0.0);
    for (int f = 0; f < 2; ++f)
        for (int u = 0; u < 2; ++u)
            for (int w = 0; w < 2; ++w)
                cells[static_cast<std::size_t>(4 * f + 2 * u + w)] =
                    2000.0 * p_fu[f][u] * p_w_u[u][w];
    return ContingencyTable(binary_schema({"F", "U", "W"}), cells, Provenance::Fitted);
}

} // namespace

TEST_CASE("peel removes the conditionally independent variable first")
{
    const auto t = chain_table();
    const auto rep = peel_decompose(t, 1u /*F*/, 2u | 4u /*U,W*/, 0.05);
    REQUIRE(rep.terms.size() == 2);
    CHECK(rep.terms[0].rhs == 4u); // W peels first
    CHECK(rep.terms[0].stat.p_value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.terms[0].flagged);
    CHECK_FALSE(rep.terms[1].flagged); // I(F;U) is strong

    double sum = 0.0;
    for (const auto& term : rep.terms)
        sum += term.stat.value;
    CHECK(sum == doctest::Approx(rep.total.value).epsilon(1e-8));
}

TEST_CASE("explicit chain order reproduces the greedy peel")
{
    const auto t = chain_table();
    const auto greedy = peel_decompose(t, 1u, 2u | 4u, 0.05);
    // greedy peels W first, so the equivalent explicit order is [W, U]
    const auto chain = chain_decompose(t, 1u, {4u, 2u}, 0.05);
    REQUIRE(greedy.terms.size() == chain.terms.size());
    for (std::size_t i = 0; i < greedy.terms.size(); ++i) {
        CHECK(greedy.terms[i].rhs == chain.terms[i].rhs);
        CHECK(greedy.terms[i].stat.value == chain.terms[i].stat.value);
        CHECK(greedy.terms[i].stat.df == chain.terms[i].stat.df);
    }
}

TEST_CASE("peel with a single conditioner is the plain MI")
{
    Rng rng(109);
    const auto t = random_table(binary_schema({"F", "U"}), rng);
    const auto rep = peel_decompose(t, 1u, 2u, 0.05);
    REQUIRE(rep.terms.size() == 1);
    CHECK(rep.terms[0].conditioner == 0);
    CHECK(rep.terms[0].stat.value == doctest::Approx(rep.total.value).epsilon(1e-12));
}

TEST_CASE("peel df sequence for a binary focus against 5 binary conditioners")
{
    Rng rng(113);
    const auto t = random_table(binary_schema({"S", "V", "W", "X", "Y", "Z"}), rng, 0, 4);
    const auto rep = peel_decompose(t, 1u, 2u | 4u | 8u | 16u | 32u, 0.05);
    std::vector<long> dfs;
    for (const auto& term : rep.terms)
        dfs.push_back(term.stat.df);
    CHECK(dfs == std::vector<long>{16, 8, 4, 2, 1});
}

TEST_CASE("dispensability ranking")
{
    SUBCASE("variable depending only on one other rank first")
    {
        // p(x,y,z) strongly associated clique; C depends only on X.
        std::vector<double> clique = loglinear_probs(
            binary_schema({"X", "Y", "Z"}),
            {{1u, 0.2}, {2u, -0.1}, {4u, 0.1}, {3u, 1.2}, {6u, 1.0}, {5u, 0.9}});
        const double p_c_x[2][2] = {{0.8, 0.2}, {0.3, 0.7}};
        std::vector<double> cells(16, 0.0);
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
                for (int z = 0; z < 2; ++z)
                    for (int c = 0; c < 2; ++c)
                        cells[static_cast<std::size_t>(8 * x + 4 * y + 2 * z + c)] =
                            5000.0 *
                            clique[static_cast<std::size_t>(4 * x + 2 * y + z)] *
                            p_c_x[x][c];
        const ContingencyTable t(binary_schema({"X", "Y", "Z", "C"}), cells,
                                 Provenance::Fitted);
        const auto ranked = rank_dispensability(t, t.all_variables(), 0.05);
        CHECK(ranked.front().variable == 3); // C
        CHECK(ranked.front().leading_insignificant == 2);
    }

    SUBCASE("exact independence ties break by declaration order")
    {
        std::vector<double> cells(8, 125.0);
        const ContingencyTable t(binary_schema({"X", "Y", "Z"}), cells,
                                 Provenance::Observed);
        const auto ranked = rank_dispensability(t, t.all_variables(), 0.05);
        CHECK(ranked[0].variable == 0);
        CHECK(ranked[1].variable == 1);
        CHECK(ranked[2].variable == 2);
        for (const auto& s : ranked)
            CHECK(s.leading_insignificant == 2);
    }

    SUBCASE("independent variable ranks before a dependent clique")
    {
        Rng rng(127);
        // 4-clique with all pairwise effects; E independent.
        std::vector<std::pair<VarSet, double>> effects;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j)
                effects.emplace_back(vs_single(i) | vs_single(j), 0.9);
        auto probs = loglinear_probs(binary_schema({"A", "B", "C", "D"}), effects);
        std::vector<double> cells(32, 0.0);
        for (std::size_t i = 0; i < 16; ++i)
            for (int e = 0; e < 2; ++e)
                cells[2 * i + static_cast<std::size_t>(e)] = 8000.0 * probs[i] * 0.5;
        const ContingencyTable t(binary_schema({"A", "B", "C", "D", "E"}), cells,
                                 Provenance::Fitted);
        const auto ranked = rank_dispensability(t, t.all_variables(), 0.05);
        CHECK(ranked.front().variable == 4); // E
    }
}

TEST_CASE("backward selection on exact independence retains nothing")
{
    std::vector<double> cells(16, 100.0);
    const ContingencyTable t(binary_schema({"W", "X", "Y", "Z"}), cells,
                             Provenance::Observed);
    const auto model = backward_select(t, 0.05, 0.05);
    CHECK(model.retained.empty());
    CHECK(model.deleted.size() == 3 + 2 + 1);
    CHECK(std::fabs(model.total.value) <= 1e-9);
}

TEST_CASE("backward selection accounting: retained + deleted = total MI")
{
    Rng rng(131);
    for (int rep = 0; rep < 10; ++rep) {
        const auto t = random_table(binary_schema({"W", "X", "Y", "Z"}), rng);
        const auto model = backward_select(t, 0.05, 0.05);
        double sum = 0.0;
        long df_sum = 0;
        for (const auto& term : model.retained) {
            sum += term.stat.value;
            df_sum += term.stat.df;
        }
        for (const auto& term : model.deleted) {
            sum += term.stat.value;
            df_sum += term.stat.df;
        }
        CHECK(sum == doctest::Approx(model.total.value).epsilon(1e-8));
        CHECK(df_sum == model.total.df);
    }
}

TEST_CASE("backward selection flags a planted pure three-way interaction")
{
    Rng rng(137);
    const auto probs =
        loglinear_probs(binary_schema({"X", "Y", "Z"}), {{7u, 2.0}});
    const auto t = sample_from_probs(binary_schema({"X", "Y", "Z"}), probs, 4000, rng);
    const auto model = backward_select(t, 0.05, 0.05);
    bool found = false;
    for (const auto& term : model.retained) {
        if (term.two_step && term.two_step->interaction_significant &&
            (vs_single(term.lhs) | vs_single(term.rhs) | term.conditioner) == 7u)
            found = true;
    }
    CHECK(found);
}

TEST_CASE("backward selection is deterministic")
{
    Rng rng(139);
    const auto t = random_table(binary_schema({"W", "X", "Y", "Z"}), rng);
    const auto a = backward_select(t, 0.05, 0.05);
    const auto b = backward_select(t, 0.05, 0.05);
    CHECK(a.peel_order == b.peel_order);
    REQUIRE(a.retained.size() == b.retained.size());
    for (std::size_t i = 0; i < a.retained.size(); ++i) {
        CHECK(a.retained[i].lhs == b.retained[i].lhs);
        CHECK(a.retained[i].rhs == b.retained[i].rhs);
        CHECK(a.retained[i].stat.value == b.retained[i].stat.value);
    }
}

TEST_CASE("candidates: a single retained pair maps to the two-way model")
{
    Rng rng(149);
    const auto t = random_table(binary_schema({"X", "Y", "Z"}), rng);

    InformationModel im;
    SelectionTerm term;
    term.lhs = 0;
    term.rhs = 1;
    term.conditioner = 4u;
    term.stat = conditional_mutual_information(t, 1u, 2u, 4u);
    TwoStepResult ts = two_step_test(t, 1u, 2u, 4u, 1e-12, 0.05);
    ts.interaction_significant = false; // force the homogeneous mapping
    term.two_step = ts;
    im.retained.push_back(term);
    im.total = mutual_information(t, GroupPartition::of({1u, 2u, 4u}));

    const auto candidates = terms_to_candidates(im, t, {});
    REQUIRE(candidates.size() == 1);
    CHECK(formula_text(candidates[0].formula, t.variables()) == "XY,Z");
}

TEST_CASE("candidates: dropping a needed three-way flags lack of fit")
{
    Rng rng(151);
    const auto probs = loglinear_probs(binary_schema({"X", "Y", "Z"}),
                                       {{3u, 0.5}, {7u, 1.8}});
    const auto t = sample_from_probs(binary_schema({"X", "Y", "Z"}), probs, 6000, rng);

    InformationModel im;
    SelectionTerm term;
    term.lhs = 0;
    term.rhs = 1;
    term.conditioner = 4u;
    term.stat = conditional_mutual_information(t, 1u, 2u, 4u);
    term.two_step = two_step_test(t, 1u, 2u, 4u, 0.05, 0.05);
    REQUIRE(term.two_step->interaction_significant);
    im.retained.push_back(term);
    im.total = mutual_information(t, GroupPartition::of({1u, 2u, 4u}));

    const auto candidates = terms_to_candidates(im, t, {});
    REQUIRE(candidates.size() >= 2);
    bool saw_saturated = false, saw_two_way_reject = false;
    for (const auto& c : candidates) {
        const auto text = formula_text(c.formula, t.variables());
        if (text == "XYZ") {
            CHECK(c.acceptable);
            saw_saturated = true;
        }
        if (c.formula.generators.size() >= 2 && !c.acceptable)
            saw_two_way_reject = true;
    }
    CHECK(saw_saturated);
    CHECK(saw_two_way_reject);
}

TEST_CASE("candidates: pairwise-only data collapses to the two-way model")
{
    Rng rng(157);
    const auto vars = binary_schema({"X", "Y", "Z"});
    const auto probs = loglinear_probs(
        vars, {{1u, 0.1}, {3u, 1.1}, {6u, 1.0}});
    const auto t = sample_from_probs(vars, probs, 6000, rng);
    const auto model = backward_select(t, 0.01, 0.01);
    CandidateOptions opts;
    opts.alpha_fit = 0.05;
    const auto candidates = terms_to_candidates(model, t, opts);
    REQUIRE(!candidates.empty());
    // the best acceptable candidate covers XY and YZ but not the 3-way
    const auto& best = candidates.front();
    CHECK(best.acceptable);
    const auto cl = best.formula.closure();
    CHECK(std::find(cl.begin(), cl.end(), 3u) != cl.end());
    CHECK(std::find(cl.begin(), cl.end(), 6u) != cl.end());
    CHECK(std::find(cl.begin(), cl.end(), 7u) == cl.end());
}
