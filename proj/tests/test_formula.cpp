#include <doctest.h>

#include "formula.hpp"
#include "test_util.hpp"

using namespace catinfo;
using test::binary_schema;

namespace {
// The running 7-variable schema: C M G S D H A at indices 0..6.
const std::vector<VariableSpec> kVars =
    binary_schema({"C", "M", "G", "S", "D", "H", "A"});
}

TEST_CASE("formula parsing: concatenated and starred syntax")
{
    const auto f1 = parse_formula("ACS,ADG,GM", kVars);
    CHECK(f1.generators.size() == 3);
    CHECK(formula_text(f1, kVars) == "ACS,ADG,GM");

    const auto f2 = parse_formula(" A*C*S , G*M ", kVars);
    CHECK(f2.generators == parse_formula("ACS,GM", kVars).generators);

    CHECK_THROWS_AS(parse_formula("ACQ", kVars), ParseError);
    CHECK_THROWS_AS(parse_formula("A**C", kVars), ParseError);
    CHECK_THROWS_AS(parse_formula("AC,,S", kVars), ParseError);
    CHECK_THROWS_AS(parse_formula("AAC", kVars), ParseError);
}

TEST_CASE("nested generators are pruned")
{
    const auto f = parse_formula("ACS,AC,S", kVars);
    CHECK(f.generators.size() == 1);
    const auto cl = f.closure();
    CHECK(cl.size() == 7); // 3 singletons + 3 pairs + 1 triple
}

TEST_CASE("closure parameter counts on the seven-variable model family")
{
    struct Case {
        const char* formula;
        std::size_t n_params;
        long df;
    };
    // 7 binary variables, 128 cells.
    const Case cases[] = {
        {"ACS,GMS,ADG,ADHS", 29, 99},
        {"ACS,ADG,GMS,AHS,DHS", 26, 102},
        {"AC,CS,ADG,GMS,AHS,DHS", 25, 103},
        {"ACS,ADG,AHS,DHS,GM,MS", 24, 104},
        {"AC,CS,ADG,GMS,AHS,ADS", 24, 104},  // DHS replaced by ADS: lack of fit
        {"AC,CS,ADG,GM,MS,AHS,DHS", 23, 105} // GMS split too
    };
    for (const auto& c : cases) {
        const auto f = parse_formula(c.formula, kVars);
        CHECK(n_parameters(f, kVars) == c.n_params);
        CHECK(residual_df(f, kVars) == c.df);
    }
}

TEST_CASE("parameter counts with non-binary cardinalities")
{
    const auto vars = test::schema_with_cards({{"X", 3}, {"Y", 2}, {"Z", 4}});
    const auto f = parse_formula("X*Y,Y*Z", vars);
    // 1 + (3-1) + (2-1) + (4-1) + (3-1)(2-1) + (2-1)(4-1)
    CHECK(n_parameters(f, vars) == 1 + 2 + 1 + 3 + 2 + 3);
    CHECK(residual_df(f, vars) == 24 - 12);
}

TEST_CASE("saturated model has zero residual df")
{
    const auto f = parse_formula("CMGSDHA", kVars);
    CHECK(n_parameters(f, kVars) == 128);
    CHECK(residual_df(f, kVars) == 0);
}

TEST_CASE("empty generator set is rejected")
{
    CHECK_THROWS_AS(ModelFormula::from_generators({}), DomainError);
    CHECK_THROWS_AS(ModelFormula::from_generators({0u}), DomainError);
}

TEST_CASE("closure equality identifies the same model")
{
    // AS is in the AHS closure, so adding it as a generator changes nothing
    const auto a = parse_formula("AC,CS,AHS", kVars);
    const auto b = parse_formula("AC,AS,CS,AHS", kVars);
    CHECK(a.same_model_as(b));
    CHECK_FALSE(a.same_model_as(parse_formula("ACS,AHS", kVars)));
}
