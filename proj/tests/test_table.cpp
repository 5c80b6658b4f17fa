#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "table.hpp"
#include "test_util.hpp"

using namespace catinfo;
using test::binary_schema;
using test::random_table;

namespace {

Assignment assign(std::initializer_list<std::pair<const char*, const char*>> pairs)
{
    Assignment a;
    for (const auto& [k, v] : pairs)
        a.emplace_back(k, v);
    return a;
}

} // namespace

TEST_CASE("from_cell_counts builds the diagonal table")
{
    const auto schema = binary_schema({"X", "Y"});
    const auto t = ContingencyTable::from_cell_counts(
        schema, {{assign({{"X", "0"}, {"Y", "0"}}), 5.0},
                 {assign({{"X", "1"}, {"Y", "1"}}), 5.0}});
    CHECK(t.total() == 10.0);
    CHECK(t.cells()[0] == 5.0); // (0,0)
    CHECK(t.cells()[1] == 0.0);
    CHECK(t.cells()[2] == 0.0);
    CHECK(t.cells()[3] == 5.0); // (1,1)
    CHECK(t.observed());
}

TEST_CASE("duplicate cell rows are summed")
{
    const auto schema = binary_schema({"X", "Y"});
    const auto row = assign({{"X", "0"}, {"Y", "0"}});
    const auto t = ContingencyTable::from_cell_counts(schema, {{row, 2.0}, {row, 2.0}});
    CHECK(t.cells()[0] == 4.0);
}

TEST_CASE("out-of-range level is a schema error")
{
    const auto schema = binary_schema({"X", "Y"});
    CHECK_THROWS_AS(ContingencyTable::from_cell_counts(
                        schema, {{assign({{"X", "2"}, {"Y", "0"}}), 1.0}}),
                    SchemaError);
    CHECK_THROWS_AS(ContingencyTable::from_cell_counts(
                        schema, {{assign({{"Q", "0"}, {"Y", "0"}}), 1.0}}),
                    SchemaError);
    CHECK_THROWS_AS(ContingencyTable::from_cell_counts(
                        schema, {{assign({{"X", "0"}, {"Y", "0"}}), -1.0}}),
                    DomainError);
}

TEST_CASE("from_records tallies matching records")
{
    const auto schema = binary_schema({"X", "Y"});
    const auto record = assign({{"X", "1"}, {"Y", "0"}});
    const auto t = ContingencyTable::from_records(schema, {record, record, record, record});
    CHECK(t.total() == 4.0);
    CHECK(t.cells()[2] == 4.0);

    const auto empty = ContingencyTable::from_records(schema, {});
    CHECK(empty.total() == 0.0);
    CHECK(empty.n_cells() == 4);
}

TEST_CASE("1872 synthetic records over 7 binary variables tally correctly")
{
    const auto schema = binary_schema({"C", "M", "G", "S", "D", "H", "A"});
    Rng rng(42);
    std::vector<Assignment> records;
    std::vector<int> direct_tally(128, 0);
    for (int r = 0; r < 1872; ++r) {
        Assignment a;
        std::size_t idx = 0;
        for (const auto& v : schema) {
            const int level = static_cast<int>(rng.below(2));
            a.emplace_back(v.name, v.levels[static_cast<std::size_t>(level)]);
            idx = idx * 2 + static_cast<std::size_t>(level);
        }
        ++direct_tally[idx];
        records.push_back(std::move(a));
    }
    const auto t = ContingencyTable::from_records(schema, records);
    CHECK(t.total() == 1872.0);
    CHECK(t.n_cells() == 128);
    for (std::size_t i = 0; i < 128; ++i)
        CHECK(t.cells()[i] == static_cast<double>(direct_tally[i]));
}

TEST_CASE("marginalize sums out dropped variables")
{
    const auto schema = binary_schema({"X", "Y"});
    const ContingencyTable t(schema, {1, 2, 3, 4}, Provenance::Observed);

    const auto mx = t.marginalize(vs_single(0));
    CHECK(mx.cells()[0] == 3.0);
    CHECK(mx.cells()[1] == 7.0);
    CHECK(mx.total() == t.total());

    const auto all = t.marginalize(t.all_variables());
    CHECK(all.cells() == t.cells());

    CHECK_THROWS_AS(t.marginalize(VarSet{0}), DomainError);
    CHECK_THROWS_AS(t.marginalize(VarSet{1u << 5}), DomainError);
}

TEST_CASE("marginalization commutes and preserves totals")
{
    Rng rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const auto t = random_table(binary_schema({"X", "Y", "Z"}), rng);
        const auto direct = t.marginalize(vs_single(0));
        const auto nested =
            t.marginalize(vs_single(0) | vs_single(1)).marginalize(vs_single(0));
        REQUIRE(direct.n_cells() == nested.n_cells());
        for (std::size_t i = 0; i < direct.n_cells(); ++i)
            CHECK(direct.cells()[i] == nested.cells()[i]); // exact on integer input
        CHECK(direct.total() == t.total());
    }
}

TEST_CASE("compound re-indexes cells bijectively")
{
    Rng rng(11);
    const auto t = random_table(binary_schema({"A", "H", "S"}), rng);
    const auto c = t.compound(vs_single(0) | vs_single(1), "AH");

    CHECK(c.n_variables() == 2);
    CHECK(c.variables()[0].name == "AH");
    CHECK(c.variables()[0].cardinality() == 4); // matches the Int df computation
    CHECK(c.total() == t.total());

    auto sorted_a = t.cells();
    auto sorted_b = c.cells();
    std::sort(sorted_a.begin(), sorted_a.end());
    std::sort(sorted_b.begin(), sorted_b.end());
    CHECK(sorted_a == sorted_b);

    CHECK_THROWS_AS(t.compound(vs_single(0), "solo"), DomainError);
}

TEST_CASE("compound commutes with marginalization to the group")
{
    Rng rng(13);
    for (int rep = 0; rep < 20; ++rep) {
        const auto t = random_table(binary_schema({"X", "Y", "Z"}), rng);
        const VarSet group = vs_single(1) | vs_single(2);
        const auto a = t.compound(group, "YZ").marginalize(std::vector<std::string>{"YZ"});
        const auto b = t.marginalize(group).compound(VarSet{0b11}, "YZ");
        REQUIRE(a.n_cells() == b.n_cells());
        for (std::size_t i = 0; i < a.n_cells(); ++i)
            CHECK(a.cells()[i] == b.cells()[i]);
    }
}

TEST_CASE("to_pdf normalizes and round-trips")
{
    const auto uniform = ContingencyTable(binary_schema({"X", "Y"}), {1, 1, 1, 1},
                                          Provenance::Observed);
    for (double p : uniform.to_pdf().cells)
        CHECK(p == doctest::Approx(0.25).epsilon(1e-14));

    const ContingencyTable counts(
        {VariableSpec{"X", {"0", "1"}}}, {1, 3}, Provenance::Observed);
    const auto pdf = counts.to_pdf();
    CHECK(pdf.cells[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(pdf.cells[1] == doctest::Approx(0.75).epsilon(1e-14));

    Rng rng(17);
    const auto t = random_table(binary_schema({"X", "Y", "Z"}), rng);
    const auto back = t.to_pdf();
    for (std::size_t i = 0; i < t.n_cells(); ++i)
        CHECK(back.cells[i] * t.total() ==
              doctest::Approx(t.cells()[i]).epsilon(1e-12));

    const ContingencyTable zero(binary_schema({"X", "Y"}), {0, 0, 0, 0},
                                Provenance::Observed);
    CHECK_THROWS_AS(zero.to_pdf(), NumericError);
}

TEST_CASE("from_records equals from_cell_counts on the tallied rows")
{
    Rng rng(23);
    const auto schema = binary_schema({"X", "Y", "Z"});
    std::vector<Assignment> records;
    for (int r = 0; r < 200; ++r) {
        Assignment a;
        for (const auto& v : schema)
            a.emplace_back(v.name, v.levels[rng.below(2)]);
        records.push_back(std::move(a));
    }
    const auto direct = ContingencyTable::from_records(schema, records);

    std::vector<std::pair<Assignment, double>> rows;
    std::vector<int> levels(3);
    for (std::size_t i = 0; i < direct.n_cells(); ++i) {
        direct.unravel(i, levels);
        Assignment a;
        for (std::size_t v = 0; v < schema.size(); ++v)
            a.emplace_back(schema[v].name,
                           schema[v].levels[static_cast<std::size_t>(levels[v])]);
        rows.emplace_back(std::move(a), direct.cells()[i]);
    }
    const auto rebuilt = ContingencyTable::from_cell_counts(schema, rows);
    CHECK(rebuilt.cells() == direct.cells());
}

TEST_CASE("schema invariants are enforced")
{
    CHECK_THROWS_AS(validate_schema({VariableSpec{"X", {"0"}}}), SchemaError);
    CHECK_THROWS_AS(validate_schema({VariableSpec{"X", {"0", "0"}}}), SchemaError);
    CHECK_THROWS_AS(
        validate_schema({VariableSpec{"X", {"0", "1"}}, VariableSpec{"X", {"0", "1"}}}),
        SchemaError);
}
