#include <doctest.h>

#include <fstream>
#include <string>

#include "io.hpp"

using namespace catinfo;

namespace {

const char* kSchemaJson = R"({
  "variables": [
    {"name": "S", "levels": ["0", "1"]},
    {"name": "A", "levels": ["0", "1"]},
    {"name": "G", "levels": ["f", "m"]}
  ],
  "binning": [
    {"column": "A", "cutoff": 60, "labels": ["0", "1"]}
  ]
})";

std::string write_temp(const std::string& name, const std::string& content)
{
    const std::string path = std::string(CATINFO_TEST_TMP) + "/" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("schema parsing and validation")
{
    const auto schema = parse_schema_json(kSchemaJson, "inline");
    CHECK(schema.variables.size() == 3);
    CHECK(schema.binning.size() == 1);
    CHECK(schema.rule_for("A") != nullptr);
    CHECK(schema.rule_for("S") == nullptr);

    CHECK_THROWS_AS(parse_schema_json("not json", "inline"), ParseError);
    CHECK_THROWS_AS(parse_schema_json(R"({"variables": []})", "inline"), SchemaError);
    CHECK_THROWS_AS(parse_schema_json(
                        R"({"variables":[{"name":"X","levels":["0","1"]}],
                            "binning":[{"column":"Q","cutoff":1,"labels":["0","1"]}]})",
                        "inline"),
                    SchemaError);
    CHECK_THROWS_AS(parse_schema_json(
                        R"({"variables":[{"name":"X","levels":["0","1"]}],
                            "binning":[{"column":"X","cutoff":1,"labels":["0","9"]}]})",
                        "inline"),
                    SchemaError);
    CHECK_THROWS_AS(load_schema("/nonexistent/schema.json"), IoError);
}

TEST_CASE("records CSV with cutoff binning")
{
    const auto schema = parse_schema_json(kSchemaJson, "inline");
    // raw ages are binned at 60; G uses labels directly
    const auto path = write_temp("records.csv",
                                 "S,A,G\n"
                                 "1,63,m\n"
                                 "0,59.5,f\n"
                                 "0,60,f\n"
                                 "1,45,m\n");
    const auto t = load_table_csv(schema, path, InputKind::Records);
    CHECK(t.total() == 4.0);
    CHECK(t.observed());
    // (S=1,A=1,G=m): age 63 -> bin "1"
    std::vector<int> lv = {1, 1, 1};
    CHECK(t.cells()[t.cell_index(lv)] == 1.0);
    // age 60 falls at the cutoff -> high bin
    lv = {0, 1, 0};
    CHECK(t.cells()[t.cell_index(lv)] == 1.0);
    lv = {0, 0, 0};
    CHECK(t.cells()[t.cell_index(lv)] == 1.0);
}

TEST_CASE("cells CSV with count column")
{
    const auto schema = parse_schema_json(
        R"({"variables":[{"name":"X","levels":["0","1"]},
                         {"name":"Y","levels":["0","1"]}]})",
        "inline");
    const auto path = write_temp("cells.csv",
                                 "X,Y,count\n"
                                 "0,0,5\n"
                                 "1,1,5\n"
                                 "0,0,2\n");
    const auto t = load_table_csv(schema, path, InputKind::Cells);
    CHECK(t.total() == 12.0);
    CHECK(t.cells()[0] == 7.0); // duplicates summed
    CHECK(t.cells()[3] == 5.0);
}

TEST_CASE("CSV errors carry file and line context")
{
    const auto schema = parse_schema_json(
        R"({"variables":[{"name":"X","levels":["0","1"]},
                         {"name":"Y","levels":["0","1"]}]})",
        "inline");

    SUBCASE("unknown level names the row")
    {
        const auto path = write_temp("bad_level.csv", "X,Y,count\n0,0,1\n2,0,1\n");
        CHECK_THROWS_WITH_AS(load_table_csv(schema, path, InputKind::Cells),
                             doctest::Contains(":3:"), SchemaError);
    }
    SUBCASE("negative count")
    {
        const auto path = write_temp("neg.csv", "X,Y,count\n0,0,-1\n");
        CHECK_THROWS_AS(load_table_csv(schema, path, InputKind::Cells), DomainError);
    }
    SUBCASE("field count mismatch")
    {
        const auto path = write_temp("short.csv", "X,Y,count\n0,0\n");
        CHECK_THROWS_WITH_AS(load_table_csv(schema, path, InputKind::Cells),
                             doctest::Contains(":2:"), ParseError);
    }
    SUBCASE("missing variable column")
    {
        const auto path = write_temp("missing.csv", "X,count\n0,1\n");
        CHECK_THROWS_AS(load_table_csv(schema, path, InputKind::Cells), SchemaError);
    }
    SUBCASE("undeclared column")
    {
        const auto path = write_temp("extra.csv", "X,Y,Z,count\n0,0,0,1\n");
        CHECK_THROWS_AS(load_table_csv(schema, path, InputKind::Cells), SchemaError);
    }
    SUBCASE("cells input requires a count column")
    {
        const auto path = write_temp("nocount.csv", "X,Y\n0,0\n");
        CHECK_THROWS_AS(load_table_csv(schema, path, InputKind::Cells), SchemaError);
    }
    SUBCASE("records input treats count as undeclared")
    {
        const auto path = write_temp("reccount.csv", "X,Y,count\n0,0,1\n");
        CHECK_THROWS_AS(load_table_csv(schema, path, InputKind::Records), SchemaError);
    }
    SUBCASE("missing file")
    {
        CHECK_THROWS_AS(load_table_csv(schema, "/nonexistent/file.csv", InputKind::Cells),
                        IoError);
    }
}

TEST_CASE("quoted fields and blank lines are handled")
{
    const auto schema = parse_schema_json(
        R"({"variables":[{"name":"X","levels":["a,b","c"]},
                         {"name":"Y","levels":["0","1"]}]})",
        "inline");
    const auto path = write_temp("quoted.csv",
                                 "X,Y,count\n"
                                 "\"a,b\",0,3\n"
                                 "\n"
                                 "c,1,4\n");
    const auto t = load_table_csv(schema, path, InputKind::Cells);
    CHECK(t.total() == 7.0);
    CHECK(t.cells()[0] == 3.0);
}

TEST_CASE("fractional counts are loaded as fitted provenance")
{
    const auto schema = parse_schema_json(
        R"({"variables":[{"name":"X","levels":["0","1"]},
                         {"name":"Y","levels":["0","1"]}]})",
        "inline");
    const auto path = write_temp("frac.csv", "X,Y,count\n0,0,1.5\n1,1,2\n");
    const auto t = load_table_csv(schema, path, InputKind::Cells);
    CHECK_FALSE(t.observed());
}
