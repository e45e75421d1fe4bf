#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "eranet/csv.hpp"
#include "eranet/error.hpp"
#include "eranet/ingest.hpp"

namespace eranet::ingest {
namespace {

namespace fs = std::filesystem;

fs::path write_temp(const std::string& name, const std::string& text) {
  const auto path = fs::path(::testing::TempDir()) / name;
  std::ofstream(path) << text;
  return path;
}

ParsedInputs parse(const std::string& nodes, const std::string& edges) {
  std::istringstream n(nodes), e(edges);
  return parse_tables(csv::read_stream(n, "nodes.csv"), "nodes.csv", csv::read_stream(e, "edges.csv"), "edges.csv");
}

TEST(Csv, QuotedFields) {
  EXPECT_EQ(csv::split_line(R"(a,"b,c","d""e",)", ','),
            (std::vector<std::string>{"a", "b,c", "d\"e", ""}));
  EXPECT_EQ(csv::escape("x,y"), "\"x,y\"");
  EXPECT_EQ(csv::escape("plain"), "plain");
}

TEST(Csv, TabHeaderSelectsTab) {
  std::istringstream in("id\tlabel\nq1\tA, B\n\n");
  const auto t = csv::read_stream(in, "t");
  EXPECT_EQ(t.delimiter, '\t');
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].fields[1], "A, B");
}

TEST(ParseInputs, NodeRowMapsFields) {
  const auto p = parse("id,label,birth,death\nq1,Aristotle,-384,-322\n", "source,target\n");
  ASSERT_EQ(p.actors.size(), 1u);
  EXPECT_EQ(p.actors[0], (RawActorRecord{"q1", "Aristotle", -384, -322}));
}

TEST(ParseInputs, DuplicateEdgesCounted) {
  const auto p = parse("id,label,birth,death\nq1,A,1,50\nq2,B,2,60\n", "source,target\nq1,q2\nq1,q2\n");
  EXPECT_EQ(p.edges.size(), 1u);
  EXPECT_EQ(p.duplicate_edges, 1u);
}

TEST(ParseInputs, MissingBirthIsAbsent) {
  const auto p = parse("id,label,birth,death\nq3,X,,1700\n", "source,target\n");
  ASSERT_EQ(p.actors.size(), 1u);
  EXPECT_FALSE(p.actors[0].birth.has_value());
  EXPECT_EQ(p.actors[0].death, 1700);
}

TEST(ParseInputs, BadRowsRejected) {
  const auto p = parse("id,label,birth,death\n,X,1,2\nq1,A,abc,5\nq2,B,1,9\nq2,B,1,9\n",
                       "source,target\nq2,q2\nq2,\n");
  EXPECT_EQ(p.actors.size(), 1u);
  EXPECT_EQ(p.rejects.size(), 5u);
  EXPECT_TRUE(p.edges.empty());
}

TEST(ParseInputs, MissingColumnIsParseError) {
  try {
    (void)parse("id,name\n", "source,target\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
  }
}

TEST(ParseYear, IsoDatesAndSigns) {
  EXPECT_EQ(parse_year("-0384-01-01"), -384);
  EXPECT_EQ(parse_year("1724-04-22"), 1724);
  EXPECT_EQ(parse_year("-50"), -50);
  EXPECT_FALSE(parse_year("").has_value());
  EXPECT_FALSE(parse_year("circa").has_value());
}

TEST(Impute, MissingBirthSubtractsSpan) {
  const auto s = std::get<Scholar>(impute_dates({"x", "X", std::nullopt, 1500}));
  EXPECT_EQ(s.birth, 1440);
  EXPECT_TRUE(s.birth_imputed);
  EXPECT_FALSE(s.death_imputed);
}

TEST(Impute, MissingDeathCappedAtHorizon) {
  const auto s = std::get<Scholar>(impute_dates({"x", "X", 1990, std::nullopt}, {60, 2020}));
  EXPECT_EQ(s.death, 2020);
  EXPECT_TRUE(s.death_imputed);
  EXPECT_EQ(std::get<Scholar>(impute_dates({"y", "Y", 1700, std::nullopt})).death, 1760);
}

TEST(Impute, BothMissingUnresolved) {
  EXPECT_TRUE(std::holds_alternative<UnresolvedActor>(impute_dates({"z", "Z", std::nullopt, std::nullopt})));
}

TEST(Impute, ProvidedValuesPreserved) {
  const auto s = std::get<Scholar>(impute_dates({"p", "P", -384, -322}));
  EXPECT_EQ(s.birth, -384);
  EXPECT_EQ(s.death, -322);
  EXPECT_FALSE(s.birth_imputed || s.death_imputed);
}

TEST(Filters, RemovesConceptsAndLegends) {
  FilterRules rules{{{"German_philosophy", FilterReason::Concept}, {"Gilg*", FilterReason::Legendary}}};
  std::vector<RawActorRecord> records{{"German_philosophy", "", 1, 2}, {"Gilgamesh", "", 1, 2}, {"Kant", "", 1724, 1804}};
  auto result = apply_filters(records, {{"Kant", "German_philosophy"}, {"Gilgamesh", "Kant"}}, rules);
  ASSERT_EQ(result.records.size(), 1u);
  EXPECT_EQ(result.records[0].id, "Kant");
  ASSERT_EQ(result.removals.size(), 2u);
  EXPECT_EQ(result.removals[0].reason, FilterReason::Concept);
  EXPECT_EQ(result.removals[1].reason, FilterReason::Legendary);
  EXPECT_EQ(result.dropped_edges, 2u);
}

TEST(Filters, EmptyRulesAreIdentity) {
  std::vector<RawActorRecord> records{{"a", "A", 1, 2}, {"b", "B", 3, 4}};
  auto result = apply_filters(records, {{"a", "b"}}, {});
  EXPECT_EQ(result.records, records);
  EXPECT_EQ(result.edges.size(), 1u);
  EXPECT_TRUE(result.removals.empty());
}

TEST(Filters, LoadFromFile) {
  const auto path = write_temp("filters.csv", "# comment\nGerman_philosophy,concept\nThe_*,band\n");
  const auto rules = FilterRules::load(path);
  ASSERT_EQ(rules.rules.size(), 2u);
  ASSERT_NE(rules.match("The_Beatles"), nullptr);
  EXPECT_EQ(rules.match("The_Beatles")->reason, FilterReason::Band);
  EXPECT_EQ(rules.match("Kant"), nullptr);
}

TEST(Corrections, DatesAndFlips) {
  const auto path = write_temp("corrections.csv", "Plato,birth,-428\nflip,Kant,Hume\nGhost,death,5\n");
  std::vector<RawActorRecord> records{{"Plato", "Plato", 428, -348}};
  std::vector<InfluenceEdge> edges{{"Kant", "Hume"}};
  const auto report = apply_corrections(records, edges, Corrections::load(path));
  EXPECT_EQ(records[0].birth, -428);
  EXPECT_EQ(edges[0], (InfluenceEdge{"Hume", "Kant"}));
  EXPECT_EQ(report.applied, 2u);
  EXPECT_EQ(report.unmatched.size(), 1u);
}

TEST(ParseInputs, ReadsFiles) {
  const auto n = write_temp("n.csv", "\xEF\xBB\xBFid,label,birth,death\nq1,A,1,50\nq2,B,20,90\n");
  const auto e = write_temp("e.csv", "source,target\nq1,q2\n");
  const auto p = parse_inputs(n, e);
  EXPECT_EQ(p.actors.size(), 2u);
  EXPECT_EQ(p.edges.size(), 1u);
  EXPECT_THROW((void)parse_inputs(n, fs::path(::testing::TempDir()) / "missing.csv"), Error);
}

}  // namespace
}  // namespace eranet::ingest
