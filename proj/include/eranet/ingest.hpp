#pragma once

// Input parsing, date imputation, entity filtering and upstream corrections.

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "eranet/csv.hpp"
#include "eranet/model.hpp"

namespace eranet::ingest {

struct RawActorRecord {
  std::string id;
  std::string label;
  std::optional<Year> birth;
  std::optional<Year> death;

  bool operator==(const RawActorRecord&) const = default;
};

/// A row that could not be turned into a record.
struct Reject {
  std::string source;  // file name or endpoint
  std::size_t line = 0;
  std::string reason;
};

struct ParsedInputs {
  std::vector<RawActorRecord> actors;
  std::vector<InfluenceEdge> edges;
  std::vector<Reject> rejects;
  std::size_t duplicate_edges = 0;
};

/// Node file columns `id,label,birth,death`; edge file columns `source,target`.
/// Throws Error(Parse) for unreadable files or missing header columns.
ParsedInputs parse_inputs(const std::filesystem::path& node_file,
                          const std::filesystem::path& edge_file);
ParsedInputs parse_tables(const csv::Table& nodes, std::string_view node_name,
                          const csv::Table& edges, std::string_view edge_name);

/// Parses a signed year; accepts plain integers and ISO dates ("-0384-01-01").
std::optional<Year> parse_year(std::string_view text);

struct ImputationConfig {
  Year span = 60;
  Year horizon = kDefaultHorizon;
};

/// Actor with neither date; needs manual completion.
struct UnresolvedActor {
  std::string id;
  std::string label;

  bool operator==(const UnresolvedActor&) const = default;
};

using Imputed = std::variant<Scholar, UnresolvedActor>;

/// Missing birth := death - span; missing death := min(birth + span, horizon).
/// Provided values pass through unchanged.
Imputed impute_dates(const RawActorRecord& record, const ImputationConfig& config = {});

enum class FilterReason { Concept, Legendary, Band, Other };

const char* to_string(FilterReason reason) noexcept;
FilterReason parse_filter_reason(std::string_view text);

struct FilterRule {
  std::string pattern;  // exact id or shell glob
  FilterReason reason = FilterReason::Other;
};

struct FilterRules {
  std::vector<FilterRule> rules;

  /// Lines `<id-or-glob>,<reason>`; `#` starts a comment line.
  static FilterRules load(const std::filesystem::path& path);
  const FilterRule* match(std::string_view id) const;
};

struct Removal {
  std::string id;
  FilterReason reason = FilterReason::Other;
  std::string pattern;
};

struct FilterResult {
  std::vector<RawActorRecord> records;
  std::vector<InfluenceEdge> edges;
  std::vector<Removal> removals;
  std::size_t dropped_edges = 0;
};

/// Removes matching records and every edge incident to a removed id.
FilterResult apply_filters(std::vector<RawActorRecord> records, std::vector<InfluenceEdge> edges,
                           const FilterRules& rules);

enum class DateField { Birth, Death };

struct DateCorrection {
  std::string id;
  DateField field = DateField::Birth;
  Year year = 0;
};

struct EdgeFlip {
  std::string source;
  std::string target;
};

/// Upstream data fixes: wrong calendars, missing BC signs, inverted edges.
struct Corrections {
  std::vector<DateCorrection> dates;
  std::vector<EdgeFlip> flips;

  /// Lines `<id>,birth|death,<year>` or `flip,<source>,<target>`.
  static Corrections load(const std::filesystem::path& path);
};

struct CorrectionReport {
  std::size_t applied = 0;
  std::vector<std::string> unmatched;
};

CorrectionReport apply_corrections(std::vector<RawActorRecord>& records,
                                   std::vector<InfluenceEdge>& edges,
                                   const Corrections& corrections);

}  // namespace eranet::ingest
