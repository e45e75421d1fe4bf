#include "eranet/ingest.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eranet/error.hpp"

namespace eranet::ingest {

std::optional<Year> parse_year(std::string_view text) {
  if (text.empty()) return std::nullopt;
  const bool negative = text.front() == '-';
  if (negative || text.front() == '+') text.remove_prefix(1);
  auto digits_end = std::find_if(text.begin(), text.end(), [](char c) { return c < '0' || c > '9'; });
  const auto digits = static_cast<std::size_t>(digits_end - text.begin());
  if (digits == 0) return std::nullopt;
  // Anything after the digits must be the rest of an ISO date.
  if (digits < text.size() && text[digits] != '-') return std::nullopt;
  Year value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + digits, value);
  if (ec != std::errc{}) return std::nullopt;
  return negative ? -value : value;
}

namespace {

int require_column(const csv::Table& table, std::string_view name, std::string_view file) {
  int col = table.column(name);
  if (col < 0) {
    throw Error(ErrorKind::Parse, fmt::format("{}: missing header column '{}'", file, name));
  }
  return col;
}

const std::string& field(const csv::Row& row, int col) {
  static const std::string empty;
  return static_cast<std::size_t>(col) < row.fields.size() ? row.fields[col] : empty;
}

}  // namespace

ParsedInputs parse_tables(const csv::Table& nodes, std::string_view node_name,
                          const csv::Table& edges, std::string_view edge_name) {
  ParsedInputs out;
  const int id_col = require_column(nodes, "id", node_name);
  const int label_col = require_column(nodes, "label", node_name);
  const int birth_col = require_column(nodes, "birth", node_name);
  const int death_col = require_column(nodes, "death", node_name);
  const int source_col = require_column(edges, "source", edge_name);
  const int target_col = require_column(edges, "target", edge_name);

  std::unordered_set<std::string> seen_ids;
  for (const auto& row : nodes.rows) {
    auto reject = [&](std::string reason) {
      out.rejects.push_back({std::string(node_name), row.line, std::move(reason)});
    };
    if (row.fields.size() < nodes.header.size()) {
      reject(fmt::format("expected {} fields, got {}", nodes.header.size(), row.fields.size()));
      continue;
    }
    RawActorRecord rec{field(row, id_col), field(row, label_col), std::nullopt, std::nullopt};
    if (rec.id.empty()) {
      reject("empty id");
      continue;
    }
    bool bad_year = false;
    for (auto [col, slot] : {std::pair{birth_col, &rec.birth}, std::pair{death_col, &rec.death}}) {
      const auto& text = field(row, col);
      if (text.empty()) continue;
      *slot = parse_year(text);
      if (!*slot) {
        reject(fmt::format("bad year '{}'", text));
        bad_year = true;
        break;
      }
    }
    if (bad_year) continue;
    if (!seen_ids.insert(rec.id).second) {
      reject(fmt::format("duplicate id '{}'", rec.id));
      continue;
    }
    out.actors.push_back(std::move(rec));
  }

  std::set<std::pair<std::string, std::string>> seen_edges;
  for (const auto& row : edges.rows) {
    auto reject = [&](std::string reason) {
      out.rejects.push_back({std::string(edge_name), row.line, std::move(reason)});
    };
    if (row.fields.size() < edges.header.size()) {
      reject(fmt::format("expected {} fields, got {}", edges.header.size(), row.fields.size()));
      continue;
    }
    InfluenceEdge e{field(row, source_col), field(row, target_col)};
    if (e.source.empty() || e.target.empty()) {
      reject("empty endpoint");
      continue;
    }
    if (e.source == e.target) {
      reject(fmt::format("self-loop at {}", e.source));
      continue;
    }
    if (!seen_edges.emplace(e.source, e.target).second) {
      ++out.duplicate_edges;
      continue;
    }
    out.edges.push_back(std::move(e));
  }
  if (out.duplicate_edges > 0) {
    spdlog::warn("{}: merged {} duplicate edge row(s)", edge_name, out.duplicate_edges);
  }
  return out;
}

ParsedInputs parse_inputs(const std::filesystem::path& node_file,
                          const std::filesystem::path& edge_file) {
  auto nodes = csv::read_file(node_file);
  auto edges = csv::read_file(edge_file);
  return parse_tables(nodes, node_file.filename().string(), edges,
                      edge_file.filename().string());
}

Imputed impute_dates(const RawActorRecord& record, const ImputationConfig& config) {
  if (!record.birth && !record.death) return UnresolvedActor{record.id, record.label};
  Scholar s{record.id, record.label, 0, 0, false, false, std::nullopt};
  if (record.birth) {
    s.birth = *record.birth;
  } else {
    s.birth = *record.death - config.span;
    s.birth_imputed = true;
  }
  if (record.death) {
    s.death = *record.death;
  } else {
    s.death = std::min(*record.birth + config.span, config.horizon);
    s.death_imputed = true;
  }
  return s;
}

const char* to_string(FilterReason reason) noexcept {
  switch (reason) {
    case FilterReason::Concept: return "concept";
    case FilterReason::Legendary: return "legendary";
    case FilterReason::Band: return "band";
    case FilterReason::Other: return "other";
  }
  return "other";
}

FilterReason parse_filter_reason(std::string_view text) {
  if (text == "concept") return FilterReason::Concept;
  if (text == "legendary") return FilterReason::Legendary;
  if (text == "band") return FilterReason::Band;
  if (text == "other" || text.empty()) return FilterReason::Other;
  throw Error(ErrorKind::Config, fmt::format("unknown filter reason '{}'", text));
}

namespace {

std::vector<std::pair<std::size_t, std::vector<std::string>>> read_rule_lines(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, fmt::format("cannot read {}", path.string()));
  std::vector<std::pair<std::size_t, std::vector<std::string>>> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto fields = csv::split_line(line, ',');
    for (auto& f : fields) {
      const auto b = f.find_first_not_of(" \t");
      const auto e = f.find_last_not_of(" \t");
      f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
    }
    lines.emplace_back(line_no, std::move(fields));
  }
  return lines;
}

}  // namespace

FilterRules FilterRules::load(const std::filesystem::path& path) {
  FilterRules rules;
  for (auto& [line_no, fields] : read_rule_lines(path)) {
    if (fields.empty() || fields[0].empty() || fields.size() > 2) {
      throw Error(ErrorKind::Config, fmt::format("{}:{}: expected <id-or-glob>,<reason>",
                                                 path.string(), line_no));
    }
    rules.rules.push_back(
        {fields[0], parse_filter_reason(fields.size() > 1 ? fields[1] : std::string{})});
  }
  return rules;
}

const FilterRule* FilterRules::match(std::string_view id) const {
  const std::string key(id);
  for (const auto& rule : rules) {
    if (rule.pattern == key || fnmatch(rule.pattern.c_str(), key.c_str(), 0) == 0) return &rule;
  }
  return nullptr;
}

FilterResult apply_filters(std::vector<RawActorRecord> records, std::vector<InfluenceEdge> edges,
                           const FilterRules& rules) {
  FilterResult out;
  std::unordered_set<std::string> removed;
  for (auto& rec : records) {
    if (const auto* rule = rules.match(rec.id)) {
      out.removals.push_back({rec.id, rule->reason, rule->pattern});
      removed.insert(rec.id);
    } else {
      out.records.push_back(std::move(rec));
    }
  }
  for (auto& e : edges) {
    if (removed.contains(e.source) || removed.contains(e.target)) {
      ++out.dropped_edges;
    } else {
      out.edges.push_back(std::move(e));
    }
  }
  return out;
}

Corrections Corrections::load(const std::filesystem::path& path) {
  Corrections c;
  for (auto& [line_no, fields] : read_rule_lines(path)) {
    auto bad = [&, ln = line_no] {
      return Error(ErrorKind::Config, fmt::format("{}:{}: expected <id>,birth|death,<year> or "
                                                  "flip,<source>,<target>",
                                                  path.string(), ln));
    };
    if (fields.size() != 3) throw bad();
    if (fields[0] == "flip") {
      c.flips.push_back({fields[1], fields[2]});
      continue;
    }
    DateField which;
    if (fields[1] == "birth") {
      which = DateField::Birth;
    } else if (fields[1] == "death") {
      which = DateField::Death;
    } else {
      throw bad();
    }
    auto year = parse_year(fields[2]);
    if (!year) throw bad();
    c.dates.push_back({fields[0], which, *year});
  }
  return c;
}

CorrectionReport apply_corrections(std::vector<RawActorRecord>& records,
                                   std::vector<InfluenceEdge>& edges,
                                   const Corrections& corrections) {
  CorrectionReport report;
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < records.size(); ++i) by_id.emplace(records[i].id, i);
  for (const auto& fix : corrections.dates) {
    auto it = by_id.find(fix.id);
    if (it == by_id.end()) {
      report.unmatched.push_back(fix.id);
      continue;
    }
    auto& rec = records[it->second];
    (fix.field == DateField::Birth ? rec.birth : rec.death) = fix.year;
    ++report.applied;
  }
  for (const auto& flip : corrections.flips) {
    auto it = std::find_if(edges.begin(), edges.end(), [&](const InfluenceEdge& e) {
      return e.source == flip.source && e.target == flip.target;
    });
    if (it == edges.end()) {
      report.unmatched.push_back(fmt::format("{}->{}", flip.source, flip.target));
      continue;
    }
    std::swap(it->source, it->target);
    ++report.applied;
  }
  // A flip may recreate an edge that already existed in the other direction.
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return report;
}

}  // namespace eranet::ingest
