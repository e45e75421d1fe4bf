#include "eranet/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "eranet/error.hpp"

namespace eranet {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Data: return "data";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Invariant: return "invariant";
    case ErrorKind::Fetch: return "fetch";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// EraScheme

EraScheme::EraScheme(std::vector<Era> eras) : eras_(std::move(eras)) {
  if (eras_.size() < 2) {
    throw Error(ErrorKind::Config, "era scheme needs at least 2 eras");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < eras_.size(); ++i) {
    if (eras_[i].name.empty()) {
      throw Error(ErrorKind::Config, fmt::format("era {} has an empty name", i));
    }
    if (!names.insert(eras_[i].name).second) {
      throw Error(ErrorKind::Config, fmt::format("duplicate era name '{}'", eras_[i].name));
    }
    if (i > 0 && eras_[i].upper_bound <= eras_[i - 1].upper_bound) {
      throw Error(ErrorKind::Config,
                  fmt::format("era '{}' upper bound {} does not exceed {}", eras_[i].name,
                              eras_[i].upper_bound, eras_[i - 1].upper_bound));
    }
  }
}

EraScheme EraScheme::standard() {
  return EraScheme({{"Antiquity", 600},
                    {"MiddleAges", 1350},
                    {"EarlyModern", 1760},
                    {"Transition", 1870},
                    {"ModernAge", 1945},
                    {"Contemporary", 2020}});
}

EraScheme EraScheme::from_json(const nlohmann::json& doc) {
  const nlohmann::json& list = doc.is_object() && doc.contains("eras") ? doc.at("eras") : doc;
  if (!list.is_array()) {
    throw Error(ErrorKind::Config, "era scheme must be a list of {name, upper_bound_year}");
  }
  std::vector<Era> eras;
  try {
    for (const auto& item : list) {
      eras.push_back({item.at("name").get<std::string>(), item.at("upper_bound_year").get<Year>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, fmt::format("bad era entry: {}", e.what()));
  }
  return EraScheme(std::move(eras));
}

EraScheme EraScheme::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Config, fmt::format("cannot read era scheme {}", path.string()));
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, fmt::format("{}: {}", path.string(), e.what()));
  }
  return from_json(doc);
}

nlohmann::json EraScheme::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& era : eras_) {
    list.push_back({{"name", era.name}, {"upper_bound_year", era.upper_bound}});
  }
  return list;
}

const Era& EraScheme::at(EraIndex era) const {
  if (era < 0 || era >= size()) {
    throw Error(ErrorKind::OutOfRange, fmt::format("era index {} outside [0, {})", era, size()));
  }
  return eras_[static_cast<std::size_t>(era)];
}

std::optional<Year> EraScheme::lower_bound(EraIndex era) const {
  at(era);
  if (era == 0) return std::nullopt;
  return eras_[static_cast<std::size_t>(era) - 1].upper_bound;
}

EraIndex EraScheme::era_of_year(Year year) const {
  auto it = std::lower_bound(eras_.begin(), eras_.end(), year,
                             [](const Era& era, Year y) { return era.upper_bound < y; });
  if (it == eras_.end()) {
    throw Error(ErrorKind::OutOfRange,
                fmt::format("year {} is past the last era bound {}", year, last_year()));
  }
  return static_cast<EraIndex>(it - eras_.begin());
}

std::optional<EraIndex> EraScheme::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < eras_.size(); ++i) {
    if (eras_[i].name == name) return static_cast<EraIndex>(i);
  }
  return std::nullopt;
}

Year EraScheme::distance_to_era(Year year, EraIndex era) const {
  const Year hi = upper_bound(era);
  if (year > hi) return year - hi;
  if (auto lo = lower_bound(era); lo && year <= *lo) return *lo + 1 - year;
  return 0;
}

// ---------------------------------------------------------------------------
// InfluenceNetwork

InfluenceNetwork::InfluenceNetwork(EraScheme scheme, std::vector<Scholar> scholars,
                                   std::vector<InfluenceEdge> edges)
    : scheme_(std::move(scheme)), scholars_(std::move(scholars)) {
  std::stable_sort(scholars_.begin(), scholars_.end(),
                   [](const Scholar& a, const Scholar& b) { return a.id < b.id; });
  auto dup = std::adjacent_find(scholars_.begin(), scholars_.end(),
                                [](const Scholar& a, const Scholar& b) { return a.id == b.id; });
  while (dup != scholars_.end()) {
    duplicate_ids_.push_back(dup->id);
    auto last = std::find_if(dup, scholars_.end(),
                             [&](const Scholar& s) { return s.id != dup->id; });
    // keep the first occurrence
    scholars_.erase(dup + 1, last);
    dup = std::adjacent_find(dup + 1, scholars_.end(),
                             [](const Scholar& a, const Scholar& b) { return a.id == b.id; });
  }

  edges_.reserve(edges.size());
  for (auto& e : edges) {
    auto s = find(e.source);
    auto t = find(e.target);
    if (!s || !t) {
      dangling_.push_back(std::move(e));
      continue;
    }
    edges_.push_back({*s, *t});
  }
  std::sort(edges_.begin(), edges_.end());
  auto unique_end = std::unique(edges_.begin(), edges_.end());
  duplicate_edges_ = static_cast<std::size_t>(edges_.end() - unique_end);
  edges_.erase(unique_end, edges_.end());
  std::sort(dangling_.begin(), dangling_.end());
  build_adjacency();
}

void InfluenceNetwork::build_adjacency() {
  const std::size_t n = scholars_.size();
  out_offsets_.assign(n + 1, 0);
  in_offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++out_offsets_[e.source + 1];
    ++in_offsets_[e.target + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    out_offsets_[i + 1] += out_offsets_[i];
    in_offsets_[i + 1] += in_offsets_[i];
  }
  out_targets_.resize(edges_.size());
  in_sources_.resize(edges_.size());
  std::vector<std::size_t> out_fill(out_offsets_.begin(), out_offsets_.end() - 1);
  std::vector<std::size_t> in_fill(in_offsets_.begin(), in_offsets_.end() - 1);
  // edges_ is sorted by (source, target), so both lists come out sorted.
  for (const auto& e : edges_) {
    out_targets_[out_fill[e.source]++] = e.target;
    in_sources_[in_fill[e.target]++] = e.source;
  }
}

std::optional<NodeIndex> InfluenceNetwork::find(std::string_view id) const {
  auto it = std::lower_bound(scholars_.begin(), scholars_.end(), id,
                             [](const Scholar& s, std::string_view key) { return s.id < key; });
  if (it == scholars_.end() || it->id != id) return std::nullopt;
  return static_cast<NodeIndex>(it - scholars_.begin());
}

NodeIndex InfluenceNetwork::index_of(std::string_view id) const {
  if (auto v = find(id)) return *v;
  throw Error(ErrorKind::NotFound, fmt::format("unknown scholar id '{}'", id));
}

std::span<const NodeIndex> InfluenceNetwork::successors(NodeIndex v) const {
  return std::span<const NodeIndex>(out_targets_).subspan(out_offsets_.at(v),
                                                          out_offsets_[v + 1] - out_offsets_[v]);
}

std::span<const NodeIndex> InfluenceNetwork::predecessors(NodeIndex v) const {
  return std::span<const NodeIndex>(in_sources_).subspan(in_offsets_.at(v),
                                                         in_offsets_[v + 1] - in_offsets_[v]);
}

bool InfluenceNetwork::has_edge(NodeIndex source, NodeIndex target) const {
  auto succ = successors(source);
  return std::binary_search(succ.begin(), succ.end(), target);
}

EraIndex InfluenceNetwork::era(NodeIndex v) const {
  const auto& s = scholar(v);
  if (!s.era) {
    throw Error(ErrorKind::Invariant, fmt::format("scholar '{}' has no era assigned", s.id));
  }
  return *s.era;
}

bool InfluenceNetwork::fully_assigned() const noexcept {
  return std::all_of(scholars_.begin(), scholars_.end(),
                     [](const Scholar& s) { return s.era.has_value(); });
}

InfluenceNetwork InfluenceNetwork::with_eras(std::span<const EraIndex> eras) const {
  if (eras.size() != scholars_.size()) {
    throw Error(ErrorKind::InvalidArgument, "era vector size does not match scholar count");
  }
  InfluenceNetwork copy = *this;
  for (std::size_t i = 0; i < eras.size(); ++i) copy.scholars_[i].era = eras[i];
  return copy;
}

std::vector<InfluenceEdge> InfluenceNetwork::edge_list() const {
  std::vector<InfluenceEdge> out;
  out.reserve(edges_.size());
  for (const auto& e : edges_) out.push_back({id(e.source), id(e.target)});
  return out;
}

// ---------------------------------------------------------------------------
// Validation

std::string Violation::message() const {
  if (rule == "self-loop") return fmt::format("self-loop at {}", entity);
  return fmt::format("{}: {}", rule, entity);
}

std::vector<Violation> validate_network(const InfluenceNetwork& network,
                                        const ValidationOptions& options) {
  std::vector<Violation> report;
  const auto& scheme = network.scheme();

  for (const auto& id : network.duplicate_scholar_ids()) {
    report.push_back({id, "duplicate scholar id"});
  }
  for (const auto& s : network.scholars()) {
    if (s.birth > s.death) {
      report.push_back({s.id, "birth after death"});
    } else if (s.birth == s.death) {
      report.push_back({s.id, "birth equals death"});
    }
    if (s.death > options.horizon) report.push_back({s.id, "death beyond horizon"});
    if (s.era && (*s.era < 0 || *s.era >= scheme.size())) {
      report.push_back({s.id, "era index out of range"});
    }
  }
  for (const auto& e : network.dangling_edges()) {
    const auto& missing = network.find(e.source) ? e.target : e.source;
    report.push_back({fmt::format("{}->{}", e.source, e.target), fmt::format("unknown endpoint '{}'", missing)});
  }
  for (const auto& e : network.edges()) {
    if (e.source == e.target) {
      report.push_back({network.id(e.source), "self-loop"});
      continue;
    }
    if (!options.check_era_order) continue;
    const auto& a = network.scholar(e.source);
    const auto& b = network.scholar(e.target);
    if (a.era && b.era && *a.era > *b.era) {
      report.push_back({fmt::format("{}->{}", a.id, b.id), "reverse era link"});
    }
  }
  return report;
}

}  // namespace eranet
