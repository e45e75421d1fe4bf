#include "eranet/brokerage.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "eranet/csv.hpp"
#include "eranet/error.hpp"

namespace eranet::brokerage {

const char* to_string(Role role) noexcept {
  switch (role) {
    case Role::Coordinator: return "coordinator";
    case Role::Gatekeeper: return "gatekeeper";
    case Role::Representative: return "representative";
    case Role::Liaison: return "liaison";
    case Role::Consultant: return "consultant";
  }
  return "coordinator";
}

Role parse_role(std::string_view text) {
  for (auto r : kRoles) {
    if (text == to_string(r)) return r;
  }
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown brokerage role '{}'", text));
}

int Scores::distinct_roles() const {
  return static_cast<int>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
}

std::size_t Scores::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

Role classify(EraIndex a, EraIndex b, EraIndex c) {
  if (a == b && b == c) return Role::Coordinator;
  if (a == c) return Role::Consultant;
  if (a == b) return Role::Representative;
  if (b == c) return Role::Gatekeeper;
  return Role::Liaison;
}

namespace {

void score_range(const InfluenceNetwork& network, NodeIndex first, NodeIndex last,
                 std::vector<Scores>& out) {
  for (NodeIndex b = first; b < last; ++b) {
    const EraIndex eb = network.era(b);
    auto& s = out[b];
    for (NodeIndex a : network.predecessors(b)) {
      const EraIndex ea = network.era(a);
      for (NodeIndex c : network.successors(b)) {
        if (c == a || network.has_edge(a, c)) continue;
        ++s[classify(ea, eb, network.era(c))];
      }
    }
  }
}

}  // namespace

std::vector<Scores> brokerage_scores(const InfluenceNetwork& network, unsigned threads) {
  for (const auto& e : network.edges()) {
    if (network.era(e.source) > network.era(e.target)) {
      throw Error(ErrorKind::Data, fmt::format("reverse era link {}->{}; repair era assignments first",
                                               network.id(e.source), network.id(e.target)));
    }
  }
  const auto n = static_cast<NodeIndex>(network.node_count());
  std::vector<Scores> out(n);
  for (NodeIndex v = 0; v < n; ++v) {
    out[v].id = network.id(v);
    out[v].era = network.era(v);
  }
  threads = std::max(1u, std::min<unsigned>(threads, n == 0 ? 1u : n));
  if (threads == 1) {
    score_range(network, 0, n, out);
    return out;
  }
  // Each worker owns a disjoint block of middle nodes, so no merging is needed.
  std::vector<std::jthread> workers;
  const NodeIndex block = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const NodeIndex first = std::min<NodeIndex>(n, t * block);
    const NodeIndex last = std::min<NodeIndex>(n, first + block);
    workers.emplace_back([&, first, last] { score_range(network, first, last, out); });
  }
  workers.clear();
  return out;
}

double RoleCountRow::fraction(int roles) const {
  return scholars == 0 ? 0.0
                       : static_cast<double>(holders[static_cast<std::size_t>(roles)]) /
                             static_cast<double>(scholars);
}

std::vector<RoleCountRow> role_count_distribution(const std::vector<Scores>& scores,
                                                  const EraScheme& scheme) {
  std::vector<RoleCountRow> rows(static_cast<std::size_t>(scheme.size()) + 1);
  for (EraIndex e = 0; e < scheme.size(); ++e) rows[static_cast<std::size_t>(e)].label = scheme.name(e);
  auto& overall = rows.back();
  overall.label = "overall";
  for (const auto& s : scores) {
    const auto roles = static_cast<std::size_t>(s.distinct_roles());
    auto& row = rows.at(static_cast<std::size_t>(s.era));
    ++row.scholars;
    ++row.holders.at(roles);
    ++overall.scholars;
    ++overall.holders.at(roles);
  }
  return rows;
}

std::vector<metrics::Ranked> top_brokers(const std::vector<Scores>& scores, Role role, EraIndex era,
                                         std::size_t k) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  std::vector<metrics::Ranked> ranked;
  for (const auto& s : scores) {
    if (s.era == era && s[role] > 0) ranked.push_back({s.id, s[role]});
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.value != b.value ? a.value > b.value : a.id < b.id;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

void write_scores_csv(std::ostream& out, const std::vector<Scores>& scores, const EraScheme& scheme) {
  csv::Writer w(out);
  w.row({"id", "era", "coordinator", "gatekeeper", "representative", "liaison"});
  for (const auto& s : scores) {
    w.row({s.id, scheme.name(s.era), std::to_string(s[Role::Coordinator]),
           std::to_string(s[Role::Gatekeeper]), std::to_string(s[Role::Representative]),
           std::to_string(s[Role::Liaison])});
  }
}

void write_distribution_csv(std::ostream& out, const std::vector<RoleCountRow>& rows) {
  csv::Writer w(out);
  w.row({"era", "scholars", "roles_1", "roles_2", "roles_3", "roles_4", "fraction_1", "fraction_2",
         "fraction_3", "fraction_4"});
  for (const auto& r : rows) {
    std::vector<std::string> row{r.label, std::to_string(r.scholars)};
    for (int k = 1; k <= 4; ++k) row.push_back(std::to_string(r.holders[static_cast<std::size_t>(k)]));
    for (int k = 1; k <= 4; ++k) row.push_back(fmt::format("{:.4f}", r.fraction(k)));
    w.row(row);
  }
}

}  // namespace eranet::brokerage
