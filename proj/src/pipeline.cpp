#include "eranet/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eranet/brokerage.hpp"
#include "eranet/csv.hpp"
#include "eranet/influence.hpp"
#include "eranet/metrics.hpp"
#include "eranet/slicing.hpp"

namespace eranet::pipeline {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Configuration

PipelineConfig PipelineConfig::from_json(const nlohmann::json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
  PipelineConfig c;
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
  try {
    if (doc.contains("era_scheme")) {
      const auto& s = doc.at("era_scheme");
      c.scheme = s.is_string() ? EraScheme::load(resolve(s.get<std::string>())) : EraScheme::from_json(s);
    }
    if (doc.contains("imputation")) {
      const auto& imp = doc.at("imputation");
      c.imputation.span = imp.value("span", c.imputation.span);
      c.imputation.horizon = imp.value("horizon", c.imputation.horizon);
    }
    c.activity_offset = doc.value("activity_offset", c.activity_offset);
    if (doc.contains("repair_policy")) {
      c.repair_policy = chronology::parse_repair_policy(doc.at("repair_policy").get<std::string>());
    }
    if (doc.contains("tracking")) {
      const auto& t = doc.at("tracking");
      c.tracking.theta = t.value("theta", c.tracking.theta);
      c.tracking.death_window = t.value("death_window", c.tracking.death_window);
      if (t.contains("sweep")) {
        const auto& sweep = t.at("sweep");
        c.sweep_thetas = sweep.is_string() ? community::parse_theta_range(sweep.get<std::string>())
                                           : sweep.get<std::vector<double>>();
      }
    }
    c.seed = doc.value("seed", c.seed);
    c.top_k = doc.value("top_k", c.top_k);
    if (doc.contains("alive_range")) {
      const auto range = doc.at("alive_range").get<std::vector<Year>>();
      if (range.size() != 2) throw Error(ErrorKind::Config, "alive_range needs [first, last]");
      c.alive_first = range[0];
      c.alive_last = range[1];
    }
    if (doc.contains("filters")) c.filters = resolve(doc.at("filters").get<std::string>());
    if (doc.contains("corrections")) c.corrections = resolve(doc.at("corrections").get<std::string>());
    if (doc.contains("sparql")) {
      const auto& s = doc.at("sparql");
      sparql::FetchConfig f;
      f.endpoint_url = s.value("endpoint", std::string{});
      if (s.contains("query_file")) {
        std::ifstream in(resolve(s.at("query_file").get<std::string>()));
        if (!in) throw Error(ErrorKind::Config, "cannot read sparql.query_file");
        f.query_template.assign(std::istreambuf_iterator<char>(in), {});
      } else {
        f.query_template = s.value("query_template", std::string{});
      }
      f.page_size = s.value("page_size", f.page_size);
      f.max_attempts = s.value("max_attempts", f.max_attempts);
      f.use_post = s.value("post", f.use_post);
      f.local_names = s.value("local_names", f.local_names);
      c.sparql = std::move(f);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, fmt::format("config: {}", e.what()));
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  if (c.tracking.theta < 0.0 || c.tracking.theta > 1.0) {
    throw Error(ErrorKind::Config, "tracking.theta must lie in [0, 1]");
  }
  if (c.tracking.death_window < 1) throw Error(ErrorKind::Config, "tracking.death_window must be >= 1");
  if (c.imputation.span <= 0) throw Error(ErrorKind::Config, "imputation.span must be positive");
  if (c.top_k == 0) throw Error(ErrorKind::Config, "top_k must be >= 1");
  if (c.alive_last < c.alive_first) throw Error(ErrorKind::Config, "alive_range is empty");
  return c;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, fmt::format("cannot read config {}", path.string()));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, fmt::format("{}: {}", path.string(), e.what()));
  }
  return from_json(doc, path.parent_path());
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j{{"era_scheme", scheme.to_json()},
                   {"imputation", {{"span", imputation.span}, {"horizon", imputation.horizon}}},
                   {"activity_offset", activity_offset},
                   {"repair_policy", chronology::to_string(repair_policy)},
                   {"tracking", {{"theta", tracking.theta},
                                 {"death_window", tracking.death_window},
                                 {"sweep", sweep_thetas}}},
                   {"seed", seed},
                   {"top_k", top_k},
                   {"alive_range", {alive_first, alive_last}}};
  if (filters) j["filters"] = filters->generic_string();
  if (corrections) j["corrections"] = corrections->generic_string();
  if (sparql) {
    j["sparql"] = {{"endpoint", sparql->endpoint_url},
                   {"query_template", sparql->query_template},
                   {"page_size", sparql->page_size}};
  }
  return j;
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::InvalidArgument: return 2;
    case ErrorKind::Parse:
    case ErrorKind::Data:
    case ErrorKind::OutOfRange:
    case ErrorKind::NotFound: return 3;
    case ErrorKind::Invariant: return 4;
    case ErrorKind::Fetch: return 5;
  }
  return 4;
}

// ---------------------------------------------------------------------------
// Stages

IngestOutcome ingest_inputs(const PipelineConfig& config, const fs::path& nodes, const fs::path& edges) {
  auto parsed = ingest::parse_inputs(nodes, edges);
  for (const auto& r : parsed.rejects) {
    spdlog::warn("{}:{}: rejected ({})", r.source, r.line, r.reason);
  }
  auto actors = parsed.actors;
  auto edge_list = parsed.edges;

  ingest::CorrectionReport correction_report;
  if (config.corrections) {
    correction_report =
        ingest::apply_corrections(actors, edge_list, ingest::Corrections::load(*config.corrections));
    for (const auto& miss : correction_report.unmatched) {
      spdlog::warn("correction for '{}' matched nothing", miss);
    }
  }
  ingest::FilterRules rules;
  if (config.filters) rules = ingest::FilterRules::load(*config.filters);
  auto filtered = ingest::apply_filters(std::move(actors), std::move(edge_list), rules);

  std::vector<Scholar> scholars;
  std::vector<ingest::UnresolvedActor> unresolved;
  for (const auto& rec : filtered.records) {
    auto imputed = ingest::impute_dates(rec, config.imputation);
    if (auto* s = std::get_if<Scholar>(&imputed)) {
      scholars.push_back(std::move(*s));
    } else {
      unresolved.push_back(std::get<ingest::UnresolvedActor>(imputed));
    }
  }
  // Edges touching unresolved actors wait for manual completion.
  std::vector<InfluenceEdge> kept;
  std::vector<std::string> pending_ids;
  for (const auto& u : unresolved) pending_ids.push_back(u.id);
  std::sort(pending_ids.begin(), pending_ids.end());
  for (auto& e : filtered.edges) {
    if (std::binary_search(pending_ids.begin(), pending_ids.end(), e.source) ||
        std::binary_search(pending_ids.begin(), pending_ids.end(), e.target)) {
      continue;
    }
    kept.push_back(std::move(e));
  }

  InfluenceNetwork network(config.scheme, std::move(scholars), std::move(kept));
  ValidationOptions vopts;
  vopts.horizon = config.imputation.horizon;
  auto violations = validate_network(network, vopts);
  return {std::move(network),        std::move(parsed),  std::move(filtered.removals),
          filtered.dropped_edges,    std::move(unresolved), std::move(correction_report),
          std::move(violations)};
}

void require_valid(const std::vector<Violation>& violations) {
  if (violations.empty()) return;
  std::string msg = fmt::format("{} validation violation(s)", violations.size());
  for (std::size_t i = 0; i < violations.size() && i < 20; ++i) msg += "\n  " + violations[i].message();
  if (violations.size() > 20) msg += "\n  ...";
  throw Error(ErrorKind::Data, msg);
}

ChronologyOutcome assign_and_repair(const PipelineConfig& config, const InfluenceNetwork& network) {
  auto assigned = chronology::assign_eras(network, config.activity_offset);
  const auto initial = chronology::find_reverse_links(assigned).size();
  auto repaired = chronology::repair_assignments(assigned, {config.repair_policy, config.activity_offset});
  if (!chronology::find_reverse_links(repaired.network).empty()) {
    throw Error(ErrorKind::Invariant, "reverse era links remain after repair");
  }
  spdlog::info("era repair: {} reverse link(s), {} move(s), {} scholar(s) moved", initial,
               repaired.trace.moves.size(), repaired.trace.moved_scholars());
  return {std::move(repaired.network), std::move(repaired.trace), initial};
}

InfluenceNetwork load_analysis_network(const PipelineConfig& config, const fs::path& nodes,
                                       const fs::path& edges) {
  const auto node_table = csv::read_file(nodes);
  const int era_col = node_table.column("era");
  if (era_col < 0) {
    auto ingested = ingest_inputs(config, nodes, edges);
    require_valid(ingested.violations);
    return assign_and_repair(config, ingested.network).network;
  }
  const auto edge_table = csv::read_file(edges);
  auto parsed = ingest::parse_tables(node_table, nodes.filename().string(), edge_table,
                                     edges.filename().string());
  if (!parsed.rejects.empty()) {
    const auto& r = parsed.rejects.front();
    throw Error(ErrorKind::Data, fmt::format("{}:{}: {}", r.source, r.line, r.reason));
  }
  const int bi_col = node_table.column("birth_imputed");
  const int di_col = node_table.column("death_imputed");
  std::map<std::string, const csv::Row*> rows;
  for (const auto& row : node_table.rows) rows.emplace(row.fields.at(node_table.column("id")), &row);

  std::vector<Scholar> scholars;
  for (const auto& rec : parsed.actors) {
    if (!rec.birth || !rec.death) {
      throw Error(ErrorKind::Data, fmt::format("scholar '{}' lacks a birth or death year", rec.id));
    }
    const auto& row = *rows.at(rec.id);
    auto flag = [&](int col) {
      return col >= 0 && static_cast<std::size_t>(col) < row.fields.size() &&
             (row.fields[col] == "1" || row.fields[col] == "true");
    };
    const auto& era_text = row.fields.at(static_cast<std::size_t>(era_col));
    std::optional<EraIndex> era = config.scheme.index_of(era_text);
    if (!era) {
      try {
        std::size_t used = 0;
        era = std::stoi(era_text, &used);
        if (used != era_text.size()) era.reset();
      } catch (const std::exception&) {
        era.reset();
      }
    }
    if (!era || *era < 0 || *era >= config.scheme.size()) {
      throw Error(ErrorKind::Data, fmt::format("scholar '{}': unknown era '{}'", rec.id, era_text));
    }
    scholars.push_back({rec.id, rec.label, *rec.birth, *rec.death, flag(bi_col), flag(di_col), era});
  }
  InfluenceNetwork network(config.scheme, std::move(scholars), std::move(parsed.edges));
  ValidationOptions vopts;
  vopts.horizon = config.imputation.horizon;
  require_valid(validate_network(network, vopts));
  return network;
}

void write_scholars_csv(std::ostream& out, const InfluenceNetwork& network) {
  csv::Writer w(out);
  w.row({"id", "label", "birth", "death", "birth_imputed", "death_imputed", "era"});
  for (const auto& s : network.scholars()) {
    w.row({s.id, s.label, std::to_string(s.birth), std::to_string(s.death),
           s.birth_imputed ? "1" : "0", s.death_imputed ? "1" : "0",
           s.era ? network.scheme().name(*s.era) : std::string{}});
  }
}

void write_edges_csv(std::ostream& out, const InfluenceNetwork& network) {
  csv::Writer w(out);
  w.row({"source", "target"});
  for (const auto& e : network.edges()) w.row({network.id(e.source), network.id(e.target)});
}

std::vector<community::CommunityPartition> detect_all_steps(const InfluenceNetwork& network,
                                                            std::uint64_t seed, unsigned threads) {
  const int k = network.era_count();
  std::vector<slicing::PartialNetwork> slices;
  for (EraIndex e = 0; e < k; ++e) slices.push_back(slicing::slice(network, slicing::SliceSpec::accumulated(e)));
  std::vector<community::CommunityPartition> parts(static_cast<std::size_t>(k));
  auto work = [&](std::size_t i) { parts[i] = community::detect_communities(slices[i], seed + i); };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(k)));
  if (threads == 1) {
    for (std::size_t i = 0; i < parts.size(); ++i) work(i);
    return parts;
  }
  std::vector<std::exception_ptr> errors(parts.size());
  {
    std::vector<std::jthread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < parts.size();) {
          try {
            work(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return parts;
}

// ---------------------------------------------------------------------------
// Digests and manifest

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::Invariant, "SHA-256 failed");
  }
  std::string hex;
  for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Parse, fmt::format("cannot read {}", path.string()));
  std::string data((std::istreambuf_iterator<char>(in)), {});
  return sha256_hex(data);
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j{{"tool_version", tool_version}, {"config", config}};
  auto& in = j["inputs"] = nlohmann::json::array();
  for (const auto& [path, digest] : inputs) in.push_back({{"path", path}, {"sha256", digest}});
  auto& out = j["outputs"] = nlohmann::json::array();
  for (const auto& [path, digest] : outputs) out.push_back({{"path", path}, {"sha256", digest}});
  auto& t = j["timings"] = nlohmann::json::array();
  for (const auto& s : timings) t.push_back({{"stage", s.stage}, {"seconds", s.seconds}});
  return j;
}

namespace {

class OutputSet {
 public:
  explicit OutputSet(fs::path root) : root_(std::move(root)) {}

  template <typename Fn>
  void write(const std::string& relative, Fn&& fill) {
    std::ostringstream buffer;
    fill(buffer);
    const auto path = root_ / relative;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    const auto text = buffer.str();
    out << text;
    if (!out) throw Error(ErrorKind::Invariant, fmt::format("cannot write {}", path.string()));
    files_.emplace_back(relative, sha256_hex(text));
  }

  std::vector<std::pair<std::string, std::string>> digests() const {
    auto sorted = files_;
    std::sort(sorted.begin(), sorted.end());
    return sorted;
  }

 private:
  fs::path root_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string file_label(const slicing::SliceSpec& spec) {
  auto label = spec.label();
  std::replace(label.begin(), label.end(), ':', '_');
  return label;
}

template <typename Fn>
auto timed(RunManifest& manifest, const std::string& stage, Fn&& fn) {
  const auto started = std::chrono::steady_clock::now();
  auto finish = [&] {
    manifest.timings.push_back(
        {stage, std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()});
    spdlog::info("stage {} finished in {:.3f} s", stage, manifest.timings.back().seconds);
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      finish();
    } else {
      auto result = fn();
      finish();
      return result;
    }
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  } catch (const std::exception& e) {
    throw StageError(stage, Error(ErrorKind::Invariant, e.what()));
  }
}

}  // namespace

RunManifest run_pipeline(const PipelineConfig& config, const fs::path& nodes, const fs::path& edges,
                         const fs::path& output_dir, const RunOptions& options) {
  RunManifest manifest;
  manifest.config = config.to_json();
  for (const auto& p : {nodes, edges}) manifest.inputs.emplace_back(p.filename().string(), file_sha256(p));
  if (config.filters) manifest.inputs.emplace_back(config.filters->filename().string(), file_sha256(*config.filters));
  if (config.corrections) {
    manifest.inputs.emplace_back(config.corrections->filename().string(), file_sha256(*config.corrections));
  }
  fs::create_directories(output_dir);
  OutputSet out(output_dir);
  const auto& scheme = config.scheme;
  const int k = scheme.size();
  const unsigned threads = std::max(1u, options.threads);

  auto ingested = timed(manifest, "ingest", [&] {
    auto result = ingest_inputs(config, nodes, edges);
    out.write("ingest/rejects.csv", [&](std::ostream& os) {
      csv::Writer w(os);
      w.row({"file", "line", "reason"});
      for (const auto& r : result.parsed.rejects) w.row({r.source, std::to_string(r.line), r.reason});
    });
    out.write("ingest/removals.csv", [&](std::ostream& os) {
      csv::Writer w(os);
      w.row({"id", "reason", "rule"});
      for (const auto& r : result.removals) w.row({r.id, ingest::to_string(r.reason), r.pattern});
    });
    out.write("ingest/unresolved.csv", [&](std::ostream& os) {
      csv::Writer w(os);
      w.row({"id", "label", "birth", "death"});
      for (const auto& u : result.unresolved) w.row({u.id, u.label, "", ""});
    });
    out.write("ingest/validation.csv", [&](std::ostream& os) {
      csv::Writer w(os);
      w.row({"entity", "rule"});
      for (const auto& v : result.violations) w.row({v.entity, v.rule});
    });
    require_valid(result.violations);
    return result;
  });

  auto chron = timed(manifest, "chronology", [&] {
    auto result = assign_and_repair(config, ingested.network);
    out.write("chronology/trace.csv", [&](std::ostream& os) { chronology::write_trace_csv(os, result.trace); });
    out.write("chronology/moves.csv", [&](std::ostream& os) {
      csv::Writer w(os);
      w.row({"step", "id", "from_era", "to_era", "direction", "cause_source", "cause_target"});
      for (std::size_t i = 0; i < result.trace.moves.size(); ++i) {
        const auto& m = result.trace.moves[i];
        w.row({std::to_string(i), result.network.id(m.scholar), scheme.name(m.from), scheme.name(m.to),
               m.direction == chronology::MoveDirection::Backward ? "backward" : "forward",
               result.network.id(m.cause.source), result.network.id(m.cause.target)});
      }
    });
    out.write("chronology/scholars.csv", [&](std::ostream& os) { write_scholars_csv(os, result.network); });
    out.write("chronology/edges.csv", [&](std::ostream& os) { write_edges_csv(os, result.network); });
    return result;
  });
  const InfluenceNetwork& network = chron.network;

  auto slices = timed(manifest, "slicing", [&] {
    const auto matrix = slicing::link_matrix(network);
    if (matrix.total() != network.edge_count()) {
      throw Error(ErrorKind::Invariant, "link matrix total differs from edge count");
    }
    out.write("slicing/link_matrix.csv", [&](std::ostream& os) { slicing::write_link_matrix_csv(os, matrix, scheme); });
    out.write("slicing/received_percentages.csv", [&](std::ostream& os) {
      slicing::write_percentages_csv(os, slicing::received_percentages(matrix), scheme);
    });
    out.write("slicing/alive_per_year.csv", [&](std::ostream& os) {
      slicing::write_alive_csv(os, slicing::alive_per_year(network, config.alive_first, config.alive_last), scheme);
    });
    std::vector<slicing::PartialNetwork> all;
    for (const auto& spec : slicing::era_pair_slices(k)) all.push_back(slicing::slice(network, spec));
    for (EraIndex e = 0; e < k; ++e) all.push_back(slicing::slice(network, slicing::SliceSpec::accumulated(e)));
    for (const auto& pn : all) {
      out.write("slicing/dot/" + file_label(pn.spec) + ".dot", [&](std::ostream& os) { slicing::write_dot(os, pn); });
    }
    return all;
  });

  timed(manifest, "metrics", [&] {
    std::vector<metrics::UnipartiteMetrics> within, accumulated;
    std::vector<metrics::BipartiteMetrics> inter;
    for (const auto& pn : slices) {
      nlohmann::json doc;
      if (pn.spec.kind == slicing::SliceKind::Inter) {
        inter.push_back(metrics::bipartite_metrics(pn));
        doc = inter.back().to_json();
      } else {
        auto& bucket = pn.spec.kind == slicing::SliceKind::Within ? within : accumulated;
        bucket.push_back(metrics::unipartite_metrics(pn));
        doc = bucket.back().to_json();
      }
      out.write("metrics/json/" + file_label(pn.spec) + ".json",
                [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
    }
    out.write("metrics/within.csv", [&](std::ostream& os) { metrics::write_unipartite_csv(os, within, scheme); });
    out.write("metrics/accumulated.csv", [&](std::ostream& os) { metrics::write_unipartite_csv(os, accumulated, scheme); });
    out.write("metrics/inter.csv", [&](std::ostream& os) { metrics::write_bipartite_csv(os, inter, scheme); });
    out.write("metrics/top_degree.csv", [&](std::ostream& os) {
      csv::Writer w(os);
      w.row({"slice", "direction", "rank", "id", "label", "degree"});
      for (const auto& pn : slices) {
        for (auto dir : {metrics::DegreeDirection::Out, metrics::DegreeDirection::In}) {
          if (pn.nodes.empty()) continue;
          const char* name = dir == metrics::DegreeDirection::Out ? "out" : "in";
          std::size_t rank = 0;
          for (const auto& r : metrics::top_k_by_degree(pn, dir, config.top_k)) {
            w.row({pn.spec.label(), name, std::to_string(++rank), r.id,
                   network.scholar(network.index_of(r.id)).label, std::to_string(r.value)});
          }
        }
      }
    });
  });

  timed(manifest, "influence", [&] {
    const auto sigs = influence::all_signatures(network);
    out.write("influence/signatures.csv", [&](std::ostream& os) { influence::write_signatures_csv(os, sigs, scheme); });
    std::vector<std::vector<influence::PatternFrequency>> per_era;
    for (EraIndex e = 0; e < k; ++e) per_era.push_back(influence::pattern_frequencies(network, e));
    out.write("influence/patterns.csv", [&](std::ostream& os) { influence::write_patterns_csv(os, per_era, scheme); });
    out.write("influence/top_power.csv", [&](std::ostream& os) {
      csv::Writer w(os);
      w.row({"era", "rank", "id", "label", "power"});
      for (EraIndex e = 0; e < k; ++e) {
        std::vector<std::pair<double, std::string>> ranked;
        for (const auto& s : sigs) {
          if (s.own_era == e) ranked.emplace_back(influence::influence_power(s), s.id);
        }
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
          return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        for (std::size_t i = 0; i < ranked.size() && i < config.top_k; ++i) {
          w.row({scheme.name(e), std::to_string(i + 1), ranked[i].second,
                 network.scholar(network.index_of(ranked[i].second)).label,
                 influence::format_power(ranked[i].first)});
        }
      }
    });
  });

  timed(manifest, "brokerage", [&] {
    const auto scores = brokerage::brokerage_scores(network, threads);
    for (const auto& s : scores) {
      if (s[brokerage::Role::Consultant] != 0) {
        throw Error(ErrorKind::Invariant, fmt::format("consultant role at '{}'", s.id));
      }
    }
    out.write("brokerage/scores.csv", [&](std::ostream& os) { brokerage::write_scores_csv(os, scores, scheme); });
    out.write("brokerage/distribution.csv", [&](std::ostream& os) {
      brokerage::write_distribution_csv(os, brokerage::role_count_distribution(scores, scheme));
    });
    out.write("brokerage/top_brokers.csv", [&](std::ostream& os) {
      csv::Writer w(os);
      w.row({"era", "role", "rank", "id", "count"});
      for (EraIndex e = 0; e < k; ++e) {
        for (auto role : {brokerage::Role::Coordinator, brokerage::Role::Gatekeeper,
                          brokerage::Role::Representative, brokerage::Role::Liaison}) {
          std::size_t rank = 0;
          for (const auto& r : brokerage::top_brokers(scores, role, e, config.top_k)) {
            w.row({scheme.name(e), brokerage::to_string(role), std::to_string(++rank), r.id,
                   std::to_string(r.value)});
          }
        }
      }
    });
  });

  if (options.communities) {
    const auto partitions = timed(manifest, "community", [&] {
      auto parts = detect_all_steps(network, config.seed, threads);
      nlohmann::json stats = nlohmann::json::array();
      for (const auto& p : parts) {
        out.write(fmt::format("community/partition_{}.csv", p.step),
                  [&](std::ostream& os) { community::write_partition_csv(os, p); });
        auto doc = community::community_stats(p, &network).to_json();
        doc["step"] = p.step;
        doc["era"] = scheme.name(p.step);
        doc["modularity"] = p.modularity;
        std::vector<double> div;
        for (const auto& members : p.members()) {
          std::vector<EraIndex> eras;
          for (const auto& id : members) eras.push_back(network.era(network.index_of(id)));
          div.push_back(community::diversity(eras, k));
        }
        doc["diversity"] = community::Summary::of(div).to_json();
        stats.push_back(std::move(doc));
      }
      out.write("community/stats.json", [&](std::ostream& os) { os << stats.dump(2) << '\n'; });
      const auto tracked = community::track(parts, config.tracking);
      out.write("community/events.csv", [&](std::ostream& os) { community::write_events_csv(os, tracked.events); });
      std::vector<int> steps;
      for (const auto& p : parts) steps.push_back(p.step);
      out.write("community/presence.csv", [&](std::ostream& os) {
        community::write_presence_csv(os, community::era_presence_patterns(tracked.communities, steps));
      });
      return parts;
    });
    if (options.sweep) {
      timed(manifest, "sweep", [&] {
        const auto rows = community::theta_sweep(
            partitions, config.sweep_thetas, config.tracking.death_window,
            [&](const std::string& id) { return network.era(network.index_of(id)); }, k);
        out.write("community/sweep.csv", [&](std::ostream& os) { community::write_sweep_csv(os, rows); });
      });
    }
  }

  manifest.outputs = out.digests();
  std::ofstream mf(output_dir / "manifest.json");
  mf << manifest.to_json().dump(2) << '\n';
  return manifest;
}

}  // namespace eranet::pipeline
