#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <regex>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "eranet/brokerage.hpp"
#include "eranet/csv.hpp"
#include "eranet/influence.hpp"
#include "eranet/metrics.hpp"
#include "eranet/pipeline.hpp"
#include "eranet/slicing.hpp"

namespace fs = std::filesystem;
using namespace eranet;

namespace {

struct Common {
  std::string config;
  std::string nodes;
  std::string edges;
  std::string output;
  unsigned threads = 1;
};

pipeline::PipelineConfig load_config(const Common& c) {
  return c.config.empty() ? pipeline::PipelineConfig{} : pipeline::PipelineConfig::load(c.config);
}

// Writes to OUTPUT/name when --output was given, stdout otherwise.
void emit(const Common& c, const std::string& name, const std::function<void(std::ostream&)>& fill) {
  if (c.output.empty()) {
    fill(std::cout);
    std::cout.flush();
    return;
  }
  fs::create_directories(c.output);
  const auto path = fs::path(c.output) / name;
  std::ofstream out(path, std::ios::binary);
  fill(out);
  if (!out) throw Error(ErrorKind::Invariant, fmt::format("cannot write {}", path.string()));
  spdlog::info("wrote {}", path.string());
}

void add_inputs(CLI::App* cmd, Common& c) {
  cmd->add_option("--nodes", c.nodes, "scholar CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--edges", c.edges, "influence edge CSV")->required()->check(CLI::ExistingFile);
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--output", c.output, "output directory (default: stdout)");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::Range(1u, 1024u));
}

std::vector<community::CommunityPartition> read_partitions(const fs::path& dir) {
  static const std::regex name(R"(partition_(\d+)\.csv)");
  std::map<int, fs::path> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const auto file = entry.path().filename().string();
    if (std::regex_match(file, m, name)) found.emplace(std::stoi(m[1]), entry.path());
  }
  if (found.empty()) throw Error(ErrorKind::NotFound, fmt::format("no partition_<step>.csv in {}", dir.string()));
  std::vector<community::CommunityPartition> parts;
  for (const auto& [step, path] : found) parts.push_back(community::read_partition_csv(path, step));
  return parts;
}

void write_raw_nodes(std::ostream& os, const std::vector<ingest::RawActorRecord>& actors) {
  csv::Writer w(os);
  w.row({"id", "label", "birth", "death"});
  auto year = [](const std::optional<Year>& y) { return y ? std::to_string(*y) : std::string{}; };
  for (const auto& a : actors) w.row({a.id, a.label, year(a.birth), year(a.death)});
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("eranet"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"Era-sliced influence network analysis"};
  app.set_version_flag("--version", std::string(pipeline::kToolVersion));
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  Common c;
  std::function<void()> action;

  auto* run = app.add_subcommand("run", "full pipeline into --output");
  bool no_communities = false, no_sweep = false;
  add_inputs(run, c);
  add_common(run, c);
  run->get_option("--output")->required();
  run->add_flag("--no-communities", no_communities, "skip detection, tracking and sweep");
  run->add_flag("--no-sweep", no_sweep, "skip the theta sweep");
  run->callback([&] {
    action = [&] {
      const auto config = load_config(c);
      pipeline::run_pipeline(config, c.nodes, c.edges, c.output,
                             {c.threads, !no_communities, !no_sweep && !no_communities});
    };
  });

  auto* validate = app.add_subcommand("validate", "parse inputs and report invariant violations");
  add_inputs(validate, c);
  add_common(validate, c);
  validate->callback([&] {
    action = [&] {
      const auto out = pipeline::ingest_inputs(load_config(c), c.nodes, c.edges);
      emit(c, "validation.csv", [&](std::ostream& os) {
        csv::Writer w(os);
        w.row({"entity", "rule"});
        for (const auto& v : out.violations) w.row({v.entity, v.rule});
      });
      fmt::print(stderr, "{} scholar(s), {} edge(s), {} reject(s), {} violation(s)\n", out.network.node_count(),
                 out.network.edge_count(), out.parsed.rejects.size(), out.violations.size());
      pipeline::require_valid(out.violations);
    };
  });

  auto* assign = app.add_subcommand("assign-eras", "assign and repair era memberships");
  std::string policy;
  add_inputs(assign, c);
  add_common(assign, c);
  assign->add_option("--policy", policy, "minimal-displacement|influencer-backward|influenced-forward");
  assign->callback([&] {
    action = [&] {
      auto config = load_config(c);
      if (!policy.empty()) config.repair_policy = chronology::parse_repair_policy(policy);
      auto ingested = pipeline::ingest_inputs(config, c.nodes, c.edges);
      pipeline::require_valid(ingested.violations);
      const auto result = pipeline::assign_and_repair(config, ingested.network);
      emit(c, "trace.csv", [&](std::ostream& os) { chronology::write_trace_csv(os, result.trace); });
      if (!c.output.empty()) {
        emit(c, "scholars.csv", [&](std::ostream& os) { pipeline::write_scholars_csv(os, result.network); });
        emit(c, "edges.csv", [&](std::ostream& os) { pipeline::write_edges_csv(os, result.network); });
      }
    };
  });

  auto* slice_cmd = app.add_subcommand("slice", "emit one slice as DOT or an edge list");
  std::string slice_text;
  std::string format = "dot";
  add_inputs(slice_cmd, c);
  add_common(slice_cmd, c);
  slice_cmd->add_option("--slice", slice_text, "within:E | inter:S:T | accumulated:E")->required();
  slice_cmd->add_option("--format", format)->check(CLI::IsMember({"dot", "csv"}));
  slice_cmd->callback([&] {
    action = [&] {
      const auto config = load_config(c);
      const auto network = pipeline::load_analysis_network(config, c.nodes, c.edges);
      const auto pn = slicing::slice(network, slicing::SliceSpec::parse(slice_text, &network.scheme()));
      auto label = pn.spec.label();
      std::replace(label.begin(), label.end(), ':', '_');
      emit(c, label + "." + format, [&](std::ostream& os) {
        if (format == "dot") {
          slicing::write_dot(os, pn);
          return;
        }
        csv::Writer w(os);
        w.row({"source", "target"});
        for (const auto& e : pn.edges) w.row({network.id(e.source), network.id(e.target)});
      });
    };
  });

  auto* metrics_cmd = app.add_subcommand("metrics", "structural metrics of one slice or every slice");
  std::string metrics_slice;
  add_inputs(metrics_cmd, c);
  add_common(metrics_cmd, c);
  metrics_cmd->add_option("--slice", metrics_slice, "emit a single slice as JSON");
  metrics_cmd->callback([&] {
    action = [&] {
      const auto config = load_config(c);
      const auto network = pipeline::load_analysis_network(config, c.nodes, c.edges);
      const auto& scheme = network.scheme();
      if (!metrics_slice.empty()) {
        const auto pn = slicing::slice(network, slicing::SliceSpec::parse(metrics_slice, &scheme));
        const auto doc = pn.spec.kind == slicing::SliceKind::Inter ? metrics::bipartite_metrics(pn).to_json()
                                                                   : metrics::unipartite_metrics(pn).to_json();
        emit(c, "metrics.json", [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
        return;
      }
      std::vector<metrics::UnipartiteMetrics> within, accumulated;
      std::vector<metrics::BipartiteMetrics> inter;
      for (const auto& spec : slicing::era_pair_slices(scheme.size())) {
        const auto pn = slicing::slice(network, spec);
        if (spec.kind == slicing::SliceKind::Within) {
          within.push_back(metrics::unipartite_metrics(pn));
        } else {
          inter.push_back(metrics::bipartite_metrics(pn));
        }
      }
      for (EraIndex e = 0; e < scheme.size(); ++e) {
        accumulated.push_back(metrics::unipartite_metrics(slicing::slice(network, slicing::SliceSpec::accumulated(e))));
      }
      emit(c, "within.csv", [&](std::ostream& os) { metrics::write_unipartite_csv(os, within, scheme); });
      emit(c, "inter.csv", [&](std::ostream& os) { metrics::write_bipartite_csv(os, inter, scheme); });
      emit(c, "accumulated.csv", [&](std::ostream& os) { metrics::write_unipartite_csv(os, accumulated, scheme); });
    };
  });

  auto* sig_cmd = app.add_subcommand("signatures", "influence signatures and power");
  std::string sig_id;
  add_inputs(sig_cmd, c);
  add_common(sig_cmd, c);
  sig_cmd->add_option("--id", sig_id, "a single scholar");
  sig_cmd->callback([&] {
    action = [&] {
      const auto network = pipeline::load_analysis_network(load_config(c), c.nodes, c.edges);
      std::vector<influence::Signature> sigs;
      if (sig_id.empty()) {
        sigs = influence::all_signatures(network);
      } else {
        sigs.push_back(influence::signature(network, sig_id));
      }
      emit(c, "signatures.csv", [&](std::ostream& os) { influence::write_signatures_csv(os, sigs, network.scheme()); });
    };
  });

  auto* pat_cmd = app.add_subcommand("patterns", "influence pattern frequencies per era");
  add_inputs(pat_cmd, c);
  add_common(pat_cmd, c);
  pat_cmd->callback([&] {
    action = [&] {
      const auto network = pipeline::load_analysis_network(load_config(c), c.nodes, c.edges);
      std::vector<std::vector<influence::PatternFrequency>> per_era;
      for (EraIndex e = 0; e < network.era_count(); ++e) per_era.push_back(influence::pattern_frequencies(network, e));
      emit(c, "patterns.csv", [&](std::ostream& os) { influence::write_patterns_csv(os, per_era, network.scheme()); });
    };
  });

  auto* brk_cmd = app.add_subcommand("brokerage", "brokerage role scores");
  bool distribution = false;
  add_inputs(brk_cmd, c);
  add_common(brk_cmd, c);
  brk_cmd->add_flag("--distribution", distribution, "emit the role-count distribution instead");
  brk_cmd->callback([&] {
    action = [&] {
      const auto network = pipeline::load_analysis_network(load_config(c), c.nodes, c.edges);
      const auto scores = brokerage::brokerage_scores(network, c.threads);
      if (distribution) {
        emit(c, "distribution.csv", [&](std::ostream& os) {
          brokerage::write_distribution_csv(os, brokerage::role_count_distribution(scores, network.scheme()));
        });
      } else {
        emit(c, "scores.csv", [&](std::ostream& os) { brokerage::write_scores_csv(os, scores, network.scheme()); });
      }
    };
  });

  auto* com_cmd = app.add_subcommand("communities", "detect communities on every accumulated era");
  add_inputs(com_cmd, c);
  add_common(com_cmd, c);
  com_cmd->get_option("--output")->required();
  com_cmd->callback([&] {
    action = [&] {
      const auto config = load_config(c);
      const auto network = pipeline::load_analysis_network(config, c.nodes, c.edges);
      const auto parts = pipeline::detect_all_steps(network, config.seed, c.threads);
      nlohmann::json stats = nlohmann::json::array();
      for (const auto& p : parts) {
        emit(c, fmt::format("partition_{}.csv", p.step), [&](std::ostream& os) { community::write_partition_csv(os, p); });
        auto doc = community::community_stats(p, &network).to_json();
        doc["step"] = p.step;
        doc["modularity"] = p.modularity;
        stats.push_back(std::move(doc));
      }
      emit(c, "stats.json", [&](std::ostream& os) { os << stats.dump(2) << '\n'; });
    };
  });

  auto* track_cmd = app.add_subcommand("track", "track dynamic communities across partitions");
  std::string partitions_dir;
  std::optional<double> theta;
  std::optional<int> death_window;
  add_common(track_cmd, c);
  track_cmd->add_option("--partitions", partitions_dir, "directory of partition_<step>.csv")
      ->required()
      ->check(CLI::ExistingDirectory);
  track_cmd->add_option("--theta", theta, "similarity threshold")->check(CLI::Range(0.0, 1.0));
  track_cmd->add_option("--death-window", death_window)->check(CLI::PositiveNumber);
  track_cmd->callback([&] {
    action = [&] {
      auto config = load_config(c);
      if (theta) config.tracking.theta = *theta;
      if (death_window) config.tracking.death_window = *death_window;
      const auto parts = read_partitions(partitions_dir);
      const auto tracked = community::track(parts, config.tracking);
      emit(c, "events.csv", [&](std::ostream& os) { community::write_events_csv(os, tracked.events); });
    };
  });

  auto* sweep_cmd = app.add_subcommand("sweep", "tracking statistics over a range of thresholds");
  std::string theta_range;
  add_common(sweep_cmd, c);
  sweep_cmd->add_option("--partitions", partitions_dir, "directory of partition_<step>.csv")
      ->required()
      ->check(CLI::ExistingDirectory);
  sweep_cmd->add_option("--nodes", c.nodes, "scholar CSV with eras")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--edges", c.edges, "influence edge CSV")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--theta", theta_range, "lo:hi:step");
  sweep_cmd->add_option("--death-window", death_window)->check(CLI::PositiveNumber);
  sweep_cmd->callback([&] {
    action = [&] {
      auto config = load_config(c);
      if (!theta_range.empty()) config.sweep_thetas = community::parse_theta_range(theta_range);
      if (death_window) config.tracking.death_window = *death_window;
      const auto network = pipeline::load_analysis_network(config, c.nodes, c.edges);
      const auto parts = read_partitions(partitions_dir);
      const auto rows = community::theta_sweep(
          parts, config.sweep_thetas, config.tracking.death_window,
          [&](const std::string& id) { return network.era(network.index_of(id)); }, network.era_count());
      emit(c, "sweep.csv", [&](std::ostream& os) { community::write_sweep_csv(os, rows); });
    };
  });

  auto* fetch_cmd = app.add_subcommand("fetch", "download actors and links from a SPARQL endpoint");
  std::string endpoint, query_file;
  std::optional<std::size_t> page_size;
  add_common(fetch_cmd, c);
  fetch_cmd->get_option("--output")->required();
  fetch_cmd->add_option("--endpoint", endpoint, fmt::format("endpoint URL (env {})", sparql::kEndpointEnv));
  fetch_cmd->add_option("--query-file", query_file, "query with {limit} and {offset}")->check(CLI::ExistingFile);
  fetch_cmd->add_option("--page-size", page_size)->check(CLI::PositiveNumber);
  fetch_cmd->callback([&] {
    action = [&] {
      const auto config = load_config(c);
      sparql::FetchConfig f = config.sparql.value_or(sparql::FetchConfig{});
      if (const char* env = std::getenv(sparql::kEndpointEnv); env && *env) f.endpoint_url = env;
      if (!endpoint.empty()) f.endpoint_url = endpoint;
      if (!query_file.empty()) {
        std::ifstream in(query_file);
        f.query_template.assign(std::istreambuf_iterator<char>(in), {});
      }
      if (page_size) f.page_size = *page_size;
      if (f.endpoint_url.empty()) throw Error(ErrorKind::Config, "no SPARQL endpoint configured");
      if (f.query_template.empty()) throw Error(ErrorKind::Config, "no SPARQL query configured");
      const auto result = sparql::fetch(f);
      emit(c, "nodes.csv", [&](std::ostream& os) { write_raw_nodes(os, result.actors); });
      emit(c, "edges.csv", [&](std::ostream& os) {
        csv::Writer w(os);
        w.row({"source", "target"});
        for (const auto& e : result.edges) w.row({e.source, e.target});
      });
      emit(c, "rejects.csv", [&](std::ostream& os) {
        csv::Writer w(os);
        w.row({"source", "row", "reason"});
        for (const auto& r : result.rejects) w.row({r.source, std::to_string(r.line), r.reason});
      });
      fmt::print(stderr, "{} page(s), {} request(s), {} actor(s), {} edge(s)\n", result.pages, result.requests,
                 result.actors.size(), result.edges.size());
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    action();
  } catch (const pipeline::StageError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return pipeline::exit_code(e.kind());
  } catch (const Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return pipeline::exit_code(e.kind());
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return 4;
  }
  return 0;
}
