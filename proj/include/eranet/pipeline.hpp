#pragma once

// Batch orchestration: configuration, the staged pipeline, and the run manifest.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eranet/chronology.hpp"
#include "eranet/community.hpp"
#include "eranet/error.hpp"
#include "eranet/ingest.hpp"
#include "eranet/model.hpp"
#include "eranet/sparql.hpp"

namespace eranet::pipeline {

inline constexpr const char* kToolVersion = "0.1.0";

struct PipelineConfig {
  EraScheme scheme = EraScheme::standard();
  ingest::ImputationConfig imputation;
  Year activity_offset = chronology::kDefaultActivityOffset;
  chronology::RepairPolicy repair_policy = chronology::RepairPolicy::MinimalDisplacement;
  community::TrackingConfig tracking;
  std::vector<double> sweep_thetas = community::parse_theta_range("0:0.95:0.05");
  std::uint64_t seed = 1;
  std::size_t top_k = 5;
  Year alive_first = -800;
  Year alive_last = kDefaultHorizon;
  std::optional<std::filesystem::path> filters;
  std::optional<std::filesystem::path> corrections;
  std::optional<sparql::FetchConfig> sparql;

  /// Relative paths inside the document resolve against `base_dir`.
  /// Throws Error(Config).
  static PipelineConfig from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// Exit status for a failure class: 2 config, 3 data, 4 invariant, 5 fetch.
int exit_code(ErrorKind kind) noexcept;

/// Failure inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), stage + ": " + cause.what()), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct IngestOutcome {
  InfluenceNetwork network;  // eras unassigned
  ingest::ParsedInputs parsed;
  std::vector<ingest::Removal> removals;
  std::size_t dropped_edges = 0;
  std::vector<ingest::UnresolvedActor> unresolved;
  ingest::CorrectionReport corrections;
  std::vector<Violation> violations;
};

/// Parse, correct, filter, impute and build the network. Validation
/// violations are returned, not thrown.
IngestOutcome ingest_inputs(const PipelineConfig& config, const std::filesystem::path& nodes,
                            const std::filesystem::path& edges);

/// Throws Error(Data) listing the violations when `violations` is non-empty.
void require_valid(const std::vector<Violation>& violations);

struct ChronologyOutcome {
  InfluenceNetwork network;
  chronology::AssignmentTrace trace;
  std::size_t initial_reverse_links = 0;
};

ChronologyOutcome assign_and_repair(const PipelineConfig& config, const InfluenceNetwork& network);

/// Loads scholars with an `era` column (name or index) as written by the
/// chronology stage; without that column the ingest and chronology stages
/// run first. Throws Error(Data) if the result still has reverse links.
InfluenceNetwork load_analysis_network(const PipelineConfig& config,
                                       const std::filesystem::path& nodes,
                                       const std::filesystem::path& edges);

/// `id,label,birth,death,birth_imputed,death_imputed,era` and `source,target`.
void write_scholars_csv(std::ostream& out, const InfluenceNetwork& network);
void write_edges_csv(std::ostream& out, const InfluenceNetwork& network);

/// Accumulated-era partitions for every era, detected concurrently.
std::vector<community::CommunityPartition> detect_all_steps(const InfluenceNetwork& network,
                                                            std::uint64_t seed, unsigned threads);

std::string sha256_hex(std::string_view data);
std::string file_sha256(const std::filesystem::path& path);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct RunManifest {
  nlohmann::json config;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, digest
  std::vector<std::pair<std::string, std::string>> outputs;  // relative path, digest
  std::vector<StageTiming> timings;
  std::string tool_version = kToolVersion;

  nlohmann::json to_json() const;
};

struct RunOptions {
  unsigned threads = 1;
  bool communities = true;
  bool sweep = true;
};

/// ingest -> chronology -> slicing -> metrics -> influence -> brokerage ->
/// community, writing every report under `output_dir` plus manifest.json.
/// Throws StageError naming the failing stage.
RunManifest run_pipeline(const PipelineConfig& config, const std::filesystem::path& nodes,
                         const std::filesystem::path& edges, const std::filesystem::path& output_dir,
                         const RunOptions& options = {});

}  // namespace eranet::pipeline
