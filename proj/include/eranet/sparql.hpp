#pragma once

// Paginated influence-triple fetching from a SPARQL endpoint (SPARQL-JSON results).

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eranet/ingest.hpp"

namespace eranet::sparql {

/// Environment variable that overrides the configured endpoint URL.
inline constexpr const char* kEndpointEnv = "ERANET_SPARQL_ENDPOINT";

struct FetchConfig {
  std::string endpoint_url;    // e.g. http://localhost:8890/sparql
  std::string query_template;  // must contain {limit} and {offset}
  std::size_t page_size = 1000;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  std::chrono::seconds timeout{60};
  bool use_post = false;
  /// Reduce IRIs to their last path/fragment segment.
  bool local_names = true;
  std::size_t max_pages = 1'000'000;
};

struct FetchResult {
  std::vector<ingest::RawActorRecord> actors;
  std::vector<InfluenceEdge> edges;
  std::vector<ingest::Reject> rejects;
  std::size_t pages = 0;     // non-empty pages
  std::size_t requests = 0;  // HTTP requests including retries
  std::size_t rows = 0;      // result rows seen; reject line numbers count these
};

/// Throws Error(InvalidArgument) if a placeholder is missing.
std::string render_query(std::string_view query_template, std::size_t limit, std::size_t offset);

std::string local_name(std::string_view iri);

/// Rows binding `source`/`target` become edges (with optional
/// `sourceLabel`, `sourceBirth`, `sourceDeath` and the `target*` analogues);
/// rows binding `id` become actors (`label`, `birth`, `death`).
/// Returns the number of rows on the page.
std::size_t absorb_page(const nlohmann::json& page, std::string_view source_name, bool local_names, FetchResult& into);

/// Sequential requests until an empty page. Transport failures, 5xx and 429
/// responses are retried with exponential backoff; after `max_attempts`
/// the call fails with Error(Fetch).
FetchResult fetch(const FetchConfig& config);

}  // namespace eranet::sparql
