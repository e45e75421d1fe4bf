#include "eranet/sparql.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "eranet/error.hpp"

namespace eranet::sparql {

std::string render_query(std::string_view query_template, std::size_t limit, std::size_t offset) {
  std::string out(query_template);
  auto replace_all = [&out](std::string_view key, const std::string& value) {
    bool found = false;
    for (auto pos = out.find(key); pos != std::string::npos; pos = out.find(key, pos + value.size())) {
      out.replace(pos, key.size(), value);
      found = true;
    }
    return found;
  };
  const bool has_limit = replace_all("{limit}", std::to_string(limit));
  const bool has_offset = replace_all("{offset}", std::to_string(offset));
  if (!has_limit || !has_offset) {
    throw Error(ErrorKind::InvalidArgument, "query template needs {limit} and {offset} placeholders");
  }
  return out;
}

std::string local_name(std::string_view iri) {
  if (iri.starts_with('<') && iri.ends_with('>')) iri = iri.substr(1, iri.size() - 2);
  const auto cut = iri.find_last_of("/#");
  return std::string(cut == std::string_view::npos ? iri : iri.substr(cut + 1));
}

namespace {

std::string binding(const nlohmann::json& row, const char* var) {
  auto it = row.find(var);
  if (it == row.end() || !it->is_object()) return {};
  auto value = it->find("value");
  if (value == it->end() || !value->is_string()) return {};
  return value->get<std::string>();
}

struct Endpoint {
  std::string host;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::Config, fmt::format("endpoint URL '{}' lacks a scheme", url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

// Merges repeated mentions of the same actor; the first non-empty value wins.
void finalize(FetchResult& result) {
  std::map<std::string, ingest::RawActorRecord> merged;
  for (auto& rec : result.actors) {
    auto [it, inserted] = merged.try_emplace(rec.id, rec);
    if (inserted) continue;
    auto& have = it->second;
    if (have.label.empty()) have.label = rec.label;
    if (!have.birth) have.birth = rec.birth;
    if (!have.death) have.death = rec.death;
  }
  result.actors.clear();
  for (auto& [id, rec] : merged) result.actors.push_back(std::move(rec));

  std::set<InfluenceEdge> unique(result.edges.begin(), result.edges.end());
  result.edges.assign(unique.begin(), unique.end());
}

}  // namespace

std::size_t absorb_page(const nlohmann::json& page, std::string_view source_name, bool local_names, FetchResult& into) {
  const auto* bindings = page.is_object() && page.contains("results")
                             ? &page.at("results").at("bindings")
                             : nullptr;
  if (bindings == nullptr || !bindings->is_array()) {
    throw Error(ErrorKind::Fetch, fmt::format("{}: response is not SPARQL-JSON", source_name));
  }
  auto name = [&](const std::string& raw) { return local_names ? local_name(raw) : raw; };
  auto year = [](const std::string& raw) { return ingest::parse_year(raw); };

  for (const auto& row : *bindings) {
    const std::size_t line = ++into.rows;
    auto reject = [&](std::string reason) {
      into.rejects.push_back({std::string(source_name), line, std::move(reason)});
    };
    if (!row.is_object()) {
      reject("row is not an object");
      continue;
    }
    if (row.contains("source") || row.contains("target")) {
      const auto source = name(binding(row, "source"));
      const auto target = name(binding(row, "target"));
      if (source.empty() || target.empty()) {
        reject("empty subject or object id");
        continue;
      }
      if (source == target) {
        reject(fmt::format("self-loop at {}", source));
        continue;
      }
      into.edges.push_back({source, target});
      for (const auto& [id, prefix] : {std::pair{source, "source"}, std::pair{target, "target"}}) {
        const std::string p(prefix);
        into.actors.push_back({id, binding(row, (p + "Label").c_str()),
                               year(binding(row, (p + "Birth").c_str())),
                               year(binding(row, (p + "Death").c_str()))});
      }
    } else if (row.contains("id")) {
      const auto id = name(binding(row, "id"));
      if (id.empty()) {
        reject("empty subject id");
        continue;
      }
      into.actors.push_back(
          {id, binding(row, "label"), year(binding(row, "birth")), year(binding(row, "death"))});
    } else {
      reject("row binds neither source/target nor id");
    }
  }
  return bindings->size();
}

FetchResult fetch(const FetchConfig& config) {
  if (config.page_size == 0) throw Error(ErrorKind::InvalidArgument, "page size must be positive");
  if (config.max_attempts < 1) throw Error(ErrorKind::InvalidArgument, "max_attempts must be >= 1");
  const auto endpoint = split_url(config.endpoint_url);
  httplib::Client client(endpoint.host);
  client.set_connection_timeout(config.timeout);
  client.set_read_timeout(config.timeout);
  const httplib::Headers headers{{"Accept", "application/sparql-results+json"}};

  FetchResult result;
  for (std::size_t page = 0; page < config.max_pages; ++page) {
    const auto query = render_query(config.query_template, config.page_size, page * config.page_size);
    nlohmann::json body;
    auto backoff = config.initial_backoff;
    for (int attempt = 1;; ++attempt) {
      const auto started = std::chrono::steady_clock::now();
      httplib::Result response =
          config.use_post
              ? client.Post(endpoint.path, headers, httplib::Params{{"query", query}})
              : client.Get(endpoint.path, httplib::Params{{"query", query}}, headers);
      ++result.requests;
      const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::steady_clock::now() - started);
      std::string failure;
      if (!response) {
        failure = httplib::to_string(response.error());
      } else {
        spdlog::info("sparql page {} attempt {} -> HTTP {} in {} ms", page, attempt,
                     response->status, elapsed.count());
        if (response->status == 200) {
          try {
            body = nlohmann::json::parse(response->body);
            break;
          } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::Fetch, fmt::format("page {}: invalid JSON: {}", page, e.what()));
          }
        }
        const bool retryable = response->status >= 500 || response->status == 429;
        if (!retryable) {
          throw Error(ErrorKind::Fetch, fmt::format("page {}: HTTP {}", page, response->status));
        }
        failure = fmt::format("HTTP {}", response->status);
      }
      spdlog::warn("sparql page {} attempt {} failed: {}", page, attempt, failure);
      if (attempt >= config.max_attempts) {
        throw Error(ErrorKind::Fetch, fmt::format("page {}: giving up after {} attempts ({})",
                                                  page, attempt, failure));
      }
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    const std::size_t rows = absorb_page(body, config.endpoint_url, config.local_names, result);
    if (rows == 0) break;
    ++result.pages;
  }
  finalize(result);
  return result;
}

}  // namespace eranet::sparql
