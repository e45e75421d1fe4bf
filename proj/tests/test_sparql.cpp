#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "eranet/error.hpp"
#include "eranet/sparql.hpp"

namespace eranet::sparql {
namespace {

using nlohmann::json;

// Serves canned SPARQL-JSON pages from a background thread.
class FakeEndpoint {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  explicit FakeEndpoint(Handler handler) {
    server_.Get("/sparql", handler);
    server_.Post("/sparql", handler);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/sparql"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

json edge_page(std::size_t first, std::size_t count) {
  json bindings = json::array();
  for (std::size_t i = first; i < first + count; ++i) {
    bindings.push_back({{"source", {{"type", "uri"}, {"value", "http://yago-knowledge.org/resource/a" + std::to_string(i)}}},
                        {"target", {{"type", "uri"}, {"value", "http://yago-knowledge.org/resource/b" + std::to_string(i)}}},
                        {"sourceBirth", {{"value", "-0384-01-01"}}}});
  }
  return {{"head", {{"vars", {"source", "target"}}}}, {"results", {{"bindings", bindings}}}};
}

FetchConfig config_for(const FakeEndpoint& ep) {
  FetchConfig c;
  c.endpoint_url = ep.url();
  c.query_template = "SELECT ?source ?target WHERE { ?source <influences> ?target } LIMIT {limit} OFFSET {offset}";
  c.page_size = 100;
  c.initial_backoff = std::chrono::milliseconds(1);
  c.timeout = std::chrono::seconds(5);
  return c;
}

TEST(RenderQuery, SubstitutesPlaceholders) {
  EXPECT_EQ(render_query("L {limit} O {offset}", 10, 20), "L 10 O 20");
  EXPECT_THROW((void)render_query("no placeholders", 1, 0), Error);
}

TEST(LocalName, StripsNamespace) {
  EXPECT_EQ(local_name("http://yago-knowledge.org/resource/Aristotle"), "Aristotle");
  EXPECT_EQ(local_name("<http://example.org/x#Kant>"), "Kant");
  EXPECT_EQ(local_name("plain"), "plain");
}

TEST(Fetch, PaginatesUntilEmptyPage) {
  std::atomic<int> calls{0};
  FakeEndpoint ep([&](const httplib::Request& req, httplib::Response& res) {
    const auto query = req.get_param_value("query");
    const int page = calls++;
    ASSERT_NE(query.find("OFFSET " + std::to_string(page * 100)), std::string::npos);
    const std::size_t rows = page < 2 ? 100 : 0;
    res.set_content(edge_page(static_cast<std::size_t>(page) * 100, rows).dump(), "application/sparql-results+json");
  });
  const auto result = fetch(config_for(ep));
  EXPECT_EQ(result.edges.size(), 200u);
  EXPECT_EQ(result.pages, 2u);
  EXPECT_EQ(result.requests, 3u);
  EXPECT_EQ(result.actors.size(), 400u);
  EXPECT_EQ(result.edges.front().source, "a0");
  EXPECT_EQ(result.actors.front().birth, -384);
}

TEST(Fetch, PostMethod) {
  std::atomic<int> posts{0};
  FakeEndpoint ep([&](const httplib::Request& req, httplib::Response& res) {
    if (req.method == "POST") ++posts;
    res.set_content(edge_page(0, posts == 1 ? 3 : 0).dump(), "application/json");
  });
  auto cfg = config_for(ep);
  cfg.use_post = true;
  EXPECT_EQ(fetch(cfg).edges.size(), 3u);
  EXPECT_EQ(posts.load(), 2);
}

TEST(Fetch, ServerErrorsExhaustRetries) {
  std::atomic<int> calls{0};
  FakeEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 500;
  });
  try {
    (void)fetch(config_for(ep));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Fetch);
  }
  EXPECT_EQ(calls.load(), 3);
}

TEST(Fetch, TransientErrorRecovers) {
  std::atomic<int> calls{0};
  FakeEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
    const int n = calls++;
    if (n == 0) {
      res.status = 503;
      return;
    }
    res.set_content(edge_page(0, n == 1 ? 5 : 0).dump(), "application/json");
  });
  EXPECT_EQ(fetch(config_for(ep)).edges.size(), 5u);
}

TEST(Fetch, ClientErrorIsImmediate) {
  std::atomic<int> calls{0};
  FakeEndpoint ep([&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 400;
  });
  EXPECT_THROW((void)fetch(config_for(ep)), Error);
  EXPECT_EQ(calls.load(), 1);
}

TEST(AbsorbPage, EmptySubjectRejected) {
  json page = {{"results",
                {{"bindings",
                  {{{"id", {{"value", ""}}}, {"label", {{"value", "nobody"}}}},
                   {{"id", {{"value", "http://x/Kant"}}}, {"birth", {{"value", "1724"}}}},
                   {{"source", {{"value", ""}}}, {"target", {{"value", "http://x/Kant"}}}}}}}}};
  FetchResult result;
  EXPECT_EQ(absorb_page(page, "fixture", true, result), 3u);
  ASSERT_EQ(result.actors.size(), 1u);
  EXPECT_EQ(result.actors[0].id, "Kant");
  EXPECT_EQ(result.actors[0].birth, 1724);
  EXPECT_TRUE(result.edges.empty());
  ASSERT_EQ(result.rejects.size(), 2u);
  EXPECT_EQ(result.rejects[0].line, 1u);
  EXPECT_EQ(result.rejects[1].line, 3u);
}

TEST(AbsorbPage, NotSparqlJson) {
  FetchResult result;
  EXPECT_THROW((void)absorb_page(json::object(), "fixture", true, result), Error);
}

}  // namespace
}  // namespace eranet::sparql
