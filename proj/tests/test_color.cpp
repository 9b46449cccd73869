#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <json.hpp>
#include <thread>

#include "dvkit/metadata.hpp"
#include "support.hpp"

using namespace dvkit;
using namespace dvkit::metadata;

TEST_CASE("canonical colors") {
  CHECK(canonical_color("Red") == "red");
  CHECK(canonical_color("crimson") == "red");
  CHECK(canonical_color("It is Navy.") == "blue");
  CHECK(canonical_color("grey") == "gray");
  CHECK_THROWS_AS(canonical_color("plaid"), UnrecognizedColor);
  CHECK(canonical_palette().size() == 14);
}

TEST_CASE("offline table") {
  const auto a = OfflineColorAnnotator::from_json_file(testing::data_file("colors_example.json"));
  DemoRecord r;
  r.id = "demo-0003";
  CHECK(annotate_color(r, a) == "gray");
  r.id = "missing";
  CHECK_THROWS_AS(annotate_color(r, a), AnnotatorUnavailable);
}

TEST_CASE("http annotator") {
  httplib::Server server;
  std::atomic<int> calls{0};
  std::string last_object;
  server.Post("/color", [&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    const auto j = nlohmann::json::parse(req.body);
    last_object = j.at("object").get<std::string>();
    CHECK(j.at("image_ref").get<std::string>() == j.at("id").get<std::string>() + "#0");
    res.set_content(nlohmann::json{{"color", "Scarlet"}}.dump(), "application/json");
  });
  server.Post("/flaky", [&](const httplib::Request&, httplib::Response& res) {
    if (++calls % 2 == 1) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"color":"blue"})", "application/json");
  });
  server.Post("/missing", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 404;
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const std::string base = "http://127.0.0.1:" + std::to_string(port);

  DemoRecord r;
  r.id = "demo-9";
  r.annotations = Annotations{};
  r.annotations->target_object = "mug";

  HttpColorAnnotator ok(base + "/color", 2000, 0);
  CHECK(annotate_color(r, ok) == "red");
  CHECK(last_object == "mug");

  calls = 0;
  HttpColorAnnotator flaky(base + "/flaky", 2000, 2);
  CHECK(annotate_color(r, flaky) == "blue");
  CHECK(calls == 2);

  calls = 0;
  HttpColorAnnotator missing(base + "/missing", 2000, 3);
  CHECK_THROWS_AS(annotate_color(r, missing), AnnotatorUnavailable);
  CHECK(calls == 1);  // client errors are not retried

  server.stop();
  th.join();

  HttpColorAnnotator down(base + "/color", 300, 1);
  CHECK_THROWS_AS(annotate_color(r, down), AnnotatorUnavailable);
}

TEST_CASE("annotator from environment") {
  unsetenv("DVC_ANNOTATOR_URL");
  CHECK(HttpColorAnnotator::from_env() == nullptr);
  setenv("DVC_ANNOTATOR_URL", "http://127.0.0.1:9/c", 1);
  setenv("DVC_ANNOTATOR_TIMEOUT_MS", "250", 1);
  const auto a = HttpColorAnnotator::from_env();
  REQUIRE(a != nullptr);
  CHECK(a->timeout_ms() == 250);
  CHECK(a->retries() == 2);
  unsetenv("DVC_ANNOTATOR_URL");
  unsetenv("DVC_ANNOTATOR_TIMEOUT_MS");
}

TEST_CASE("full annotation pipeline") {
  const auto vectors = TableEmbeddings::from_file(testing::data_file("household_vectors.txt"));
  OfflineColorAnnotator colors(std::map<std::string, std::string>{{"d", "orange"}});
  AnnotateConfig cfg;
  cfg.lexicon = &VerbLexicon::defaults();
  cfg.embeddings = &vectors;
  cfg.annotator = &colors;
  auto r = testing::make_demo("d", 80, 30, 60);
  // 45 degrees up, straight ahead of the table center.
  r.camera_extrinsics.pos = {1, 0, 1};
  const auto a = annotate(r, cfg);
  CHECK(a.target_object == "carrot");
  REQUIRE(a.object_position.has_value());
  CHECK(a.object_position->x == r.steps[30].ee_pos.x);
  CHECK(a.object_color == "orange");
  CHECK(a.camera_bin == "agent-front");
  r.annotations = a;
  CHECK(parse_record(to_json_line(r), 1) == r);
}
