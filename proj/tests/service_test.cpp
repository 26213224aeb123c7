#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "oracles.hpp"

using namespace kslice;
using serialize::Json;
using service::SessionService;

namespace {

const std::filesystem::path kScripts = KSLICE_SCRIPTS_DIR;

std::string id_of(const service::Response& r) { return Json::parse(r.body)["id"]; }

std::string reason_of(const service::Response& r) { return Json::parse(r.body)["error"]["reason"]; }

std::int64_t framing_in(const Json& doc, const std::string& id) {
  for (const auto& c : doc["state"]["components"])
    if (c["id"] == id) return c["framing"];
  return 999;
}

}  // namespace

TEST(Service, CreateFromBraid) {
  SessionService svc;
  const auto r = svc.create(R"({"braid":{"strands":3,"word":"(s1 s2)^8"}})");
  ASSERT_EQ(r.status, 201) << r.body;
  const auto doc = Json::parse(r.body);
  EXPECT_EQ(doc["state"]["b2"], 1);
  EXPECT_EQ(doc["state"]["sigma"], 0);
  EXPECT_EQ(doc["state"]["characteristic"], Json::array({"K"}));
  EXPECT_EQ(svc.size(), 1u);
}

TEST(Service, CreateFromScript) {
  SessionService svc;
  const Json req{{"script", script::read_file(kScripts / "fig8.kmove")}};
  const auto r = svc.create(req.dump());
  ASSERT_EQ(r.status, 201) << r.body;
  const auto doc = Json::parse(r.body);
  EXPECT_EQ(doc["state"]["b2"], 11);
  EXPECT_EQ(doc["state"]["sigma"], 8);
  EXPECT_EQ(doc["state"]["report"]["verdict"], "not_smoothly_slice");
}

TEST(Service, CreateErrors) {
  SessionService svc;
  const auto link = svc.create(R"({"braid":{"strands":2,"word":"s1^2"}})");
  EXPECT_EQ(link.status, 422);
  EXPECT_EQ(reason_of(link), "multi_component");
  const auto bad_json = svc.create("{nope");
  EXPECT_EQ(bad_json.status, 400);
  EXPECT_EQ(reason_of(bad_json), "parse_error");
  const auto bad_word = svc.create(R"({"braid":{"strands":3,"word":"(s1 s2"}})");
  EXPECT_EQ(bad_word.status, 400);
  EXPECT_TRUE(Json::parse(bad_word.body)["error"].contains("offset"));
  const auto bad_script = svc.create(R"({"script":"knot torus(3,8)\nblowup * strands 1..2"})");
  EXPECT_EQ(bad_script.status, 400);
  EXPECT_EQ(Json::parse(bad_script.body)["error"]["line"], 2);
  EXPECT_EQ(svc.create(R"({"nothing":1})").status, 400);
  EXPECT_EQ(svc.size(), 0u);
}

TEST(Service, MoveUndoExportReport) {
  SessionService svc;
  const auto id = id_of(svc.create(R"({"torus":{"p":3,"q":4}})"));
  auto r = svc.move(id, R"({"type":"blowup_coherent","sign":-1,"strands":[1,3],"at":"end"})");
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(framing_in(Json::parse(r.body), "K"), -9);

  EXPECT_EQ(svc.report(id).status, 409);
  EXPECT_EQ(reason_of(svc.report(id)), "not_spin");

  r = svc.move(id, R"({"type":"endgame"})");
  ASSERT_EQ(r.status, 200) << r.body;
  const auto doc = Json::parse(r.body);
  EXPECT_EQ(doc["state"]["report"]["b2"], 9);
  EXPECT_EQ(doc["state"]["report"]["sigma"], 8);
  EXPECT_EQ(doc["state"]["report"]["margin"], -16);

  const auto report = svc.report(id);
  EXPECT_EQ(report.status, 200);
  EXPECT_EQ(Json::parse(report.body)["verdict"], "not_smoothly_slice");

  const auto exported = svc.export_script(id);
  EXPECT_EQ(exported.content_type, "text/plain");
  const auto rerun = script::run_script(script::parse_script(exported.body), {});
  EXPECT_EQ(rerun.session->digest(), doc["state"]["digest"]);

  r = svc.undo(id);
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(Json::parse(r.body)["state"]["b2"], 2);
  EXPECT_EQ(svc.undo(id).status, 200);
  const auto empty = svc.undo(id);
  EXPECT_EQ(empty.status, 409);
  EXPECT_EQ(reason_of(empty), "empty_history");
}

TEST(Service, MoveErrors) {
  SessionService svc;
  const auto id = id_of(svc.create(R"({"torus":{"p":3,"q":8}})"));
  const auto r = svc.move(id, R"({"type":"blowdown","component":"K"})");
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(reason_of(r), "framing_not_unit");
  EXPECT_EQ(svc.move(id, R"({"type":"teleport"})").status, 400);
  EXPECT_EQ(svc.move(id, "[").status, 400);
  const auto missing = svc.move("ffff", R"({"type":"endgame"})");
  EXPECT_EQ(missing.status, 404);
  EXPECT_EQ(reason_of(missing), "unknown_session");
  EXPECT_EQ(svc.get("ffff").status, 404);
  // failed moves leave the session untouched
  EXPECT_TRUE(Json::parse(svc.get(id).body)["history"].empty());
}

TEST(Service, LinksFollowState) {
  SessionService svc;
  const auto created = Json::parse(svc.create(R"({"braid":{"strands":1,"word":""}})").body);
  std::set<std::string> rels;
  for (const auto& l : created["links"]) rels.insert(l["rel"].get<std::string>());
  EXPECT_FALSE(rels.count("undo"));
  EXPECT_FALSE(rels.count("report"));
  const auto after = Json::parse(svc.move(created["id"], R"({"type":"endgame"})").body);
  rels.clear();
  for (const auto& l : after["links"]) rels.insert(l["rel"].get<std::string>());
  EXPECT_TRUE(rels.count("undo"));
  EXPECT_TRUE(rels.count("report"));
}

TEST(Service, HttpConcurrentClients) {
  SessionService svc;
  httplib::Server server;
  service::mount(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  std::atomic<int> failures{0};
  std::vector<std::thread> clients;
  for (int c = 0; c < 8; ++c)
    clients.emplace_back([&, c] {
      httplib::Client cli("127.0.0.1", port);
      const int p = 3 + 2 * (c % 3);
      const Json body{{"torus", {{"p", p}, {"q", 2 * p + 1}}}};
      auto res = cli.Post("/sessions", body.dump(), "application/json");
      if (!res || res->status != 201) {
        ++failures;
        return;
      }
      const std::string id = Json::parse(res->body)["id"];
      for (int k = 0; k < 2; ++k) {
        const Json mv{{"type", "blowup_coherent"}, {"sign", -1}, {"strands", {1, p}}, {"at", "end"}};
        res = cli.Post("/sessions/" + id + "/moves", mv.dump(), "application/json");
        if (!res || res->status != 200) ++failures;
      }
      res = cli.Post("/sessions/" + id + "/moves", R"({"type":"endgame"})", "application/json");
      if (!res || res->status != 200) {
        ++failures;
        return;
      }
      const auto expected = oracle::torus_closed_form(p, 2);
      const auto rep = cli.Get("/sessions/" + id + "/report");
      if (!rep || rep->status != 200) {
        ++failures;
        return;
      }
      const auto j = Json::parse(rep->body);
      if (j["b2"] != expected.b2 || j["sigma"] != expected.sigma || j["margin"] != expected.margin) ++failures;
      const auto exp = cli.Get("/sessions/" + id + "/export");
      if (!exp || exp->status != 200 || exp->body.find("endgame") == std::string::npos) ++failures;
      const auto missing = cli.Get("/sessions/0123/report");
      if (!missing || missing->status != 404) ++failures;
    });
  for (auto& t : clients) t.join();
  server.stop();
  listener.join();
  EXPECT_EQ(failures.load(), 0);
  EXPECT_EQ(svc.size(), 8u);
}

TEST(Service, ConcurrentMovesOnOneSessionSerialize) {
  SessionService svc;
  const auto id = id_of(svc.create(R"({"braid":{"strands":1,"word":""}})"));
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&] {
      for (int i = 0; i < 10; ++i) svc.move(id, R"({"type":"blowup_declared","sign":-1,"linking":{}})");
    });
  for (auto& t : threads) t.join();
  const auto doc = Json::parse(svc.get(id).body);
  EXPECT_EQ(doc["history"].size(), 80u);
  EXPECT_EQ(doc["state"]["b2"], 81);
  EXPECT_NO_THROW(serialize::session_from_document(doc));
}
