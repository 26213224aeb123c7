#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>

#include <httplib.h>

#include "kslice/error.hpp"
#include "kslice/script.hpp"
#include "kslice/serialize.hpp"
#include "kslice/session.hpp"

namespace kslice::service {

using serialize::Json;

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

struct ServiceOptions {
  EngineOptions engine;
  /// Directory `sum` statements in submitted scripts resolve against.
  std::filesystem::path script_dir = ".";
};

/// In-memory session store. Each session has its own mutex, so commands on
/// one session are serialized while distinct sessions proceed in parallel.
class SessionService {
 public:
  explicit SessionService(ServiceOptions options = {}) : options_(std::move(options)), rng_(std::random_device{}()) {}

  Response create(const std::string& body) {
    return guarded([&] {
      const Json req = parse_body(body);
      std::optional<Session> session;
      if (req.contains("braid")) {
        const Json& b = req["braid"];
        const auto strands = serialize::detail::integer(b, "strands");
        if (strands < 1 || strands > 4096) serialize::detail::malformed("strand count out of range");
        const auto word = parse_braid_word(serialize::detail::text(b, "word"), static_cast<int>(strands));
        session.emplace(InitialKnot{word, std::nullopt}, options_.engine);
      } else if (req.contains("torus")) {
        const Json& t = req["torus"];
        const auto p = serialize::detail::integer(t, "p"), q = serialize::detail::integer(t, "q");
        if (p < 1 || p > 64 || q < -4096 || q > 4096) serialize::detail::malformed("torus parameters out of range");
        session.emplace(InitialKnot{torus_braid(static_cast<int>(p), static_cast<int>(q)),
                                    std::make_pair(static_cast<int>(p), static_cast<int>(q))},
                        options_.engine);
      } else if (req.contains("script")) {
        script::RunOptions ro;
        ro.engine = options_.engine;
        ro.base_dir = options_.script_dir;
        auto result = script::run_script(script::parse_script(serialize::detail::text(req, "script")), ro);
        if (!result.session) serialize::detail::malformed("script declares no knot or pieces");
        session.emplace(std::move(*result.session));
      } else if (req.contains("pieces")) {
        InitialPieces init{serialize::pieces_from_json(req["pieces"]),
                           req.contains("counters") ? serialize::counters_from_json(req["counters"]) : std::nullopt};
        session.emplace(std::move(init), options_.engine);
      } else {
        serialize::detail::malformed("request needs one of 'braid', 'torus', 'script' or 'pieces'");
      }
      auto entry = std::make_shared<Entry>(std::move(*session));
      const std::string id = fresh_id();
      {
        std::unique_lock lock(index_mutex_);
        sessions_.emplace(id, entry);
      }
      std::lock_guard lock(entry->mutex);
      return json_response(201, serialize::session_document(id, entry->session));
    });
  }

  Response get(const std::string& id) {
    return with_session(id, [&](Session& s) { return json_response(200, serialize::session_document(id, s)); });
  }

  Response move(const std::string& id, const std::string& body) {
    return guarded([&] {
      const Move m = serialize::move_from_json(parse_body(body));
      return with_session(id, [&](Session& s) {
        s.apply(m);
        return json_response(200, serialize::session_document(id, s));
      });
    });
  }

  Response undo(const std::string& id) {
    return with_session(id, [&](Session& s) {
      s.undo();
      return json_response(200, serialize::session_document(id, s));
    });
  }

  Response export_script(const std::string& id) {
    return with_session(id, [&](Session& s) { return Response{200, script::export_script(s), "text/plain"}; });
  }

  Response report(const std::string& id) {
    return with_session(id, [&](Session& s) {
      const auto r = s.state().report ? *s.state().report : s.verdict();
      return json_response(200, serialize::to_json(r));
    });
  }

  std::size_t size() const {
    std::shared_lock lock(index_mutex_);
    return sessions_.size();
  }

  /// HTTP status for an engine error code.
  static int status_for(ErrorCode code) {
    switch (code) {
      case ErrorCode::parse: return 400;
      case ErrorCode::unknown_session: return 404;
      case ErrorCode::empty_history:
      case ErrorCode::not_spin: return 409;
      case ErrorCode::internal:
      case ErrorCode::corrupted_state:
      case ErrorCode::digest_mismatch: return 500;
      default: return 422;
    }
  }

  static Response error_response(const Error& e) {
    Json err{{"reason", to_string(e.code())}, {"message", e.what()}};
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
      err["line"] = pe->line();
      err["column"] = pe->column();
      err["offset"] = pe->offset();
    } else if (const auto* se = dynamic_cast<const script::ScriptError*>(&e)) {
      err["line"] = se->pos().line;
      err["column"] = se->pos().column;
    }
    return json_response(status_for(e.code()), Json{{"error", err}});
  }

 private:
  struct Entry {
    explicit Entry(Session s) : session(std::move(s)) {}
    std::mutex mutex;
    Session session;
  };

  static Response json_response(int status, const Json& j) { return {status, j.dump(), "application/json"}; }

  static Json parse_body(const std::string& body) {
    try {
      return Json::parse(body);
    } catch (const Json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0, 0, 0);
    }
  }

  template <class F>
  static Response guarded(F&& f) {
    try {
      return f();
    } catch (const Error& e) {
      return error_response(e);
    } catch (const Json::exception& e) {
      return error_response(Error(ErrorCode::parse, std::string("malformed document: ") + e.what()));
    } catch (const std::exception& e) {
      return error_response(Error(ErrorCode::internal, e.what()));
    }
  }

  template <class F>
  Response with_session(const std::string& id, F&& f) {
    return guarded([&] {
      std::shared_ptr<Entry> entry;
      {
        std::shared_lock lock(index_mutex_);
        auto it = sessions_.find(id);
        if (it == sessions_.end()) throw Error(ErrorCode::unknown_session, "no session '" + id + "'");
        entry = it->second;
      }
      std::lock_guard lock(entry->mutex);
      return f(entry->session);
    });
  }

  std::string fresh_id() {
    std::lock_guard lock(rng_mutex_);
    static constexpr char hex[] = "0123456789abcdef";
    std::string id;
    for (int i = 0; i < 16; ++i) id += hex[rng_() % 16];
    return id;
  }

  ServiceOptions options_;
  mutable std::shared_mutex index_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex rng_mutex_;
  std::mt19937_64 rng_;
};

inline void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

/// Registers the session routes on an httplib server.
inline void mount(httplib::Server& server, SessionService& service) {
  server.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.create(req.body));
  });
  server.Get(R"(/sessions/([0-9a-f]+))", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get(req.matches[1]));
  });
  server.Post(R"(/sessions/([0-9a-f]+)/moves)", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.move(req.matches[1], req.body));
  });
  server.Post(R"(/sessions/([0-9a-f]+)/undo)", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.undo(req.matches[1]));
  });
  server.Get(R"(/sessions/([0-9a-f]+)/export)", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.export_script(req.matches[1]));
  });
  server.Get(R"(/sessions/([0-9a-f]+)/report)", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.report(req.matches[1]));
  });
}

}  // namespace kslice::service
