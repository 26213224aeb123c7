#include <cstdio>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "kslice/kslice.hpp"

namespace {

using namespace kslice;

enum Exit { ok = 0, io_failure = 1, parse_failure = 2, move_failure = 3, expect_failure = 4, internal_failure = 5 };

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::io: return io_failure;
    case ErrorCode::parse: return parse_failure;
    case ErrorCode::expect_failed: return expect_failure;
    case ErrorCode::internal:
    case ErrorCode::corrupted_state:
    case ErrorCode::digest_mismatch: return internal_failure;
    default: return move_failure;
  }
}

std::string summary_line(const ObstructionReport& r) {
  std::ostringstream out;
  out << "b2=" << r.b2 << " sigma=" << r.sigma << " margin=" << r.margin << " verdict=" << to_string(r.verdict)
      << " trust_points=" << r.trust_points.size();
  if (!r.trust_points.empty()) {
    out << " (";
    for (std::size_t i = 0; i < r.trust_points.size(); ++i)
      out << (i ? ", " : "") << to_string(r.trust_points[i].kind) << ": " << r.trust_points[i].detail;
    out << ")";
  }
  return out.str();
}

int cmd_analyze(const std::string& path, bool json) {
  const auto result = script::run_script_file(path);
  std::optional<ObstructionReport> report = result.report;
  const auto& state = result.session->state();
  if (!report && state.framed.characteristic_indices().empty()) report = make_report(state);

  if (json) {
    serialize::Json checkpoints = serialize::Json::array();
    for (const auto& c : result.checkpoints) checkpoints.push_back({{"line", c.line}, {"statement", c.text}});
    serialize::Json doc{{"report", report ? serialize::to_json(*report) : serialize::Json(nullptr)},
                        {"checkpoints", checkpoints},
                        {"state", serialize::to_json(state)}};
    std::cout << doc.dump(2) << "\n";
    return ok;
  }
  if (!report) {
    const auto& f = state.framed;
    std::cout << "b2=" << f.b2 << " sigma=" << f.sigma << " margin=" << obstruction_margin(f.b2, f.sigma)
              << " verdict=pending (characteristic link not empty)\n";
  } else {
    std::cout << summary_line(*report) << "\n";
    std::cout << "declarations=" << report->declarations.size() << "\n";
    for (const auto& d : report->declarations) std::cout << "  " << to_string(d.kind) << ": " << d.detail << "\n";
    if (report->arf)
      std::cout << "arf=" << *report->arf << " consistency=" << to_string(report->arf_consistency) << "\n";
    for (const auto& w : report->warnings) std::cout << "warning: " << w << "\n";
  }
  std::cout << "checkpoints=" << result.checkpoints.size() << " passed\n";
  return ok;
}

int cmd_invariants(int strands, const std::string& word_text) {
  const auto word = parse_braid_word(word_text, strands);
  const auto delta = alexander_polynomial(word);
  std::cout << "delta=" << to_string(delta) << " det=" << determinant(word) << " arf=" << arf(word) << "\n";
  return ok;
}

struct TableRow {
  int p = 0, k = 0;
  std::int64_t b2 = 0, sigma = 0, margin = 0;
  Verdict verdict = Verdict::inconclusive;
};

TableRow torus_row(int p, int k) {
  TableRow row{p, k};
  const std::int64_t closed_b2 = std::int64_t{k} * p * p + k - 1;
  const std::int64_t closed_sigma = std::int64_t{k} * p * p - k;
  for (int q : {k * p - 1, k * p + 1}) {
    Session s(InitialKnot{torus_braid(p, q), std::make_pair(p, q)});
    for (int i = 0; i < k; ++i) s.apply(BlowUpCoherent{-1, "K", {1, p, InsertPosition::at_end(), TwistForm::forward}});
    s.apply(Endgame{});
    const auto& r = *s.state().report;
    if (r.b2 != closed_b2 || r.sigma != closed_sigma)
      throw Error(ErrorCode::internal, "T(" + std::to_string(p) + "," + std::to_string(q) + "): pipeline gives (" +
                                           std::to_string(r.b2) + "," + std::to_string(r.sigma) +
                                           ") but the closed form gives (" + std::to_string(closed_b2) + "," +
                                           std::to_string(closed_sigma) + ")");
    row.b2 = r.b2;
    row.sigma = r.sigma;
    row.margin = r.margin;
    row.verdict = r.verdict;
  }
  return row;
}

int cmd_table(const std::vector<int>& ps, const std::vector<int>& ks, bool csv) {
  for (int p : ps) {
    if (p < 3)
      throw Error(ErrorCode::invalid_argument, "p = " + std::to_string(p) + " is below 3; the recipe needs odd p >= 3");
    if (p % 2 == 0)
      throw Error(ErrorCode::invalid_argument,
                  "p = " + std::to_string(p) +
                      " is even: a blow-up circle around p strands would join the characteristic link");
  }
  for (int k : ks)
    if (k < 1) throw Error(ErrorCode::invalid_argument, "k must be at least 1");

  std::vector<std::future<TableRow>> jobs;
  for (int p : ps)
    for (int k : ks) jobs.push_back(std::async(std::launch::async, torus_row, p, k));
  if (csv) std::cout << "p,k,b2,sigma,margin,verdict\n";
  else std::cout << std::setw(4) << "p" << std::setw(4) << "k" << std::setw(8) << "b2" << std::setw(8) << "sigma"
                 << std::setw(8) << "margin" << "  verdict\n";
  for (auto& job : jobs) {
    const auto r = job.get();
    if (csv)
      std::cout << r.p << "," << r.k << "," << r.b2 << "," << r.sigma << "," << r.margin << "," << to_string(r.verdict)
                << "\n";
    else
      std::cout << std::setw(4) << r.p << std::setw(4) << r.k << std::setw(8) << r.b2 << std::setw(8) << r.sigma
                << std::setw(8) << r.margin << "  " << to_string(r.verdict) << "\n";
  }
  return ok;
}

int cmd_serve(const std::string& host, int port, const std::string& script_dir) {
  service::ServiceOptions options;
  options.script_dir = script_dir;
  service::SessionService sessions(options);
  httplib::Server server;
  service::mount(server, sessions);
  std::cerr << "listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) throw Error(ErrorCode::io, "cannot listen on " + host + ":" + std::to_string(port));
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kirby-calculus slicing obstruction engine"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "run a .kmove script and report");
  std::string script_path;
  bool json = false;
  analyze->add_option("file", script_path, "script path")->required();
  analyze->add_flag("--json", json, "emit a JSON document");

  auto* invariants = app.add_subcommand("invariants", "Alexander polynomial, determinant and Arf of a braid closure");
  int strands = 0;
  std::string word;
  invariants->add_option("--strands", strands, "strand count")->required()->check(CLI::Range(1, 4096));
  invariants->add_option("--word", word, "braid word, e.g. \"(s1 s2^-1)^2\"")->required();

  auto* table = app.add_subcommand("table", "tabulate a family");
  auto* torus = table->add_subcommand("torus", "torus knots T(p, kp+-1)");
  table->require_subcommand(1);
  std::vector<int> ps, ks;
  bool csv = false;
  torus->add_option("--p", ps, "odd p values")->required()->delimiter(',');
  torus->add_option("--k", ks, "k values")->required()->delimiter(',');
  torus->add_flag("--csv", csv, "comma-separated output");

  auto* serve = app.add_subcommand("serve", "run the HTTP session service");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string script_dir = ".";
  serve->add_option("--port", port, "port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "bind address");
  serve->add_option("--script-dir", script_dir, "base directory for sum statements");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return cmd_analyze(script_path, json);
    if (*invariants) return cmd_invariants(strands, word);
    if (*torus) return cmd_table(ps, ks, csv);
    if (*serve) return cmd_serve(host, port, script_dir);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return internal_failure;
  }
  return ok;
}
