#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "oracles.hpp"

using namespace kslice;
using namespace kslice::script;

namespace {

const std::filesystem::path kScripts = KSLICE_SCRIPTS_DIR;

RunResult run_text(const std::string& text) {
  RunOptions o;
  o.base_dir = kScripts;
  return run_script(parse_script(text), o);
}

struct Caught {
  ErrorCode code = ErrorCode::internal;
  SourcePos where;
  std::string message;
  SourcePos pos() const { return where; }
  const char* what() const { return message.c_str(); }
};

Caught script_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const ScriptError& e) {
    return {e.code(), e.pos(), e.what()};
  } catch (const ParseError& e) {
    return {e.code(), {e.line(), e.column(), e.offset()}, e.what()};
  }
  return {};
}

}  // namespace

TEST(ScriptParse, TorusRecipe) {
  const auto s = parse_script("knot torus(3,8)\nblowup - strands 1..3 at end times 3\nendgame\nexpect b2 29 sigma 24\nverdict");
  ASSERT_EQ(s.statements.size(), 5u);
  EXPECT_EQ(std::get<KnotTorus>(s.statements[0].body), (KnotTorus{3, 8}));
  const auto& b = std::get<BlowupStrands>(s.statements[1].body);
  EXPECT_EQ(b.sign, -1);
  EXPECT_EQ(b.first, 1);
  EXPECT_EQ(b.last, 3);
  EXPECT_EQ(b.times, 3);
  EXPECT_EQ(s.statements[3].pos.line, 4u);
}

TEST(ScriptParse, BundledScriptsParse) {
  for (const char* name : {"fig8.kmove", "fig2knot.kmove", "torus_3_8.kmove", "fig8_sum.kmove"})
    EXPECT_NO_THROW(parse_script(read_file(kScripts / name))) << name;
}

TEST(ScriptParse, BadSignIsSyntaxError) {
  const auto e = script_error([] { parse_script("knot torus(3,8)\nblowup * strands 1..2"); });
  EXPECT_EQ(e.code, ErrorCode::parse);
  EXPECT_EQ(e.pos().line, 2u);
  EXPECT_EQ(e.pos().column, 8u);
  EXPECT_NE(std::string(e.what()).find("*"), std::string::npos);
}

TEST(ScriptParse, BraidErrorsPointInsideTheLiteral) {
  const auto e = script_error([] { parse_script("knot braid 3 \"s1 s3\""); });
  EXPECT_EQ(e.code, ErrorCode::parse);
  EXPECT_EQ(e.pos().line, 1u);
  EXPECT_EQ(e.pos().column, 19u);
}

TEST(ScriptParse, CommentsAndBlankLines) {
  const auto s = parse_script("# header\n\nknot braid 2 \"s1^3\"  # trefoil\n\n");
  EXPECT_EQ(s.statements.size(), 1u);
}

TEST(ScriptParse, RoundTripsThroughCanonicalText) {
  for (const char* name : {"fig8.kmove", "fig2knot.kmove", "torus_3_8.kmove", "fig8_sum.kmove"}) {
    const auto s = parse_script(read_file(kScripts / name));
    const auto text = to_string(s);
    EXPECT_EQ(parse_script(text), s) << name;
    EXPECT_EQ(to_string(parse_script(text)), text);
  }
}

TEST(ScriptParse, EveryMoveRoundTrips) {
  std::vector<Move> moves{
      BlowUpCoherent{-1, "K", {1, 3, InsertPosition::at_end(), TwistForm::forward}},
      BlowUpCoherent{1, "K", {2, 5, InsertPosition::at(17), TwistForm::reversed}},
      BlowUpCoherent{1, "P", {1, 2, InsertPosition::at_start(), TwistForm::forward}},
      BlowUpDeclared{-1, {{"K", 0}, {"c2", -3}}},
      BlowUpDeclared{1, {}},
      BlowUpMeridian{1, "c1", 8},
      BlowDown{"c3"},
      SlideAbstract{"c1", "c2", -1},
      ReplacePieceAsserted{"K", parse_braid_word("(s1 s2^-1)^2", 3), -7, "4_1"},
      ReplacePieceAsserted{"K", parse_braid_word("s1", 2), 0, ""},
      AssertUnknot{"c4"},
      Endgame{},
  };
  for (const auto& m : moves) {
    const Statement st = statement_for(m);
    const auto text = to_string(st);
    const auto back = parse_script(text);
    ASSERT_EQ(back.statements.size(), 1u) << text;
    EXPECT_EQ(back.statements[0], st) << text;
  }
}

TEST(ScriptRun, TorusThreeEight) {
  const auto r = run_script_file(kScripts / "torus_3_8.kmove");
  ASSERT_TRUE(r.report);
  EXPECT_EQ(r.report->b2, 29);
  EXPECT_EQ(r.report->sigma, 24);
  EXPECT_EQ(r.report->margin, -16);
  EXPECT_EQ(r.report->verdict, Verdict::not_smoothly_slice);
  EXPECT_EQ(r.checkpoints.size(), 2u);
}

TEST(ScriptRun, FigureEight) {
  const auto r = run_script_file(kScripts / "fig8.kmove");
  ASSERT_TRUE(r.report);
  EXPECT_EQ(r.report->b2, 11);
  EXPECT_EQ(r.report->sigma, 8);
  EXPECT_EQ(r.checkpoints.size(), 3u);
  EXPECT_EQ(r.report->arf_consistency, ArfConsistency::consistent);
}

TEST(ScriptRun, TopologicallySliceKnot) {
  const auto r = run_script_file(kScripts / "fig2knot.kmove");
  ASSERT_TRUE(r.report);
  EXPECT_EQ(r.report->b2, 21);
  EXPECT_EQ(r.report->sigma, 16);
  EXPECT_EQ(r.report->margin, -8);
  ASSERT_EQ(r.report->trust_points.size(), 1u);
  EXPECT_EQ(r.report->trust_points[0].detail, "4_1");
  EXPECT_EQ(r.checkpoints.size(), 4u);
}

TEST(ScriptRun, SumWithItself) {
  const auto r = run_script_file(kScripts / "fig8_sum.kmove");
  ASSERT_TRUE(r.report);
  EXPECT_EQ(r.report->b2, 23);
  EXPECT_EQ(r.report->sigma, 16);
  EXPECT_EQ(r.report->verdict, Verdict::inconclusive);
}

TEST(ScriptRun, ReducedStart) {
  const auto r = run_text("piece A unknot framing -2 char\npiece B unknot framing -16 char\ncounters b2 7 sigma -2\n"
                          "endgame\nexpect b2 21 sigma 16 margin -8\nverdict");
  ASSERT_TRUE(r.report);
  EXPECT_EQ(r.report->b2, 21);
}

TEST(ScriptRun, ExpectFailureShowsDiff) {
  const auto e = script_error([] { run_text("knot torus(3,8)\nblowup - strands 1..3\nexpect b2 5 sigma -1"); });
  EXPECT_EQ(e.code, ErrorCode::expect_failed);
  EXPECT_EQ(e.pos().line, 3u);
  const std::string what = e.what();
  EXPECT_NE(what.find("b2: expected 5, actual 2"), std::string::npos) << what;
  EXPECT_EQ(what.find("sigma"), std::string::npos) << what;
}

TEST(ScriptRun, CharacteristicDiff) {
  const auto e = script_error([] {
    run_text("knot braid 3 \"(s1 s2^-1)^2\"\nblowup - declared {K: 0}\nexpect char {c1}");
  });
  EXPECT_NE(std::string(e.what()).find("char: expected {c1}, actual {K c1}"), std::string::npos) << e.what();
}

TEST(ScriptRun, MoveErrorsCarryLine) {
  const auto e = script_error([] { run_text("knot torus(3,8)\nblowdown K"); });
  EXPECT_EQ(e.code, ErrorCode::framing_not_unit);
  EXPECT_EQ(e.pos().line, 2u);
}

TEST(ScriptRun, MissingFileIsIoError) {
  try {
    run_script_file(kScripts / "missing.kmove");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io);
  }
}

TEST(ScriptRun, SumRecursionIsBounded) {
  const auto dir = std::filesystem::temp_directory_path() / "kslice_loop";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "loop.kmove") << "knot braid 1 \"\"\nendgame\nsum \"loop.kmove\"\n";
  EXPECT_THROW(run_script_file(dir / "loop.kmove"), Error);
  std::filesystem::remove_all(dir);
}

TEST(ScriptExport, ReRunReproducesDigest) {
  for (const char* name : {"fig8.kmove", "fig2knot.kmove", "torus_3_8.kmove"}) {
    const auto r = run_script_file(kScripts / name);
    const auto exported = export_script(*r.session);
    const auto again = run_text(exported);
    EXPECT_EQ(again.session->digest(), r.session->digest()) << name << "\n" << exported;
    EXPECT_EQ(export_script(*again.session), exported);
  }
}

TEST(ScriptRun, Deterministic) {
  const auto a = run_script_file(kScripts / "fig2knot.kmove");
  const auto b = run_script_file(kScripts / "fig2knot.kmove");
  EXPECT_EQ(a.session->digest(), b.session->digest());
  EXPECT_EQ(*a.report, *b.report);
}
