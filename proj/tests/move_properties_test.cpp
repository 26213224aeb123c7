#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace kslice;

namespace {

BraidWord random_knot(std::mt19937& rng) {
  while (true) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const auto w = n == 1 ? BraidWord(1, {}) : oracle::random_braid(rng, n, static_cast<int>(rng() % 10));
    if (oracle::is_knot(w)) return w;
  }
}

int pick(std::mt19937& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::string random_component(std::mt19937& rng, const SessionState& s) {
  return s.framed.components[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(s.framed.size()) - 1))].id;
}

Move random_move(std::mt19937& rng, const SessionState& s) {
  const int sign = rng() % 2 ? 1 : -1;
  switch (pick(rng, 0, 5)) {
    case 0: {
      if (!s.pieces.empty() && !s.pieces[0].stale) {
        const auto& w = s.pieces[0].word;
        const int a = pick(rng, 1, w.strand_count());
        const int b = pick(rng, a, w.strand_count());
        const auto at = InsertPosition::at(static_cast<std::size_t>(pick(rng, 0, static_cast<int>(w.size()))));
        return BlowUpCoherent{sign, s.pieces[0].id, {a, b, at, rng() % 2 ? TwistForm::forward : TwistForm::reversed}};
      }
      [[fallthrough]];
    }
    case 1: {
      std::vector<std::pair<std::string, std::int64_t>> lk;
      for (const auto& c : s.framed.components)
        if (rng() % 3 == 0) lk.emplace_back(c.id, pick(rng, -2, 2));
      return BlowUpDeclared{sign, lk};
    }
    case 2: return BlowUpMeridian{sign, random_component(rng, s), pick(rng, 1, 3)};
    case 3: {
      for (const auto& c : s.framed.components)
        if (std::llabs(s.framed.framing(s.framed.index_of(c.id))) == 1 && c.unknot != UnknotKnowledge::unknown)
          return BlowDown{c.id};
      return BlowUpDeclared{sign, {}};
    }
    default: {
      if (s.framed.size() < 2) return BlowUpDeclared{sign, {}};
      const auto i = random_component(rng, s);
      auto j = random_component(rng, s);
      while (j == i) j = random_component(rng, s);
      return SlideAbstract{i, j, sign};
    }
  }
}

}  // namespace

TEST(MoveProperties, RandomSequences) {
  std::mt19937 rng(4242);
  int sequences = 0, moves = 0, blowups = 0, slides = 0, blowdowns = 0;
  for (; sequences < 1000; ++sequences) {
    Session session(InitialKnot{random_knot(rng), std::nullopt});
    const int length = pick(rng, 1, 12);
    for (int step = 0; step < length; ++step) {
      const auto& before = session.state();
      if (before.framed.size() > 9) break;
      const Move move = random_move(rng, before);
      const auto sig_before = exact_signature(before.framed.linking);
      const auto b2_before = before.framed.b2;
      std::int64_t unit = 0;
      if (const auto* d = std::get_if<BlowDown>(&move)) unit = before.framed.framing(before.framed.index_of(d->component));
      try {
        session.apply(move);
      } catch (const Error& e) {
        ASSERT_NE(e.code(), ErrorCode::corrupted_state) << e.what();
        continue;
      }
      ++moves;
      const auto& after = session.state().framed;
      const int delta = exact_signature(after.linking) - sig_before;
      ASSERT_EQ(exact_signature(after.linking), after.sigma);
      ASSERT_EQ(static_cast<std::int64_t>(after.size()), after.b2);
      ASSERT_TRUE(is_characteristic(after.linking, after.mask()));
      ASSERT_TRUE(characteristic_sublinks(after.linking).contains(Gf2Vector::from_bools(after.mask())));
      std::visit(detail::overloaded{
                     [&](const BlowUpCoherent& m) { ++blowups; EXPECT_EQ(delta, m.sign); EXPECT_EQ(after.b2, b2_before + 1); },
                     [&](const BlowUpDeclared& m) { ++blowups; EXPECT_EQ(delta, m.sign); EXPECT_EQ(after.b2, b2_before + 1); },
                     [&](const BlowUpMeridian& m) { ++blowups; EXPECT_EQ(delta, m.sign * m.times); },
                     [&](const BlowDown&) { ++blowdowns; EXPECT_EQ(delta, -unit); EXPECT_EQ(after.b2, b2_before - 1); },
                     [&](const SlideAbstract&) { ++slides; EXPECT_EQ(delta, 0); EXPECT_EQ(after.b2, b2_before); },
                     [](const auto&) {},
                 },
                 move);
    }
    const auto replayed = Session::replay(initial_state(session.initial()), session.log());
    ASSERT_EQ(state_digest(replayed), session.digest());
    ASSERT_EQ(replayed, session.state());
  }
  EXPECT_EQ(sequences, 1000);
  EXPECT_GT(moves, 3000);
  EXPECT_GT(blowups, 500);
  EXPECT_GT(slides, 300);
  EXPECT_GT(blowdowns, 100);
}

TEST(MoveProperties, SplitBlowUpThenBlowDownIsIdentity) {
  std::mt19937 rng(17);
  for (int i = 0; i < 300; ++i) {
    auto s = init_from_knot(random_knot(rng));
    for (int k = pick(rng, 0, 3); k > 0; --k) s = apply_move(s, BlowUpDeclared{rng() % 2 ? 1 : -1, {{"K", pick(rng, -2, 2)}}});
    const int sign = rng() % 2 ? 1 : -1;
    auto t = apply_move(s, BlowUpDeclared{sign, {}});
    const std::string circle = t.framed.components.back().id;
    t = apply_move(t, BlowDown{circle});
    EXPECT_EQ(t.framed.linking, s.framed.linking);
    EXPECT_EQ(t.framed.mask(), s.framed.mask());
    EXPECT_EQ(t.framed.b2, s.framed.b2);
    EXPECT_EQ(t.framed.sigma, s.framed.sigma);
  }
}

TEST(MoveProperties, SlideIsACongruence) {
  std::mt19937 rng(18);
  for (int i = 0; i < 300; ++i) {
    std::vector<PieceDeclaration> decls;
    const int n = pick(rng, 2, 6);
    for (int k = 0; k < n; ++k) decls.push_back({"u" + std::to_string(k), std::nullopt, pick(rng, -4, 4), false});
    // choose a consistent mask
    IntMatrix diag(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) diag(k, k) = decls[static_cast<std::size_t>(k)].framing;
    const auto mask = characteristic_sublinks(diag).particular.to_bools();
    for (int k = 0; k < n; ++k) decls[static_cast<std::size_t>(k)].characteristic = mask[static_cast<std::size_t>(k)];
    auto s = init_from_pieces(decls, std::nullopt);
    const auto a = pick(rng, 0, n - 1);
    auto b = pick(rng, 0, n - 1);
    if (a == b) b = (a + 1) % n;
    const int eta = rng() % 2 ? 1 : -1;
    const auto t = apply_move(s, SlideAbstract{decls[static_cast<std::size_t>(a)].id, decls[static_cast<std::size_t>(b)].id, eta});
    IntMatrix e = IntMatrix::diagonal(std::vector<std::int64_t>(static_cast<std::size_t>(n), 1));
    e(b, a) = eta;  // column a of E is e_a + eta e_b
    EXPECT_EQ(t.framed.linking, e.transposed() * s.framed.linking * e);
    const auto back = apply_move(t, SlideAbstract{decls[static_cast<std::size_t>(a)].id, decls[static_cast<std::size_t>(b)].id, -eta});
    EXPECT_EQ(back.framed.linking, s.framed.linking);
    EXPECT_EQ(back.framed.mask(), s.framed.mask());
  }
}

TEST(MoveProperties, UndoMatchesPrefixReplay) {
  std::mt19937 rng(19);
  for (int i = 0; i < 100; ++i) {
    Session s(InitialKnot{random_knot(rng), std::nullopt});
    std::vector<std::string> digests{s.digest()};
    for (int step = 0; step < 8; ++step) {
      try {
        s.apply(random_move(rng, s.state()));
        digests.push_back(s.digest());
      } catch (const Error&) {
      }
    }
    while (!s.log().empty()) {
      s.undo();
      digests.pop_back();
      EXPECT_EQ(s.digest(), digests.back());
    }
  }
}
