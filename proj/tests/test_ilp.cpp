#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "stil/data/config.hpp"
#include "stil/data/generators.hpp"
#include "stil/data/io.hpp"
#include "stil/ilp/learner.hpp"

using namespace stil;
using namespace stil::ilp;

namespace {

std::vector<Example> symmetry_examples(std::uint64_t seed, int n = 10) {
  data::SymmetryParams p;
  p.n_pos = n;
  p.n_neg = n;
  p.seed = seed;
  return data::to_examples(data::generate_symmetry(p));
}

std::vector<Example> attention_examples(std::uint64_t seed, int n = 6) {
  data::AttentionParams p;
  p.n_pos = n;
  p.n_neg = n;
  p.seed = seed;
  return data::to_examples(data::generate_attention(p));
}

ModeSet symmetry_modes() { return data::modes_for(data::default_config(), "symmetric"); }

qsr::QualificationContext ctx_for(const Example& e) {
  return qsr::ContextFactors{}.resolve(example_width(e), example_height(e));
}

// Renders a bottom literal with the example's values in place of variables.
std::string ground(const Bottom& b, const Literal& l) {
  std::string s = l.pred + "(";
  const auto lv = leaves(l);
  for (std::size_t i = 0; i < lv.size(); ++i) {
    if (i) s += ",";
    s += lv[i]->kind == Term::Kind::var ? to_string(b.values.at(lv[i]->var)) : lv[i]->name;
  }
  return s + ")";
}

// Keeps only the bottom literals at the given indices.
Bottom restrict(const Bottom& b, const std::vector<std::size_t>& keep) {
  Bottom r = b;
  r.body.clear();
  r.inputs.clear();
  r.outputs.clear();
  r.slot_types.clear();
  for (auto k : keep) {
    r.body.push_back(b.body[k]);
    r.inputs.push_back(b.inputs[k]);
    r.outputs.push_back(b.outputs[k]);
    r.slot_types.push_back(b.slot_types[k]);
  }
  return r;
}

SceneObject person(const std::string& id, double x, double y, double w, double h) {
  return {id, ObjectKind::person, geom::AxisAlignedRectangle(x, y, w, h), std::nullopt};
}

Example scene_example(const std::string& id, bool positive, std::vector<SceneObject> objs) {
  return {id, positive, "t", Scene{id, 100, 100, std::move(objs), std::nullopt, {}}};
}

struct Worlds {
  std::vector<std::unique_ptr<World>> own;
  std::vector<World*> pos, neg;
  Worlds(const std::vector<Example>& ex, const Background& bg) {
    for (const auto& e : ex) {
      own.push_back(std::make_unique<World>(e, ctx_for(e), bg));
      (e.positive ? pos : neg).push_back(own.back().get());
    }
  }
};

}  // namespace

TEST(Modes, Parse) {
  const auto m = parse_mode("modeb(*, holds_in(gaze_on(+gaze,-person),-interval))");
  EXPECT_FALSE(m.head);
  EXPECT_EQ(m.recall, 0);
  EXPECT_EQ(m.pred, "holds_in");
  const auto ph = m.placeholders();
  ASSERT_EQ(ph.size(), 3u);
  EXPECT_EQ(ph[0].mode, ArgMode::in);
  EXPECT_EQ(ph[0].type, "gaze");
  EXPECT_EQ(ph[1].mode, ArgMode::out);
  EXPECT_EQ(ph[2].type, "interval");

  const auto h = parse_mode("modeh(1, symmetric(+scene)).");
  EXPECT_TRUE(h.head);
  EXPECT_EQ(h.recall, 1);
  EXPECT_FALSE(parse_mode("modeb(rel(+person,#relation))").recall);
  EXPECT_EQ(parse_mode("modeb(rel(+person,#relation))").placeholders()[1].mode, ArgMode::constant);

  try {
    (void)parse_mode("modeh(1, foo(-x))");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "invalid-mode");
  }
  EXPECT_THROW(parse_mode("modeb(1, foo(+x)"), Error);
  EXPECT_THROW(parse_modes({"modeb(1, foo(+x))"}), Error);
}

TEST(Clauses, TextRoundTrip) {
  for (const char* text : {"symmetric(A) :- axis(A,B), left(B,C), right(B,D), equi_sized(C,D).",
                           "attention_switch(A) :- gaze(A,B), holds_in(gaze_on(B,C),D), before(D,E).", "t(A)."}) {
    EXPECT_EQ(to_string(parse_clause(text)), text);
  }
  EXPECT_THROW(parse_clause("t(A) :- "), Error);
}

TEST(Saturate, SymmetryBottomHasTargetLiterals) {
  auto ex = symmetry_examples(3, 2);
  const auto& pos = ex.front();
  ASSERT_TRUE(pos.positive);
  const auto bg = Background::standard();
  World w(pos, ctx_for(pos), bg);
  Params p;
  p.i = 3;
  const auto b = saturate(w, symmetry_modes(), p);
  std::set<std::string> lits;
  for (const auto& l : b.body) lits.insert(ground(b, l));
  EXPECT_TRUE(lits.count("axis(" + pos.id + ",axis)"));
  EXPECT_TRUE(lits.count("left(axis,p1)"));
  EXPECT_TRUE(lits.count("right(axis,p2)"));
  EXPECT_TRUE(lits.count("equi_sized(p1,p2)"));
  EXPECT_TRUE(lits.count("equidistant_from(p1,p2,axis)"));
  EXPECT_FALSE(lits.count("left(axis,p2)"));
}

TEST(Saturate, SingleObjectReflexiveOnly) {
  const auto bg = Background::standard();
  const auto ex = scene_example("solo", true, {person("p", 10, 10, 20, 20)});
  World w(ex, ctx_for(ex), bg);
  const auto modes = parse_modes({"modeh(1, t(+scene))", "modeb(*, person(+scene,-person))",
                                  "modeb(*, eq(+person,+person))", "modeb(*, dc(+person,+person))",
                                  "modeb(*, smaller(+person,+person))"});
  const auto b = saturate(w, modes, Params{});
  std::set<std::string> lits;
  for (const auto& l : b.body) lits.insert(ground(b, l));
  EXPECT_EQ(lits, (std::set<std::string>{"person(solo,p)", "eq(p,p)"}));
}

TEST(Saturate, DepthOneStopsChaining) {
  auto ex = symmetry_examples(3, 1);
  const auto bg = Background::standard();
  World w(ex.front(), ctx_for(ex.front()), bg);
  Params p;
  p.i = 1;
  const auto b = saturate(w, symmetry_modes(), p);
  ASSERT_FALSE(b.body.empty());
  for (std::size_t k = 0; k < b.body.size(); ++k)
    for (int v : b.inputs[k]) EXPECT_EQ(b.depth.at(v), 0) << to_string(b.body[k]);
  for (const auto& l : b.body) EXPECT_NE(l.pred, "left");
}

TEST(Saturate, Errors) {
  auto ex = symmetry_examples(3, 1);
  const auto bg = Background::standard();
  World w(ex.front(), ctx_for(ex.front()), bg);
  try {
    (void)saturate(w, parse_modes({"modeh(1, other(+scene))"}), Params{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "no-head-mode");
  }
  try {
    (void)saturate(w, parse_modes({"modeh(1, symmetric(+scene))", "modeb(*, gaze(+scene,-gaze))"}), Params{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "empty-bottom");
  }
}

TEST(Covers, EmptyBodyAndTargetClause) {
  const auto ex = symmetry_examples(5, 6);
  const auto bg = Background::standard();
  const auto target = data::typed_clause(data::kSymmetryTarget, data::kSymmetryTypes);
  const auto empty = parse_clause("symmetric(A).");
  const auto other = parse_clause("other(A).");
  for (const auto& e : ex) {
    World w(e, ctx_for(e), bg);
    EXPECT_TRUE(covers(empty, w));
    EXPECT_FALSE(covers(other, w));
    EXPECT_EQ(covers(target, w), e.positive) << e.id;
  }
}

// Dropping body literals never shrinks the covered set.
TEST(Covers, AntiMonotoneInBody) {
  const auto ex = symmetry_examples(6, 8);
  const auto bg = Background::standard();
  const auto target = data::typed_clause(data::kSymmetryTarget, data::kSymmetryTypes);
  for (const auto& e : ex) {
    World w(e, ctx_for(e), bg);
    bool prev = true;
    for (std::size_t n = 0; n <= target.body.size(); ++n) {
      Clause c = target;
      c.body.resize(n);
      const bool now = covers(c, w);
      EXPECT_TRUE(prev || !now) << e.id << " len " << n;
      prev = now;
    }
  }
}

TEST(Covers, AttentionTarget) {
  const auto ex = attention_examples(9);
  const auto bg = Background::standard();
  const auto target = data::typed_clause(data::kAttentionTarget, data::kAttentionTypes);
  for (const auto& e : ex) {
    World w(e, ctx_for(e), bg);
    EXPECT_EQ(covers(target, w), e.positive) << e.id;
  }
}

TEST(Search, BottomEqualToTargetReturnsTarget) {
  const auto ex = symmetry_examples(7, 10);
  const auto bg = Background::standard();
  Worlds ws(ex, bg);
  Params p;
  p.i = 3;
  const auto full = saturate(*ws.pos.front(), symmetry_modes(), p);
  const std::set<std::string> wanted{"axis(" + ex.front().id + ",axis)", "left(axis,p1)", "right(axis,p2)",
                                     "equi_sized(p1,p2)", "equidistant_from(p1,p2,axis)"};
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < full.body.size(); ++k)
    if (wanted.count(ground(full, full.body[k]))) keep.push_back(k);
  ASSERT_EQ(keep.size(), wanted.size());
  const auto b = restrict(full, keep);
  const auto r = search(b, ws.pos, ws.neg, p);
  ASSERT_TRUE(r.best);
  EXPECT_EQ(r.best->pos, 10);
  EXPECT_EQ(r.best->neg, 0);
  EXPECT_EQ(r.best->clause.body.size(), 5u);
  EXPECT_FALSE(r.budget_exhausted);
}

TEST(Search, NoNegativesGivesShortestClause) {
  const auto ex = symmetry_examples(7, 5);
  const auto bg = Background::standard();
  Worlds ws(ex, bg);
  Params p;
  p.i = 3;
  const auto b = saturate(*ws.pos.front(), symmetry_modes(), p);
  const auto r = search(b, ws.pos, {}, p);
  ASSERT_TRUE(r.best);
  EXPECT_TRUE(r.best->clause.body.empty());
  EXPECT_EQ(r.best->pos, 5);
}

TEST(Search, NoiseAdmitsEmptyBody) {
  const auto ex = symmetry_examples(7, 5);
  const auto bg = Background::standard();
  Worlds ws(ex, bg);
  Params p;
  p.i = 3;
  p.max_clause_length = 0;
  const auto b = saturate(*ws.pos.front(), symmetry_modes(), p);
  p.noise = static_cast<int>(ws.neg.size());
  auto r = search(b, ws.pos, ws.neg, p);
  ASSERT_TRUE(r.best);
  EXPECT_TRUE(r.best->clause.body.empty());
  EXPECT_EQ(r.best->score(), 5 - 5);
  p.noise = 0;
  r = search(b, ws.pos, ws.neg, p);
  EXPECT_FALSE(r.best);
}

TEST(Search, ReturnsSubsetOfBottomAndConnected) {
  const auto ex = symmetry_examples(11, 6);
  const auto bg = Background::standard();
  Worlds ws(ex, bg);
  Params p;
  p.i = 3;
  const auto b = saturate(*ws.pos.front(), symmetry_modes(), p);
  const auto r = search(b, ws.pos, ws.neg, p);
  ASSERT_TRUE(r.best);
  std::set<int> bound;
  for (const auto* t : leaves(b.head)) bound.insert(t->var);
  for (const auto& l : r.best->clause.body) {
    EXPECT_NE(std::find(b.body.begin(), b.body.end(), l), b.body.end()) << to_string(l);
    const auto k = std::find(b.body.begin(), b.body.end(), l) - b.body.begin();
    for (int v : b.inputs[k]) EXPECT_TRUE(bound.count(v)) << to_string(l);
    for (int v : b.outputs[k]) bound.insert(v);
  }
}

TEST(Search, BudgetFlag) {
  const auto ex = symmetry_examples(7, 5);
  const auto bg = Background::standard();
  Worlds ws(ex, bg);
  Params p;
  p.i = 3;
  p.node_budget = 3;
  const auto b = saturate(*ws.pos.front(), symmetry_modes(), p);
  const auto r = search(b, ws.pos, ws.neg, p);
  EXPECT_TRUE(r.budget_exhausted);
  EXPECT_LE(r.nodes, 3);
}

namespace {

// Positives come in two families: overlapping people of equal size, and
// separated people of clearly different size. Negatives are separated
// people of equal size.
std::vector<Example> two_concepts() {
  std::vector<Example> ex;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 4; ++k) {
    const double x = 5 + 10 * u(rng);
    ex.push_back(scene_example("a_pos_" + std::to_string(k), true,
                               {person("p", x, 10, 20, 30), person("q", x + 10, 15, 20, 30)}));
    ex.push_back(scene_example("b_pos_" + std::to_string(k), true,
                               {person("p", x, 10, 10, 10), person("q", 60, 40, 30, 40)}));
    ex.push_back(scene_example("neg_" + std::to_string(k), false,
                               {person("p", x, 10, 20, 30), person("q", 60, 40, 20, 30)}));
  }
  return ex;
}

ModeSet two_concept_modes() {
  return parse_modes({"modeh(1, t(+scene))", "modeb(*, person(+scene,-person))", "modeb(*, po(+person,+person))",
                      "modeb(*, smaller(+person,+person))"});
}

}  // namespace

TEST(Induce, TwoSubConceptsNeedTwoClauses) {
  const auto ex = two_concepts();
  const auto rep = induce(ex, two_concept_modes(), Background::standard(), {}, Params{});
  EXPECT_TRUE(rep.uncoverable.empty());
  ASSERT_GE(rep.hypothesis.clauses.size(), 2u);
  for (const auto& c : rep.hypothesis.clauses) {
    EXPECT_GE(c.pos, 1);
    EXPECT_EQ(c.neg, 0);
  }
  const auto cm = evaluate(rep.hypothesis, ex, Background::standard(), {});
  EXPECT_DOUBLE_EQ(cm.accuracy(), 1.0);
}

TEST(Induce, NoNegativesCoversAllPositives) {
  auto ex = two_concepts();
  std::erase_if(ex, [](const Example& e) { return !e.positive; });
  const auto rep = induce(ex, two_concept_modes(), Background::standard(), {}, Params{});
  EXPECT_TRUE(rep.uncoverable.empty());
  const auto cm = evaluate(rep.hypothesis, ex, Background::standard(), {});
  EXPECT_EQ(cm.tp, static_cast<int>(ex.size()));
}

TEST(Induce, UncoverablePositivesReported) {
  auto ex = two_concepts();
  // a positive indistinguishable from a negative
  auto twin = ex[2];
  twin.id = "z_twin";
  twin.positive = true;
  ex.push_back(twin);
  const auto rep = induce(ex, two_concept_modes(), Background::standard(), {}, Params{});
  EXPECT_EQ(rep.uncoverable, std::vector<std::string>{"z_twin"});
  // every accepted clause still respects the noise bound
  for (const auto& c : rep.hypothesis.clauses) EXPECT_EQ(c.neg, 0);
}

TEST(Induce, SeparableSymmetryAndFactsIgnored) {
  const auto ex = symmetry_examples(7, 10);
  const auto cfg = data::default_config();
  const auto rep = induce(ex, symmetry_modes(), cfg.background(), cfg.factors, cfg.params);
  ASSERT_EQ(rep.hypothesis.clauses.size(), 1u);
  EXPECT_EQ(rep.hypothesis.clauses[0].pos, 10);
  EXPECT_EQ(rep.hypothesis.clauses[0].neg, 0);

  // same output with the pre-ground facts removed or replaced by nonsense
  auto stripped = ex, bogus = ex;
  for (auto& e : stripped) std::get<Scene>(e.payload).facts.clear();
  for (auto& e : bogus) std::get<Scene>(e.payload).facts = {parse_relation_tuple("ntpp(p1,p2)")};
  const auto text = to_text(rep.hypothesis);
  EXPECT_EQ(to_text(induce(stripped, symmetry_modes(), cfg.background(), cfg.factors, cfg.params).hypothesis), text);
  EXPECT_EQ(to_text(induce(bogus, symmetry_modes(), cfg.background(), cfg.factors, cfg.params).hypothesis), text);
  // and on rerun
  EXPECT_EQ(to_text(induce(ex, symmetry_modes(), cfg.background(), cfg.factors, cfg.params).hypothesis), text);
}

TEST(Induce, MixedTargetsRejected) {
  auto ex = two_concepts();
  ex[1].target = "u";
  try {
    (void)induce(ex, two_concept_modes(), Background::standard(), {}, Params{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "mixed-targets");
  }
}

TEST(Evaluate, EmptyAndTrivialHypotheses) {
  const auto ex = symmetry_examples(8, 5);
  const auto bg = Background::standard();
  Hypothesis none{"symmetric", {}};
  auto cm = evaluate(none, ex, bg, {});
  EXPECT_EQ(cm.tp + cm.fp, 0);
  EXPECT_EQ(cm.tn, 5);
  EXPECT_EQ(cm.fn, 5);
  Hypothesis all{"symmetric", {{parse_clause("symmetric(A)."), 0, 0}}};
  std::vector<bool> pred;
  cm = evaluate(all, ex, bg, {}, &pred);
  EXPECT_EQ(cm.tp, 5);
  EXPECT_EQ(cm.fp, 5);
  EXPECT_DOUBLE_EQ(cm.accuracy(), 0.5);
  EXPECT_TRUE(std::all_of(pred.begin(), pred.end(), [](bool b) { return b; }));
}

TEST(Hypothesis, TextRoundTrip) {
  const auto ex = two_concepts();
  const auto rep = induce(ex, two_concept_modes(), Background::standard(), {}, Params{});
  const auto text = to_text(rep.hypothesis);
  const auto back = parse_hypothesis(text);
  EXPECT_EQ(back.target, "t");
  EXPECT_EQ(to_text(back), text);
  // the parsed hypothesis evaluates like the original
  const auto a = evaluate(rep.hypothesis, ex, Background::standard(), {});
  const auto b = evaluate(back, ex, Background::standard(), {});
  EXPECT_EQ(a.tp, b.tp);
  EXPECT_EQ(a.fp, b.fp);
}

TEST(Background, PredicatesEvaluatedOnDemand) {
  const auto ex = attention_examples(2, 2);
  const auto bg = Background::standard();
  ASSERT_TRUE(bg.find("holds_in", 3));
  ASSERT_TRUE(bg.find("equidistant_from", 3));
  ASSERT_TRUE(bg.find("before", 2));
  World w(ex.front(), ctx_for(ex.front()), bg);
  EXPECT_EQ(w.kernel_calls(), 0u);
  const auto c = parse_clause("attention_switch(A) :- gaze(A,B), holds_in(gaze_on(B,C),D).");
  EXPECT_TRUE(covers(c, w));
  EXPECT_GT(w.kernel_calls(), 0u);
}

TEST(Background, Aliases) {
  auto bg = Background::standard();
  bg.add_alias("touching", {"ec", "po"});
  const auto ex = scene_example("s", true, {person("p", 10, 10, 20, 20), person("q", 30, 10, 20, 20)});
  World w(ex, ctx_for(ex), bg);
  EXPECT_TRUE(covers(parse_clause("t(A) :- person(A,B), person(A,C), touching(B,C)."), w));
  EXPECT_FALSE(covers(parse_clause("t(A) :- person(A,B), person(A,C), po(B,C)."), w));
}
