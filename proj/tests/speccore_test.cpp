#include <gtest/gtest.h>

#include "support/testkit.hpp"
#include "txforest/pretty.hpp"
#include "txforest/spec.hpp"
#include "txforest/surface.hpp"

using namespace txf;

TEST(FreeVars, FileIsClosed) {
  EXPECT_TRUE(free_vars(*Spec::file()).empty());
}

TEST(FreeVars, PairBinderScopesOverSecondOnly) {
  // Pair(x, file, Pred(x = y)): x is bound, y is free.
  SpecPtr s = Spec::pair(
      "x", Spec::file(),
      Spec::pred(Expr::call("=", {Expr::var("x"), Expr::var("y")})));
  EXPECT_EQ(free_vars(*s), std::set<std::string>{"y"});

  // ...but an occurrence in the first component is free.
  SpecPtr s2 = Spec::pair("x", Spec::pred(Expr::var("x")), Spec::file());
  EXPECT_EQ(free_vars(*s2), std::set<std::string>{"x"});
}

TEST(FreeVars, CompBindsInBodyNotSource) {
  SpecPtr s = Spec::comp(Spec::path(Expr::var("x"), Spec::file()), "x",
                         Expr::var("x"));
  EXPECT_EQ(free_vars(*s), std::set<std::string>{"x"});  // the source one
  SpecPtr closed = Spec::comp(Spec::path(Expr::var("x"), Spec::file()), "x",
                              Expr::lit_v(Value::list({"a"})));
  EXPECT_TRUE(free_vars(*closed).empty());
}

TEST(FreeVars, PublishedHwsCoreIsClosed) {
  EXPECT_TRUE(free_vars(*testkit::published_hws_core()).empty());
  for (const auto& [name, spec] : *testkit::grades_table())
    EXPECT_TRUE(free_vars(*spec).empty()) << name;
}

TEST(AlphaEq, BinderRenaming) {
  SpecPtr a = testkit::published_hws_core();
  // Same shape with different binder names.
  ExprPtr source = Expr::call(
      "filter",
      {Expr::run_expr(Expr::var("zz"), Expr::fetch(Expr::Kind::FetchDir)),
       Expr::str("[a-z]+[0-9]+")});
  SpecPtr b = Spec::pair(
      "max", Spec::path(Expr::str("max"), Spec::file()),
      Spec::pair("zz", Spec::dir(),
                 Spec::comp(Spec::path(Expr::var("kid"), Spec::ref("students")),
                            "kid", source)));
  EXPECT_TRUE(alpha_eq(*a, *b));
}

TEST(AlphaEq, DistinguishesStructure) {
  EXPECT_FALSE(alpha_eq(*Spec::file(), *Spec::dir()));
  EXPECT_FALSE(alpha_eq(*Spec::opt(Spec::file()), *Spec::file()));
  // A free variable must match by name.
  SpecPtr a = Spec::pred(Expr::var("x"));
  SpecPtr b = Spec::pred(Expr::var("y"));
  EXPECT_FALSE(alpha_eq(*a, *b));
  // Bound-to-free mismatch.
  SpecPtr c = Spec::pair("x", Spec::file(), Spec::pred(Expr::var("x")));
  SpecPtr d = Spec::pair("x", Spec::file(), Spec::pred(Expr::var("z")));
  EXPECT_FALSE(alpha_eq(*c, *d));
}

TEST(Pretty, Atoms) {
  EXPECT_EQ(pretty(*Spec::file()), "file");
  EXPECT_EQ(pretty(*Spec::opt(Spec::file())), "file option");
  EXPECT_EQ(pretty(*Spec::path(Expr::str("max"), Spec::file())),
            "\"max\" :: file");
  EXPECT_EQ(pretty(*Spec::ref("students")), "students");
}

TEST(Pretty, PublishedHwsRendersAsComprehension) {
  std::string text = pretty(*testkit::published_hws_core());
  EXPECT_NE(text.find("matches RE \"[a-z]+[0-9]+\""), std::string::npos);
  EXPECT_NE(text.find("\"max\" :: file"), std::string::npos);
}

namespace {

// compile("x = " + pretty(s)) and compare alpha-equivalence with s.
void expect_round_trip(const SpecPtr& s, const std::string& context_decls) {
  std::string text = context_decls + "x = " + pretty(*s) + "\n";
  auto table = compile_text(text);
  ASSERT_TRUE(table.ok()) << text << "\n" << table.error().to_string();
  EXPECT_TRUE(alpha_eq(*s, *table.value().at("x")))
      << "original: " << pretty(*s) << "\nreparsed:  "
      << pretty(*table.value().at("x"));
}

}  // namespace

TEST(Pretty, RoundTripsPublishedSpecs) {
  for (const auto& [name, spec] : *testkit::grades_table())
    expect_round_trip(spec, "students = file\nhws = file\n");
}

// parse(pretty(s)) compiles back alpha-equivalently on 1000 random specs of
// depth <= 5 drawn from the surface-expressible fragment.
TEST(Pretty, RoundTripsRandomSpecs) {
  testkit::Rng rng(424242);
  for (int done = 0; done < 1000; ++done) {
    auto inst = testkit::gen_instance(rng, 5);
    expect_round_trip(inst.root, "leaf = file\n");
  }
}

TEST(Values, OrderingAndEquality) {
  Value set = Value::set({"b", "a"});
  EXPECT_EQ(set.as_ordered_elems(), (std::vector<std::string>{"a", "b"}));
  Value list = Value::list({"b", "a"});
  EXPECT_EQ(list.as_ordered_elems(), (std::vector<std::string>{"b", "a"}));
  EXPECT_NE(set, list);
  EXPECT_EQ(Value::integer(3), Value::integer(3));
  EXPECT_NE(Value::integer(3), Value::str("3"));
}

TEST(Env, ShadowingAndSharing) {
  Env e0;
  Env e1 = e0.bind("x", Value::integer(1));
  Env e2 = e1.bind("x", Value::integer(2));
  Env e3 = e1.bind("y", Value::integer(3));
  EXPECT_EQ(e1.lookup("x")->as_int(), 1);
  EXPECT_EQ(e2.lookup("x")->as_int(), 2);
  EXPECT_EQ(e3.lookup("x")->as_int(), 1);
  EXPECT_EQ(e3.lookup("y")->as_int(), 3);
  EXPECT_EQ(e0.lookup("x"), nullptr);
  auto flat = e2.to_map();
  EXPECT_EQ(flat.at("x").as_int(), 2);
}

TEST(Commands, SeqAllAndPretty) {
  CmdPtr c = seq_all({Command::navigate(Navigation::Down),
                      Command::store_file(Expr::str("hi")),
                      Command::navigate(Navigation::Up)});
  EXPECT_EQ(pretty(*c), "down; store_file \"hi\"; up");
  EXPECT_TRUE(seq_all({})->is_skip());
}
