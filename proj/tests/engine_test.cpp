#include <gtest/gtest.h>

#include "support/testkit.hpp"
#include "txforest/engine.hpp"
#include "txforest/pretty.hpp"
#include "txforest/surface.hpp"
#include "txforest/txn.hpp"

using namespace txf;
using testkit::fs0;

namespace {

Path p(const std::string& text) { return *Path::parse(text); }

struct GradesFixture {
  std::shared_ptr<SpecTable> table = testkit::grades_table();
  Engine eng{table.get()};
  LocalContext root = initial_context(p("/grades"), table->at("grades"));
  GlobalContext gctx{PathSet{}, fs0()};

  // Navigates into hw1's hws node: into_pair; next; into_comp (first child
  // is hw1); down.
  NavOut at_hw1() {
    auto r1 = eng.exec_nav(Navigation::IntoPair, root, gctx);
    auto r2 = eng.exec_nav(Navigation::Next, r1.value().lctx, r1.value().gctx);
    auto r3 = eng.exec_nav(Navigation::IntoComp, r2.value().lctx,
                           r2.value().gctx);
    auto r4 = eng.exec_nav(Navigation::Down, r3.value().lctx, r3.value().gctx);
    return r4.value();
  }

  // Within hw1: into_pair to the "max" path node.
  NavOut at_max_path() {
    NavOut hw1 = at_hw1();
    auto r = eng.exec_nav(Navigation::IntoPair, hw1.lctx, hw1.gctx);
    NavOut out = r.value();
    Log all = hw1.log;
    append_log(all, out.log);
    out.log = all;
    return out;
  }

  NavOut at_max_file() {
    NavOut mp = at_max_path();
    auto r = eng.exec_nav(Navigation::Down, mp.lctx, mp.gctx);
    NavOut out = r.value();
    Log all = mp.log;
    append_log(all, out.log);
    out.log = all;
    return out;
  }
};

}  // namespace

TEST(EvalExpr, FetchFileReadsAndLogs) {
  GradesFixture fx;
  NavOut mf = fx.at_max_file();
  auto r = fx.eng.eval_expr(*Expr::fetch(Expr::Kind::FetchFile), mf.lctx,
                            mf.gctx);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value().value, Value::str("100"));
  ASSERT_EQ(r.value().log.size(), 1u);
  EXPECT_EQ(r.value().log[0],
            read_entry(Contents::file("100"), p("/grades/hw1/max")));
}

TEST(EvalExpr, FetchOptAtAbsentPathLogsAbsentRead) {
  auto table = compile_text("x = \"config\" :: file option").value();
  Engine eng(&table);
  LocalContext root = initial_context(root_path(), table.at("x"));
  GlobalContext gctx{PathSet{}, FileStoreState::empty_root()};
  auto down = eng.exec_nav(Navigation::Down, root, gctx);
  ASSERT_TRUE(down.ok());
  auto r = eng.eval_expr(*Expr::fetch(Expr::Kind::FetchOpt), down.value().lctx,
                         down.value().gctx);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value().value, Value::boolean(false));
  ASSERT_EQ(r.value().log.size(), 1u);
  EXPECT_EQ(r.value().log[0], read_entry(std::nullopt, p("/config")));
}

TEST(EvalExpr, FetchDirAtFileFocusIsUndefined) {
  GradesFixture fx;
  NavOut mf = fx.at_max_file();
  auto r = fx.eng.eval_expr(*Expr::fetch(Expr::Kind::FetchDir), mf.lctx,
                            mf.gctx);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().code, "NotADirFocus");
}

TEST(EvalExpr, BuiltinsAndRunExpr) {
  GradesFixture fx;
  auto r = fx.eng.eval_expr(
      *parse_expr_text("size(lines_of(\"a\\nb\\n\")) + 1").value(), fx.root,
      fx.gctx);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value().value, Value::integer(3));

  auto bad = fx.eng.eval_expr(*parse_expr_text("1 / 0").value(), fx.root,
                              fx.gctx);
  ASSERT_FALSE(bad.ok());
  EXPECT_EQ(bad.error().code, "DivByZero");

  auto unbound = fx.eng.eval_expr(*Expr::var("nope"), fx.root, fx.gctx);
  ASSERT_FALSE(unbound.ok());
  EXPECT_EQ(unbound.error().code, "UnboundVariable");
}

TEST(ExecNav, DownEntersPathAndExtendsPathset) {
  GradesFixture fx;
  NavOut mp = fx.at_max_path();
  size_t before = mp.log.size();
  auto r = fx.eng.exec_nav(Navigation::Down, mp.lctx, mp.gctx);
  ASSERT_TRUE(r.ok());
  const NavOut& out = r.value();
  EXPECT_EQ(out.lctx.path, p("/grades/hw1/max"));
  ASSERT_EQ(out.log.size(), 1u);
  EXPECT_EQ(out.log[0], read_entry(Contents::dir({"aaa17", "max"}),
                                   p("/grades/hw1")));
  EXPECT_TRUE(out.gctx.pathset.count(p("/grades/hw1/max")));
  EXPECT_EQ(out.gctx.fs, mp.gctx.fs);
  EXPECT_EQ(mp.log.size(), before);
  // focus is now the file spec
  auto zr = fx.eng.resolve_focus(out.lctx.zipper);
  ASSERT_TRUE(zr.ok());
  EXPECT_EQ(zr.value().current().spec->kind, Spec::Kind::File);
}

TEST(ExecNav, DownThenUpIsIdentityModuloLog) {
  GradesFixture fx;
  NavOut mp = fx.at_max_path();
  auto down = fx.eng.exec_nav(Navigation::Down, mp.lctx, mp.gctx);
  ASSERT_TRUE(down.ok());
  auto up = fx.eng.exec_nav(Navigation::Up, down.value().lctx,
                            down.value().gctx);
  ASSERT_TRUE(up.ok());
  EXPECT_EQ(up.value().lctx.path, mp.lctx.path);
  EXPECT_TRUE(up.value().lctx.zipper.same_rep(mp.lctx.zipper));
  EXPECT_EQ(up.value().gctx.fs, mp.gctx.fs);
  EXPECT_TRUE(up.value().log.empty());
}

TEST(ExecNav, IntoCompOnEmptyComprehensionIsUndefined) {
  GradesFixture fx;
  // hw2 has no student files, so its students comprehension is empty.
  auto r1 = fx.eng.exec_nav(Navigation::IntoPair, fx.root, fx.gctx);
  auto r2 = fx.eng.exec_nav(Navigation::Next, r1.value().lctx, r1.value().gctx);
  auto r3 = fx.eng.exec_nav(Navigation::IntoComp, r2.value().lctx,
                            r2.value().gctx);
  auto hw2 = fx.eng.exec_nav(Navigation::Next, r3.value().lctx,
                             r3.value().gctx);
  ASSERT_TRUE(hw2.ok());
  auto down = fx.eng.exec_nav(Navigation::Down, hw2.value().lctx,
                              hw2.value().gctx);
  ASSERT_TRUE(down.ok());
  EXPECT_EQ(down.value().lctx.path, p("/grades/hw2"));
  // enter the students comprehension of hw2
  auto a = fx.eng.exec_nav(Navigation::IntoPair, down.value().lctx,
                           down.value().gctx);
  auto b = fx.eng.exec_nav(Navigation::Next, a.value().lctx, a.value().gctx);
  auto c = fx.eng.exec_nav(Navigation::IntoPair, b.value().lctx,
                           b.value().gctx);
  auto d = fx.eng.exec_nav(Navigation::Next, c.value().lctx, c.value().gctx);
  ASSERT_TRUE(d.ok());
  auto into = fx.eng.exec_nav(Navigation::IntoComp, d.value().lctx,
                              d.value().gctx);
  ASSERT_FALSE(into.ok());
  EXPECT_EQ(into.error().code, "EmptyComprehension");
}

TEST(ExecNav, NamedErrors) {
  GradesFixture fx;
  auto up = fx.eng.exec_nav(Navigation::Up, fx.root, fx.gctx);
  ASSERT_FALSE(up.ok());
  EXPECT_EQ(up.error().code, "UpAtRoot");
  auto next = fx.eng.exec_nav(Navigation::Next, fx.root, fx.gctx);
  ASSERT_FALSE(next.ok());
  EXPECT_EQ(next.error().code, "NoSibling");
  auto into = fx.eng.exec_nav(Navigation::IntoPair, fx.at_hw1().lctx,
                              fx.gctx);
  ASSERT_TRUE(into.ok());  // hws node is a pair
  auto mf = fx.at_max_file();
  auto bad = fx.eng.exec_nav(Navigation::IntoPair, mf.lctx, mf.gctx);
  ASSERT_FALSE(bad.ok());
  EXPECT_EQ(bad.error().code, "NotAPairFocus");
}

TEST(ExecUpdate, StoreFileWritesThroughMakeFile) {
  GradesFixture fx;
  NavOut mf = fx.at_max_file();
  auto r = fx.eng.exec_update(*Command::store_file(Expr::str("95")), mf.lctx,
                              mf.gctx);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value().gctx.fs.get(p("/grades/hw1/max")), Contents::file("95"));
  ASSERT_FALSE(r.value().log.empty());
  EXPECT_EQ(r.value().log.back(),
            write_file_entry(Contents::file("100"), Contents::file("95"),
                             p("/grades/hw1/max")));
  // zipper, path and pathset untouched
  EXPECT_TRUE(r.value().lctx.zipper.same_rep(mf.lctx.zipper));
  EXPECT_EQ(r.value().lctx.path, mf.lctx.path);
  EXPECT_EQ(r.value().gctx.pathset, mf.gctx.pathset);
}

TEST(ExecUpdate, StoreFetchedFileLeavesFsUnchanged) {
  GradesFixture fx;
  NavOut mf = fx.at_max_file();
  auto r = fx.eng.exec_update(
      *Command::store_file(Expr::fetch(Expr::Kind::FetchFile)), mf.lctx,
      mf.gctx);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value().gctx.fs, mf.gctx.fs);
}

TEST(ExecUpdate, CreatePathTwiceEqualsOnce) {
  auto table = compile_text("x = \"sub\" :: file").value();
  Engine eng(&table);
  LocalContext root = initial_context(root_path(), table.at("x"));
  GlobalContext gctx{PathSet{}, FileStoreState::empty_root()};
  auto once = eng.exec_update(*Command::create_path(), root, gctx);
  ASSERT_TRUE(once.ok());
  EXPECT_EQ(once.value().gctx.fs.get(p("/sub")), Contents::empty_file());
  auto twice = eng.exec_update(*Command::create_path(), once.value().lctx,
                               once.value().gctx);
  ASSERT_TRUE(twice.ok());
  EXPECT_EQ(twice.value().gctx.fs, once.value().gctx.fs);
  // second run reads but performs no writes
  for (const auto& e : twice.value().log) EXPECT_TRUE(e.is_read());
}

TEST(ExecUpdate, CreatePathLogsLeadingRead) {
  auto table = compile_text("x = \"sub\" :: file").value();
  Engine eng(&table);
  LocalContext root = initial_context(root_path(), table.at("x"));
  GlobalContext gctx{PathSet{}, FileStoreState::empty_root()};
  auto r = eng.exec_update(*Command::create_path(), root, gctx);
  ASSERT_TRUE(r.ok());
  ASSERT_GE(r.value().log.size(), 2u);
  EXPECT_EQ(r.value().log[0],
            read_entry(Contents::empty_dir(), root_path()));
  EXPECT_TRUE(r.value().log[1].is_write());
}

TEST(ExecCmd, SeqOfSkipsIsSkip) {
  GradesFixture fx;
  auto r = fx.eng.exec_cmd(*Command::seq(Command::skip(), Command::skip()),
                           fx.root, fx.gctx);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value().gctx.fs, fx.gctx.fs);
  EXPECT_TRUE(r.value().log.empty());
  EXPECT_TRUE(r.value().lctx.zipper.same_rep(fx.root.zipper));
}

TEST(ExecCmd, StoreThenAssignFetchSeesTheStore) {
  GradesFixture fx;
  NavOut mf = fx.at_max_file();
  CmdPtr prog = Command::seq(
      Command::store_file(Expr::str("55")),
      Command::assign("x", Expr::fetch(Expr::Kind::FetchFile)));
  auto r = fx.eng.exec_cmd(*prog, mf.lctx, mf.gctx);
  ASSERT_TRUE(r.ok());
  const Value* x = r.value().lctx.env.lookup("x");
  ASSERT_NE(x, nullptr);
  EXPECT_EQ(*x, Value::str("55"));
}

TEST(ExecCmd, WhileFuelExhaustion) {
  SpecTable table;
  Engine eng(&table, /*while_fuel=*/1000);
  LocalContext root = initial_context(root_path(), Spec::file());
  GlobalContext gctx{PathSet{}, FileStoreState::empty_root()};
  auto r = eng.exec_cmd(*Command::while_(Expr::boolean(true), Command::skip()),
                        root, gctx);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().code, "FuelExhausted");
}

TEST(ExecCmd, WhileCountsDown) {
  SpecTable table;
  Engine eng(&table);
  LocalContext root = initial_context(root_path(), Spec::file());
  GlobalContext gctx{PathSet{}, FileStoreState::empty_root()};
  CmdPtr prog = parse_command_text(
                    "i := 3; n := 0; while i > 0 do i := i - 1; n := n + 2 end")
                    .value();
  auto r = eng.exec_cmd(*prog, root, gctx);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r.value().lctx.env.lookup("n"), Value::integer(6));
}

TEST(RunProgram, SkipReturnsInputFs) {
  GradesFixture fx;
  auto r = fx.eng.run_program(p("/grades"), fx.table->at("grades"),
                              *Command::skip(), fs0());
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value(), fs0());
}

TEST(RunProgram, UndefinedCommandPropagates) {
  GradesFixture fx;
  auto r = fx.eng.run_program(p("/grades"), fx.table->at("grades"),
                              *Command::navigate(Navigation::Up), fs0());
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().code, "UpAtRoot");
}

TEST(RunProgram, WritesProject) {
  GradesFixture fx;
  CmdPtr prog = parse_command_text(
                    "into_pair; next; into_comp; down; into_pair; down; "
                    "store_file \"71\"")
                    .value();
  auto r = fx.eng.run_program(p("/grades"), fx.table->at("grades"), *prog,
                              fs0());
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value().get(p("/grades/hw1/max")), Contents::file("71"));
  EXPECT_TRUE(is_well_formed(r.value()));
}

TEST(NavHelpers, GotoNameDescendsToHw1) {
  GradesFixture fx;
  auto r = fx.eng.goto_name("hw1", fx.root, fx.gctx);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value().lctx.path, p("/grades/hw1"));
  auto zr = fx.eng.resolve_focus(r.value().lctx.zipper);
  EXPECT_TRUE(alpha_eq(*zr.value().current().spec,
                       *testkit::published_hws_core()));
}

TEST(NavHelpers, GotoLabelStopsAtPathNode) {
  GradesFixture fx;
  NavOut hw1 = fx.at_hw1();
  auto r = fx.eng.goto_label("max", hw1.lctx, hw1.gctx);
  ASSERT_TRUE(r.ok());
  // focus is the "max" path node, not yet the file
  EXPECT_EQ(r.value().lctx.path, p("/grades/hw1"));
  auto zr = fx.eng.resolve_focus(r.value().lctx.zipper);
  EXPECT_EQ(zr.value().current().spec->kind, Spec::Kind::Path);
}

TEST(NavHelpers, FoldCompCountsStudents) {
  GradesFixture fx;
  NavOut hw1 = fx.at_hw1();
  // navigate to the students comprehension
  auto a = fx.eng.exec_nav(Navigation::IntoPair, hw1.lctx, hw1.gctx);
  auto b = fx.eng.exec_nav(Navigation::Next, a.value().lctx, a.value().gctx);
  auto c = fx.eng.exec_nav(Navigation::IntoPair, b.value().lctx, b.value().gctx);
  auto d = fx.eng.exec_nav(Navigation::Next, c.value().lctx, c.value().gctx);
  ASSERT_TRUE(d.ok());
  auto folded = fx.eng.fold_comp(
      d.value().lctx, d.value().gctx, Value::integer(0),
      [](const LocalContext&, const GlobalContext& g, const Value& acc)
          -> Result<Engine::VisitOut> {
        return Engine::VisitOut{g, Log{}, Value::integer(acc.as_int() + 1)};
      });
  ASSERT_TRUE(folded.ok());
  EXPECT_EQ(folded.value().acc, Value::integer(1));  // one student in hw1
}

TEST(NavHelpers, GotoUnknownNameFails) {
  GradesFixture fx;
  auto r = fx.eng.goto_label("nope", fx.root, fx.gctx);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().code, "NameNotFound");
}

TEST(Verify, BoolValueAndLoggedReads) {
  GradesFixture fx;
  NavOut mf = fx.at_max_file();
  auto r = fx.eng.eval_expr(*Expr::verify(), mf.lctx, mf.gctx);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.value().value, Value::boolean(true));
  EXPECT_FALSE(r.value().log.empty());
}

// ---- property suites --------------------------------------------------------

namespace {

// A weighted random forest command applicable at the state, if any.
CmdPtr random_forest_command(testkit::Rng& rng, const Engine& eng,
                             const LocalContext& lctx,
                             const GlobalContext& gctx) {
  auto zr = eng.resolve_focus(lctx.zipper);
  if (!zr.ok()) return nullptr;
  std::vector<CmdPtr> options;
  switch (zr.value().current().spec->kind) {
    case Spec::Kind::Path:
      options.push_back(Command::navigate(Navigation::Down));
      options.push_back(Command::create_path());
      break;
    case Spec::Kind::Pair:
      options.push_back(Command::navigate(Navigation::IntoPair));
      break;
    case Spec::Kind::Comp:
      options.push_back(Command::navigate(Navigation::IntoComp));
      break;
    case Spec::Kind::Opt:
      options.push_back(Command::navigate(Navigation::IntoOpt));
      break;
    case Spec::Kind::File:
      options.push_back(Command::store_file(Expr::str(rng.int_string())));
      break;
    case Spec::Kind::Dir: {
      auto at = gctx.fs.get(lctx.path);
      if (at && at->is_dir()) {
        std::set<std::string> kids = at->children();
        if (rng.chance(40)) kids.insert("extra" + std::to_string(rng.next(3)));
        if (!kids.empty() && rng.chance(30)) kids.erase(*kids.begin());
        options.push_back(Command::store_dir(Expr::lit_v(Value::set(kids))));
      }
      break;
    }
    default:
      break;
  }
  if (lctx.zipper.has_right())
    options.push_back(Command::navigate(Navigation::Next));
  if (lctx.zipper.has_left())
    options.push_back(Command::navigate(Navigation::Prev));
  if (lctx.zipper.has_parent())
    options.push_back(Command::navigate(
        lctx.zipper.parent().current().spec->kind == Spec::Kind::Path
            ? Navigation::Up
            : Navigation::Out));
  if (options.empty()) return nullptr;
  return options[rng.next(options.size())];
}

}  // namespace

TEST(Invariants, WellFormednessAndParentExistsPreserved) {
  testkit::Rng rng(31337);
  int checked = 0;
  for (int i = 0; i < 250; ++i) {
    auto inst = testkit::gen_instance(rng);
    Engine eng(inst.table.get());
    for (auto& st : testkit::walk_states(rng, eng, inst, 10)) {
      CmdPtr cmd = random_forest_command(rng, eng, st.lctx, st.gctx);
      if (!cmd) continue;
      auto r = eng.exec_forest(*cmd, st.lctx, st.gctx);
      if (!r.ok()) continue;
      ++checked;
      EXPECT_TRUE(is_well_formed(r.value().gctx.fs))
          << pretty(*cmd) << " at " << st.lctx.path.to_string();
      // parent-exists: if the input path's parent was mapped, the output
      // path's parent is mapped too
      const Path& out_path = r.value().lctx.path;
      bool in_parent_mapped =
          st.lctx.path.is_root() ||
          st.gctx.fs.contains(*st.lctx.path.parent());
      bool out_parent_mapped =
          out_path.is_root() ||
          r.value().gctx.fs.contains(*out_path.parent());
      if (in_parent_mapped) EXPECT_TRUE(out_parent_mapped) << pretty(*cmd);
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(Invariants, ForestCommandLogsAreLocal) {
  testkit::Rng rng(777);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    auto inst = testkit::gen_instance(rng);
    Engine eng(inst.table.get());
    for (auto& st : testkit::walk_states(rng, eng, inst, 8)) {
      CmdPtr cmd = random_forest_command(rng, eng, st.lctx, st.gctx);
      if (!cmd) continue;
      auto r = eng.exec_forest(*cmd, st.lctx, st.gctx);
      if (!r.ok()) continue;
      ++checked;
      const Path& here = st.lctx.path;
      for (const auto& e : r.value().log) {
        bool local = e.path.is_prefix_of(here) ||
                     (!e.path.is_root() && *e.path.parent() == here);
        EXPECT_TRUE(local) << pretty(*cmd) << " logged "
                           << e.path.to_string() << " at "
                           << here.to_string();
      }
    }
  }
  EXPECT_GT(checked, 400);
}

TEST(Invariants, ReadEntriesMatchEmissionState) {
  testkit::Rng rng(2718);
  for (int i = 0; i < 200; ++i) {
    auto inst = testkit::gen_instance(rng);
    Engine eng(inst.table.get());
    LocalContext lctx = initial_context(root_path(), inst.root);
    GlobalContext gctx{PathSet{}, inst.fs};
    Log all;
    for (int s = 0; s < 10; ++s) {
      CmdPtr cmd = random_forest_command(rng, eng, lctx, gctx);
      if (!cmd) break;
      auto r = eng.exec_forest(*cmd, lctx, gctx);
      if (!r.ok()) continue;
      lctx = r.value().lctx;
      gctx = r.value().gctx;
      append_log(all, r.value().log);
    }
    EXPECT_TRUE(testkit::reads_match_replay(inst.fs, all));
  }
}
