#include <gtest/gtest.h>

#include "support/testkit.hpp"
#include "txforest/engine.hpp"
#include "txforest/zipper.hpp"

using namespace txf;

TEST(MkRoot, SingletonShape) {
  Zipper z = Zipper::root(Spec::file());
  EXPECT_FALSE(z.has_parent());
  EXPECT_FALSE(z.has_left());
  EXPECT_FALSE(z.has_right());
  EXPECT_EQ(z.current().spec->kind, Spec::Kind::File);
  EXPECT_TRUE(z.current().env.empty());
}

TEST(MkRoot, GradesCoreHasNoParent) {
  Zipper z = Zipper::root(testkit::grades_table()->at("grades"));
  EXPECT_FALSE(z.has_parent());
  EXPECT_EQ(z.left_count() + z.right_count(), 0u);
}

TEST(Shifts, RightThenLeftIsIdentity) {
  Zipper z = Zipper::root(Spec::file())
                 .push_child(ZNode{Env{}, Spec::file()},
                             {ZNode{Env{}, Spec::dir()}});
  auto right = z.shift_right();
  ASSERT_TRUE(right.has_value());
  EXPECT_EQ(right->current().spec->kind, Spec::Kind::Dir);
  auto back = right->shift_left();
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(back->current().spec, z.current().spec);
  // parent cell is shared, not copied
  EXPECT_TRUE(back->parent().same_rep(z.parent()));
}

TEST(Shifts, NoSiblingAtEnds) {
  Zipper z = Zipper::root(Spec::file());
  EXPECT_FALSE(z.shift_right().has_value());
  EXPECT_FALSE(z.shift_left().has_value());
}

TEST(Shifts, LeftMovesFocus) {
  // left=[a], cur=b: shift_left gives cur=a, right=[b].
  Zipper start = Zipper::root(Spec::file())
                     .push_child(ZNode{Env{}, Spec::file()},
                                 {ZNode{Env{}, Spec::dir()}});
  Zipper at_b = *start.shift_right();
  ASSERT_TRUE(at_b.has_left());
  Zipper at_a = *at_b.shift_left();
  EXPECT_EQ(at_a.current().spec->kind, Spec::Kind::File);
  EXPECT_EQ(at_a.right_count(), 1u);
  EXPECT_EQ(at_a.left_count(), 0u);
}

TEST(GotoRoot, IdentityOnRoot) {
  Path p = *Path::parse("/grades");
  Zipper z = Zipper::root(testkit::grades_table()->at("grades"));
  auto [rp, rz] = goto_root(p, z);
  EXPECT_EQ(rp, p);
  EXPECT_TRUE(rz.same_rep(z));
}

TEST(GotoRoot, PopsOnePerPathAncestor) {
  auto table = testkit::grades_table();
  Engine eng(table.get());
  LocalContext lctx = initial_context(*Path::parse("/grades"),
                                      table->at("grades"));
  GlobalContext gctx{PathSet{}, testkit::fs0()};

  // into_pair; next; into_comp; down: exactly one Path ancestor.
  auto r1 = eng.exec_nav(Navigation::IntoPair, lctx, gctx);
  ASSERT_TRUE(r1.ok());
  auto r2 = eng.exec_nav(Navigation::Next, r1.value().lctx, r1.value().gctx);
  ASSERT_TRUE(r2.ok());
  auto r3 = eng.exec_nav(Navigation::IntoComp, r2.value().lctx, r2.value().gctx);
  ASSERT_TRUE(r3.ok());
  auto r4 = eng.exec_nav(Navigation::Down, r3.value().lctx, r3.value().gctx);
  ASSERT_TRUE(r4.ok());
  EXPECT_EQ(r4.value().lctx.path, *Path::parse("/grades/hw1"));

  auto [rp, rz] = goto_root(r4.value().lctx.path, r4.value().lctx.zipper);
  EXPECT_EQ(rp, *Path::parse("/grades"));
  EXPECT_FALSE(rz.has_parent());
  EXPECT_TRUE(rz.same_rep(lctx.zipper));
}

// For any navigation walk from the root, goto_root recovers the initial
// path and the very zipper cell it started from.
TEST(GotoRoot, RecoversInitialStateOnRandomWalks) {
  testkit::Rng rng(5150);
  for (int i = 0; i < 300; ++i) {
    auto inst = testkit::gen_instance(rng);
    Engine eng(inst.table.get());
    auto states = testkit::walk_states(rng, eng, inst, rng.range(1, 12));
    const auto& last = states.back();
    auto [rp, rz] = goto_root(last.lctx.path, last.lctx.zipper);
    EXPECT_EQ(rp, root_path());
    EXPECT_TRUE(rz.same_rep(states.front().lctx.zipper));
  }
}

TEST(Zipper, PushChildSharesParentCell) {
  Zipper z = Zipper::root(testkit::grades_table()->at("grades"));
  Zipper child = z.push_child(ZNode{Env{}, Spec::file()});
  ASSERT_TRUE(child.has_parent());
  EXPECT_TRUE(child.parent().same_rep(z));
}
