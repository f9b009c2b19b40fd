#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support/testkit.hpp"
#include "txforest/filestore.hpp"
#include "txforest/storage.hpp"
#include "txforest/txn.hpp"

using namespace txf;
using testkit::fs0;

namespace {

Path p(const std::string& text) { return *Path::parse(text); }

FileStoreState from_entries(
    std::initializer_list<std::pair<const char*, Contents>> entries) {
  FileStoreState::Map m;
  for (const auto& [path, c] : entries) m.insert_or_assign(p(path), c);
  return FileStoreState(std::move(m));
}

}  // namespace

TEST(Path, ParsingAndStructure) {
  EXPECT_EQ(p("/").components().size(), 0u);
  EXPECT_EQ(p("/a/b").to_string(), "/a/b");
  EXPECT_EQ(p("a/b"), p("/a/b"));
  EXPECT_FALSE(Path::parse("//a").has_value());
  EXPECT_FALSE(Path::parse("/a/").has_value());
  EXPECT_FALSE(root_path().parent().has_value());
  EXPECT_EQ(*p("/a/b").parent(), p("/a"));
  EXPECT_TRUE(p("/a").is_prefix_of(p("/a/b")));
  EXPECT_FALSE(p("/a/b").is_prefix_of(p("/a")));
  EXPECT_TRUE(p("/a/b").prefix_related(p("/a")));
  EXPECT_FALSE(p("/a").prefix_related(p("/b")));
  EXPECT_FALSE(p("/ab").is_prefix_of(p("/a/b")));
}

TEST(WellFormed, MinimalRoot) {
  EXPECT_TRUE(is_well_formed(from_entries({{"/", Contents::empty_dir()}})));
}

TEST(WellFormed, MissingChildMapping) {
  EXPECT_FALSE(is_well_formed(from_entries({{"/", Contents::dir({"a"})}})));
}

TEST(WellFormed, GradesTree) { EXPECT_TRUE(is_well_formed(fs0())); }

TEST(WellFormed, RejectsOrphanAndFileRoot) {
  EXPECT_FALSE(is_well_formed(from_entries(
      {{"/", Contents::empty_dir()}, {"/a", Contents::file("x")}})));
  EXPECT_FALSE(is_well_formed(from_entries({{"/", Contents::file("x")}})));
  EXPECT_FALSE(is_well_formed(FileStoreState{}));
}

TEST(Close, CreatesMissingChildrenAsEmptyFiles) {
  FileStoreState out = close_fs(from_entries({{"/", Contents::dir({"a"})}}));
  EXPECT_EQ(out, from_entries({{"/", Contents::dir({"a"})},
                               {"/a", Contents::empty_file()}}));
}

TEST(Close, FixedPointOnWellFormed) { EXPECT_EQ(close_fs(fs0()), fs0()); }

TEST(Close, PrunesDescendantsOfFiles) {
  FileStoreState out = close_fs(from_entries({{"/", Contents::dir({"a"})},
                                              {"/a", Contents::file("x")},
                                              {"/a/b", Contents::file("y")}}));
  EXPECT_EQ(out, from_entries({{"/", Contents::dir({"a"})},
                               {"/a", Contents::file("x")}}));
}

TEST(Close, IdempotentOnRandomPartialMaps) {
  testkit::Rng rng(20240601);
  for (int i = 0; i < 500; ++i) {
    FileStoreState partial = testkit::gen_partial_map(rng);
    FileStoreState once = close_fs(partial);
    EXPECT_TRUE(is_well_formed(once)) << to_snapshot_text(once);
    EXPECT_EQ(close_fs(once), once) << to_snapshot_text(partial);
  }
}

TEST(AddNode, ExistingChildIsNoOp) {
  auto [out, log] = add_node(fs0(), p("/grades/hw1"), "max");
  EXPECT_EQ(out, fs0());
  EXPECT_TRUE(log.empty());
}

TEST(AddNode, NewChildGetsEmptyFile) {
  auto [out, log] = add_node(fs0(), p("/grades/hw1"), "bbb42");
  EXPECT_EQ(out.get(p("/grades/hw1/bbb42")), Contents::empty_file());
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0],
            write_dir_entry(Contents::dir({"aaa17", "max"}),
                            Contents::dir({"aaa17", "bbb42", "max"}),
                            p("/grades/hw1")));
  EXPECT_TRUE(is_well_formed(out));
}

TEST(AddNode, AtRoot) {
  auto [out, log] = add_node(from_entries({{"/", Contents::empty_dir()}}),
                             root_path(), "a");
  EXPECT_EQ(out, from_entries({{"/", Contents::dir({"a"})},
                               {"/a", Contents::empty_file()}}));
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0], write_dir_entry(Contents::empty_dir(),
                                    Contents::dir({"a"}), root_path()));
}

TEST(AddNode, CreatesAncestorsWhenAbsent) {
  auto [out, log] =
      add_node(from_entries({{"/", Contents::empty_dir()}}), p("/x/y"), "z");
  EXPECT_TRUE(is_well_formed(out));
  EXPECT_EQ(out.get(p("/x/y"))->children(), std::set<std::string>{"z"});
  EXPECT_EQ(out.get(p("/x/y/z")), Contents::empty_file());
  ASSERT_EQ(log.size(), 3u);  // ancestors first, target last
  EXPECT_EQ(log[0].path, root_path());
  EXPECT_EQ(log[1].path, p("/x"));
  EXPECT_EQ(log[2].path, p("/x/y"));
}

TEST(AddNode, ConvertsFileToDir) {
  auto [out, log] = add_node(fs0(), p("/grades/hw1/max"), "u");
  EXPECT_TRUE(is_well_formed(out));
  EXPECT_EQ(out.get(p("/grades/hw1/max"))->children(),
            std::set<std::string>{"u"});
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0], write_dir_entry(Contents::file("100"), Contents::dir({"u"}),
                                    p("/grades/hw1/max")));
}

TEST(AddNode, Idempotent) {
  testkit::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    auto inst = testkit::gen_instance(rng);
    std::vector<Path> paths;
    for (const auto& [q, c] : inst.fs.entries()) paths.push_back(q);
    const Path& target = paths[rng.next(paths.size())];
    std::string u = "u" + std::to_string(rng.next(3));
    auto [once, log1] = add_node(inst.fs, target, u);
    auto [twice, log2] = add_node(once, target, u);
    EXPECT_EQ(once, twice);
    EXPECT_TRUE(log2.empty());
    EXPECT_TRUE(is_well_formed(once));
  }
}

TEST(MakeFile, OverwritesAndLogs) {
  auto r = make_file(fs0(), p("/grades/hw1/max"), "95");
  ASSERT_TRUE(r.ok());
  const auto& [out, log] = r.value();
  EXPECT_EQ(out.get(p("/grades/hw1/max")), Contents::file("95"));
  ASSERT_FALSE(log.empty());
  EXPECT_EQ(log.back(), write_file_entry(Contents::file("100"),
                                         Contents::file("95"),
                                         p("/grades/hw1/max")));
}

TEST(MakeFile, RootIsModelViolation) {
  auto r = make_file(fs0(), root_path(), "boom");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error().code, "ModelViolation");
}

TEST(MakeDir, SetAlgebraOnExistingDir) {
  // node has {max, aaa17}; storing {aaa17, ccc3} drops max, keeps aaa17
  // untouched, creates ccc3 as an empty file.
  auto [out, log] = make_dir(fs0(), p("/grades/hw1"), {"aaa17", "ccc3"});
  EXPECT_TRUE(is_well_formed(out));
  EXPECT_FALSE(out.contains(p("/grades/hw1/max")));
  EXPECT_EQ(out.get(p("/grades/hw1/aaa17")), Contents::file("87"));
  EXPECT_EQ(out.get(p("/grades/hw1/ccc3")), Contents::empty_file());
}

TEST(MakeDir, IdentityStore) {
  auto [out, log] = make_dir(fs0(), p("/grades/hw1"), {"max", "aaa17"});
  EXPECT_EQ(out, fs0());
  EXPECT_EQ(log.size(), 1u);
}

TEST(MakeDir, AtRootReplacesChildren) {
  auto [out, log] = make_dir(fs0(), root_path(), {"other"});
  EXPECT_TRUE(is_well_formed(out));
  EXPECT_FALSE(out.contains(p("/grades")));
  EXPECT_EQ(out.get(p("/other")), Contents::empty_file());
}

// Replaying the write entries of any helper log via update reproduces the
// helper's output.
TEST(Helpers, LogReplayReproducesResult) {
  testkit::Rng rng(99);
  for (int i = 0; i < 300; ++i) {
    auto inst = testkit::gen_instance(rng);
    std::vector<Path> paths;
    for (const auto& [q, c] : inst.fs.entries()) paths.push_back(q);
    Path target = paths[rng.next(paths.size())];
    FileStoreState out;
    Log log;
    switch (rng.next(3)) {
      case 0: {
        auto [o, l] = add_node(inst.fs, target, "w" + std::to_string(i % 3));
        out = o;
        log = l;
        break;
      }
      case 1: {
        if (target.is_root()) continue;
        auto r = make_file(inst.fs, target, rng.int_string());
        ASSERT_TRUE(r.ok());
        out = r.value().first;
        log = r.value().second;
        break;
      }
      default: {
        auto [o, l] = make_dir(inst.fs, target, {"k1", "k2"});
        out = o;
        log = l;
        break;
      }
    }
    EXPECT_EQ(merge(inst.fs, log), out);
    EXPECT_TRUE(is_well_formed(out));
  }
}

TEST(SnapshotText, GoldenFormat) {
  std::string text = to_snapshot_text(fs0());
  EXPECT_EQ(text,
            "/\tD\tgrades\n"
            "/grades\tD\thw1,hw2\n"
            "/grades/hw1\tD\taaa17,max\n"
            "/grades/hw1/aaa17\tF\tODc=\n"
            "/grades/hw1/max\tF\tMTAw\n"
            "/grades/hw2\tD\tmax\n"
            "/grades/hw2/max\tF\tNTA=\n");
  auto back = from_snapshot_text(text);
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back.value(), fs0());
}

TEST(SnapshotText, RoundTripsRandomStores) {
  testkit::Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    FileStoreState fs = testkit::gen_instance(rng).fs;
    auto back = from_snapshot_text(to_snapshot_text(fs));
    ASSERT_TRUE(back.ok());
    EXPECT_EQ(back.value(), fs);
  }
}

TEST(SnapshotText, Base64EdgeCases) {
  for (const std::string& s :
       {std::string(), std::string("a"), std::string("ab"),
        std::string("abc"), std::string("\n\t\x01\x7f", 4)}) {
    auto enc = detail::base64_encode(s);
    auto dec = detail::base64_decode(enc);
    ASSERT_TRUE(dec.has_value());
    EXPECT_EQ(*dec, s);
  }
  EXPECT_FALSE(detail::base64_decode("a").has_value());
  EXPECT_FALSE(detail::base64_decode("!@#$").has_value());
}

TEST(PosixStorage, SnapshotApplyRoundTrip) {
  namespace stdfs = std::filesystem;
  stdfs::path dir = stdfs::temp_directory_path() / "txf_storage_test";
  stdfs::remove_all(dir);
  stdfs::create_directories(dir / "grades" / "hw1");
  std::ofstream(dir / "grades" / "hw1" / "max") << "100";
  std::ofstream(dir / "grades" / "hw1" / "aaa17") << "87";

  PosixStorage storage(dir.string());
  auto snap = storage.snapshot();
  ASSERT_TRUE(snap.ok());
  EXPECT_TRUE(is_well_formed(snap.value()));
  EXPECT_EQ(snap.value().get(p("/grades/hw1/max")), Contents::file("100"));

  auto made = make_file(snap.value(), p("/grades/hw1/max"), "42");
  ASSERT_TRUE(made.ok());
  ASSERT_TRUE(storage.apply(writes_only(made.value().second)).ok());
  auto snap2 = storage.snapshot();
  ASSERT_TRUE(snap2.ok());
  EXPECT_EQ(snap2.value(), made.value().first);

  // apply is idempotent per the entries' final values
  ASSERT_TRUE(storage.apply(writes_only(made.value().second)).ok());
  auto snap3 = storage.snapshot();
  ASSERT_TRUE(snap3.ok());
  EXPECT_EQ(snap3.value(), snap2.value());
  stdfs::remove_all(dir);
}

TEST(PosixStorage, RejectsSymlinks) {
  namespace stdfs = std::filesystem;
  stdfs::path dir = stdfs::temp_directory_path() / "txf_symlink_test";
  stdfs::remove_all(dir);
  stdfs::create_directories(dir);
  std::ofstream(dir / "real") << "x";
  std::error_code ec;
  stdfs::create_symlink(dir / "real", dir / "link", ec);
  if (!ec) {
    PosixStorage storage(dir.string());
    auto snap = storage.snapshot();
    ASSERT_FALSE(snap.ok());
    EXPECT_EQ(snap.error().code, "StructuralError");
  }
  stdfs::remove_all(dir);
}

TEST(MemoryStorage, ApplyMergesWrites) {
  MemoryStorage storage(fs0());
  auto made = make_file(fs0(), p("/grades/hw2/max"), "60");
  ASSERT_TRUE(made.ok());
  ASSERT_TRUE(storage.apply(made.value().second).ok());
  EXPECT_EQ(storage.snapshot().value(), made.value().first);
  EXPECT_EQ(storage.read(p("/grades/hw2/max")), Contents::file("60"));
}
