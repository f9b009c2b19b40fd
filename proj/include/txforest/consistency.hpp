#pragma once

#include <optional>
#include <string>

#include "txforest/engine.hpp"

namespace txf {

// Outcome of a partial-consistency check. `consistent` says whether the
// traversed portion conforms; `total` whether the whole filestore was in
// reach of the path set. The flags are independent: conjunction
// short-circuits to {false,false} as soon as a conformance check fails.
struct ConsistencyResult {
  bool consistent = true;
  bool total = true;
  Log log;
};

// First conformance failure encountered, for human-readable reports.
struct ConsistencyFailure {
  Path path;
  std::string expected;
  std::string found;
};

// Partial consistency: conformance of the pathset-guarded portion of the
// filestore to the zipper's spec.
Result<ConsistencyResult> pconsistent(const Engine& eng, const PathSet& pathset,
                                      const FileStoreState& fs, const Path& p,
                                      const Zipper& z,
                                      ConsistencyFailure* failure = nullptr);

// Full consistency: the same recursion with the path-set guard removed and
// the totality flag dropped.
Result<bool> consistent(const Engine& eng, const FileStoreState& fs,
                        const Path& p, const Zipper& z,
                        ConsistencyFailure* failure = nullptr);

// The totality flag of pconsistent.
Result<bool> cover(const Engine& eng, const Path& p, const Zipper& z,
                   const PathSet& pathset, const FileStoreState& fs);

// Least path set covering the filestore under the spec, computed by a full
// traversal collecting every path the checker visits. Pathological
// (unproductively recursive) specs are cut off by fuel.
Result<PathSet> cover_set(const Engine& eng, const Path& p, const Zipper& z,
                          const FileStoreState& fs, uint64_t fuel = 0);

}  // namespace txf
