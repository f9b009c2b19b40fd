#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "txforest/txn.hpp"

namespace txf::demo {

// The course-management specification from the shell demo: homework
// directories, each holding a max file and one score file per student.
const char* grades_spec_text();

// A filestore-backed work queue: one file per item, names item0000..;
// push appends after the highest id, pop takes the smallest.
const char* queue_spec_text();

// The fixed normalization map: affine rescale of [cmin,cmax] onto
// [gmin,gmax], rounded half-up. Idempotent once the score range already
// equals the goal range.
int64_t renorm_value(int64_t cmin, int64_t cmax, int64_t gmin, int64_t gmax,
                     int64_t x);

// Zipper programs to run inside run_txn/loop_txn against a grades root.
TxBody renormalize_body(std::string hw, int64_t gmin);

struct Stats {
  int64_t count = 0;
  int64_t min = 0;
  int64_t max = 0;
  double mean = 0.0;
};
TxBody stats_body(std::string hw, std::shared_ptr<Stats> out);

TxBody queue_push_body(std::string text,
                       std::shared_ptr<std::string> pushed_name = nullptr);
TxBody queue_pop_body(std::shared_ptr<std::string> out);

}  // namespace txf::demo
