#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pdtf {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

struct SelfTestReport {
  std::vector<CriterionResult> results;
  double total_seconds = 0.0;
  bool all_pass() const;
};

// Runs the whole verification suite, one line per criterion on the log
// stream. Quick mode shrinks the corpus and trial counts.
SelfTestReport run_selftest(bool quick, uint64_t seed, std::ostream& log);

}  // namespace pdtf
