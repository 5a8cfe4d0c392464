#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sbmlab::validate {

struct CriterionResult {
    int id;
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

// Run the numbered acceptance criteria (all when `ids` is empty), printing one
// pass/fail line per criterion. Returns the results; overall success is the
// conjunction of `pass`.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids, std::ostream& os,
                                            unsigned threads = 2);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace sbmlab::validate
