#include "sbmlab/validate.hpp"
#include <ostream>
namespace sbmlab::validate {
std::vector<CriterionResult> run_acceptance(const std::vector<int>&, std::ostream& os, unsigned) {
    os << "acceptance suite not yet wired\n";
    return {};
}
bool all_passed(const std::vector<CriterionResult>& r) {
    for (const auto& c : r) if (!c.pass) return false;
    return true;
}
}
