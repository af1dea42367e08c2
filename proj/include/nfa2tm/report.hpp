#pragma once

// The `report --suite standard` payload: a fixed, deterministic batch of
// builds, equivalence checks, and profiles, emitted as CSV files. Reruns
// with the same seed are byte-identical.

#include <string>
#include <vector>

namespace nfa2tm {

struct ReportFile {
    std::string name;
    std::string content;
};

std::vector<ReportFile> standard_report(uint64_t seed);

}  // namespace nfa2tm
