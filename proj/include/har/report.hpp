#pragma once

#include <string>
#include <vector>

#include "har/experiments.hpp"

namespace har {

// Rendered result table: six rows (SI/HYB x physical/sensor/physical sensor),
// per dataset a "PDL - PML" paired column and a DL column that spans each
// split block. Cells are macro accuracies in percent with 2 decimals;
// missing cells render as an em dash and empty CSV fields.
struct ReportTable {
    std::string text;  // human-readable UTF-8 table
    std::string csv;   // dataset,split,sim_kind,pdl,pml,dl
};

// Pure function of the parsed results; re-rendering identical input is
// byte-identical.
ReportTable report_table(const std::vector<RunResult>& results);

}  // namespace har
