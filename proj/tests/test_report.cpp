#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "har/report.hpp"

using namespace har;

namespace {

RunResult cell(const std::string& dataset, Method method,
               std::optional<SimilarityKind> kind, SplitMode split, const std::string& subject,
               double accuracy, std::optional<int> m = std::nullopt) {
    RunResult r;
    r.dataset = dataset;
    r.method = method;
    r.sim_kind = kind;
    r.split = split;
    r.test_subject = subject;
    r.m = m;
    r.accuracy = accuracy;
    r.n_test = 10;
    return r;
}

std::vector<RunResult> full_results(double accuracy) {
    std::vector<RunResult> results;
    for (const std::string dataset : {"unimib-shar", "motion-sense"}) {
        for (SplitMode split : {SplitMode::SI, SplitMode::HYB}) {
            for (SimilarityKind kind : {SimilarityKind::physical, SimilarityKind::sensor,
                                        SimilarityKind::physical_sensor}) {
                results.push_back(cell(dataset, Method::PML, kind, split, "s1", accuracy));
                results.push_back(cell(dataset, Method::PDL, kind, split, "s1", accuracy, 10));
            }
            results.push_back(cell(dataset, Method::DL, std::nullopt, split, "s1", accuracy));
        }
    }
    return results;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("full results render the six-row table with paired cells") {
    const auto table = report_table(full_results(0.5));
    const auto lines = lines_of(table.text);
    REQUIRE(lines.size() == 8);  // 2 header lines + 6 data rows
    CHECK(lines[0].find("unimib-shar") != std::string::npos);
    CHECK(lines[0].find("motion-sense") != std::string::npos);
    CHECK(lines[1].find("PDL - PML") != std::string::npos);
    CHECK(lines[1].find("DL") != std::string::npos);
    CHECK(lines[2].rfind("SI-physical", 0) == 0);
    CHECK(lines[3].rfind("SI-sensor", 0) == 0);
    CHECK(lines[4].rfind("SI-physical sensor", 0) == 0);
    CHECK(lines[5].rfind("HYB-physical", 0) == 0);
    CHECK(lines[6].rfind("HYB-sensor", 0) == 0);
    CHECK(lines[7].rfind("HYB-physical sensor", 0) == 0);

    // every populated cell renders "50.00"
    CHECK(lines[2].find("50.00 - 50.00") != std::string::npos);
    // DL spans the split block: shown on the first row only
    CHECK(lines[2].find("50.00 - 50.00  50.00") != std::string::npos);
    CHECK(lines[3].find("50.00 - 50.00  50.00") == std::string::npos);

    const auto csv_lines = lines_of(table.csv);
    REQUIRE(csv_lines.size() == 13);  // header + 2 datasets x 6 rows
    CHECK(csv_lines[0] == "dataset,split,sim_kind,pdl,pml,dl");
    CHECK(csv_lines[1] == "unimib-shar,SI,physical,50.00,50.00,50.00");
}

TEST_CASE("missing cells render as dashes, never fabricated") {
    std::vector<RunResult> results;
    results.push_back(
        cell("unimib-shar", Method::PML, SimilarityKind::physical, SplitMode::SI, "s1", 0.5739));
    const auto table = report_table(results);
    const auto lines = lines_of(table.text);
    REQUIRE(lines.size() == 8);
    CHECK(lines[2].find("— - 57.39") != std::string::npos);  // no PDL run
    CHECK(lines[2].find("57.39  —") != std::string::npos);   // no DL run
    CHECK(lines[3].find("— - —") != std::string::npos);

    const auto csv_lines = lines_of(table.csv);
    CHECK(csv_lines[1] == "unimib-shar,SI,physical,,57.39,");
}

TEST_CASE("empty results render headers and row labels only") {
    const auto table = report_table({});
    const auto lines = lines_of(table.text);
    REQUIRE(lines.size() == 8);
    CHECK(lines[2].rfind("SI-physical", 0) == 0);
    CHECK(lines_of(table.csv).size() == 1);  // header only
}

TEST_CASE("macro averaging inside the table follows subject-then-m order") {
    std::vector<RunResult> results;
    // subject a: PDL m-sweep 1.0 and 0.0 -> 0.5; subject b: 1.0 -> macro 0.75
    results.push_back(cell("d", Method::PDL, SimilarityKind::sensor, SplitMode::SI, "a", 1.0, 10));
    results.push_back(cell("d", Method::PDL, SimilarityKind::sensor, SplitMode::SI, "a", 0.0, 15));
    results.push_back(cell("d", Method::PDL, SimilarityKind::sensor, SplitMode::SI, "b", 1.0, 10));
    const auto table = report_table(results);
    CHECK(table.csv.find("d,SI,sensor,75.00,,") != std::string::npos);
}

TEST_CASE("re-rendering is byte identical") {
    const auto results = full_results(0.789);
    const auto a = report_table(results);
    const auto b = report_table(results);
    CHECK(a.text == b.text);
    CHECK(a.csv == b.csv);
}
