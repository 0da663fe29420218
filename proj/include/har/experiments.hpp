#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "har/adaboost.hpp"
#include "har/convnet.hpp"
#include "har/datasets.hpp"
#include "har/similarity.hpp"

namespace har {

enum class SplitMode { SI, HYB };
enum class Method { PML, PDL, DL };

std::string to_string(SplitMode mode);
std::string to_string(Method method);
SplitMode split_mode_from_string(const std::string& text);
Method method_from_string(const std::string& text);

struct SplitSpec {
    SplitMode mode = SplitMode::SI;
    std::string test_subject;
    double hyb_fraction = 0.2;
    std::uint64_t seed = 0;
};

// Train/test partition as indices into bundle.windows. Donated test-subject
// windows are recognizable by their subject_id; labels that could not
// donate (a single window cannot both donate and test) are flagged.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<std::string> flagged_labels;
};

// Subject-independent: every window of test_subject goes to test, everything
// else to train. Throws on an unknown subject.
Split make_si_split(const DatasetBundle& bundle, const std::string& test_subject);

// Hybrid: per class of the test subject, floor(fraction * n_class) windows
// (at least 1 when n_class >= 2) move to train, chosen by a seeded shuffle;
// the rest stay in test. Other subjects' windows all train.
Split make_hyb_split(const DatasetBundle& bundle, const std::string& test_subject,
                     double fraction, std::uint64_t seed);

// 10, 15, 20, ... with a final entry equal to `available` if not already
// present; just {available} when available < 10.
std::vector<int> pdl_schedule(int available);

struct RunResult {
    std::string dataset;
    Method method = Method::DL;
    std::optional<SimilarityKind> sim_kind;
    SplitMode split = SplitMode::SI;
    std::string test_subject;
    std::optional<int> m;
    double accuracy = 0.0;
    int n_test = 0;
};

struct EngineConfigs {
    AdaBoostConfig adaboost;
    // Template for the convnet; input_length/classes/seed are filled in
    // per run from the bundle and the derived seed.
    NetConfig net = NetConfig::reference(150, 2);
    GammaMode gamma_mode = GammaMode::median();
    std::uint64_t master_seed = 0;
    // Optional sink for per-training epoch logs, keyed "subject/method/m".
    std::function<void(const std::string& tag, const std::vector<EpochStats>&)> epoch_log_sink;
};

// Stable fan-out of the master seed so any one cell of the results table is
// re-runnable in isolation.
std::uint64_t derive_seed(std::uint64_t master, const std::string& tag);

// Executes one method for one test subject:
//   PML - similarity-weighted AdaBoost on window features, one result
//   PDL - convnet on the top-m most similar subjects for each m in
//         pdl_schedule (donated HYB windows always included), one result per m
//   DL  - convnet on the full training set, one result
// PML/PDL require sim_kind; DL ignores it.
std::vector<RunResult> run_experiment(const DatasetBundle& bundle, Method method,
                                      std::optional<SimilarityKind> sim_kind,
                                      const SplitSpec& split_spec, const EngineConfigs& configs);

struct SummaryRow {
    std::map<std::string, std::string> group;  // group_by field -> value
    double accuracy = 0.0;
    int n_runs = 0;
};

// Macro average: within each group, runs are first averaged per subject
// (collapsing the PDL m sweep), then across subjects, all unweighted.
// group_by fields: dataset, method, sim_kind, split.
std::vector<SummaryRow> macro_accuracy(const std::vector<RunResult>& results,
                                       const std::vector<std::string>& group_by);

// Results CSV: dataset,method,sim_kind,split,subject_id,m,n_test,accuracy
// (sim_kind empty for DL, m empty for PML/DL).
std::string results_to_csv(const std::vector<RunResult>& results);
std::vector<RunResult> results_from_csv(const std::string& text);

}  // namespace har
