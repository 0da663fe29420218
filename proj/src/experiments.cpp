#include "har/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "har/csv.hpp"
#include "har/features.hpp"

namespace har {

std::string to_string(SplitMode mode) { return mode == SplitMode::SI ? "SI" : "HYB"; }

std::string to_string(Method method) {
    switch (method) {
        case Method::PML: return "PML";
        case Method::PDL: return "PDL";
        case Method::DL: return "DL";
    }
    return "?";
}

SplitMode split_mode_from_string(const std::string& text) {
    if (text == "SI") return SplitMode::SI;
    if (text == "HYB") return SplitMode::HYB;
    throw std::invalid_argument("unknown split mode: " + text);
}

Method method_from_string(const std::string& text) {
    if (text == "PML") return Method::PML;
    if (text == "PDL") return Method::PDL;
    if (text == "DL") return Method::DL;
    throw std::invalid_argument("unknown method: " + text);
}

Split make_si_split(const DatasetBundle& bundle, const std::string& test_subject) {
    if (!bundle.subject_index(test_subject))
        throw std::invalid_argument("make_si_split: unknown subject '" + test_subject + "'");
    Split split;
    for (std::size_t i = 0; i < bundle.windows.size(); ++i) {
        if (bundle.windows[i].subject_id == test_subject) {
            split.test.push_back(i);
        } else {
            split.train.push_back(i);
        }
    }
    return split;
}

Split make_hyb_split(const DatasetBundle& bundle, const std::string& test_subject,
                     double fraction, std::uint64_t seed) {
    if (!bundle.subject_index(test_subject))
        throw std::invalid_argument("make_hyb_split: unknown subject '" + test_subject + "'");
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("make_hyb_split: fraction must be in (0, 1)");

    Split split;
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < bundle.windows.size(); ++i) {
        if (bundle.windows[i].subject_id == test_subject) {
            by_class[bundle.windows[i].label].push_back(i);
        } else {
            split.train.push_back(i);
        }
    }

    std::mt19937_64 rng(seed);
    for (const std::string& label : bundle.label_set) {
        auto it = by_class.find(label);
        if (it == by_class.end()) continue;
        auto& indices = it->second;
        const std::size_t n = indices.size();
        if (n == 1) {
            // A single window cannot both donate and test; it stays in test.
            split.flagged_labels.push_back(label);
            split.test.push_back(indices.front());
            continue;
        }
        std::size_t donated = static_cast<std::size_t>(
            std::floor(fraction * static_cast<double>(n)));
        if (donated == 0) donated = 1;
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng() % i);
            std::swap(indices[i - 1], indices[j]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            (i < donated ? split.train : split.test).push_back(indices[i]);
        }
    }

    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

std::vector<int> pdl_schedule(int available) {
    if (available < 1) throw std::invalid_argument("pdl_schedule: available must be >= 1");
    if (available < 10) return {available};
    std::vector<int> schedule;
    for (int m = 10; m <= available; m += 5) schedule.push_back(m);
    if (schedule.back() != available) schedule.push_back(available);
    return schedule;
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& tag) {
    std::uint64_t h = 1469598103934665603ull ^ master;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 1099511628211ull;
    }
    h += 0x9e3779b97f4a7c15ull;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    return h ^ (h >> 31);
}

namespace {

std::map<std::string, int> label_index_of(const DatasetBundle& bundle) {
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < bundle.label_set.size(); ++i)
        index[bundle.label_set[i]] = static_cast<int>(i);
    return index;
}

// One signature per subject, aligned with bundle.subjects. Training
// subjects use only their training-visible windows; the test subject uses
// its own windows label-free.
std::vector<FeatureVector> signatures_for(const DatasetBundle& bundle, const Split& split,
                                          const std::string& test_subject) {
    std::map<std::string, std::vector<const LabeledWindow*>> windows;
    for (std::size_t idx : split.train) {
        const LabeledWindow& w = bundle.windows[idx];
        if (w.subject_id != test_subject) windows[w.subject_id].push_back(&w);
    }
    for (const LabeledWindow& w : bundle.windows) {
        if (w.subject_id == test_subject) windows[test_subject].push_back(&w);
    }

    std::vector<FeatureVector> signatures;
    signatures.reserve(bundle.subjects.size());
    for (const auto& subject : bundle.subjects) {
        auto it = windows.find(subject.subject_id);
        if (it == windows.end() || it->second.empty())
            throw std::runtime_error("run_experiment: subject '" + subject.subject_id +
                                     "' has no windows to build a signature from");
        signatures.push_back(subject_signature(it->second));
    }
    return signatures;
}

void warn_missing_classes(const DatasetBundle& bundle, const Split& split) {
    std::set<std::string> train_labels;
    for (std::size_t idx : split.train) train_labels.insert(bundle.windows[idx].label);
    std::set<std::string> missing;
    for (std::size_t idx : split.test) {
        const std::string& label = bundle.windows[idx].label;
        if (!train_labels.count(label)) missing.insert(label);
    }
    for (const auto& label : missing) {
        std::cerr << "note: class '" << label
                  << "' absent from training; its test windows cannot be correct\n";
    }
}

double evaluate_boost(const BoostModel& model, const DatasetBundle& bundle, const Split& split,
                      const std::map<std::string, int>& labels) {
    std::size_t correct = 0;
    for (std::size_t idx : split.test) {
        const LabeledWindow& w = bundle.windows[idx];
        if (predict(model, extract_features(w).values) == labels.at(w.label)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(split.test.size());
}

double evaluate_net(const NetConfig& config, const NetParams& params, const DatasetBundle& bundle,
                    const Split& split, const std::map<std::string, int>& labels) {
    std::size_t correct = 0;
    for (std::size_t idx : split.test) {
        const LabeledWindow& w = bundle.windows[idx];
        if (predict(config, params, w).label == labels.at(w.label)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(split.test.size());
}

}  // namespace

std::vector<RunResult> run_experiment(const DatasetBundle& bundle, Method method,
                                      std::optional<SimilarityKind> sim_kind,
                                      const SplitSpec& split_spec, const EngineConfigs& configs) {
    if (!bundle.subject_index(split_spec.test_subject))
        throw std::invalid_argument("run_experiment: unknown subject '" +
                                    split_spec.test_subject + "'");
    if (method != Method::DL && !sim_kind)
        throw std::invalid_argument("run_experiment: " + to_string(method) +
                                    " requires a similarity kind");
    if (bundle.windows.empty()) throw std::invalid_argument("run_experiment: empty bundle");

    const Split split = split_spec.mode == SplitMode::SI
                            ? make_si_split(bundle, split_spec.test_subject)
                            : make_hyb_split(bundle, split_spec.test_subject,
                                             split_spec.hyb_fraction, split_spec.seed);
    if (split.test.empty())
        throw std::runtime_error("run_experiment: no test windows for subject '" +
                                 split_spec.test_subject + "'");
    if (split_spec.mode == SplitMode::SI) {
        for (std::size_t idx : split.train) {
            if (bundle.windows[idx].subject_id == split_spec.test_subject)
                throw std::logic_error("run_experiment: SI leakage detected");
        }
    }
    warn_missing_classes(bundle, split);

    const auto labels = label_index_of(bundle);

    SimilarityMatrix matrix;
    if (method != Method::DL) {
        std::vector<FeatureVector> signatures;
        if (*sim_kind != SimilarityKind::physical)
            signatures = signatures_for(bundle, split, split_spec.test_subject);
        SimilarityConfig sim_config;
        sim_config.gamma_mode = configs.gamma_mode;
        sim_config.kind = *sim_kind;
        matrix = build_matrix(*sim_kind, bundle.subjects, signatures, sim_config);
    }

    RunResult base;
    base.dataset = bundle.name;
    base.method = method;
    base.sim_kind = method == Method::DL ? std::nullopt : sim_kind;
    base.split = split_spec.mode;
    base.test_subject = split_spec.test_subject;
    base.n_test = static_cast<int>(split.test.size());

    std::vector<RunResult> results;

    if (method == Method::PML) {
        const std::size_t test_row = matrix.index_of(split_spec.test_subject);
        std::vector<std::vector<double>> feats;
        std::vector<int> train_labels;
        std::vector<double> priors;
        feats.reserve(split.train.size());
        for (std::size_t idx : split.train) {
            const LabeledWindow& w = bundle.windows[idx];
            feats.push_back(extract_features(w).values);
            train_labels.push_back(labels.at(w.label));
            // Donated HYB windows belong to the test subject; the diagonal
            // gives them weight exactly 1.
            priors.push_back(matrix.at(test_row, matrix.index_of(w.subject_id)));
        }
        const BoostModel model = train_adaboost(feats, train_labels, bundle.label_set,
                                                PriorWeights(priors), configs.adaboost);
        RunResult r = base;
        r.accuracy = evaluate_boost(model, bundle, split, labels);
        results.push_back(std::move(r));
        return results;
    }

    // Convnet paths. The seed tag depends only on subject and the effective
    // subject count, so PDL at m = available and DL share a seed and train
    // identically on the identical window set.
    const int window_length = static_cast<int>(bundle.windows.front().samples.size());
    const int available = static_cast<int>(bundle.subjects.size()) - 1;
    auto net_config_for = [&](int m_effective) {
        NetConfig net = configs.net;
        net.input_length = window_length;
        net.classes = static_cast<int>(bundle.label_set.size());
        net.seed = derive_seed(configs.master_seed,
                               split_spec.test_subject + "/net/m=" + std::to_string(m_effective));
        return net;
    };
    auto run_net = [&](const NetConfig& net, const std::vector<std::size_t>& train_idx,
                       std::optional<int> m) {
        std::vector<NetSample> samples;
        samples.reserve(train_idx.size());
        for (std::size_t idx : train_idx) {
            const LabeledWindow& w = bundle.windows[idx];
            samples.push_back({&w, labels.at(w.label)});
        }
        std::vector<EpochStats> log;
        EpochObserver observer;
        if (configs.epoch_log_sink)
            observer = [&log](const EpochStats& stats) { log.push_back(stats); };
        const NetParams params = train_net(net, samples, observer);
        if (configs.epoch_log_sink) {
            configs.epoch_log_sink(split_spec.test_subject + "/" + to_string(method) +
                                       (m ? "/m=" + std::to_string(*m) : ""),
                                   log);
        }
        RunResult r = base;
        r.m = m;
        r.accuracy = evaluate_net(net, params, bundle, split, labels);
        results.push_back(std::move(r));
    };

    if (method == Method::DL) {
        run_net(net_config_for(available), split.train, std::nullopt);
        return results;
    }

    for (int m : pdl_schedule(available)) {
        const auto selected = top_m_similar(matrix, split_spec.test_subject, m);
        const std::set<std::string> chosen(selected.begin(), selected.end());
        std::vector<std::size_t> train_idx;
        for (std::size_t idx : split.train) {
            const std::string& owner = bundle.windows[idx].subject_id;
            if (chosen.count(owner) || owner == split_spec.test_subject)
                train_idx.push_back(idx);
        }
        run_net(net_config_for(m), train_idx, m);
    }
    return results;
}

std::vector<SummaryRow> macro_accuracy(const std::vector<RunResult>& results,
                                       const std::vector<std::string>& group_by) {
    if (results.empty()) throw std::invalid_argument("macro_accuracy: empty results");
    const std::set<std::string> known = {"dataset", "method", "sim_kind", "split"};
    for (const auto& field : group_by) {
        if (!known.count(field))
            throw std::invalid_argument("macro_accuracy: unknown group field '" + field + "'");
    }

    auto field_value = [](const RunResult& r, const std::string& field) -> std::string {
        if (field == "dataset") return r.dataset;
        if (field == "method") return to_string(r.method);
        if (field == "sim_kind") return r.sim_kind ? to_string(*r.sim_kind) : "";
        return to_string(r.split);
    };

    // group key -> subject -> per-subject accuracies (the PDL m sweep).
    std::map<std::vector<std::string>, std::map<std::string, std::vector<double>>> groups;
    std::map<std::vector<std::string>, int> counts;
    for (const auto& r : results) {
        std::vector<std::string> key;
        key.reserve(group_by.size());
        for (const auto& field : group_by) key.push_back(field_value(r, field));
        groups[key][r.test_subject].push_back(r.accuracy);
        ++counts[key];
    }

    std::vector<SummaryRow> rows;
    for (const auto& [key, subjects] : groups) {
        double total = 0.0;
        for (const auto& [subject, accs] : subjects) {
            double subject_sum = 0.0;
            for (double a : accs) subject_sum += a;
            total += subject_sum / static_cast<double>(accs.size());
        }
        SummaryRow row;
        for (std::size_t i = 0; i < group_by.size(); ++i) row.group[group_by[i]] = key[i];
        row.accuracy = total / static_cast<double>(subjects.size());
        row.n_runs = counts[key];
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string results_to_csv(const std::vector<RunResult>& results) {
    std::ostringstream out;
    out << "dataset,method,sim_kind,split,subject_id,m,n_test,accuracy\n";
    for (const auto& r : results) {
        out << r.dataset << ',' << to_string(r.method) << ','
            << (r.sim_kind ? to_string(*r.sim_kind) : "") << ',' << to_string(r.split) << ','
            << r.test_subject << ',' << (r.m ? std::to_string(*r.m) : "") << ',' << r.n_test
            << ',' << csv::format_double(r.accuracy) << '\n';
    }
    return out.str();
}

std::vector<RunResult> results_from_csv(const std::string& text) {
    const auto table = csv::read_string(text);
    const std::vector<std::string> expected = {"dataset", "method",     "sim_kind", "split",
                                               "subject_id", "m",       "n_test",   "accuracy"};
    if (table.header != expected)
        throw std::runtime_error("results CSV: header mismatch");
    std::vector<RunResult> results;
    for (const auto& row : table.rows) {
        RunResult r;
        r.dataset = row[0];
        r.method = method_from_string(row[1]);
        r.sim_kind = row[2].empty() ? std::nullopt
                                    : std::optional<SimilarityKind>(
                                          similarity_kind_from_string(row[2]));
        r.split = split_mode_from_string(row[3]);
        r.test_subject = row[4];
        r.m = row[5].empty() ? std::nullopt
                             : std::optional<int>(static_cast<int>(
                                   csv::parse_long(row[5], "results CSV")));
        r.n_test = static_cast<int>(csv::parse_long(row[6], "results CSV"));
        r.accuracy = csv::parse_double(row[7], "results CSV");
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace har
