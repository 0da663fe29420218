#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "har/experiments.hpp"
#include "har/features.hpp"
#include "har/synth.hpp"

using namespace har;

namespace {

DatasetBundle toy_bundle(int n_subjects, int windows_per_subject, int n_labels = 2) {
    DatasetBundle bundle;
    bundle.name = "toy";
    for (int l = 0; l < n_labels; ++l) bundle.label_set.push_back("c" + std::to_string(l));
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int s = 0; s < n_subjects; ++s) {
        SubjectMeta meta;
        meta.subject_id = "s" + std::to_string(s);
        meta.sex = s % 2;
        meta.age = 20 + s;
        meta.weight_kg = 60.0 + s;
        meta.height_cm = 160.0 + s;
        bundle.subjects.push_back(meta);
        for (int w = 0; w < windows_per_subject; ++w) {
            LabeledWindow window;
            window.subject_id = meta.subject_id;
            window.label = bundle.label_set[static_cast<std::size_t>(w % n_labels)];
            window.window_id = w;
            window.rate_hz = 50.0;
            for (int t = 0; t < 10; ++t)
                window.samples.push_back({dist(rng), dist(rng), dist(rng)});
            bundle.windows.push_back(std::move(window));
        }
    }
    bundle.validate();
    return bundle;
}

PopulationSpec small_population(std::uint64_t seed) {
    PopulationSpec spec;
    spec.n_subjects = 6;
    spec.n_classes = 3;
    spec.windows_per_class = 4;
    spec.window_length = 30;
    spec.n_style_clusters = 2;
    spec.seed = seed;
    return spec;
}

NetConfig fast_net() {
    NetConfig net;
    net.conv_blocks = {{4, 3, 2}};
    net.dense_hidden = 8;
    net.learning_rate = 0.02;
    net.epochs = 5;
    net.batch_size = 16;
    return net;
}

}  // namespace

TEST_CASE("SI split is an exact leak-free partition") {
    const auto bundle = toy_bundle(3, 10);
    const auto split = make_si_split(bundle, "s1");
    CHECK(split.train.size() == 20);
    CHECK(split.test.size() == 10);
    for (std::size_t idx : split.train) CHECK(bundle.windows[idx].subject_id != "s1");
    for (std::size_t idx : split.test) CHECK(bundle.windows[idx].subject_id == "s1");

    std::set<std::size_t> all(split.train.begin(), split.train.end());
    all.insert(split.test.begin(), split.test.end());
    CHECK(all.size() == bundle.windows.size());

    CHECK_THROWS_AS(make_si_split(bundle, "ghost"), std::invalid_argument);
}

TEST_CASE("HYB split donates floor(fraction*n) with the min-1 rule") {
    // one subject with 10 windows of class c0 and 4 of class c1
    DatasetBundle bundle;
    bundle.name = "t";
    bundle.label_set = {"c0", "c1"};
    bundle.subjects = {{"a", 0, 30, 60, 170}, {"b", 1, 40, 80, 180}};
    auto add = [&](const std::string& subject, const std::string& label, int id) {
        LabeledWindow w;
        w.subject_id = subject;
        w.label = label;
        w.window_id = id;
        w.rate_hz = 50.0;
        w.samples.assign(5, {0.1, 0.2, 0.3});
        bundle.windows.push_back(std::move(w));
    };
    int id = 0;
    for (int i = 0; i < 10; ++i) add("a", "c0", id++);
    for (int i = 0; i < 4; ++i) add("a", "c1", id++);
    for (int i = 0; i < 6; ++i) add("b", "c0", id++);
    bundle.validate();

    const auto split = make_hyb_split(bundle, "a", 0.2, 7);
    std::map<std::string, int> donated;
    for (std::size_t idx : split.train) {
        if (bundle.windows[idx].subject_id == "a") ++donated[bundle.windows[idx].label];
    }
    CHECK(donated["c0"] == 2);  // floor(0.2*10)
    CHECK(donated["c1"] == 1);  // floor(0.2*4) = 0 promoted to 1
    CHECK(split.train.size() == 6 + 2 + 1);
    CHECK(split.test.size() == 8 + 3);

    // determinism
    const auto again = make_hyb_split(bundle, "a", 0.2, 7);
    CHECK(again.train == split.train);
    CHECK(again.test == split.test);

    // partition
    std::set<std::size_t> all(split.train.begin(), split.train.end());
    for (std::size_t idx : split.test) CHECK(all.insert(idx).second);
    CHECK(all.size() == bundle.windows.size());

    CHECK_THROWS_AS(make_hyb_split(bundle, "a", 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(make_hyb_split(bundle, "a", 1.0, 1), std::invalid_argument);
}

TEST_CASE("HYB split flags single-window classes") {
    DatasetBundle bundle;
    bundle.name = "t";
    bundle.label_set = {"c0", "c1"};
    bundle.subjects = {{"a", 0, 30, 60, 170}, {"b", 1, 40, 80, 180}};
    auto add = [&](const std::string& subject, const std::string& label, int id) {
        LabeledWindow w;
        w.subject_id = subject;
        w.label = label;
        w.window_id = id;
        w.rate_hz = 50.0;
        w.samples.assign(5, {0.1, 0.2, 0.3});
        bundle.windows.push_back(std::move(w));
    };
    add("a", "c0", 0);  // only one c0 window for the test subject
    add("a", "c1", 1);
    add("a", "c1", 2);
    add("b", "c0", 3);
    bundle.validate();

    const auto split = make_hyb_split(bundle, "a", 0.5, 3);
    CHECK(split.flagged_labels == std::vector<std::string>{"c0"});
    // the lone c0 window stays in test
    bool found = false;
    for (std::size_t idx : split.test) {
        if (bundle.windows[idx].window_id == 0) found = true;
    }
    CHECK(found);
}

TEST_CASE("pdl schedule starts at 10, steps by 5, caps at available") {
    CHECK(pdl_schedule(29) == std::vector<int>{10, 15, 20, 25, 29});
    CHECK(pdl_schedule(23) == std::vector<int>{10, 15, 20, 23});
    CHECK(pdl_schedule(20) == std::vector<int>{10, 15, 20});
    CHECK(pdl_schedule(10) == std::vector<int>{10});
    CHECK(pdl_schedule(7) == std::vector<int>{7});
    CHECK(pdl_schedule(1) == std::vector<int>{1});
    CHECK_THROWS_AS(pdl_schedule(0), std::invalid_argument);
}

TEST_CASE("derived seeds are stable and tag-sensitive") {
    const auto a = derive_seed(1, "s0/net/m=5");
    CHECK(a == derive_seed(1, "s0/net/m=5"));
    CHECK(a != derive_seed(2, "s0/net/m=5"));
    CHECK(a != derive_seed(1, "s0/net/m=6"));
}

TEST_CASE("PML with an all-ones similarity matrix equals uniform AdaBoost") {
    // identical physical metadata for everyone -> every similarity is 1
    auto bundle = generate_population(small_population(5));
    for (auto& s : bundle.subjects) {
        s.sex = 1;
        s.age = 30;
        s.weight_kg = 70.0;
        s.height_cm = 175.0;
    }

    EngineConfigs configs;
    configs.adaboost.rounds = 10;
    SplitSpec spec;
    spec.mode = SplitMode::SI;
    spec.test_subject = "s2";
    const auto results =
        run_experiment(bundle, Method::PML, SimilarityKind::physical, spec, configs);
    REQUIRE(results.size() == 1);

    // uniform-prior AdaBoost trained on the same windows in the same order
    const auto split = make_si_split(bundle, "s2");
    std::vector<std::vector<double>> feats;
    std::vector<int> labels;
    std::map<std::string, int> label_index;
    for (std::size_t i = 0; i < bundle.label_set.size(); ++i)
        label_index[bundle.label_set[i]] = static_cast<int>(i);
    for (std::size_t idx : split.train) {
        feats.push_back(extract_features(bundle.windows[idx]).values);
        labels.push_back(label_index.at(bundle.windows[idx].label));
    }
    const auto model = train_adaboost(feats, labels, bundle.label_set,
                                      PriorWeights::uniform(feats.size()), configs.adaboost);
    std::size_t correct = 0;
    for (std::size_t idx : split.test) {
        if (predict(model, extract_features(bundle.windows[idx]).values) ==
            label_index.at(bundle.windows[idx].label))
            ++correct;
    }
    const double expected = static_cast<double>(correct) / static_cast<double>(split.test.size());
    CHECK(results[0].accuracy == expected);
    CHECK(results[0].n_test == static_cast<int>(split.test.size()));
    CHECK(results[0].method == Method::PML);
    CHECK(!results[0].m.has_value());
}

TEST_CASE("PDL at m = available matches DL exactly in SI mode") {
    const auto bundle = generate_population(small_population(11));

    EngineConfigs configs;
    configs.net = fast_net();
    configs.master_seed = 1234;
    SplitSpec spec;
    spec.mode = SplitMode::SI;
    spec.test_subject = "s3";

    const auto pdl = run_experiment(bundle, Method::PDL, SimilarityKind::physical, spec, configs);
    const auto dl = run_experiment(bundle, Method::DL, std::nullopt, spec, configs);
    REQUIRE(pdl.size() == 1);  // 5 available subjects -> schedule {5}
    REQUIRE(dl.size() == 1);
    CHECK(pdl[0].m == 5);
    CHECK(!dl[0].m.has_value());
    CHECK(!dl[0].sim_kind.has_value());
    CHECK(pdl[0].accuracy == dl[0].accuracy);
    CHECK(pdl[0].n_test == dl[0].n_test);
}

TEST_CASE("PDL emits one result per schedule entry") {
    PopulationSpec spec = small_population(3);
    spec.n_subjects = 12;  // 11 available -> {10, 11}
    const auto bundle = generate_population(spec);

    EngineConfigs configs;
    configs.net = fast_net();
    configs.net.epochs = 2;
    SplitSpec split_spec;
    split_spec.mode = SplitMode::SI;
    split_spec.test_subject = "s00";
    const auto results =
        run_experiment(bundle, Method::PDL, SimilarityKind::sensor, split_spec, configs);
    REQUIRE(results.size() == 2);
    CHECK(results[0].m == 10);
    CHECK(results[1].m == 11);
    for (const auto& r : results) {
        CHECK(r.accuracy >= 0.0);
        CHECK(r.accuracy <= 1.0);
        CHECK(r.n_test == 12);
    }
}

TEST_CASE("PML priors follow the similarity ordering and normalize") {
    const auto bundle = generate_population(small_population(21));
    const auto split = make_si_split(bundle, "s0");

    std::vector<FeatureVector> signatures;
    for (const auto& subject : bundle.subjects) {
        std::vector<const LabeledWindow*> windows;
        for (const auto& w : bundle.windows)
            if (w.subject_id == subject.subject_id) windows.push_back(&w);
        signatures.push_back(subject_signature(windows));
    }
    const auto matrix =
        build_matrix(SimilarityKind::physical_sensor, bundle.subjects, signatures,
                     SimilarityConfig{});

    std::vector<double> raw;
    const auto test_row = matrix.index_of("s0");
    for (std::size_t idx : split.train)
        raw.push_back(matrix.at(test_row, matrix.index_of(bundle.windows[idx].subject_id)));

    const PriorWeights priors(raw);
    double sum = 0.0;
    for (double w : priors.values()) {
        CHECK(w > 0.0);
        sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < raw.size(); ++i) {
        for (std::size_t j = 0; j < raw.size(); ++j) {
            if (raw[i] > raw[j]) CHECK(priors.values()[i] > priors.values()[j]);
        }
    }
}

TEST_CASE("run_experiment validates its inputs") {
    const auto bundle = toy_bundle(3, 4);
    EngineConfigs configs;
    SplitSpec spec;
    spec.test_subject = "ghost";
    CHECK_THROWS_AS(run_experiment(bundle, Method::DL, std::nullopt, spec, configs),
                    std::invalid_argument);
    spec.test_subject = "s0";
    CHECK_THROWS_AS(run_experiment(bundle, Method::PML, std::nullopt, spec, configs),
                    std::invalid_argument);
}

TEST_CASE("macro accuracy averages per subject before averaging subjects") {
    auto make = [](const std::string& subject, double acc, std::optional<int> m) {
        RunResult r;
        r.dataset = "d";
        r.method = Method::PDL;
        r.sim_kind = SimilarityKind::physical;
        r.split = SplitMode::SI;
        r.test_subject = subject;
        r.m = m;
        r.accuracy = acc;
        r.n_test = 10;
        return r;
    };

    SUBCASE("singleton") {
        const auto rows = macro_accuracy({make("a", 0.8, 10)}, {"dataset"});
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].accuracy == 0.8);
    }

    SUBCASE("two subjects average evenly") {
        const auto rows = macro_accuracy({make("a", 0.4, 10), make("b", 0.6, 10)}, {"method"});
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].accuracy == doctest::Approx(0.5).epsilon(1e-12));
    }

    SUBCASE("m sweep collapses per subject first") {
        // subject a: {1.0, 0.0} -> 0.5; subject b: {0.5} -> 0.5; macro 0.5,
        // not the flat mean (1.0 + 0.0 + 0.5) / 3 = 0.5 either; sharpen with
        // asymmetric counts: a: {1.0, 1.0, 1.0} -> 1.0, b: {0.0} -> 0.0.
        const auto rows = macro_accuracy({make("a", 1.0, 10), make("a", 1.0, 15),
                                          make("a", 1.0, 20), make("b", 0.0, 10)},
                                         {"dataset", "method"});
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].accuracy == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rows[0].n_runs == 4);
    }

    SUBCASE("grouped random results match a naive oracle") {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> dist(0.0, 1.0);
        std::vector<RunResult> results;
        for (int i = 0; i < 60; ++i) {
            RunResult r;
            r.dataset = i % 2 ? "d1" : "d2";
            r.method = i % 3 == 0 ? Method::PML : (i % 3 == 1 ? Method::PDL : Method::DL);
            r.sim_kind = r.method == Method::DL
                             ? std::nullopt
                             : std::optional<SimilarityKind>(SimilarityKind::sensor);
            r.split = i % 5 ? SplitMode::SI : SplitMode::HYB;
            r.test_subject = "s" + std::to_string(i % 4);
            r.m = r.method == Method::PDL ? std::optional<int>(10 + 5 * (i % 3)) : std::nullopt;
            r.accuracy = dist(rng);
            r.n_test = 10;
            results.push_back(std::move(r));
        }
        const auto rows = macro_accuracy(results, {"dataset", "method", "split"});

        // naive regrouping
        std::map<std::string, std::map<std::string, std::pair<double, int>>> oracle;
        for (const auto& r : results) {
            const std::string key = r.dataset + "|" + to_string(r.method) + "|" +
                                    to_string(r.split);
            auto& cell = oracle[key][r.test_subject];
            cell.first += r.accuracy;
            cell.second += 1;
        }
        for (const auto& row : rows) {
            const std::string key = row.group.at("dataset") + "|" + row.group.at("method") +
                                    "|" + row.group.at("split");
            double total = 0.0;
            for (const auto& [subject, cell] : oracle.at(key))
                total += cell.first / cell.second;
            const double expected = total / static_cast<double>(oracle.at(key).size());
            CHECK(row.accuracy == doctest::Approx(expected).epsilon(1e-12));
        }
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(macro_accuracy({}, {"dataset"}), std::invalid_argument);
        CHECK_THROWS_AS(macro_accuracy({make("a", 0.5, 10)}, {"bogus"}), std::invalid_argument);
    }
}

TEST_CASE("results CSV round trip") {
    std::vector<RunResult> results;
    RunResult r;
    r.dataset = "unimib-shar";
    r.method = Method::PDL;
    r.sim_kind = SimilarityKind::physical_sensor;
    r.split = SplitMode::HYB;
    r.test_subject = "s7";
    r.m = 15;
    r.accuracy = 0.8125;
    r.n_test = 48;
    results.push_back(r);
    r.method = Method::DL;
    r.sim_kind = std::nullopt;
    r.m = std::nullopt;
    r.accuracy = 1.0 / 3.0;
    results.push_back(r);

    const auto text = results_to_csv(results);
    const auto parsed = results_from_csv(text);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].dataset == "unimib-shar");
    CHECK(parsed[0].m == 15);
    CHECK(parsed[0].sim_kind == SimilarityKind::physical_sensor);
    CHECK(parsed[0].accuracy == 0.8125);
    CHECK(!parsed[1].m.has_value());
    CHECK(!parsed[1].sim_kind.has_value());
    CHECK(parsed[1].accuracy == 1.0 / 3.0);  // shortest round-trip decimals
    CHECK(results_to_csv(parsed) == text);
}
