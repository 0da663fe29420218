// Command-line front end: ingest datasets to the canonical CSV layout,
// emit similarity matrices, generate synthetic populations, execute
// PML/PDL/DL experiment plans, and render the summary table.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "har/csv.hpp"
#include "har/datasets.hpp"
#include "har/experiments.hpp"
#include "har/report.hpp"
#include "har/similarity.hpp"
#include "har/synth.hpp"

namespace fs = std::filesystem;

namespace {

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    KeyValues values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return values;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == ',') {
            if (!current.empty()) out.push_back(current);
            current.clear();
        } else if (c != ' ') {
            current.push_back(c);
        }
    }
    if (!current.empty()) out.push_back(current);
    return out;
}

// Conv stack spec like "16x5p2,32x5p2": filters x kernel p pool.
std::vector<har::ConvBlockSpec> parse_conv_spec(const std::string& text) {
    std::vector<har::ConvBlockSpec> blocks;
    for (const auto& part : split_list(text)) {
        const auto x = part.find('x');
        const auto p = part.find('p');
        if (x == std::string::npos || p == std::string::npos || p < x)
            throw std::runtime_error("bad conv spec '" + part + "', expected FxKpP");
        har::ConvBlockSpec block;
        block.filters = std::stoi(part.substr(0, x));
        block.kernel = std::stoi(part.substr(x + 1, p - x - 1));
        block.pool = std::stoi(part.substr(p + 1));
        blocks.push_back(block);
    }
    if (blocks.empty()) throw std::runtime_error("empty conv spec");
    return blocks;
}

// Settings resolved from defaults, then the config file, then flags.
struct Settings {
    std::string dataset = "synth";
    std::string dataset_dir;
    std::string methods = "PML,PDL,DL";
    std::string sim_kinds = "physical,sensor,physical_sensor";
    std::string splits = "SI,HYB";
    std::string subjects;  // empty = all
    double hyb_fraction = 0.2;
    std::uint64_t seed = 0;
    int threads = 1;
    int adaboost_rounds = 100;
    std::string net_conv = "16x5p2,32x5p2";
    int net_dense_hidden = 64;
    double net_learning_rate = 0.01;
    int net_epochs = 50;
    int net_batch_size = 32;
    int synth_subjects = 12;
    int synth_classes = 4;
    int synth_windows_per_class = 6;
    int synth_window_length = 60;
    double synth_rate = 50.0;
    int synth_clusters = 2;
    double synth_inter = 1.5;
    double synth_intra = 0.3;
    bool synth_correlated = true;

    void apply(const KeyValues& kv) {
        auto get = [&](const char* key, auto& target) {
            auto it = kv.find(key);
            if (it == kv.end()) return;
            using T = std::decay_t<decltype(target)>;
            if constexpr (std::is_same_v<T, std::string>) {
                target = it->second;
            } else if constexpr (std::is_same_v<T, bool>) {
                target = it->second == "1" || it->second == "true";
            } else if constexpr (std::is_same_v<T, double>) {
                target = har::csv::parse_double(it->second, key);
            } else if constexpr (std::is_same_v<T, std::uint64_t>) {
                target = static_cast<std::uint64_t>(std::stoull(it->second));
            } else {
                target = static_cast<T>(har::csv::parse_long(it->second, key));
            }
        };
        get("dataset", dataset);
        get("dataset_dir", dataset_dir);
        get("methods", methods);
        get("sim_kinds", sim_kinds);
        get("splits", splits);
        get("subjects", subjects);
        get("hyb_fraction", hyb_fraction);
        get("seed", seed);
        get("threads", threads);
        get("adaboost.rounds", adaboost_rounds);
        get("net.conv", net_conv);
        get("net.dense_hidden", net_dense_hidden);
        get("net.learning_rate", net_learning_rate);
        get("net.epochs", net_epochs);
        get("net.batch_size", net_batch_size);
        get("synth.subjects", synth_subjects);
        get("synth.classes", synth_classes);
        get("synth.windows_per_class", synth_windows_per_class);
        get("synth.window_length", synth_window_length);
        get("synth.rate", synth_rate);
        get("synth.clusters", synth_clusters);
        get("synth.inter", synth_inter);
        get("synth.intra", synth_intra);
        get("synth.correlated", synth_correlated);
    }

    KeyValues resolved() const {
        KeyValues kv;
        kv["dataset"] = dataset;
        kv["dataset_dir"] = dataset_dir;
        kv["methods"] = methods;
        kv["sim_kinds"] = sim_kinds;
        kv["splits"] = splits;
        kv["subjects"] = subjects;
        kv["hyb_fraction"] = har::csv::format_double(hyb_fraction);
        kv["seed"] = std::to_string(seed);
        kv["threads"] = std::to_string(threads);
        kv["adaboost.rounds"] = std::to_string(adaboost_rounds);
        kv["net.conv"] = net_conv;
        kv["net.dense_hidden"] = std::to_string(net_dense_hidden);
        kv["net.learning_rate"] = har::csv::format_double(net_learning_rate);
        kv["net.epochs"] = std::to_string(net_epochs);
        kv["net.batch_size"] = std::to_string(net_batch_size);
        kv["synth.subjects"] = std::to_string(synth_subjects);
        kv["synth.classes"] = std::to_string(synth_classes);
        kv["synth.windows_per_class"] = std::to_string(synth_windows_per_class);
        kv["synth.window_length"] = std::to_string(synth_window_length);
        kv["synth.rate"] = har::csv::format_double(synth_rate);
        kv["synth.clusters"] = std::to_string(synth_clusters);
        kv["synth.inter"] = har::csv::format_double(synth_inter);
        kv["synth.intra"] = har::csv::format_double(synth_intra);
        kv["synth.correlated"] = synth_correlated ? "1" : "0";
        return kv;
    }

    har::PopulationSpec synth_spec() const {
        har::PopulationSpec spec;
        spec.n_subjects = synth_subjects;
        spec.n_classes = synth_classes;
        spec.windows_per_class = synth_windows_per_class;
        spec.window_length = synth_window_length;
        spec.rate_hz = synth_rate;
        spec.n_style_clusters = synth_clusters;
        spec.inter_subject_scale = synth_inter;
        spec.intra_subject_scale = synth_intra;
        spec.physical_style_correlation = synth_correlated;
        spec.seed = seed;
        return spec;
    }

    har::EngineConfigs engine_configs() const {
        har::EngineConfigs configs;
        configs.adaboost.rounds = adaboost_rounds;
        configs.net.conv_blocks = parse_conv_spec(net_conv);
        configs.net.dense_hidden = net_dense_hidden;
        configs.net.learning_rate = net_learning_rate;
        configs.net.epochs = net_epochs;
        configs.net.batch_size = net_batch_size;
        configs.master_seed = seed;
        return configs;
    }
};

har::DatasetBundle load_bundle(const Settings& settings) {
    if (settings.dataset == "synth") return har::generate_population(settings.synth_spec());
    if (settings.dataset_dir.empty())
        throw std::runtime_error("dataset '" + settings.dataset + "' needs --dataset-dir");
    if (settings.dataset == "motionsense") return har::load_motionsense(settings.dataset_dir);
    if (settings.dataset == "canonical" || settings.dataset == "unimib") {
        const fs::path dir(settings.dataset_dir);
        const std::string name = settings.dataset == "unimib" ? "unimib-shar" : "canonical";
        return har::load_canonical((dir / "windows.csv").string(),
                                   (dir / "subjects.csv").string(), name);
    }
    throw std::runtime_error("unknown dataset '" + settings.dataset +
                             "', expected unimib|motionsense|canonical|synth");
}

void ensure_out_dir(const std::string& out) {
    if (out.empty()) throw std::runtime_error("--out is required");
    fs::create_directories(out);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_resolved_config(const Settings& settings, const fs::path& out_dir,
                           const std::string& file_name) {
    std::ostringstream text;
    for (const auto& [key, value] : settings.resolved()) text << key << '=' << value << '\n';
    write_text(out_dir / file_name, text.str());
}

// Label-free population signatures for sensor similarity outside of an
// experiment split: every subject contributes all of its windows.
std::vector<har::FeatureVector> population_signatures(const har::DatasetBundle& bundle) {
    std::vector<har::FeatureVector> signatures;
    signatures.reserve(bundle.subjects.size());
    for (const auto& subject : bundle.subjects) {
        std::vector<const har::LabeledWindow*> windows;
        for (const auto& w : bundle.windows) {
            if (w.subject_id == subject.subject_id) windows.push_back(&w);
        }
        signatures.push_back(har::subject_signature(windows));
    }
    return signatures;
}

int cmd_ingest(const Settings& settings, const std::string& out) {
    ensure_out_dir(out);
    const auto bundle = load_bundle(settings);
    har::write_canonical(bundle, (fs::path(out) / "windows.csv").string(),
                         (fs::path(out) / "subjects.csv").string());
    std::cout << "wrote " << bundle.windows.size() << " windows, " << bundle.subjects.size()
              << " subjects, " << bundle.label_set.size() << " labels to " << out << '\n';
    return 0;
}

int cmd_similarity(const Settings& settings, const std::string& out) {
    ensure_out_dir(out);
    const auto bundle = load_bundle(settings);
    const auto signatures = population_signatures(bundle);
    for (const auto& kind_name : split_list(settings.sim_kinds)) {
        const auto kind = har::similarity_kind_from_string(kind_name);
        har::SimilarityConfig config;
        config.kind = kind;
        const auto matrix = har::build_matrix(kind, bundle.subjects, signatures, config);
        const fs::path path = fs::path(out) / ("sim_" + kind_name + ".csv");
        write_text(path, har::matrix_to_csv(matrix));
        std::cout << "wrote " << path.string();
        for (const auto& [component, gamma] : matrix.gamma_used)
            std::cout << "  gamma_" << component << '=' << gamma;
        std::cout << '\n';
    }
    return 0;
}

int cmd_run(const Settings& settings, const std::string& out, bool epoch_logs) {
    ensure_out_dir(out);
    const auto bundle = load_bundle(settings);
    auto configs = settings.engine_configs();

    std::mutex log_mutex;
    if (epoch_logs) {
        const fs::path log_dir = fs::path(out) / "epoch_logs";
        fs::create_directories(log_dir);
        configs.epoch_log_sink = [&log_mutex, log_dir](const std::string& tag,
                                                       const std::vector<har::EpochStats>& log) {
            std::string name = tag;
            std::replace(name.begin(), name.end(), '/', '_');
            std::lock_guard<std::mutex> lock(log_mutex);
            write_text(log_dir / (name + ".csv"), har::epoch_log_csv(log));
        };
    }

    std::vector<std::string> subjects = settings.subjects.empty()
                                            ? bundle.subject_ids()
                                            : split_list(settings.subjects);
    const auto methods = split_list(settings.methods);
    const auto kinds = split_list(settings.sim_kinds);
    const auto splits = split_list(settings.splits);
    if (subjects.empty() || methods.empty() || splits.empty())
        throw std::runtime_error("run: empty subjects/methods/splits selection");

    struct Task {
        std::string subject;
        har::Method method;
        std::optional<har::SimilarityKind> kind;
        har::SplitMode split;
    };
    std::vector<Task> tasks;
    for (const auto& subject : subjects) {
        if (!bundle.subject_index(subject))
            throw std::runtime_error("run: unknown subject '" + subject + "'");
        for (const auto& split_name : splits) {
            const auto split = har::split_mode_from_string(split_name);
            for (const auto& method_name : methods) {
                const auto method = har::method_from_string(method_name);
                if (method == har::Method::DL) {
                    tasks.push_back({subject, method, std::nullopt, split});
                } else {
                    for (const auto& kind_name : kinds) {
                        tasks.push_back({subject, method,
                                         har::similarity_kind_from_string(kind_name), split});
                    }
                }
            }
        }
    }

    std::vector<har::RunResult> results;
    std::mutex collect_mutex;
    std::size_t next_task = 0;
    std::exception_ptr failure;

    auto worker = [&]() {
        while (true) {
            Task task;
            {
                std::lock_guard<std::mutex> lock(collect_mutex);
                if (failure || next_task >= tasks.size()) return;
                task = tasks[next_task++];
            }
            try {
                har::SplitSpec spec;
                spec.mode = task.split;
                spec.test_subject = task.subject;
                spec.hyb_fraction = settings.hyb_fraction;
                spec.seed = har::derive_seed(settings.seed, task.subject + "/split");
                auto batch = har::run_experiment(bundle, task.method, task.kind, spec, configs);
                std::lock_guard<std::mutex> lock(collect_mutex);
                results.insert(results.end(), batch.begin(), batch.end());
            } catch (...) {
                std::lock_guard<std::mutex> lock(collect_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    const int n_threads = std::max(1, settings.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::sort(results.begin(), results.end(),
              [](const har::RunResult& a, const har::RunResult& b) {
                  auto key = [](const har::RunResult& r) {
                      return std::make_tuple(r.dataset, to_string(r.split), to_string(r.method),
                                             r.sim_kind ? to_string(*r.sim_kind) : "",
                                             r.test_subject, r.m.value_or(-1));
                  };
                  return key(a) < key(b);
              });

    write_text(fs::path(out) / "results.csv", har::results_to_csv(results));
    write_resolved_config(settings, out, "run_config.txt");
    std::cout << "wrote " << results.size() << " results to "
              << (fs::path(out) / "results.csv").string() << '\n';

    const auto table = har::report_table(results);
    write_text(fs::path(out) / "report.txt", table.text);
    write_text(fs::path(out) / "report.csv", table.csv);
    std::cout << table.text;
    return 0;
}

int cmd_report(const std::string& results_path, const std::string& out) {
    std::ifstream in(results_path);
    if (!in) throw std::runtime_error("cannot open results: " + results_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const auto results = har::results_from_csv(buffer.str());
    const auto table = har::report_table(results);
    std::cout << table.text;
    if (!out.empty()) {
        ensure_out_dir(out);
        write_text(fs::path(out) / "report.txt", table.text);
        write_text(fs::path(out) / "report.csv", table.csv);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Personalized human activity recognition toolkit"};
    app.require_subcommand(1);

    Settings settings;
    std::string config_path;
    std::string out;
    std::string results_path;

    // Flags shared by the data-consuming subcommands; each records whether
    // it was set so it can override the config file.
    struct FlagValues {
        std::string dataset, dataset_dir, methods, sim_kinds, splits, subjects;
        double hyb_fraction = 0.0;
        std::uint64_t seed = 0;
        int threads = 0;
    } flags;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "flat key=value configuration file");
        cmd->add_option("--dataset", flags.dataset, "unimib|motionsense|canonical|synth");
        cmd->add_option("--dataset-dir", flags.dataset_dir, "dataset root directory");
        cmd->add_option("--seed", flags.seed, "master seed");
        cmd->add_option("--out", out, "output directory");
        return cmd;
    };

    auto* ingest = add_common(app.add_subcommand("ingest", "convert a dataset to canonical CSV"));
    auto* similarity =
        add_common(app.add_subcommand("similarity", "emit similarity matrices as CSV"));
    similarity->add_option("--sim-kinds", flags.sim_kinds, "comma list of similarity kinds");
    auto* synth = add_common(
        app.add_subcommand("synth", "generate a synthetic population as canonical CSV"));
    auto* run = add_common(app.add_subcommand("run", "execute an experiment plan"));
    bool epoch_logs = false;
    run->add_option("--methods", flags.methods, "comma list of PML,PDL,DL");
    run->add_option("--sim-kinds", flags.sim_kinds, "comma list of similarity kinds");
    run->add_option("--splits", flags.splits, "comma list of SI,HYB");
    run->add_option("--subjects", flags.subjects, "comma list of test subjects (default all)");
    run->add_option("--hyb-fraction", flags.hyb_fraction, "fraction donated to training in HYB");
    run->add_option("--threads", flags.threads, "worker threads over test subjects");
    run->add_flag("--epoch-logs", epoch_logs, "write per-training epoch logs under out/epoch_logs");
    auto* report = app.add_subcommand("report", "render the summary table from a results CSV");
    report->add_option("--results", results_path, "results CSV path")->required();
    report->add_option("--out", out, "output directory for report.txt/report.csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) settings.apply(parse_config_file(config_path));
        auto override_if = [](bool set, auto& target, const auto& value) {
            if (set) target = value;
        };
        CLI::App* active = app.get_subcommands().front();
        if (active != report) {
            override_if(active->count("--dataset") > 0, settings.dataset, flags.dataset);
            override_if(active->count("--dataset-dir") > 0, settings.dataset_dir,
                        flags.dataset_dir);
            override_if(active->count("--seed") > 0, settings.seed, flags.seed);
        }
        if (active == run) {
            override_if(run->count("--methods") > 0, settings.methods, flags.methods);
            override_if(run->count("--sim-kinds") > 0, settings.sim_kinds, flags.sim_kinds);
            override_if(run->count("--splits") > 0, settings.splits, flags.splits);
            override_if(run->count("--subjects") > 0, settings.subjects, flags.subjects);
            override_if(run->count("--hyb-fraction") > 0, settings.hyb_fraction,
                        flags.hyb_fraction);
            override_if(run->count("--threads") > 0, settings.threads, flags.threads);
        }
        if (active == similarity) {
            override_if(similarity->count("--sim-kinds") > 0, settings.sim_kinds,
                        flags.sim_kinds);
        }

        if (active == ingest) return cmd_ingest(settings, out);
        if (active == similarity) return cmd_similarity(settings, out);
        if (active == synth) {
            settings.dataset = "synth";
            return cmd_ingest(settings, out);
        }
        if (active == run) return cmd_run(settings, out, epoch_logs);
        if (active == report) return cmd_report(results_path, out);
        throw std::runtime_error("no subcommand");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
