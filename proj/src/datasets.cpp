#include "har/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include "har/csv.hpp"

namespace fs = std::filesystem;

namespace har {

namespace {

constexpr double kMotionSenseRateHz = 50.0;
constexpr double kMotionSenseWindowSeconds = 3.0;
constexpr double kMotionSenseOverlap = 0.5;

const std::set<std::string>& motionsense_activities() {
    static const std::set<std::string> kActivities = {"dws", "jog", "sit", "std", "ups", "wlk"};
    return kActivities;
}

}  // namespace

void DatasetBundle::validate() const {
    std::set<std::string> ids;
    for (const auto& s : subjects) {
        if (s.subject_id.empty()) throw std::runtime_error(name + ": empty subject id");
        if (!ids.insert(s.subject_id).second)
            throw std::runtime_error(name + ": duplicate subject id '" + s.subject_id + "'");
        if (s.sex != 0 && s.sex != 1)
            throw std::runtime_error(name + ": subject '" + s.subject_id + "' has sex " +
                                     std::to_string(s.sex) + ", expected 0 or 1");
        if (s.age <= 0 || s.weight_kg <= 0.0 || s.height_cm <= 0.0)
            throw std::runtime_error(name + ": subject '" + s.subject_id +
                                     "' has non-positive age/weight/height");
    }
    std::set<std::string> labels(label_set.begin(), label_set.end());
    if (labels.size() != label_set.size())
        throw std::runtime_error(name + ": duplicate label in label set");

    std::size_t window_len = windows.empty() ? 0 : windows.front().samples.size();
    double rate = windows.empty() ? 0.0 : windows.front().rate_hz;
    for (const auto& w : windows) {
        if (!ids.count(w.subject_id))
            throw std::runtime_error(name + ": window " + std::to_string(w.window_id) +
                                     " references unknown subject '" + w.subject_id + "'");
        if (!labels.count(w.label))
            throw std::runtime_error(name + ": window " + std::to_string(w.window_id) +
                                     " has label '" + w.label + "' outside the label set");
        if (w.samples.size() != window_len)
            throw std::runtime_error(name + ": inconsistent window length (" +
                                     std::to_string(w.samples.size()) + " vs " +
                                     std::to_string(window_len) + ")");
        if (w.rate_hz != rate)
            throw std::runtime_error(name + ": inconsistent window rate");
        for (const auto& a : w.samples) {
            if (!std::isfinite(a.x) || !std::isfinite(a.y) || !std::isfinite(a.z))
                throw std::runtime_error(name + ": non-finite sample in window " +
                                         std::to_string(w.window_id) + " of subject '" +
                                         w.subject_id + "'");
        }
    }
}

std::optional<std::size_t> DatasetBundle::subject_index(const std::string& subject_id) const {
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        if (subjects[i].subject_id == subject_id) return i;
    }
    return std::nullopt;
}

std::vector<std::size_t> DatasetBundle::window_indices_of(const std::string& subject_id) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        if (windows[i].subject_id == subject_id) out.push_back(i);
    }
    return out;
}

std::vector<std::string> DatasetBundle::subject_ids() const {
    std::vector<std::string> out;
    out.reserve(subjects.size());
    for (const auto& s : subjects) out.push_back(s.subject_id);
    return out;
}

std::vector<std::vector<AccelSample>> window_stream(const std::vector<AccelSample>& recording,
                                                    double rate_hz, double length_s,
                                                    double overlap) {
    if (overlap < 0.0 || overlap >= 1.0)
        throw std::invalid_argument("window_stream: overlap must be in [0, 1)");
    const long window = std::lround(length_s * rate_hz);
    if (window < 1) throw std::invalid_argument("window_stream: window shorter than one sample");
    long stride = std::lround(length_s * rate_hz * (1.0 - overlap));
    if (stride < 1) stride = 1;

    std::vector<std::vector<AccelSample>> out;
    const long n = static_cast<long>(recording.size());
    for (long start = 0; start + window <= n; start += stride) {
        out.emplace_back(recording.begin() + start, recording.begin() + start + window);
    }
    return out;
}

std::vector<AccelSample> resample(const std::vector<AccelSample>& signal, double src_rate_hz,
                                  double dst_rate_hz) {
    if (src_rate_hz <= 0.0 || dst_rate_hz <= 0.0)
        throw std::invalid_argument("resample: rates must be positive");
    if (signal.empty()) throw std::invalid_argument("resample: empty signal");
    if (src_rate_hz == dst_rate_hz) return signal;

    const std::size_t n = signal.size();
    const std::size_t m =
        static_cast<std::size_t>(std::max<long long>(1, std::llround(static_cast<double>(n) *
                                                                     dst_rate_hz / src_rate_hz)));
    std::vector<AccelSample> out;
    out.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double pos = static_cast<double>(j) / dst_rate_hz * src_rate_hz;
        std::size_t i0 = static_cast<std::size_t>(std::min<double>(
            std::max(0.0, std::floor(pos)), static_cast<double>(n - 1)));
        std::size_t i1 = std::min(i0 + 1, n - 1);
        const double frac = pos - static_cast<double>(i0);
        const double t = std::clamp(frac, 0.0, 1.0);
        const AccelSample& a = signal[i0];
        const AccelSample& b = signal[i1];
        out.push_back({a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t, a.z + (b.z - a.z) * t});
    }
    return out;
}

namespace {

std::vector<SubjectMeta> read_motionsense_subjects(const fs::path& info_path) {
    auto table = csv::read_file(info_path.string());
    const int col_code = table.column("code");
    const int col_weight = table.column("weight");
    const int col_height = table.column("height");
    const int col_age = table.column("age");
    const int col_gender = table.column("gender");
    if (col_code < 0 || col_weight < 0 || col_height < 0 || col_age < 0 || col_gender < 0)
        throw std::runtime_error(info_path.string() +
                                 ": expected columns code,weight,height,age,gender");
    std::vector<SubjectMeta> subjects;
    for (const auto& row : table.rows) {
        SubjectMeta s;
        s.subject_id = row[col_code];
        s.weight_kg = csv::parse_double(row[col_weight], info_path.string());
        s.height_cm = csv::parse_double(row[col_height], info_path.string());
        s.age = static_cast<int>(csv::parse_long(row[col_age], info_path.string()));
        s.sex = static_cast<int>(csv::parse_long(row[col_gender], info_path.string()));
        subjects.push_back(std::move(s));
    }
    return subjects;
}

// Trial folders are named <activity>_<trial>, e.g. dws_1, wlk_15.
std::optional<std::string> trial_activity(const std::string& dir_name) {
    auto underscore = dir_name.find('_');
    if (underscore == std::string::npos) return std::nullopt;
    std::string prefix = dir_name.substr(0, underscore);
    std::string suffix = dir_name.substr(underscore + 1);
    if (!motionsense_activities().count(prefix)) return std::nullopt;
    if (suffix.empty() || !std::all_of(suffix.begin(), suffix.end(),
                                       [](char c) { return c >= '0' && c <= '9'; }))
        return std::nullopt;
    return prefix;
}

std::optional<std::string> trial_subject_code(const fs::path& file) {
    const std::string stem = file.stem().string();  // sub_7
    if (stem.rfind("sub_", 0) != 0 || file.extension() != ".csv") return std::nullopt;
    std::string code = stem.substr(4);
    if (code.empty()) return std::nullopt;
    return code;
}

std::vector<AccelSample> read_motionsense_trial(const fs::path& file) {
    auto table = csv::read_file(file.string());
    int cx = table.column("userAcceleration.x");
    int cy = table.column("userAcceleration.y");
    int cz = table.column("userAcceleration.z");
    if (cx < 0 || cy < 0 || cz < 0) {
        cx = table.column("x");
        cy = table.column("y");
        cz = table.column("z");
    }
    if (cx < 0 || cy < 0 || cz < 0)
        throw std::runtime_error(file.string() + ": no acceleration columns found");
    std::vector<AccelSample> recording;
    recording.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        recording.push_back({csv::parse_double(row[cx], file.string()),
                             csv::parse_double(row[cy], file.string()),
                             csv::parse_double(row[cz], file.string())});
    }
    return recording;
}

}  // namespace

DatasetBundle load_motionsense(const std::string& root_directory) {
    const fs::path root(root_directory);
    if (!fs::is_directory(root))
        throw std::runtime_error("load_motionsense: not a directory: " + root_directory);

    const fs::path info_path = root / "data_subjects_info.csv";
    if (!fs::exists(info_path))
        throw std::runtime_error("load_motionsense: missing subject-info file " +
                                 info_path.string());

    DatasetBundle bundle;
    bundle.name = "motion-sense";
    bundle.subjects = read_motionsense_subjects(info_path);

    std::set<std::string> known_subjects;
    for (const auto& s : bundle.subjects) known_subjects.insert(s.subject_id);

    // Trial folders may sit at the root or one level down
    // (A_DeviceMotion_data/..., B_Accelerometer_data/...).
    std::vector<fs::path> trial_dirs;
    auto scan = [&](const fs::path& dir) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_directory() && trial_activity(entry.path().filename().string()))
                trial_dirs.push_back(entry.path());
        }
    };
    scan(root);
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory() && !trial_activity(entry.path().filename().string()))
            scan(entry.path());
    }
    std::sort(trial_dirs.begin(), trial_dirs.end());
    if (trial_dirs.empty()) throw std::runtime_error("load_motionsense: no trials found");

    std::set<std::string> labels;
    std::map<std::string, int> next_window_id;
    bool any_window = false;
    for (const auto& trial_dir : trial_dirs) {
        const std::string label = *trial_activity(trial_dir.filename().string());
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(trial_dir)) {
            if (entry.is_regular_file() && trial_subject_code(entry.path())) {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            const std::string subject = *trial_subject_code(file);
            if (!known_subjects.count(subject))
                throw std::runtime_error("load_motionsense: trial " + file.string() +
                                         " references subject '" + subject +
                                         "' absent from " + info_path.string());
            auto recording = read_motionsense_trial(file);
            auto slices = window_stream(recording, kMotionSenseRateHz, kMotionSenseWindowSeconds,
                                        kMotionSenseOverlap);
            for (auto& slice : slices) {
                LabeledWindow w;
                w.subject_id = subject;
                w.label = label;
                w.window_id = next_window_id[subject]++;
                w.samples = std::move(slice);
                w.rate_hz = kMotionSenseRateHz;
                bundle.windows.push_back(std::move(w));
                any_window = true;
            }
            labels.insert(label);
        }
    }
    if (!any_window) throw std::runtime_error("load_motionsense: no trials found");

    bundle.label_set.assign(labels.begin(), labels.end());
    bundle.validate();
    return bundle;
}

DatasetBundle load_canonical(const std::string& windows_csv, const std::string& subjects_csv,
                             const std::string& name, double rate_hz) {
    DatasetBundle bundle;
    bundle.name = name;

    auto subjects = csv::read_file(subjects_csv);
    const std::vector<std::string> subj_header = {"subject_id", "sex", "age", "weight_kg",
                                                  "height_cm"};
    if (subjects.header != subj_header)
        throw std::runtime_error(subjects_csv + ": header mismatch, expected "
                                 "subject_id,sex,age,weight_kg,height_cm");
    for (const auto& row : subjects.rows) {
        SubjectMeta s;
        s.subject_id = row[0];
        s.sex = static_cast<int>(csv::parse_long(row[1], subjects_csv));
        s.age = static_cast<int>(csv::parse_long(row[2], subjects_csv));
        s.weight_kg = csv::parse_double(row[3], subjects_csv);
        s.height_cm = csv::parse_double(row[4], subjects_csv);
        bundle.subjects.push_back(std::move(s));
    }

    auto windows = csv::read_file(windows_csv);
    const std::vector<std::string> win_header = {"subject_id", "label",  "window_id",
                                                 "sample_index", "ax",   "ay",
                                                 "az"};
    if (windows.header != win_header)
        throw std::runtime_error(windows_csv + ": header mismatch, expected "
                                 "subject_id,label,window_id,sample_index,ax,ay,az");

    // Group sample rows per (subject_id, window_id); the map order matches
    // the canonical on-disk sort, so ingest -> write -> ingest is stable.
    std::map<std::pair<std::string, long>, LabeledWindow> grouped;
    std::map<std::pair<std::string, long>, long> expected_index;
    for (const auto& row : windows.rows) {
        const std::string& subject = row[0];
        const std::string& label = row[1];
        const long window_id = csv::parse_long(row[2], windows_csv);
        const long sample_index = csv::parse_long(row[3], windows_csv);
        const auto key = std::make_pair(subject, window_id);
        auto [it, inserted] = grouped.try_emplace(key);
        if (inserted) {
            it->second.subject_id = subject;
            it->second.label = label;
            it->second.window_id = static_cast<int>(window_id);
            it->second.rate_hz = rate_hz;
        } else if (it->second.label != label) {
            throw std::runtime_error(windows_csv + ": window " + std::to_string(window_id) +
                                     " of subject '" + subject + "' has conflicting labels");
        }
        if (sample_index != expected_index[key])
            throw std::runtime_error(windows_csv + ": window " + std::to_string(window_id) +
                                     " of subject '" + subject +
                                     "' has non-contiguous sample_index " +
                                     std::to_string(sample_index));
        ++expected_index[key];
        it->second.samples.push_back({csv::parse_double(row[4], windows_csv),
                                      csv::parse_double(row[5], windows_csv),
                                      csv::parse_double(row[6], windows_csv)});
    }

    std::set<std::string> labels;
    for (auto& [key, window] : grouped) {
        labels.insert(window.label);
        bundle.windows.push_back(std::move(window));
    }
    bundle.label_set.assign(labels.begin(), labels.end());

    bundle.validate();  // catches orphan subjects and inconsistent sample counts
    return bundle;
}

void write_canonical(const DatasetBundle& bundle, const std::string& windows_csv,
                     const std::string& subjects_csv) {
    std::ofstream subjects(subjects_csv);
    if (!subjects) throw std::runtime_error("cannot write " + subjects_csv);
    subjects << "subject_id,sex,age,weight_kg,height_cm\n";
    for (const auto& s : bundle.subjects) {
        subjects << s.subject_id << ',' << s.sex << ',' << s.age << ','
                 << csv::format_double(s.weight_kg) << ',' << csv::format_double(s.height_cm)
                 << '\n';
    }

    std::vector<const LabeledWindow*> ordered;
    ordered.reserve(bundle.windows.size());
    for (const auto& w : bundle.windows) ordered.push_back(&w);
    std::sort(ordered.begin(), ordered.end(), [](const LabeledWindow* a, const LabeledWindow* b) {
        if (a->subject_id != b->subject_id) return a->subject_id < b->subject_id;
        return a->window_id < b->window_id;
    });

    std::ofstream windows(windows_csv);
    if (!windows) throw std::runtime_error("cannot write " + windows_csv);
    windows << "subject_id,label,window_id,sample_index,ax,ay,az\n";
    for (const LabeledWindow* w : ordered) {
        for (std::size_t i = 0; i < w->samples.size(); ++i) {
            const AccelSample& a = w->samples[i];
            windows << w->subject_id << ',' << w->label << ',' << w->window_id << ',' << i << ','
                    << csv::format_double(a.x) << ',' << csv::format_double(a.y) << ','
                    << csv::format_double(a.z) << '\n';
        }
    }
}

}  // namespace har
