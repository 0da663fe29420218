#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace har {

// One tri-axial acceleration sample, in g.
struct AccelSample {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// A subject's identifier plus the physical attributes used for
// physical-based similarity. Sex is encoded 0 = female, 1 = male.
struct SubjectMeta {
    std::string subject_id;
    int sex = 0;
    int age = 0;          // years
    double weight_kg = 0.0;
    double height_cm = 0.0;
};

// A fixed-length labeled acceleration window owned by one subject.
struct LabeledWindow {
    std::string subject_id;
    std::string label;
    int window_id = 0;
    std::vector<AccelSample> samples;
    double rate_hz = 0.0;
};

// Immutable in-memory dataset: subjects, windows, and the ordered label set.
// validate() enforces the referential-integrity invariants and is called by
// every loader before a bundle is handed out.
struct DatasetBundle {
    std::string name;
    std::vector<SubjectMeta> subjects;
    std::vector<LabeledWindow> windows;
    std::vector<std::string> label_set;

    // Throws std::runtime_error on any violated invariant:
    // duplicate/unknown subject ids, unknown labels, positive-attribute
    // violations, mixed window lengths or rates, non-finite samples.
    void validate() const;

    std::optional<std::size_t> subject_index(const std::string& subject_id) const;
    std::vector<std::size_t> window_indices_of(const std::string& subject_id) const;
    std::vector<std::string> subject_ids() const;
};

// Slices a continuous recording into fixed-size windows.
// Window size = round(length_s * rate), stride = round(length_s * rate * (1 - overlap));
// the trailing remainder is discarded. A recording shorter than one window
// yields an empty sequence.
std::vector<std::vector<AccelSample>> window_stream(const std::vector<AccelSample>& recording,
                                                    double rate_hz, double length_s,
                                                    double overlap);

// Linear-interpolation resampling. src_rate == dst_rate returns the input
// unchanged. Throws on an empty signal or non-positive rate.
std::vector<AccelSample> resample(const std::vector<AccelSample>& signal, double src_rate_hz,
                                  double dst_rate_hz);

// Loads the published Motion Sense layout: trial folders named
// <activity>_<trial> holding per-subject accelerometer CSVs, plus
// data_subjects_info.csv with code,weight,height,age,gender.
// Continuous recordings are cut into 3 s windows at 50 % overlap.
DatasetBundle load_motionsense(const std::string& root_directory);

// Loads the canonical CSV pair (see write_canonical for the schemas).
// Windows arrive pre-segmented and are preserved exactly.
DatasetBundle load_canonical(const std::string& windows_csv, const std::string& subjects_csv,
                             const std::string& name = "canonical", double rate_hz = 50.0);

// Canonical CSV export.
//   windows: subject_id,label,window_id,sample_index,ax,ay,az
//            rows sorted by (subject_id, window_id, sample_index)
//   subjects: subject_id,sex,age,weight_kg,height_cm
// Accelerations are written as shortest round-trip decimal text, so
// load_canonical(write_canonical(bundle)) reproduces the bundle bit for bit.
void write_canonical(const DatasetBundle& bundle, const std::string& windows_csv,
                     const std::string& subjects_csv);

}  // namespace har
