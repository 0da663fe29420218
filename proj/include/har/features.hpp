#pragma once

#include <string>
#include <vector>

#include "har/datasets.hpp"

namespace har {

// An ordered, fixed-length vector of real features. spec_id names the
// feature specification that produced it so mismatched vectors are caught
// at the point of use.
struct FeatureVector {
    std::vector<double> values;
    std::string spec_id;
};

inline constexpr int kWindowFeatureDim = 32;
inline constexpr int kSignatureDim = 64;
inline constexpr const char* kWindowFeatureSpec = "stats32";
inline constexpr const char* kSignatureSpec = "sig64";
inline constexpr const char* kPhysicalSpec = "phys4";

// 32 statistics of one window, axes in x,y,z order:
//   per axis: mean, std, min, max, median, IQR, upward zero-crossing count
//             of the mean-removed signal, mean squared energy   (24)
//   Pearson correlations xy, xz, yz (0 for a constant axis)      (3)
//   magnitude mean, magnitude std                                (2)
//   per-axis mean absolute deviation                             (3)
// Standard deviations are population (divide by N); quartiles use linear
// interpolation at position q*(N-1). Zero crossings count transitions from
// below zero to >= zero, which keeps the statistic sensitive to time order.
FeatureVector extract_features(const LabeledWindow& window);

// Label-free subject descriptor: per-dimension mean followed by
// per-dimension population std of the subject's window feature vectors.
FeatureVector subject_signature(const std::vector<const LabeledWindow*>& windows);
FeatureVector subject_signature(const std::vector<LabeledWindow>& windows);

// Physical attribute vector (sex, age, weight, height) for Eq.-style
// distances over subject metadata.
FeatureVector physical_vector(const SubjectMeta& meta);

// Per-dimension shift/scale with scale = max(std, epsilon).
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static constexpr double kEpsilon = 1e-8;
};

// Requires at least two vectors of equal dimension.
Standardizer fit_standardizer(const std::vector<FeatureVector>& vectors);

// (v - mean) / scale. Throws on dimension mismatch.
FeatureVector apply_standardizer(const Standardizer& s, const FeatureVector& v);

}  // namespace har
