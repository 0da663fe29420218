#pragma once

#include <map>
#include <string>
#include <vector>

#include "har/features.hpp"

namespace har {

enum class SimilarityKind { physical, sensor, physical_sensor };

std::string to_string(SimilarityKind kind);
SimilarityKind similarity_kind_from_string(const std::string& text);

// Scale-parameter policy: a fixed gamma > 0, or the median heuristic
// (gamma = ln 2 / median positive distance, so the median pair lands at
// similarity 0.5).
struct GammaMode {
    enum class Kind { fixed, median_heuristic } kind = Kind::median_heuristic;
    double fixed_gamma = 1.0;

    static GammaMode fixed(double gamma);
    static GammaMode median();
};

struct SimilarityConfig {
    GammaMode gamma_mode;
    SimilarityKind kind = SimilarityKind::physical;
};

// Symmetric subject-by-subject matrix of exp(-gamma * d) values.
// Diagonal is exactly 1; entries live in (0, 1]. gamma_used records the
// gamma chosen per component ("physical" and/or "sensor").
struct SimilarityMatrix {
    std::vector<std::string> subject_ids;
    std::vector<double> values;  // row-major n*n
    SimilarityKind kind = SimilarityKind::physical;
    std::map<std::string, double> gamma_used;

    std::size_t size() const { return subject_ids.size(); }
    double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
    std::size_t index_of(const std::string& subject_id) const;  // throws if unknown
};

// Euclidean distance between equal-dimension vectors.
double euclidean(const FeatureVector& a, const FeatureVector& b);

// exp(-gamma * euclidean(a, b)).
double similarity(const FeatureVector& a, const FeatureVector& b, double gamma);

// gamma = ln 2 / median of the strictly positive distances.
// Throws if no distance is positive.
double select_gamma(const std::vector<double>& pairwise_distances);

// Kernel matrix over the given vectors as-is (no standardization).
// Building block for build_matrix and for scale-invariance checks.
SimilarityMatrix matrix_from_vectors(const std::vector<std::string>& subject_ids,
                                     const std::vector<FeatureVector>& vectors,
                                     const GammaMode& gamma_mode, SimilarityKind kind,
                                     const std::string& component_name);

// The three similarity kinds over a subject population:
//   physical        - standardized (sex, age, weight, height) vectors
//   sensor          - standardized 64-dim subject signatures
//   physical_sensor - entrywise product of the two component matrices
// signatures[i] must correspond to subjects[i] when the sensor component
// is involved. Requires at least 2 subjects.
SimilarityMatrix build_matrix(SimilarityKind kind, const std::vector<SubjectMeta>& subjects,
                              const std::vector<FeatureVector>& signatures,
                              const SimilarityConfig& config);

// The m subjects most similar to test_subject (excluded), similarity
// descending, ties broken by ascending subject id. 1 <= m <= n-1.
std::vector<std::string> top_m_similar(const SimilarityMatrix& matrix,
                                       const std::string& test_subject, int m);

// Export format: header `subject_id,<id1>,...,<idN>`, then one row per
// subject with values printed to 6 decimal places.
std::string matrix_to_csv(const SimilarityMatrix& matrix);

}  // namespace har
