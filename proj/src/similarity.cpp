#include "har/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace har {

std::string to_string(SimilarityKind kind) {
    switch (kind) {
        case SimilarityKind::physical: return "physical";
        case SimilarityKind::sensor: return "sensor";
        case SimilarityKind::physical_sensor: return "physical_sensor";
    }
    return "?";
}

SimilarityKind similarity_kind_from_string(const std::string& text) {
    if (text == "physical") return SimilarityKind::physical;
    if (text == "sensor") return SimilarityKind::sensor;
    if (text == "physical_sensor") return SimilarityKind::physical_sensor;
    throw std::invalid_argument("unknown similarity kind: " + text);
}

GammaMode GammaMode::fixed(double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("fixed gamma must be positive");
    return GammaMode{Kind::fixed, gamma};
}

GammaMode GammaMode::median() { return GammaMode{Kind::median_heuristic, 1.0}; }

std::size_t SimilarityMatrix::index_of(const std::string& subject_id) const {
    for (std::size_t i = 0; i < subject_ids.size(); ++i) {
        if (subject_ids[i] == subject_id) return i;
    }
    throw std::invalid_argument("subject not in similarity matrix: " + subject_id);
}

double euclidean(const FeatureVector& a, const FeatureVector& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("euclidean: dimension mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double similarity(const FeatureVector& a, const FeatureVector& b, double gamma) {
    return std::exp(-gamma * euclidean(a, b));
}

double select_gamma(const std::vector<double>& pairwise_distances) {
    std::vector<double> positive;
    for (double d : pairwise_distances) {
        if (d > 0.0) positive.push_back(d);
    }
    if (positive.empty())
        throw std::invalid_argument("select_gamma: no strictly positive distance");
    std::sort(positive.begin(), positive.end());
    const std::size_t n = positive.size();
    const double median = (n % 2 == 1) ? positive[n / 2]
                                       : 0.5 * (positive[n / 2 - 1] + positive[n / 2]);
    return std::log(2.0) / median;
}

SimilarityMatrix matrix_from_vectors(const std::vector<std::string>& subject_ids,
                                     const std::vector<FeatureVector>& vectors,
                                     const GammaMode& gamma_mode, SimilarityKind kind,
                                     const std::string& component_name) {
    const std::size_t n = subject_ids.size();
    if (n < 2) throw std::invalid_argument("matrix_from_vectors: need at least 2 subjects");
    if (vectors.size() != n)
        throw std::invalid_argument("matrix_from_vectors: one vector per subject required");

    std::vector<double> distances(n * n, 0.0);
    std::vector<double> upper;
    upper.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = euclidean(vectors[i], vectors[j]);
            distances[i * n + j] = d;
            distances[j * n + i] = d;
            upper.push_back(d);
        }
    }

    double gamma;
    if (gamma_mode.kind == GammaMode::Kind::fixed) {
        gamma = gamma_mode.fixed_gamma;
    } else if (std::all_of(upper.begin(), upper.end(), [](double d) { return d == 0.0; })) {
        // All subjects coincide; every entry is exp(0) = 1 for any gamma.
        gamma = 1.0;
    } else {
        gamma = select_gamma(upper);
    }

    SimilarityMatrix matrix;
    matrix.subject_ids = subject_ids;
    matrix.kind = kind;
    matrix.gamma_used[component_name] = gamma;
    matrix.values.assign(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::exp(-gamma * distances[i * n + j]);
            matrix.values[i * n + j] = v;
            matrix.values[j * n + i] = v;
        }
    }
    return matrix;
}

namespace {

std::vector<FeatureVector> standardized(const std::vector<FeatureVector>& vectors) {
    const Standardizer s = fit_standardizer(vectors);
    std::vector<FeatureVector> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) out.push_back(apply_standardizer(s, v));
    return out;
}

}  // namespace

SimilarityMatrix build_matrix(SimilarityKind kind, const std::vector<SubjectMeta>& subjects,
                              const std::vector<FeatureVector>& signatures,
                              const SimilarityConfig& config) {
    if (subjects.size() < 2)
        throw std::invalid_argument("build_matrix: need at least 2 subjects");
    std::vector<std::string> ids;
    ids.reserve(subjects.size());
    for (const auto& s : subjects) ids.push_back(s.subject_id);

    const bool needs_sensor =
        kind == SimilarityKind::sensor || kind == SimilarityKind::physical_sensor;
    if (needs_sensor && signatures.size() != subjects.size())
        throw std::invalid_argument("build_matrix: sensor similarity needs one signature "
                                    "per subject");

    SimilarityMatrix physical_m, sensor_m;
    if (kind != SimilarityKind::sensor) {
        std::vector<FeatureVector> phys;
        phys.reserve(subjects.size());
        for (const auto& s : subjects) phys.push_back(physical_vector(s));
        physical_m = matrix_from_vectors(ids, standardized(phys), config.gamma_mode,
                                         SimilarityKind::physical, "physical");
    }
    if (needs_sensor) {
        sensor_m = matrix_from_vectors(ids, standardized(signatures), config.gamma_mode,
                                       SimilarityKind::sensor, "sensor");
    }

    switch (kind) {
        case SimilarityKind::physical: return physical_m;
        case SimilarityKind::sensor: return sensor_m;
        case SimilarityKind::physical_sensor: {
            SimilarityMatrix combined;
            combined.subject_ids = ids;
            combined.kind = kind;
            combined.gamma_used = physical_m.gamma_used;
            combined.gamma_used.insert(sensor_m.gamma_used.begin(), sensor_m.gamma_used.end());
            combined.values.resize(physical_m.values.size());
            for (std::size_t i = 0; i < combined.values.size(); ++i) {
                combined.values[i] = physical_m.values[i] * sensor_m.values[i];
            }
            return combined;
        }
    }
    throw std::logic_error("build_matrix: unreachable");
}

std::vector<std::string> top_m_similar(const SimilarityMatrix& matrix,
                                       const std::string& test_subject, int m) {
    const std::size_t n = matrix.size();
    const std::size_t test = matrix.index_of(test_subject);
    if (m < 1 || static_cast<std::size_t>(m) > n - 1)
        throw std::invalid_argument("top_m_similar: m out of range");

    std::vector<std::size_t> others;
    others.reserve(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (i != test) others.push_back(i);
    }
    std::sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
        const double sa = matrix.at(test, a);
        const double sb = matrix.at(test, b);
        if (sa != sb) return sa > sb;
        return matrix.subject_ids[a] < matrix.subject_ids[b];
    });

    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) out.push_back(matrix.subject_ids[others[i]]);
    return out;
}

std::string matrix_to_csv(const SimilarityMatrix& matrix) {
    std::ostringstream out;
    out << "subject_id";
    for (const auto& id : matrix.subject_ids) out << ',' << id;
    out << '\n';
    out.setf(std::ios::fixed);
    out.precision(6);
    for (std::size_t i = 0; i < matrix.size(); ++i) {
        out << matrix.subject_ids[i];
        for (std::size_t j = 0; j < matrix.size(); ++j) out << ',' << matrix.at(i, j);
        out << '\n';
    }
    return out.str();
}

}  // namespace har
