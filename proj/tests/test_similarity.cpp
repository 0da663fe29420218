#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "har/similarity.hpp"

using namespace har;

namespace {

FeatureVector fv(std::vector<double> values) { return {std::move(values), "t"}; }

std::vector<SubjectMeta> random_subjects(std::mt19937_64& rng, int n) {
    std::vector<SubjectMeta> subjects;
    for (int i = 0; i < n; ++i) {
        SubjectMeta s;
        s.subject_id = "s" + std::to_string(i);
        s.sex = static_cast<int>(rng() % 2);
        s.age = 20 + static_cast<int>(rng() % 50);
        s.weight_kg = 50.0 + static_cast<double>(rng() % 500) / 10.0;
        s.height_cm = 150.0 + static_cast<double>(rng() % 400) / 10.0;
        subjects.push_back(std::move(s));
    }
    return subjects;
}

std::vector<FeatureVector> random_signatures(std::mt19937_64& rng, int n, int dim) {
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    std::vector<FeatureVector> out;
    for (int i = 0; i < n; ++i) {
        FeatureVector v;
        v.spec_id = "sig";
        for (int d = 0; d < dim; ++d) v.values.push_back(dist(rng));
        out.push_back(std::move(v));
    }
    return out;
}

// Independent per-pair oracle: z-score with population stats, Euclidean
// distance, exp(-gamma d) with the median-heuristic gamma.
struct PairOracle {
    std::vector<std::vector<double>> z;
    double gamma = 0.0;

    explicit PairOracle(const std::vector<std::vector<double>>& raw) {
        const std::size_t n = raw.size();
        const std::size_t dim = raw.front().size();
        z.assign(n, std::vector<double>(dim, 0.0));
        for (std::size_t d = 0; d < dim; ++d) {
            double mean = 0.0;
            for (const auto& row : raw) mean += row[d];
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (const auto& row : raw) var += (row[d] - mean) * (row[d] - mean);
            const double scale = std::max(std::sqrt(var / static_cast<double>(n)), 1e-8);
            for (std::size_t i = 0; i < n; ++i) z[i][d] = (raw[i][d] - mean) / scale;
        }
        std::vector<double> dists;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = dist(i, j);
                if (d > 0.0) dists.push_back(d);
            }
        std::sort(dists.begin(), dists.end());
        const std::size_t m = dists.size();
        const double median =
            m % 2 == 1 ? dists[m / 2] : 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
        gamma = std::log(2.0) / median;
    }

    double dist(std::size_t i, std::size_t j) const {
        double acc = 0.0;
        for (std::size_t d = 0; d < z[i].size(); ++d)
            acc += (z[i][d] - z[j][d]) * (z[i][d] - z[j][d]);
        return std::sqrt(acc);
    }

    double sim(std::size_t i, std::size_t j) const {
        return i == j ? 1.0 : std::exp(-gamma * dist(i, j));
    }
};

}  // namespace

TEST_CASE("euclidean distance basics") {
    CHECK(euclidean(fv({1.0, 2.0, 3.0}), fv({1.0, 2.0, 3.0})) == 0.0);
    CHECK(euclidean(fv({0.0, 0.0}), fv({3.0, 4.0})) == 5.0);
    CHECK_THROWS_AS(euclidean(fv({1.0}), fv({1.0, 2.0})), std::invalid_argument);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(8), b(8);
        for (int d = 0; d < 8; ++d) {
            a[d] = dist(rng);
            b[d] = dist(rng);
        }
        double acc = 0.0;
        for (int d = 0; d < 8; ++d) acc += (a[d] - b[d]) * (a[d] - b[d]);
        CHECK(euclidean(fv(a), fv(b)) == doctest::Approx(std::sqrt(acc)).epsilon(1e-12));
    }
}

TEST_CASE("similarity kernel values") {
    CHECK(similarity(fv({1.0, 1.0}), fv({1.0, 1.0}), 2.5) == 1.0);
    CHECK(similarity(fv({1.0}), fv({9.0}), 0.0) == 1.0);  // gamma 0 degenerates
    // d = 5, gamma = 0.2 -> e^-1
    CHECK(similarity(fv({0.0, 0.0}), fv({3.0, 4.0}), 0.2) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("gamma selection from the distance median") {
    CHECK(select_gamma({1.0, 1.0, 1.0}) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const double g = select_gamma({2.0});
    CHECK(g == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-12));
    CHECK(std::exp(-g * 2.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(select_gamma({0.0, 3.0}) == doctest::Approx(std::log(2.0) / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(select_gamma({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(select_gamma({}), std::invalid_argument);
}

TEST_CASE("identical subjects are maximally similar") {
    std::vector<SubjectMeta> subjects = {{"a", 1, 30, 70.0, 175.0}, {"b", 1, 30, 70.0, 175.0}};
    const auto matrix = build_matrix(SimilarityKind::physical, subjects, {}, SimilarityConfig{});
    CHECK(matrix.at(0, 1) == 1.0);
    CHECK(matrix.at(0, 0) == 1.0);
    CHECK(matrix.at(1, 1) == 1.0);
}

TEST_CASE("combined kind is the entrywise product of its components") {
    std::mt19937_64 rng(19);
    const auto subjects = random_subjects(rng, 6);
    const auto signatures = random_signatures(rng, 6, 10);
    SimilarityConfig config;
    const auto physical = build_matrix(SimilarityKind::physical, subjects, signatures, config);
    const auto sensor = build_matrix(SimilarityKind::sensor, subjects, signatures, config);
    const auto combined =
        build_matrix(SimilarityKind::physical_sensor, subjects, signatures, config);
    for (std::size_t i = 0; i < combined.size(); ++i) {
        for (std::size_t j = 0; j < combined.size(); ++j) {
            CHECK(combined.at(i, j) ==
                  doctest::Approx(physical.at(i, j) * sensor.at(i, j)).epsilon(1e-12));
            // product of (0,1] values never exceeds either component
            CHECK(combined.at(i, j) <= physical.at(i, j));
            CHECK(combined.at(i, j) <= sensor.at(i, j));
        }
    }
    CHECK(combined.gamma_used.size() == 2);
}

TEST_CASE("matrix matches the per-pair standardize-distance-kernel oracle") {
    std::mt19937_64 rng(29);
    const auto subjects = random_subjects(rng, 5);

    std::vector<std::vector<double>> raw;
    for (const auto& s : subjects)
        raw.push_back({static_cast<double>(s.sex), static_cast<double>(s.age), s.weight_kg,
                       s.height_cm});
    const PairOracle oracle(raw);

    const auto matrix = build_matrix(SimilarityKind::physical, subjects, {}, SimilarityConfig{});
    CHECK(matrix.gamma_used.at("physical") == doctest::Approx(oracle.gamma).epsilon(1e-12));
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(matrix.at(i, j) == doctest::Approx(oracle.sim(i, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("matrix invariants: symmetry, unit diagonal, range") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(rng() % 8);
        const auto subjects = random_subjects(rng, n);
        const auto signatures = random_signatures(rng, n, 12);
        for (auto kind : {SimilarityKind::physical, SimilarityKind::sensor,
                          SimilarityKind::physical_sensor}) {
            const auto matrix = build_matrix(kind, subjects, signatures, SimilarityConfig{});
            for (std::size_t i = 0; i < matrix.size(); ++i) {
                CHECK(matrix.at(i, i) == 1.0);
                for (std::size_t j = 0; j < matrix.size(); ++j) {
                    CHECK(matrix.at(i, j) == matrix.at(j, i));  // exact symmetry
                    CHECK(matrix.at(i, j) > 0.0);
                    CHECK(matrix.at(i, j) <= 1.0);
                }
            }
        }
    }
}

TEST_CASE("monotonicity: closer pairs are more similar") {
    const auto a = fv({0.0, 0.0});
    const auto near = fv({1.0, 0.0});
    const auto far = fv({2.0, 0.5});
    for (double gamma : {0.1, 1.0, 7.0}) {
        CHECK(similarity(a, near, gamma) > similarity(a, far, gamma));
    }
}

TEST_CASE("scaling distances by c with gamma/c leaves the matrix unchanged") {
    std::mt19937_64 rng(37);
    const int n = 7;
    auto signatures = random_signatures(rng, n, 9);
    std::vector<std::string> ids;
    for (int i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));

    const double gamma = 0.8;
    const auto base = matrix_from_vectors(ids, signatures, GammaMode::fixed(gamma),
                                          SimilarityKind::sensor, "sensor");
    for (double c : {0.25, 3.0, 17.5}) {
        auto scaled = signatures;
        for (auto& v : scaled) {
            for (double& value : v.values) value *= c;
        }
        const auto matrix = matrix_from_vectors(ids, scaled, GammaMode::fixed(gamma / c),
                                                SimilarityKind::sensor, "sensor");
        for (std::size_t i = 0; i < base.size(); ++i)
            for (std::size_t j = 0; j < base.size(); ++j)
                CHECK(matrix.at(i, j) == doctest::Approx(base.at(i, j)).epsilon(1e-12));
        for (const auto& id : ids) {
            CHECK(top_m_similar(matrix, id, 3) == top_m_similar(base, id, 3));
        }
    }
}

TEST_CASE("top-m selection") {
    SimilarityMatrix matrix;
    matrix.subject_ids = {"a", "b", "c", "d"};
    matrix.values = {
        1.0, 0.2, 0.9, 0.5,  //
        0.2, 1.0, 0.3, 0.3,  //
        0.9, 0.3, 1.0, 0.1,  //
        0.5, 0.3, 0.1, 1.0,  //
    };
    CHECK(top_m_similar(matrix, "a", 3) == std::vector<std::string>{"c", "d", "b"});
    CHECK(top_m_similar(matrix, "a", 1) == std::vector<std::string>{"c"});
    // ties break by ascending subject id
    CHECK(top_m_similar(matrix, "b", 3) == std::vector<std::string>{"c", "d", "a"});
    CHECK_THROWS_AS(top_m_similar(matrix, "a", 0), std::invalid_argument);
    CHECK_THROWS_AS(top_m_similar(matrix, "a", 4), std::invalid_argument);
    CHECK_THROWS_AS(top_m_similar(matrix, "zz", 1), std::invalid_argument);
}

TEST_CASE("top-m equals a full-sort oracle on random matrices") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> dist(0.01, 0.99);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 4 + rng() % 6;
        SimilarityMatrix matrix;
        for (std::size_t i = 0; i < n; ++i)
            matrix.subject_ids.push_back("s" + std::to_string(i));
        matrix.values.assign(n * n, 1.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = dist(rng);
                matrix.values[i * n + j] = v;
                matrix.values[j * n + i] = v;
            }

        const std::size_t test = rng() % n;
        const std::string test_id = matrix.subject_ids[test];
        std::vector<std::pair<double, std::string>> order;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != test) order.push_back({-matrix.at(test, j), matrix.subject_ids[j]});
        }
        std::sort(order.begin(), order.end());
        std::vector<std::string> expected;
        for (std::size_t k = 0; k < 3; ++k) expected.push_back(order[k].second);
        CHECK(top_m_similar(matrix, test_id, 3) == expected);
    }
}

TEST_CASE("build_matrix input validation") {
    std::mt19937_64 rng(43);
    const auto one = random_subjects(rng, 1);
    CHECK_THROWS_AS(build_matrix(SimilarityKind::physical, one, {}, SimilarityConfig{}),
                    std::invalid_argument);
    const auto subjects = random_subjects(rng, 4);
    CHECK_THROWS_AS(build_matrix(SimilarityKind::sensor, subjects, {}, SimilarityConfig{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(GammaMode::fixed(0.0), std::invalid_argument);
}

TEST_CASE("matrix CSV export format") {
    SimilarityMatrix matrix;
    matrix.subject_ids = {"a", "b"};
    matrix.values = {1.0, 0.25, 0.25, 1.0};
    const auto text = matrix_to_csv(matrix);
    CHECK(text ==
          "subject_id,a,b\n"
          "a,1.000000,0.250000\n"
          "b,0.250000,1.000000\n");
}
