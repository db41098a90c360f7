#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "classify.hpp"
#include "rng.hpp"

using namespace hyperradon;

namespace {

LabeledFeatureSet make_set(const std::vector<std::pair<int, std::vector<double>>>& rows) {
    LabeledFeatureSet set;
    int id = 0;
    for (const auto& [label, features] : rows) {
        set.samples.push_back({label, id++, features});
    }
    return set;
}

}  // namespace

TEST_CASE("knn1 basics") {
    const auto train = make_set({{0, {0.0}}, {1, {10.0}}});
    CHECK(knn1(train, std::vector<double>{3.0}, Norm::L1) == 0);
    CHECK(knn1(train, std::vector<double>{3.0}, Norm::L2) == 0);
    CHECK(knn1(train, std::vector<double>{3.0}, Norm::Linf) == 0);
    CHECK(knn1(train, std::vector<double>{10.0}, Norm::L2) == 1);  // exact match
    CHECK_THROWS_AS(knn1(LabeledFeatureSet{}, std::vector<double>{1.0}, Norm::L2),
                    std::invalid_argument);
    CHECK_THROWS_AS(knn1(train, std::vector<double>{1.0, 2.0}, Norm::L2),
                    std::invalid_argument);

    // tie broken by the lowest sample id
    const auto tied = make_set({{0, {1.0}}, {1, {-1.0}}});
    CHECK(knn1(tied, std::vector<double>{0.0}, Norm::L2) == 0);
}

TEST_CASE("knn1 agrees with an exhaustive argmin oracle") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        LabeledFeatureSet train;
        for (int i = 0; i < 5; ++i) {
            std::vector<double> f(3);
            for (double& v : f) {
                v = rng.uniform(-1.0, 1.0);
            }
            train.samples.push_back({static_cast<int>(rng.uniform_index(3)), i, f});
        }
        std::vector<double> q(3);
        for (double& v : q) {
            v = rng.uniform(-1.0, 1.0);
        }
        for (Norm norm : {Norm::L1, Norm::L2, Norm::Linf}) {
            double best = 1e300;
            int best_label = -1;
            for (const auto& s : train.samples) {
                const double dist = feature_distance(s.features, q, norm);
                if (dist < best) {
                    best = dist;
                    best_label = s.label;
                }
            }
            CHECK(knn1(train, q, norm) == best_label);
        }
    }
}

TEST_CASE("argmin is invariant to monotone distance transforms") {
    // With one training sample per class the predicted label is the argmin
    // of distances; comparing L2 squared (a strictly increasing transform)
    // must not change it. L1 and Linf are not transforms of each other, so
    // just exercise L2 vs its square via the oracle.
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        LabeledFeatureSet train;
        for (int i = 0; i < 4; ++i) {
            std::vector<double> f(2);
            for (double& v : f) {
                v = rng.uniform(-1.0, 1.0);
            }
            train.samples.push_back({i, i, f});
        }
        std::vector<double> q{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        double best_sq = 1e300;
        int label_sq = -1;
        for (const auto& s : train.samples) {
            const double d = feature_distance(s.features, q, Norm::L2);
            if (d * d < best_sq) {
                best_sq = d * d;
                label_sq = s.label;
            }
        }
        CHECK(knn1(train, q, Norm::L2) == label_sq);
    }
}

TEST_CASE("perfectly separated clusters classify exactly") {
    LabeledFeatureSet set;
    int id = 0;
    for (int c = 0; c < 2; ++c) {
        for (int i = 0; i < 4; ++i) {
            set.samples.push_back({c, id++, {10.0 * c + 0.1 * i, 10.0 * c}});
        }
    }
    ExperimentConfig cfg;
    cfg.train_per_class = 1;
    cfg.repeats = 5;
    cfg.norm = Norm::L2;
    cfg.rng_seed = 3;
    const ExperimentResult result = run_experiment(set, cfg);
    CHECK(result.mean_accuracy == 1.0);
    CHECK(result.std_accuracy == 0.0);
    CHECK(result.accuracies.size() == 5);
}

TEST_CASE("shuffled labels score near chance") {
    Rng rng(23);
    LabeledFeatureSet set;
    const int classes = 4;
    const int per_class = 12;
    int id = 0;
    for (int c = 0; c < classes; ++c) {
        for (int i = 0; i < per_class; ++i) {
            std::vector<double> f(6);
            for (double& v : f) {
                v = rng.gaussian();  // features carry no class signal
            }
            set.samples.push_back({c, id++, f});
        }
    }
    ExperimentConfig cfg;
    cfg.train_per_class = 4;
    cfg.repeats = 20;
    cfg.norm = Norm::L2;
    cfg.rng_seed = 7;
    const ExperimentResult result = run_experiment(set, cfg);
    // Null accuracy 1/4 with binomial noise over 20*32 test decisions.
    const double n_tests = 20.0 * classes * (per_class - cfg.train_per_class);
    const double sigma = std::sqrt(0.25 * 0.75 / n_tests);
    CHECK(std::abs(result.mean_accuracy - 0.25) < 3.0 * sigma + 0.02);
}

TEST_CASE("confusion rows sum to 100 percent") {
    Rng rng(31);
    LabeledFeatureSet set;
    int id = 0;
    for (int c = 0; c < 3; ++c) {
        for (int i = 0; i < 6; ++i) {
            std::vector<double> f{rng.gaussian() + 2.0 * c, rng.gaussian()};
            set.samples.push_back({c, id++, f});
        }
    }
    ExperimentConfig cfg;
    cfg.train_per_class = 2;
    cfg.repeats = 8;
    cfg.norm = Norm::L1;
    cfg.rng_seed = 13;
    const ExperimentResult result = run_experiment(set, cfg);
    for (size_t r = 0; r < 3; ++r) {
        double total = 0.0;
        for (size_t c = 0; c < 3; ++c) {
            total += result.confusion[r * 3 + c];
        }
        CHECK(total == doctest::Approx(100.0).epsilon(1e-9));
    }
    // distance map is symmetric with a zero diagonal
    const size_t n = set.samples.size();
    REQUIRE(result.distance_map.size() == n * n);
    for (size_t i = 0; i < n; ++i) {
        CHECK(result.distance_map[i * n + i] == 0.0);
        for (size_t j = 0; j < n; ++j) {
            CHECK(result.distance_map[i * n + j] == result.distance_map[j * n + i]);
        }
    }
}

TEST_CASE("experiment determinism and validation") {
    Rng rng(37);
    LabeledFeatureSet set;
    int id = 0;
    for (int c = 0; c < 2; ++c) {
        for (int i = 0; i < 5; ++i) {
            set.samples.push_back({c, id++, {rng.gaussian(), rng.gaussian()}});
        }
    }
    ExperimentConfig cfg;
    cfg.train_per_class = 2;
    cfg.repeats = 6;
    cfg.norm = Norm::Linf;
    cfg.rng_seed = 11;
    const ExperimentResult a = run_experiment(set, cfg);
    const ExperimentResult b = run_experiment(set, cfg);
    CHECK(a.accuracies == b.accuracies);
    CHECK(a.confusion == b.confusion);

    cfg.train_per_class = 5;  // leaves no test samples
    CHECK_THROWS_AS(run_experiment(set, cfg), std::invalid_argument);
    cfg.train_per_class = 2;
    cfg.repeats = 0;
    CHECK_THROWS_AS(run_experiment(set, cfg), std::invalid_argument);
}

TEST_CASE("parse_norm") {
    CHECK(parse_norm("l1") == Norm::L1);
    CHECK(parse_norm("l2") == Norm::L2);
    CHECK(parse_norm("linf") == Norm::Linf);
    CHECK_THROWS_AS(parse_norm("l3"), std::invalid_argument);
}
