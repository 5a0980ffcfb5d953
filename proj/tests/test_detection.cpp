#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qontexts/detection.hpp"
#include "qontexts/rng.hpp"

using namespace qontexts::detect;
using qontexts::sim::Distribution;

namespace {

Distribution dist(std::initializer_list<std::pair<std::string, double>> entries) {
    Distribution d;
    for (const auto& [k, v] : entries) d.add(k, v);
    return d;
}

// random distribution over a small alphabet, trials-normalized
Distribution random_dist(qontexts::rng::Stream& stream, int support) {
    Distribution d;
    for (int i = 0; i < support; ++i) {
        std::string key;
        for (int b = 0; b < 4; ++b) key.push_back((i >> b) & 1 ? '1' : '0');
        d.add(key, stream.uniform() + 1e-3);
    }
    return d;
}

}  // namespace

TEST_CASE("hellinger basics") {
    auto p = dist({{"a", 50}, {"b", 50}});
    CHECK(hellinger(p, p) == doctest::Approx(0.0).epsilon(1e-12));

    auto q = dist({{"c", 10}});
    CHECK(hellinger(p, q) == doctest::Approx(1.0).epsilon(1e-12));

    auto r = dist({{"a", 10}});
    // sqrt(1 - sqrt(0.5)) for a fair coin vs a point mass
    CHECK(hellinger(p, r) == doctest::Approx(std::sqrt(1.0 - std::sqrt(0.5))).epsilon(1e-12));

    CHECK_THROWS_AS(hellinger(p, Distribution{}), DetectionError);
}

TEST_CASE("fidelity basics") {
    auto p = dist({{"a", 75}, {"b", 25}});
    CHECK(fidelity(p, p) == doctest::Approx(1.0).epsilon(1e-12));

    auto q = dist({{"a", 25}, {"b", 75}});
    CHECK(fidelity(p, q) == doctest::Approx(0.5).epsilon(1e-12));

    auto far = dist({{"x", 1}});
    auto other = dist({{"y", 1}});
    CHECK(fidelity(far, other) == doctest::Approx(0.0).epsilon(1e-12));

    // the unhalved variant can go negative; the bounded one cannot
    CHECK(fidelity_unhalved(far, other) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("metric axioms hold for hellinger and the total-variation distance") {
    qontexts::rng::Stream stream(314);
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        auto a = random_dist(stream, 8);
        auto b = random_dist(stream, 8);
        auto c = random_dist(stream, 8);

        double hab = hellinger(a, b), hba = hellinger(b, a);
        double hac = hellinger(a, c), hbc = hellinger(b, c);
        CHECK(hab == doctest::Approx(hba).epsilon(1e-12));
        CHECK(hab >= 0.0);
        CHECK(hab <= 1.0);
        CHECK(hac <= hab + hbc + 1e-12);  // triangle inequality
        CHECK(hellinger(a, a) == doctest::Approx(0.0).epsilon(1e-12));

        double tab = 1.0 - fidelity(a, b);
        double tac = 1.0 - fidelity(a, c);
        double tbc = 1.0 - fidelity(b, c);
        CHECK(tab == doctest::Approx(1.0 - fidelity(b, a)).epsilon(1e-12));
        CHECK(tac <= tab + tbc + 1e-12);
        double f = fidelity(a, b);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
}

TEST_CASE("hold-out flags the context with the outlier distribution") {
    // three contexts, the middle one noisy and far from the other two
    auto d1 = dist({{"0000", 80}, {"1111", 20}});
    auto d3 = dist({{"0000", 78}, {"1111", 22}});
    Distribution d2;
    for (int i = 0; i < 16; ++i) {
        std::string key;
        for (int b = 3; b >= 0; --b) key.push_back((i >> b) & 1 ? '1' : '0');
        d2.add(key, 6.25);
    }
    auto report = holdout_detect({d1, d2, d3}, 0.3);
    CHECK(report.attacked == std::set<int>{1});

    auto clean = holdout_detect({d1, d1, d1}, 0.3);
    CHECK(clean.attacked.empty());

    CHECK_THROWS_AS(holdout_detect({d1, d2}, 0.3), DetectionError);
}

TEST_CASE("hold-out is permutation equivariant") {
    auto benign1 = dist({{"000", 90}, {"111", 10}});
    auto benign2 = dist({{"000", 88}, {"111", 12}});
    auto benign3 = dist({{"000", 91}, {"111", 9}});
    Distribution noisy;
    for (const std::string& k : {"000", "001", "010", "011", "100", "101", "110", "111"})
        noisy.add(k, 12.5);

    std::vector<Distribution> base{noisy, benign1, benign2, benign3};
    auto r1 = holdout_detect(base, 0.3);
    CHECK(r1.attacked == std::set<int>{0});

    std::vector<Distribution> rotated{benign1, benign2, noisy, benign3};
    auto r2 = holdout_detect(rotated, 0.3);
    CHECK(r2.attacked == std::set<int>{2});
}

TEST_CASE("weighted merging") {
    auto a = dist({{"00", 60}, {"11", 40}});
    auto b = dist({{"00", 58}, {"11", 42}});

    SUBCASE("single kept context is returned unchanged") {
        DetectionReport report;
        report.attacked = {1};
        report.delta = DeltaMatrix::build({a, b});
        auto merged = merge_weighted({a, b}, report);
        CHECK(merged.probability("00") == doctest::Approx(0.6));
        CHECK(merged.trials == doctest::Approx(a.trials));
    }

    SUBCASE("two identical kept contexts get equal weights in both modes") {
        for (auto mode : {MergeMode::as_written, MergeMode::inverse_noise}) {
            DetectionReport report;
            report.delta = DeltaMatrix::build({a, a});
            auto merged = merge_weighted({a, a}, report, mode);
            CHECK(report.normalized_weights[0] == doctest::Approx(0.5));
            CHECK(report.normalized_weights[1] == doctest::Approx(0.5));
            CHECK(merged.probability("00") == doctest::Approx(0.6));
        }
    }

    SUBCASE("weights sum to one") {
        qontexts::rng::Stream stream(99);
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<Distribution> dists;
            for (int i = 0; i < 5; ++i) dists.push_back(random_dist(stream, 8));
            for (auto mode : {MergeMode::as_written, MergeMode::inverse_noise}) {
                DetectionReport report;
                report.delta = DeltaMatrix::build(dists);
                merge_weighted(dists, report, mode);
                double sum = 0.0;
                for (double w : report.normalized_weights) sum += w;
                CHECK(std::abs(sum - 1.0) < 1e-9);
            }
        }
    }

    SUBCASE("all contexts flagged is an error") {
        DetectionReport report;
        report.attacked = {0, 1};
        CHECK_THROWS_AS(merge_weighted({a, b}, report), DetectionError);
    }
}

TEST_CASE("inverse-noise weighting favors the cleaner context") {
    auto clean1 = dist({{"00", 95}, {"11", 5}});
    auto clean2 = dist({{"00", 93}, {"11", 7}});
    Distribution noisy;
    for (const std::string& k : {"00", "01", "10", "11"}) noisy.add(k, 25.0);

    DetectionReport inv;
    inv.delta = DeltaMatrix::build({clean1, clean2, noisy});
    merge_weighted({clean1, clean2, noisy}, inv, MergeMode::inverse_noise);
    CHECK(inv.normalized_weights[0] > inv.normalized_weights[2]);

    DetectionReport asw;
    asw.delta = inv.delta;
    merge_weighted({clean1, clean2, noisy}, asw, MergeMode::as_written);
    CHECK(asw.normalized_weights[2] > asw.normalized_weights[0]);  // literal form inverts
}

TEST_CASE("ci ratio") {
    auto all_good = dist({{"11", 100}});
    CHECK(std::isinf(ci_ratio(all_good, {"11"})));

    auto quarter = dist({{"11", 25}, {"00", 50}, {"01", 25}});
    CHECK(ci_ratio(quarter, {"11"}) == doctest::Approx(1.0 / 3.0));

    CHECK_THROWS_AS(ci_ratio(quarter, {}), DetectionError);
}

TEST_CASE("attack success criteria") {
    auto ideal = dist({{"101", 100}});

    SUBCASE("no change means no attack") {
        auto iso = dist({{"101", 14}, {"100", 9}, {"001", 8}});
        auto verdict = attack_success(iso, iso, ideal, SuccessKind::single_answer);
        CHECK_FALSE(verdict.success);
    }

    SUBCASE("peak flip is an attack") {
        auto iso = dist({{"101", 14}, {"111", 9}});
        auto shared = dist({{"111", 10}, {"101", 8}});
        auto verdict = attack_success(iso, shared, ideal, SuccessKind::single_answer);
        CHECK(verdict.success);
    }

    SUBCASE("distributional threshold at 12 percent") {
        auto iso = dist({{"101", 90}, {"111", 10}});
        double f_iso = fidelity(ideal, iso);
        // shared fidelity at 0.87 x isolated: attack; at 0.89 x: no attack
        auto make_shared = [&](double target_rf) {
            double f_target = target_rf * f_iso;
            // two-point distribution with mass m on the ideal string
            // has fidelity exactly m
            return dist({{"101", f_target * 100}, {"111", (1.0 - f_target) * 100}});
        };
        CHECK(attack_success(iso, make_shared(0.87), ideal, SuccessKind::distributional).success);
        CHECK_FALSE(
            attack_success(iso, make_shared(0.89), ideal, SuccessKind::distributional).success);
    }

    SUBCASE("argmax ties are flagged") {
        auto tied = dist({{"001", 50}, {"101", 50}});
        auto verdict = attack_success(tied, tied, ideal, SuccessKind::single_answer);
        CHECK(verdict.tie_broken);
    }
}
