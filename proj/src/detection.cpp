#include "qontexts/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qontexts::detect {

namespace {

void require_nonempty(const Distribution& d, const char* what) {
    if (d.empty()) throw DetectionError(std::string("empty distribution passed to ") + what);
}

// Applies fn(p, q) over the union support of two distributions.
template <typename Fn>
void for_union(const Distribution& P, const Distribution& Q, Fn&& fn) {
    auto ip = P.counts.begin();
    auto iq = Q.counts.begin();
    while (ip != P.counts.end() || iq != Q.counts.end()) {
        if (iq == Q.counts.end() || (ip != P.counts.end() && ip->first < iq->first)) {
            fn(ip->second / P.trials, 0.0);
            ++ip;
        } else if (ip == P.counts.end() || iq->first < ip->first) {
            fn(0.0, iq->second / Q.trials);
            ++iq;
        } else {
            fn(ip->second / P.trials, iq->second / Q.trials);
            ++ip;
            ++iq;
        }
    }
}

}  // namespace

double hellinger(const Distribution& p, const Distribution& q) {
    require_nonempty(p, "hellinger");
    require_nonempty(q, "hellinger");
    double bc = 0.0;  // Bhattacharyya coefficient
    for_union(p, q, [&](double a, double b) { bc += std::sqrt(a * b); });
    return std::sqrt(std::max(0.0, 1.0 - std::min(1.0, bc)));
}

double fidelity(const Distribution& p, const Distribution& q) {
    require_nonempty(p, "fidelity");
    require_nonempty(q, "fidelity");
    double tvd = 0.0;
    for_union(p, q, [&](double a, double b) { tvd += std::abs(a - b); });
    tvd *= 0.5;
    return std::clamp(1.0 - tvd, 0.0, 1.0);
}

double fidelity_unhalved(const Distribution& p, const Distribution& q) {
    require_nonempty(p, "fidelity_unhalved");
    require_nonempty(q, "fidelity_unhalved");
    double sum = 0.0;
    for_union(p, q, [&](double a, double b) { sum += std::abs(a - b); });
    return 1.0 - sum;
}

DeltaMatrix DeltaMatrix::build(const std::vector<Distribution>& dists) {
    int c = static_cast<int>(dists.size());
    DeltaMatrix m;
    m.delta.assign(c, std::vector<double>(c, 0.0));
    for (int i = 0; i < c; ++i)
        for (int j = i + 1; j < c; ++j) m.delta[i][j] = m.delta[j][i] = hellinger(dists[i], dists[j]);
    return m;
}

DetectionReport holdout_detect(const std::vector<Distribution>& dists, double threshold) {
    int c = static_cast<int>(dists.size());
    if (c < 3) throw DetectionError("hold-out needs at least 3 contexts");

    DetectionReport report;
    report.threshold = threshold;
    report.delta = DeltaMatrix::build(dists);
    report.votes.assign(c, 0);

    for (int i = 0; i < c; ++i) {
        for (int j = i + 1; j < c; ++j) {
            if (report.delta.at(i, j) < kSimilarBand)
                ++report.similar_pairs;
            else if (report.delta.at(i, j) >= kDissimilarBand)
                ++report.dissimilar_pairs;

            // Hold out every other context k; each side of the pair is
            // flagged when a majority of the k's votes against it.
            int against_i = 0;
            int against_j = 0;
            for (int k = 0; k < c; ++k) {
                if (k == i || k == j) continue;
                double d = report.delta.at(j, k) - report.delta.at(i, k);
                if (d > threshold)
                    ++against_j;
                else if (-d > threshold)
                    ++against_i;
            }
            report.votes[i] += against_i;
            report.votes[j] += against_j;
            int majority = (c - 2) / 2;  // votes must exceed half of the k's
            if (against_i > majority) report.attacked.insert(i);
            if (against_j > majority) report.attacked.insert(j);
        }
    }
    return report;
}

Distribution merge_weighted(const std::vector<Distribution>& dists, DetectionReport& report,
                            MergeMode mode) {
    int c = static_cast<int>(dists.size());
    std::vector<int> kept;
    for (int i = 0; i < c; ++i)
        if (!report.attacked.count(i)) kept.push_back(i);
    if (kept.empty())
        throw DetectionError("all contexts flagged as attacked; re-execution required");

    if (report.delta.size() != c) report.delta = DeltaMatrix::build(dists);

    report.weights.assign(c, 0.0);
    double total = 0.0;
    for (int i : kept) {
        double sum = 0.0;
        for (int j : kept) sum += report.delta.at(i, j);
        double w = mode == MergeMode::as_written ? sum : 1.0 / (1e-6 + sum);
        report.weights[i] = w;
        total += w;
    }
    report.normalized_weights.assign(c, 0.0);
    if (total <= 0.0) {
        // all-zero weights (identical kept distributions): uniform
        for (int i : kept) report.normalized_weights[i] = 1.0 / kept.size();
    } else {
        for (int i : kept) report.normalized_weights[i] = report.weights[i] / total;
    }

    Distribution merged;
    double trials = 0.0;
    for (int i : kept) trials += dists[i].trials;
    for (int i : kept) {
        double w = report.normalized_weights[i];
        if (dists[i].trials <= 0.0) continue;
        for (const auto& [bits, count] : dists[i].counts)
            merged.counts[bits] += w * (count / dists[i].trials) * trials;
    }
    merged.trials = trials;
    return merged;
}

Distribution merge_counts(const std::vector<Distribution>& dists) {
    Distribution merged;
    for (const auto& d : dists) {
        for (const auto& [bits, count] : d.counts) merged.counts[bits] += count;
        merged.trials += d.trials;
    }
    return merged;
}

double ci_ratio(const Distribution& d, const std::set<std::string>& correct) {
    if (correct.empty()) throw DetectionError("ci_ratio needs a non-empty correct set");
    double good = 0.0;
    double bad = 0.0;
    for (const auto& [bits, count] : d.counts)
        (correct.count(bits) ? good : bad) += count;
    if (bad <= 0.0) return std::numeric_limits<double>::infinity();
    return good / bad;
}

AttackVerdict attack_success(const Distribution& iso, const Distribution& shared,
                             const Distribution& ideal, SuccessKind kind) {
    AttackVerdict v;
    if (kind == SuccessKind::single_answer) {
        bool tie_ideal = false, tie_iso = false, tie_shared = false;
        std::string truth = ideal.argmax(&tie_ideal);
        std::string from_iso = iso.argmax(&tie_iso);
        std::string from_shared = shared.argmax(&tie_shared);
        v.tie_broken = tie_ideal || tie_iso || tie_shared;
        v.success = (from_iso == truth) && (from_shared != truth);
    } else {
        v.success = fidelity(ideal, shared) < 0.88 * fidelity(ideal, iso);
    }
    return v;
}

}  // namespace qontexts::detect
