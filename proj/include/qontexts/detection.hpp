#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qontexts/distribution.hpp"

namespace qontexts::detect {

using sim::Distribution;

struct DetectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Hellinger distance sqrt(1 - sum_x sqrt(P(x) Q(x))), in [0, 1].
double hellinger(const Distribution& p, const Distribution& q);

/// Total-variation complement 1 - 0.5 * sum_x |P(x) - Q(x)|, in [0, 1].
double fidelity(const Distribution& p, const Distribution& q);

/// Unhalved variant 1 - sum_x |P(x) - Q(x)|; can reach -1. Kept for
/// literal reproduction alongside the bounded form above.
double fidelity_unhalved(const Distribution& p, const Distribution& q);

/// Symmetric pairwise Hellinger distances with zero diagonal.
struct DeltaMatrix {
    std::vector<std::vector<double>> delta;

    int size() const { return static_cast<int>(delta.size()); }
    double at(int i, int j) const { return delta[i][j]; }

    static DeltaMatrix build(const std::vector<Distribution>& dists);
};

/// Reference bands for annotating pairs (not decision inputs).
constexpr double kSimilarBand = 0.35;
constexpr double kDissimilarBand = 0.5;

struct DetectionReport {
    std::set<int> attacked;          // flagged context indices
    std::vector<int> votes;          // per-context suspicious (pair, k) votes
    double threshold = 0.3;
    DeltaMatrix delta;
    std::vector<double> weights;             // W_i for kept contexts (0 for flagged)
    std::vector<double> normalized_weights;  // sums to 1 over kept contexts
    int similar_pairs = 0;                   // delta < kSimilarBand
    int dissimilar_pairs = 0;                // delta >= kDissimilarBand
};

/// Hold-Out detector over per-context distributions. For every unordered
/// pair (i, j) and every third context k, the difference
/// D = delta(j,k) - delta(i,k) casts a suspicious vote against j when
/// D > threshold (against i when -D > threshold). A context is flagged
/// when, within some pair, it collects votes from a majority of the
/// hold-out contexts k. Needs at least 3 contexts.
DetectionReport holdout_detect(const std::vector<Distribution>& dists, double threshold = 0.3);

enum class MergeMode { as_written, inverse_noise };

/// Weighted sum of the kept (non-flagged) context distributions.
/// as_written:    W_i = sum_j delta(i, j) over kept contexts
/// inverse_noise: W_i = 1 / (1e-6 + sum_j delta(i, j))
/// Weights are normalized; `report` receives them. Throws when every
/// context is flagged (re-execution required).
Distribution merge_weighted(const std::vector<Distribution>& dists, DetectionReport& report,
                            MergeMode mode = MergeMode::inverse_noise);

/// Plain aggregation of raw counts (context-switching without detection).
Distribution merge_counts(const std::vector<Distribution>& dists);

/// Correct-to-incorrect outcome ratio; +inf when nothing is incorrect.
double ci_ratio(const Distribution& d, const std::set<std::string>& correct);

enum class SuccessKind { single_answer, distributional };

struct AttackVerdict {
    bool success = false;
    bool tie_broken = false;  // an argmax tie was broken lexicographically
};

/// single_answer: the isolated run identifies the ideal argmax but the
/// shared run does not. distributional: shared fidelity dropped by more
/// than 12% of isolated fidelity.
AttackVerdict attack_success(const Distribution& iso, const Distribution& shared,
                             const Distribution& ideal, SuccessKind kind);

}  // namespace qontexts::detect
