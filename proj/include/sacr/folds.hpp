#ifndef SACR_FOLDS_HPP
#define SACR_FOLDS_HPP

#include <map>
#include <optional>
#include <vector>

#include "sacr/errors.hpp"
#include "sacr/rng.hpp"
#include "sacr/types.hpp"

namespace sacr {

/// k disjoint index sets covering 0..n-1, sizes differing by at most one;
/// seed-deterministic. With stratification labels, each class is dealt
/// round-robin so per-class proportions are preserved within one sample
/// per fold.
inline std::vector<std::vector<Index>>
kfold_split(Index n, int k, std::uint64_t seed,
            const std::optional<Vector>& stratify_labels = std::nullopt) {
    if (k < 2 || static_cast<Index>(k) > n)
        throw KTooLarge("k must satisfy 2 <= k <= n, got k=" + std::to_string(k) +
                        ", n=" + std::to_string(n));
    if (stratify_labels && stratify_labels->size() != n)
        throw LengthMismatch("stratification labels must have length n");

    Rng rng(derive_seed(seed, 0xf01d5));
    std::vector<std::vector<Index>> folds(static_cast<std::size_t>(k));
    if (!stratify_labels) {
        std::vector<Index> order(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
        rng.shuffle(order);
        Index pos = 0;
        for (int f = 0; f < k; ++f) {
            const Index size = n / k + (f < static_cast<int>(n % k) ? 1 : 0);
            for (Index j = 0; j < size; ++j)
                folds[static_cast<std::size_t>(f)].push_back(order[static_cast<std::size_t>(pos++)]);
        }
        return folds;
    }

    std::map<double, std::vector<Index>> groups;
    for (Index i = 0; i < n; ++i) groups[(*stratify_labels)(i)].push_back(i);
    std::size_t cursor = 0;
    for (auto& [label, members] : groups) {
        rng.shuffle(members);
        for (Index idx : members) {
            folds[cursor % static_cast<std::size_t>(k)].push_back(idx);
            ++cursor;
        }
    }
    return folds;
}

inline std::vector<Index> complement_indices(Index n, const std::vector<Index>& fold) {
    std::vector<char> in_fold(static_cast<std::size_t>(n), 0);
    for (Index i : fold) in_fold[static_cast<std::size_t>(i)] = 1;
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(n) - fold.size());
    for (Index i = 0; i < n; ++i)
        if (!in_fold[static_cast<std::size_t>(i)]) out.push_back(i);
    return out;
}

inline double metric_mse(const Vector& predictions, const Vector& truth) {
    if (predictions.size() != truth.size() || predictions.size() == 0)
        throw LengthMismatch("mse needs equal-length nonempty vectors");
    return (predictions - truth).squaredNorm() / static_cast<double>(truth.size());
}

/// Percent exact matches in [0, 100].
inline double metric_accuracy(const std::vector<int>& predicted, const Vector& truth) {
    if (static_cast<Index>(predicted.size()) != truth.size() || truth.size() == 0)
        throw LengthMismatch("accuracy needs equal-length nonempty vectors");
    Index hits = 0;
    for (Index i = 0; i < truth.size(); ++i)
        if (static_cast<double>(predicted[static_cast<std::size_t>(i)]) == truth(i)) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

} // namespace sacr

#endif
