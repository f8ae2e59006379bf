#pragma once

// SCARGC with a 1-NN base classifier: pool arrivals, re-cluster the pool, and
// carry labels over from the nearest past centroid.

#include "evl/kmeans.hpp"
#include "evl/types.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>

namespace evl {

struct ScargcState {
    int k = 2;
    std::size_t pool_size = 150;
    PointSet past_centroids;
    LabelSet centroid_labels;
    LabeledSet reference_set;  ///< backs the 1-NN classifier
    PointSet pending_pool;
    std::uint64_t seed = 0;
    std::uint64_t flushes = 0;
};

/// 1-NN over the reference set; ties go to the lowest reference index.
inline Label scargc_predict(const ScargcState& state, const Point& x) {
    double best = std::numeric_limits<double>::infinity();
    Label label = state.reference_set.labels.front();
    for (std::size_t i = 0; i < state.reference_set.size(); ++i) {
        const double d = detail::squared_distance(state.reference_set.points[i], x);
        if (d < best) {
            best = d;
            label = state.reference_set.labels[i];
        }
    }
    return label;
}

inline ScargcState scargc_init(const LabeledSet& initial, int k, std::size_t pool_size, std::uint64_t seed) {
    if (initial.empty()) throw InvalidArgument("scargc_init: empty initial labeled set");
    if (initial.points.size() != initial.labels.size())
        throw InvalidArgument("scargc_init: labels do not match points");
    if (pool_size < static_cast<std::size_t>(std::max(k, 1)))
        throw InvalidArgument("scargc_init: pool size must be at least k");
    const LabelSet classes = detail::distinct_labels(initial.labels);
    if (k < static_cast<int>(classes.size()))
        throw InvalidArgument("scargc_init: k=" + std::to_string(k) + " is below the class count " +
                              std::to_string(classes.size()));
    if (static_cast<std::size_t>(k) > initial.size())
        throw InvalidArgument("scargc_init: k exceeds the labeled instance count");

    ScargcState s;
    s.k = k;
    s.pool_size = pool_size;
    s.reference_set = initial;
    s.seed = seed;
    const Eigen::Index d = initial.points.front().size();
    if (k == static_cast<int>(classes.size())) {
        // The classes themselves are the initial clusters.
        for (Label c : classes) {
            Point sum = Point::Zero(d);
            std::size_t count = 0;
            for (std::size_t i = 0; i < initial.size(); ++i)
                if (initial.labels[i] == c) {
                    sum += initial.points[i];
                    ++count;
                }
            s.past_centroids.push_back(sum / static_cast<double>(count));
            s.centroid_labels.push_back(c);
        }
    } else {
        const KMeansModel km = kmeans(initial.points, k, KMeansOptions{}, seed);
        std::vector<std::map<Label, std::size_t>> votes(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < initial.size(); ++i)
            ++votes[static_cast<std::size_t>(km.assignment[i])][initial.labels[i]];
        for (int j = 0; j < k; ++j) {
            Label best = classes.front();
            std::size_t best_n = 0;
            for (const auto& [label, count] : votes[static_cast<std::size_t>(j)])
                if (count > best_n) {
                    best_n = count;
                    best = label;
                }
            s.past_centroids.push_back(km.centroids[static_cast<std::size_t>(j)]);
            s.centroid_labels.push_back(best);
        }
    }
    return s;
}

struct ScargcStepResult {
    LabelSet predictions;
    ScargcState next;
};

namespace detail {

inline void scargc_flush(ScargcState& s) {
    const KMeansModel km = kmeans(s.pending_pool, s.k, KMeansOptions{}, mix_seed(s.seed, s.flushes));
    LabelSet new_labels(static_cast<std::size_t>(s.k));
    for (std::size_t j = 0; j < km.centroids.size(); ++j) {
        const int past = nearest_index(s.past_centroids, km.centroids[j]);
        new_labels[j] = s.centroid_labels[static_cast<std::size_t>(past)];
    }
    LabeledSet relabeled;
    relabeled.points = std::move(s.pending_pool);
    relabeled.labels.resize(relabeled.points.size());
    for (std::size_t i = 0; i < relabeled.points.size(); ++i)
        relabeled.labels[i] = new_labels[static_cast<std::size_t>(km.assignment[i])];
    s.reference_set = std::move(relabeled);
    s.past_centroids = km.centroids;
    s.centroid_labels = std::move(new_labels);
    s.pending_pool.clear();
    ++s.flushes;
}

}  // namespace detail

/// Predictions are made on arrival (before any flush that instance triggers).
inline ScargcStepResult scargc_step(const ScargcState& state, const UnlabeledBatch& batch) {
    ScargcStepResult out;
    out.next = state;
    ScargcState& s = out.next;
    const Eigen::Index d = s.reference_set.points.front().size();
    out.predictions.reserve(batch.size());
    for (const auto& x : batch.points) {
        if (x.size() != d) throw InvalidArgument("scargc_step: feature dimension mismatch");
        out.predictions.push_back(scargc_predict(s, x));
        s.pending_pool.push_back(x);
        if (s.pending_pool.size() >= s.pool_size) detail::scargc_flush(s);
    }
    return out;
}

}  // namespace evl
