#pragma once

// COMPOSE: label each batch by cluster-and-label from the current labeled set,
// then keep each class's core supports as the next labeled set.

#include "evl/core_support.hpp"
#include "evl/kmeans.hpp"
#include "evl/types.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

namespace evl {

struct ComposeState {
    LabeledSet labeled;  ///< L^t with Y^t
    int k = 2;           ///< clusters for cluster-and-label
    CseParams cse;
    LabelSet classes;    ///< every class of the problem, ascending
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
    std::size_t class_loss_events = 0;
};

/// `classes` lists every class of the problem; each must appear in `initial`.
/// When empty it is taken from the labels present.
inline ComposeState compose_init(const LabeledSet& initial, int k, const CseParams& cse, std::uint64_t seed,
                                 LabelSet classes = {}) {
    if (initial.empty()) throw InvalidArgument("compose_init: initial labeled set is empty");
    if (initial.points.size() != initial.labels.size())
        throw InvalidArgument("compose_init: labels do not match points");
    if (k < 1) throw InvalidArgument("compose_init: k must be at least 1");
    cse.validate();
    const LabelSet present = detail::distinct_labels(initial.labels);
    if (classes.empty()) classes = present;
    classes = detail::distinct_labels(classes);
    for (Label c : classes)
        if (!std::binary_search(present.begin(), present.end(), c))
            throw InvalidArgument("compose_init: class " + std::to_string(c) + " has no labeled instances");
    if (cse.method == CseMethod::alpha_shape_2d && initial.points.front().size() != 2)
        throw InvalidArgument("compose_init: alpha-shape core supports need 2-D data");
    ComposeState state;
    state.labeled = initial;
    state.k = k;
    state.cse = cse;
    state.classes = std::move(classes);
    state.seed = seed;
    return state;
}

struct ComposeStepResult {
    LabelSet predictions;
    ComposeState next;
};

inline ComposeStepResult compose_step(const ComposeState& state, const UnlabeledBatch& batch) {
    if (batch.points.empty()) throw InvalidArgument("compose_step: empty batch");
    const Eigen::Index d = state.labeled.points.front().size();
    for (const auto& p : batch.points)
        if (p.size() != d) throw InvalidArgument("compose_step: feature dimension mismatch");

    ComposeStepResult out;
    const std::uint64_t step_seed = detail::mix_seed(state.seed, state.step);
    const std::size_t union_size = state.labeled.size() + batch.size();
    const int k = std::min<int>(state.k, static_cast<int>(union_size));
    out.predictions = cluster_and_label(state.labeled, batch.points, k, step_seed);

    // D^t: FAST COMPOSE keeps only the newly labeled batch; the CSE variants
    // also carry L^t forward.
    LabeledSet combined;
    if (state.cse.method != CseMethod::identity) combined = state.labeled;
    combined.points.insert(combined.points.end(), batch.points.begin(), batch.points.end());
    combined.labels.insert(combined.labels.end(), out.predictions.begin(), out.predictions.end());

    out.next = state;
    out.next.step = state.step + 1;
    out.next.labeled = LabeledSet{};
    const LabelSet before = detail::distinct_labels(state.labeled.labels);
    for (Label c : state.classes) {
        PointSet members;
        for (std::size_t i = 0; i < combined.size(); ++i)
            if (combined.labels[i] == c) members.push_back(combined.points[i]);
        if (members.empty()) {
            if (std::binary_search(before.begin(), before.end(), c)) ++out.next.class_loss_events;
            continue;
        }
        CseParams cse = state.cse;
        cse.gmm_components = std::min<int>(cse.gmm_components, static_cast<int>(members.size()));
        const auto cs = extract_core_supports(members, c, cse, detail::mix_seed(step_seed, static_cast<std::uint64_t>(c) + 1000));
        out.next.labeled.points.insert(out.next.labeled.points.end(), cs.instances.begin(), cs.instances.end());
        out.next.labeled.labels.insert(out.next.labeled.labels.end(), cs.instances.size(), c);
    }
    return out;
}

}  // namespace evl
