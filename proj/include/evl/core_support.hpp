#pragma once

// Core-support extraction: which labeled instances of a class survive into the
// next time step.

#include "evl/alpha_shape.hpp"
#include "evl/gmm.hpp"
#include "evl/types.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>

namespace evl {

enum class CseMethod { alpha_shape_2d, gmm_density, identity };

inline std::string to_string(CseMethod m) {
    switch (m) {
        case CseMethod::alpha_shape_2d: return "alpha-shape-2d";
        case CseMethod::gmm_density: return "gmm-density";
        case CseMethod::identity: return "identity";
    }
    return "unknown";
}

struct CseParams {
    CseMethod method = CseMethod::identity;
    double cp = 0.35;
    std::optional<double> alpha;  ///< unset: twice the mean nearest-neighbor distance of the class
    int gmm_components = 1;

    void validate() const {
        if (method == CseMethod::identity) return;
        if (!(cp > 0.0 && cp <= 1.0)) throw InvalidArgument("cse: cp must lie in (0, 1]");
        if (method == CseMethod::alpha_shape_2d && alpha && !(*alpha > 0.0))
            throw InvalidArgument("cse: alpha must be positive");
        if (method == CseMethod::gmm_density && gmm_components < 1)
            throw InvalidArgument("cse: gmm_components must be positive");
    }
};

struct CoreSupports {
    PointSet instances;
    Label label = 0;
};

/// Indices (ascending) of the instances retained as core supports.
inline std::vector<std::size_t> core_support_indices(const PointSet& class_points, const CseParams& params,
                                                     std::uint64_t seed) {
    if (class_points.empty()) throw InvalidArgument("extract_core_supports: empty class");
    params.validate();
    const std::size_t n = class_points.size();
    switch (params.method) {
        case CseMethod::identity: {
            std::vector<std::size_t> all(n);
            std::iota(all.begin(), all.end(), std::size_t{0});
            return all;
        }
        case CseMethod::gmm_density: {
            if (static_cast<std::size_t>(params.gmm_components) > n)
                throw InvalidArgument("extract_core_supports: K=" + std::to_string(params.gmm_components) +
                                      " exceeds class size " + std::to_string(n));
            const GmmModel model = gmm_fit_traced(class_points, params.gmm_components, GmmOptions{}, seed).model;
            const GmmScorer scorer(model);
            std::vector<double> density(n);
            for (std::size_t i = 0; i < n; ++i) density[i] = scorer.logpdf(class_points[i]);
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return density[a] > density[b]; });
            order.resize(compaction_target(params.cp, n));
            std::sort(order.begin(), order.end());
            return order;
        }
        case CseMethod::alpha_shape_2d: {
            if (class_points.front().size() != 2)
                throw InvalidArgument("extract_core_supports: alpha-shape-2d needs 2-D data, got d=" +
                                      std::to_string(class_points.front().size()));
            const double alpha = params.alpha ? *params.alpha : default_alpha(class_points);
            return peel_compaction_indices(class_points, alpha, params.cp);
        }
    }
    return {};
}

inline CoreSupports extract_core_supports(const PointSet& class_points, Label label, const CseParams& params,
                                          std::uint64_t seed) {
    CoreSupports cs;
    cs.label = label;
    for (std::size_t i : core_support_indices(class_points, params, seed)) cs.instances.push_back(class_points[i]);
    return cs;
}

}  // namespace evl
