#pragma once

// Prequential benchmark runs, rank aggregation and parameter sweeps.

#include "evl/learner.hpp"
#include "evl/stream.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <vector>

namespace evl {

/// A stream together with where it came from.
struct Dataset {
    std::string id;
    std::string fingerprint;  ///< StreamSpec JSON, or "fnv1a64:<hex>" of a CSV file
    DriftStream stream;
};

namespace detail {

inline std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace detail

inline Dataset dataset_from_spec(const StreamSpec& spec) {
    Dataset d;
    d.stream = generate_stream(spec);
    d.id = d.stream.id();
    d.fingerprint = nlohmann::json(spec).dump();
    return d;
}

inline Dataset dataset_from_csv(const std::string& path, long labeled_prefix, long batch_size, bool header = false) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Dataset d;
    d.stream = load_csv_stream(path, labeled_prefix, batch_size, header);
    d.id = d.stream.id();
    d.fingerprint = "fnv1a64:" + detail::fnv1a64_hex(bytes);
    return d;
}

struct RunResult {
    std::string algorithm;
    std::string fingerprint;
    std::string dataset;
    std::string dataset_fingerprint;
    std::vector<double> per_batch_accuracy;
    double average_accuracy = 0.0;
    double wall_seconds = 0.0;
    std::size_t class_loss_events = 0;
    std::uint64_t seed = 0;
    std::vector<LabelSet> predictions;  ///< per batch; not part of the CSV record
};

inline void to_json(nlohmann::json& j, const RunResult& r) {
    j = nlohmann::json{{"algorithm", r.algorithm},
                       {"fingerprint", r.fingerprint},
                       {"dataset", r.dataset},
                       {"dataset_fingerprint", r.dataset_fingerprint},
                       {"per_batch_accuracy", r.per_batch_accuracy},
                       {"average_accuracy", r.average_accuracy},
                       {"wall_seconds", r.wall_seconds},
                       {"class_loss_events", r.class_loss_events},
                       {"seed", r.seed},
                       {"predictions", r.predictions}};
}

inline void from_json(const nlohmann::json& j, RunResult& r) {
    j.at("algorithm").get_to(r.algorithm);
    j.at("fingerprint").get_to(r.fingerprint);
    j.at("dataset").get_to(r.dataset);
    j.at("dataset_fingerprint").get_to(r.dataset_fingerprint);
    j.at("per_batch_accuracy").get_to(r.per_batch_accuracy);
    j.at("average_accuracy").get_to(r.average_accuracy);
    j.at("wall_seconds").get_to(r.wall_seconds);
    j.at("class_loss_events").get_to(r.class_loss_events);
    j.at("seed").get_to(r.seed);
    if (j.contains("predictions")) j.at("predictions").get_to(r.predictions);
}

inline double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

namespace detail {

// Timed sections never overlap, even if callers run pairs on several threads.
inline std::mutex& timing_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace detail

/// Prequential run: the learner is initialized from the labeled batch, then sees
/// each unlabeled batch in order; batch t is scored after its predictions exist.
/// Only learner calls are timed.
inline RunResult run_stream(const AlgorithmConfig& config, const Dataset& data) {
    const DriftStream stream = config.normalize ? minmax_normalized(data.stream) : data.stream;
    if (config.algorithm == Algorithm::compose_alpha && stream.dimension() != 2)
        throw InvalidArgument("compose-alpha needs 2-D features, dataset '" + data.id + "' has " +
                              std::to_string(stream.dimension()));
    const AlgorithmConfig resolved = resolve(config, stream);

    RunResult result;
    result.algorithm = to_string(config.algorithm);
    result.fingerprint = fingerprint(resolved);
    result.dataset = data.id;
    result.dataset_fingerprint = data.fingerprint;
    result.seed = config.seed;

    std::lock_guard<std::mutex> lock(detail::timing_mutex());
    auto learner = make_learner(resolved, stream.classes());
    using clock = std::chrono::steady_clock;
    clock::duration busy{};
    auto t0 = clock::now();
    learner->initialize(stream.initial_labeled());
    busy += clock::now() - t0;
    for (std::size_t t = 0; t < stream.batch_count(); ++t) {
        const UnlabeledBatch& batch = stream.next_batch(t);
        t0 = clock::now();
        LabelSet predicted = learner->process(batch);
        busy += clock::now() - t0;
        if (predicted.size() != batch.size())
            throw Error("learner returned " + std::to_string(predicted.size()) + " predictions for a batch of " +
                        std::to_string(batch.size()));
        const LabelSet& truth = stream.hidden_labels(t);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] == truth[i];
        result.per_batch_accuracy.push_back(truth.empty() ? 0.0
                                                          : static_cast<double>(correct) /
                                                                static_cast<double>(truth.size()));
        result.predictions.push_back(std::move(predicted));
    }
    result.average_accuracy = mean_of(result.per_batch_accuracy);
    result.wall_seconds = std::chrono::duration<double>(busy).count();
    result.class_loss_events = learner->class_loss_events();
    return result;
}

inline RunResult run_stream(const AlgorithmConfig& config, const DriftStream& stream) {
    return run_stream(config, Dataset{stream.id(), stream.id(), stream});
}

/// Re-run with every hidden label replaced by a value no class uses; true when
/// every prediction is unchanged, i.e. the learner never consulted hidden labels.
inline bool hidden_labels_isolated(const AlgorithmConfig& config, const Dataset& data) {
    const RunResult clean = run_stream(config, data);
    Dataset poisoned = data;
    poisoned.stream = data.stream.with_relabeled_hidden([](Label y) { return -1000003 - y; });
    const RunResult dirty = run_stream(config, poisoned);
    return clean.predictions == dirty.predictions;
}

struct RankTable {
    std::vector<std::string> algorithms;  ///< column order
    std::vector<std::string> datasets;    ///< row order
    std::map<std::string, std::map<std::string, double>> score;  ///< dataset -> algorithm -> value
    std::map<std::string, std::map<std::string, double>> rank;   ///< dataset -> algorithm -> rank
    std::map<std::string, double> average_rank;
};

/// Rank each dataset's row (1 = best), ties get the mean of their positions,
/// then average per algorithm. Every (dataset, algorithm) cell must be present.
inline RankTable rank_scores(const std::vector<std::string>& datasets, const std::vector<std::string>& algorithms,
                             const std::map<std::string, std::map<std::string, double>>& score,
                             bool higher_is_better) {
    if (datasets.empty() || algorithms.empty()) throw InvalidArgument("average_rank: nothing to rank");
    RankTable table;
    table.algorithms = algorithms;
    table.datasets = datasets;
    for (const auto& ds : datasets) {
        const auto row = score.find(ds);
        std::vector<std::pair<double, std::string>> cells;
        for (const auto& a : algorithms) {
            if (row == score.end() || !row->second.count(a))
                throw InvalidArgument("average_rank: missing result for " + a + " on " + ds);
            cells.emplace_back(row->second.at(a), a);
        }
        std::stable_sort(cells.begin(), cells.end(), [&](const auto& l, const auto& r) {
            return higher_is_better ? l.first > r.first : l.first < r.first;
        });
        for (std::size_t i = 0; i < cells.size();) {
            std::size_t j = i;
            while (j + 1 < cells.size() && cells[j + 1].first == cells[i].first) ++j;
            const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
            for (std::size_t m = i; m <= j; ++m) table.rank[ds][cells[m].second] = mean_rank;
            i = j + 1;
        }
        table.score[ds] = row->second;
    }
    for (const auto& a : algorithms) {
        double sum = 0.0;
        for (const auto& ds : datasets) sum += table.rank[ds][a];
        table.average_rank[a] = sum / static_cast<double>(datasets.size());
    }
    return table;
}

enum class RankMetric { accuracy, runtime };

/// Rank tables over run results; accuracy ranks descending, runtime ascending.
/// Algorithms and datasets keep first-appearance order.
inline RankTable average_rank(const std::vector<RunResult>& results, RankMetric metric = RankMetric::accuracy) {
    std::vector<std::string> datasets, algorithms;
    std::map<std::string, std::map<std::string, double>> score;
    for (const auto& r : results) {
        if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) datasets.push_back(r.dataset);
        if (std::find(algorithms.begin(), algorithms.end(), r.algorithm) == algorithms.end())
            algorithms.push_back(r.algorithm);
        score[r.dataset][r.algorithm] = metric == RankMetric::accuracy ? r.average_accuracy : r.wall_seconds;
    }
    return rank_scores(datasets, algorithms, score, metric == RankMetric::accuracy);
}

/// Parameters a sweep may vary, and which algorithms accept them.
inline AlgorithmConfig with_parameter(AlgorithmConfig c, const std::string& name, double value) {
    if (name == "k") {
        if (!uses_clusters(c.algorithm))
            throw InvalidArgument("parameter 'k' does not apply to " + to_string(c.algorithm));
        if (value < 1 || value != static_cast<double>(static_cast<int>(value)))
            throw InvalidArgument("k must be a positive integer");
        c.k = static_cast<int>(value);
    } else if (name == "r") {
        if (c.algorithm != Algorithm::mclassification)
            throw InvalidArgument("parameter 'r' does not apply to " + to_string(c.algorithm));
        if (!(value > 0.0)) throw InvalidArgument("r must be positive");
        c.r = value;
    } else if (name == "sigma") {
        if (c.algorithm != Algorithm::level_iw)
            throw InvalidArgument("parameter 'sigma' does not apply to " + to_string(c.algorithm));
        if (!(value > 0.0)) throw InvalidArgument("sigma must be positive");
        c.sigma = value;
    } else {
        throw InvalidArgument("unknown sweep parameter '" + name + "' (expected k, r or sigma)");
    }
    return c;
}

/// One run per value; everything else, seeds included, held fixed.
inline std::vector<RunResult> sensitivity_sweep(const AlgorithmConfig& config, const Dataset& data,
                                                const std::string& parameter, const std::vector<double>& values) {
    if (values.empty()) throw InvalidArgument("sensitivity_sweep: no values given");
    std::vector<AlgorithmConfig> configs;
    for (double v : values) configs.push_back(with_parameter(config, parameter, v));
    std::vector<RunResult> out;
    for (const auto& c : configs) out.push_back(run_stream(c, data));
    return out;
}

}  // namespace evl
