#pragma once

// Uniform EVL learner interface over the algorithm states. A learner is given
// labels exactly once (initialize) and afterwards only feature batches.

#include "evl/compose.hpp"
#include "evl/level_iw.hpp"
#include "evl/microcluster.hpp"
#include "evl/scargc.hpp"
#include "evl/stream.hpp"

#include <array>
#include <charconv>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace evl {

enum class Algorithm { compose_alpha, compose_gmm, fast_compose, scargc, mclassification, level_iw };

struct AlgorithmInfo {
    Algorithm algorithm;
    std::string_view id;
    std::string_view display;
};

inline constexpr std::array<AlgorithmInfo, 6> kAlgorithms{{
    {Algorithm::compose_alpha, "compose-alpha", "COMPOSE (α-shape)"},
    {Algorithm::compose_gmm, "compose-gmm", "COMPOSE (GMM)"},
    {Algorithm::fast_compose, "fast-compose", "FAST COMPOSE"},
    {Algorithm::scargc, "scargc", "SCARGC (1-NN)"},
    {Algorithm::mclassification, "mclassification", "MClassification"},
    {Algorithm::level_iw, "level-iw", "LEVEL_IW"},
}};

inline std::string to_string(Algorithm a) {
    for (const auto& info : kAlgorithms)
        if (info.algorithm == a) return std::string(info.id);
    return "unknown";
}

inline Algorithm algorithm_from_string(std::string_view id) {
    for (const auto& info : kAlgorithms)
        if (info.id == id) return info.algorithm;
    throw InvalidArgument("unknown algorithm '" + std::string(id) + "'");
}

inline std::string display_name(std::string_view id) {
    for (const auto& info : kAlgorithms)
        if (info.id == id) return std::string(info.display);
    return std::string(id);
}

/// Algorithm choice plus every tunable. Unset optionals resolve against the
/// stream: k = classes x modes, GMM components = modes, pool = batch size,
/// alpha = twice the per-class mean nearest-neighbor distance.
struct AlgorithmConfig {
    Algorithm algorithm = Algorithm::fast_compose;
    std::optional<int> k;
    double cp = 0.35;
    std::optional<double> alpha;
    std::optional<int> gmm_components;
    std::optional<std::size_t> pool_size;
    double r = 0.1;
    double sigma = 1.0;
    double lambda = 0.1;
    int basis_count = 100;
    bool normalize = false;
    std::uint64_t seed = 0;
};

inline bool uses_clusters(Algorithm a) {
    return a == Algorithm::compose_alpha || a == Algorithm::compose_gmm || a == Algorithm::fast_compose ||
           a == Algorithm::scargc;
}

/// Fill unset parameters from the stream the config will run on.
inline AlgorithmConfig resolve(AlgorithmConfig c, const DriftStream& stream) {
    const int classes = static_cast<int>(stream.classes().size());
    const int modes = std::max(1, stream.modes_per_class());
    if (!c.k) c.k = classes * modes;
    if (!c.gmm_components) c.gmm_components = modes;
    if (!c.pool_size) c.pool_size = stream.batch_count() ? stream.next_batch(0).size() : stream.initial_labeled().size();
    return c;
}

namespace detail {

/// Shortest decimal that round-trips to the same double.
inline std::string shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

/// Stable "key=value" description of the parameters that affect this algorithm.
inline std::string fingerprint(const AlgorithmConfig& c) {
    using detail::shortest;
    std::ostringstream os;
    os << to_string(c.algorithm);
    switch (c.algorithm) {
        case Algorithm::compose_alpha:
            os << " k=" << c.k.value_or(0) << " cp=" << shortest(c.cp) << " alpha=";
            if (c.alpha)
                os << shortest(*c.alpha);
            else
                os << "auto";
            break;
        case Algorithm::compose_gmm:
            os << " k=" << c.k.value_or(0) << " cp=" << shortest(c.cp) << " gmm_k=" << c.gmm_components.value_or(0);
            break;
        case Algorithm::fast_compose: os << " k=" << c.k.value_or(0); break;
        case Algorithm::scargc: os << " k=" << c.k.value_or(0) << " pool=" << c.pool_size.value_or(0); break;
        case Algorithm::mclassification: os << " r=" << shortest(c.r); break;
        case Algorithm::level_iw:
            os << " sigma=" << shortest(c.sigma) << " lambda=" << shortest(c.lambda) << " basis=" << c.basis_count;
            break;
    }
    os << " normalize=" << (c.normalize ? 1 : 0) << " seed=" << c.seed;
    return os.str();
}

class Learner {
  public:
    virtual ~Learner() = default;
    virtual void initialize(const LabeledSet& initial) = 0;
    virtual LabelSet process(const UnlabeledBatch& batch) = 0;
    virtual std::size_t class_loss_events() const { return 0; }
};

namespace detail {

class ComposeLearner final : public Learner {
  public:
    ComposeLearner(int k, CseParams cse, std::uint64_t seed, LabelSet classes)
        : k_(k), cse_(cse), seed_(seed), classes_(std::move(classes)) {}
    void initialize(const LabeledSet& initial) override {
        state_ = compose_init(initial, k_, cse_, seed_, classes_);
    }
    LabelSet process(const UnlabeledBatch& batch) override {
        auto r = compose_step(state_, batch);
        state_ = std::move(r.next);
        return std::move(r.predictions);
    }
    std::size_t class_loss_events() const override { return state_.class_loss_events; }

  private:
    int k_;
    CseParams cse_;
    std::uint64_t seed_;
    LabelSet classes_;
    ComposeState state_;
};

class ScargcLearner final : public Learner {
  public:
    ScargcLearner(int k, std::size_t pool, std::uint64_t seed) : k_(k), pool_(pool), seed_(seed) {}
    void initialize(const LabeledSet& initial) override { state_ = scargc_init(initial, k_, pool_, seed_); }
    LabelSet process(const UnlabeledBatch& batch) override {
        auto r = scargc_step(state_, batch);
        state_ = std::move(r.next);
        return std::move(r.predictions);
    }

  private:
    int k_;
    std::size_t pool_;
    std::uint64_t seed_;
    ScargcState state_;
};

class MClassLearner final : public Learner {
  public:
    explicit MClassLearner(double r) : r_(r) {}
    void initialize(const LabeledSet& initial) override { state_ = mclass_init(initial, r_); }
    LabelSet process(const UnlabeledBatch& batch) override { return mclass_process(state_, batch); }

  private:
    double r_;
    MCState state_;
};

class LevelIwLearner final : public Learner {
  public:
    explicit LevelIwLearner(LevelIwParams p) : params_(p) {}
    void initialize(const LabeledSet& initial) override { state_ = leveliw_init(initial, params_); }
    LabelSet process(const UnlabeledBatch& batch) override {
        auto r = leveliw_step(state_, batch);
        state_ = std::move(r.next);
        return std::move(r.predictions);
    }
    std::size_t class_loss_events() const override { return state_.class_loss_events; }

  private:
    LevelIwParams params_;
    LevelIwState state_;
};

}  // namespace detail

/// Build a learner from a resolved config (see `resolve`).
inline std::unique_ptr<Learner> make_learner(const AlgorithmConfig& c, const LabelSet& classes) {
    const int k = c.k.value_or(static_cast<int>(classes.size()));
    switch (c.algorithm) {
        case Algorithm::compose_alpha: {
            CseParams cse{CseMethod::alpha_shape_2d, c.cp, c.alpha, 1};
            return std::make_unique<detail::ComposeLearner>(k, cse, c.seed, classes);
        }
        case Algorithm::compose_gmm: {
            CseParams cse{CseMethod::gmm_density, c.cp, std::nullopt, c.gmm_components.value_or(1)};
            return std::make_unique<detail::ComposeLearner>(k, cse, c.seed, classes);
        }
        case Algorithm::fast_compose:
            return std::make_unique<detail::ComposeLearner>(k, CseParams{}, c.seed, classes);
        case Algorithm::scargc:
            return std::make_unique<detail::ScargcLearner>(k, c.pool_size.value_or(150), c.seed);
        case Algorithm::mclassification: return std::make_unique<detail::MClassLearner>(c.r);
        case Algorithm::level_iw: {
            LevelIwParams p;
            p.sigma = c.sigma;
            p.lambda = c.lambda;
            p.basis_count = c.basis_count;
            p.seed = c.seed;
            p.validate();
            return std::make_unique<detail::LevelIwLearner>(p);
        }
    }
    throw InvalidArgument("unsupported algorithm");
}

}  // namespace evl
