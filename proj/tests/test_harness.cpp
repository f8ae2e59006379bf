#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <thread>

using namespace evl;
using testing_support::translating;

namespace {

RunResult fake(const std::string& algo, const std::string& ds, double acc, double secs = 1.0) {
    RunResult r;
    r.algorithm = algo;
    r.dataset = ds;
    r.per_batch_accuracy = {acc};
    r.average_accuracy = acc;
    r.wall_seconds = secs;
    return r;
}

AlgorithmConfig config_for(Algorithm a) {
    AlgorithmConfig c;
    c.algorithm = a;
    c.seed = 3;
    return c;
}

}  // namespace

TEST(Algorithms, IdsRoundTrip) {
    for (const auto& info : kAlgorithms) {
        EXPECT_EQ(algorithm_from_string(info.id), info.algorithm);
        EXPECT_EQ(to_string(info.algorithm), info.id);
        EXPECT_EQ(display_name(info.id), info.display);
    }
    EXPECT_THROW(algorithm_from_string("svm"), InvalidArgument);
}

TEST(Algorithms, ResolveFillsStreamDefaults) {
    StreamSpec s = translating(0.0, 0.1, 1, 4, 40);
    s.family = Family::multimodal_gaussians;
    s.modes_per_class = 2;
    const AlgorithmConfig r = resolve(AlgorithmConfig{}, generate_stream(s));
    EXPECT_EQ(r.k, 4);
    EXPECT_EQ(r.gmm_components, 2);
    EXPECT_EQ(r.pool_size, 40u);
    AlgorithmConfig explicit_k;
    explicit_k.k = 7;
    EXPECT_EQ(resolve(explicit_k, generate_stream(s)).k, 7);
}

TEST(RunStream, StationarySeparableIsNearPerfectForEveryAlgorithm) {
    const Dataset data = dataset_from_spec(translating(0.0, 0.05, 4, 20, 100));
    for (const auto& info : kAlgorithms) {
        const RunResult r = run_stream(config_for(info.algorithm), data);
        EXPECT_GE(r.average_accuracy, 0.99) << info.id;
        EXPECT_EQ(r.per_batch_accuracy.size(), 20u);
        EXPECT_NEAR(r.average_accuracy, mean_of(r.per_batch_accuracy), 1e-12);
        EXPECT_GE(r.wall_seconds, 0.0);
        EXPECT_EQ(r.algorithm, info.id);
        EXPECT_EQ(r.dataset, data.id);
        EXPECT_EQ(r.dataset_fingerprint, data.fingerprint);
        EXPECT_EQ(r.predictions.size(), 20u);
        for (double a : r.per_batch_accuracy) {
            EXPECT_GE(a, 0.0);
            EXPECT_LE(a, 1.0);
        }
    }
}

TEST(RunStream, DeterministicApartFromTiming) {
    const Dataset data = dataset_from_spec(translating(0.01, 0.3, 5, 15, 80));
    for (const auto& info : kAlgorithms) {
        RunResult a = run_stream(config_for(info.algorithm), data);
        RunResult b = run_stream(config_for(info.algorithm), data);
        a.wall_seconds = b.wall_seconds = 0.0;
        EXPECT_EQ(nlohmann::json(a), nlohmann::json(b)) << info.id;
    }
}

TEST(RunStream, HiddenLabelsNeverReachLearners) {
    const Dataset data = dataset_from_spec(translating(0.005, 0.3, 6, 12, 90));
    for (const auto& info : kAlgorithms)
        EXPECT_TRUE(hidden_labels_isolated(config_for(info.algorithm), data)) << info.id;
}

TEST(RunStream, AlphaShapeRequiresTwoDimensions) {
    StreamSpec s = translating(0.0, 0.1, 1, 3, 30);
    s.dimension = 3;
    EXPECT_THROW(run_stream(config_for(Algorithm::compose_alpha), dataset_from_spec(s)), InvalidArgument);
    EXPECT_NO_THROW(run_stream(config_for(Algorithm::compose_gmm), dataset_from_spec(s)));
}

TEST(RunStream, InitErrorsPropagate) {
    AlgorithmConfig c = config_for(Algorithm::scargc);
    c.k = 1;
    EXPECT_THROW(run_stream(c, dataset_from_spec(translating(0.0, 0.1, 1, 3, 30))), InvalidArgument);
}

TEST(RunStream, ConcurrentCallersMatchSequentialResults) {
    const Dataset data = dataset_from_spec(translating(0.01, 0.2, 7, 10, 60));
    std::vector<RunResult> threaded(kAlgorithms.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < kAlgorithms.size(); ++i)
        pool.emplace_back([&, i] { threaded[i] = run_stream(config_for(kAlgorithms[i].algorithm), data); });
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < kAlgorithms.size(); ++i)
        EXPECT_EQ(threaded[i].predictions, run_stream(config_for(kAlgorithms[i].algorithm), data).predictions);
}

TEST(AverageRank, StrictOrder) {
    const RankTable t = average_rank({fake("A", "d", 0.9), fake("B", "d", 0.8), fake("C", "d", 0.7)});
    EXPECT_EQ(t.rank.at("d").at("A"), 1.0);
    EXPECT_EQ(t.rank.at("d").at("B"), 2.0);
    EXPECT_EQ(t.rank.at("d").at("C"), 3.0);
    EXPECT_EQ(t.algorithms, (std::vector<std::string>{"A", "B", "C"}));
}

TEST(AverageRank, TiesShareMeanPosition) {
    const RankTable t = average_rank({fake("A", "d", 0.9), fake("B", "d", 0.9), fake("C", "d", 0.5)});
    EXPECT_EQ(t.rank.at("d").at("A"), 1.5);
    EXPECT_EQ(t.rank.at("d").at("B"), 1.5);
    EXPECT_EQ(t.rank.at("d").at("C"), 3.0);
    const RankTable mid = average_rank(
        {fake("A", "d", 0.9), fake("B", "d", 0.7), fake("C", "d", 0.7), fake("D", "d", 0.7), fake("E", "d", 0.1)});
    EXPECT_EQ(mid.rank.at("d").at("C"), 3.0);
    EXPECT_EQ(mid.rank.at("d").at("E"), 5.0);
}

TEST(AverageRank, SingleCell) {
    const RankTable t = average_rank({fake("A", "d", 0.3)});
    EXPECT_EQ(t.rank.at("d").at("A"), 1.0);
    EXPECT_EQ(t.average_rank.at("A"), 1.0);
}

TEST(AverageRank, RuntimeRanksAscending) {
    const RankTable t =
        average_rank({fake("A", "d", 0.9, 5.0), fake("B", "d", 0.8, 1.0), fake("C", "d", 0.7, 3.0)}, RankMetric::runtime);
    EXPECT_EQ(t.rank.at("d").at("B"), 1.0);
    EXPECT_EQ(t.rank.at("d").at("C"), 2.0);
    EXPECT_EQ(t.rank.at("d").at("A"), 3.0);
}

TEST(AverageRank, AveragesAcrossDatasets) {
    const RankTable t = average_rank({fake("A", "d1", 0.9), fake("B", "d1", 0.8), fake("A", "d2", 0.1),
                                      fake("B", "d2", 0.8), fake("A", "d3", 0.5), fake("B", "d3", 0.5)});
    EXPECT_DOUBLE_EQ(t.average_rank.at("A"), (1.0 + 2.0 + 1.5) / 3.0);
    EXPECT_DOUBLE_EQ(t.average_rank.at("B"), (2.0 + 1.0 + 1.5) / 3.0);
}

TEST(AverageRank, PropertyRanksArePermutationWithTies) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t A = 1 + detail::uniform_index(rng, 7);
        std::vector<RunResult> rs;
        for (std::size_t a = 0; a < A; ++a)
            rs.push_back(fake("a" + std::to_string(a), "d", static_cast<double>(detail::uniform_index(rng, 4)) / 4.0));
        const RankTable t = average_rank(rs);
        double sum = 0.0;
        for (const auto& r : rs) {
            sum += t.rank.at("d").at(r.algorithm);
            // Oracle: 1 + (#strictly better) + (#tied others)/2.
            double better = 0, tied = 0;
            for (const auto& o : rs) {
                if (o.average_accuracy > r.average_accuracy) ++better;
                if (o.average_accuracy == r.average_accuracy && &o != &r) ++tied;
            }
            EXPECT_DOUBLE_EQ(t.rank.at("d").at(r.algorithm), 1.0 + better + tied / 2.0);
        }
        EXPECT_DOUBLE_EQ(sum, static_cast<double>(A * (A + 1)) / 2.0);
    }
}

TEST(AverageRank, IdenticalScoresGiveEqualRanks) {
    std::vector<RunResult> rs;
    for (const char* ds : {"x", "y"})
        for (const char* a : {"A", "B", "C", "D"}) rs.push_back(fake(a, ds, 0.75));
    const RankTable t = average_rank(rs);
    for (const char* a : {"A", "B", "C", "D"}) EXPECT_EQ(t.average_rank.at(a), 2.5);
}

TEST(AverageRank, MissingCellIsAnError) {
    EXPECT_THROW(average_rank({fake("A", "d1", 0.9), fake("B", "d1", 0.8), fake("A", "d2", 0.5)}), InvalidArgument);
    EXPECT_THROW(average_rank({}), InvalidArgument);
}

TEST(Sweep, OneRunPerValueWithEverythingElseFixed) {
    const Dataset data = dataset_from_spec(translating(0.005, 0.2, 8, 10, 60));
    const auto rs = sensitivity_sweep(config_for(Algorithm::scargc), data, "k", {2, 3, 4});
    ASSERT_EQ(rs.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NE(rs[i].fingerprint.find("k=" + std::to_string(i + 2)), std::string::npos) << rs[i].fingerprint;
        EXPECT_EQ(rs[i].seed, 3u);
    }
    const auto sig = sensitivity_sweep(config_for(Algorithm::level_iw), data, "sigma", {0.5, 1.0});
    EXPECT_NE(sig[0].fingerprint.find("sigma=0.5"), std::string::npos);
    const auto r = sensitivity_sweep(config_for(Algorithm::mclassification), data, "r", {0.1});
    EXPECT_EQ(r.front().average_accuracy, run_stream(config_for(Algorithm::mclassification), data).average_accuracy);
}

TEST(Sweep, RejectsParametersTheAlgorithmLacks) {
    const Dataset data = dataset_from_spec(translating(0.0, 0.2, 8, 3, 30));
    EXPECT_THROW(sensitivity_sweep(config_for(Algorithm::level_iw), data, "k", {2}), InvalidArgument);
    EXPECT_THROW(sensitivity_sweep(config_for(Algorithm::scargc), data, "r", {0.1}), InvalidArgument);
    EXPECT_THROW(sensitivity_sweep(config_for(Algorithm::fast_compose), data, "sigma", {1}), InvalidArgument);
    EXPECT_THROW(sensitivity_sweep(config_for(Algorithm::fast_compose), data, "cp", {0.5}), InvalidArgument);
    EXPECT_THROW(sensitivity_sweep(config_for(Algorithm::fast_compose), data, "k", {2.5}), InvalidArgument);
    EXPECT_THROW(sensitivity_sweep(config_for(Algorithm::fast_compose), data, "k", {}), InvalidArgument);
}

TEST(Datasets, CsvFingerprintTracksBytes) {
    const std::string dir = testing_support::scratch_dir("harness");
    std::ofstream(dir + "/a.csv") << "0,0,0\n1,1,1\n2,2,0\n";
    std::ofstream(dir + "/b.csv") << "0,0,0\n1,1,1\n2,2,1\n";
    const Dataset a = dataset_from_csv(dir + "/a.csv", 2, 1);
    const Dataset b = dataset_from_csv(dir + "/b.csv", 2, 1);
    EXPECT_EQ(a.fingerprint.rfind("fnv1a64:", 0), 0u);
    EXPECT_NE(a.fingerprint, b.fingerprint);
    EXPECT_EQ(a.fingerprint, dataset_from_csv(dir + "/a.csv", 2, 1).fingerprint);
    EXPECT_EQ(detail::fnv1a64_hex(""), "cbf29ce484222325");
    EXPECT_EQ(detail::fnv1a64_hex("a"), "af63dc4c8601ec8c");
    EXPECT_THROW(dataset_from_csv(dir + "/missing.csv", 1, 1), DataError);
}
