#pragma once

// Command-line front end: generate, run, bench, sweep, report.
// Exit status: 0 success, 1 usage error, 2 data error.

#include "evl/harness.hpp"
#include "evl/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace evl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace detail {

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline StreamSpec read_spec_file(const std::string& path) {
    const nlohmann::json j = read_json_file(path);
    try {
        StreamSpec spec = j.get<StreamSpec>();
        spec.validate();
        return spec;
    } catch (const DataError& e) {
        throw DataError("'" + path + "': " + e.what());
    } catch (const InvalidArgument& e) {
        throw DataError("'" + path + "': " + e.what());
    } catch (const nlohmann::json::exception& e) {
        throw DataError("'" + path + "': " + e.what());
    }
}

inline std::string default_output_dir() {
    if (const char* env = std::getenv("EVL_OUTPUT_DIR"); env && *env) return env;
    return "evl-report";
}

struct DataOptions {
    std::vector<std::string> specs;
    std::vector<std::string> files;
    long prefix = 0;
    long batch = 0;
    bool header = false;
};

inline void add_data_options(CLI::App* cmd, DataOptions& d, bool many) {
    if (many) {
        cmd->add_option("--spec", d.specs, "StreamSpec JSON file (repeatable)");
        cmd->add_option("--data", d.files, "CSV stream file: features then label (repeatable)");
    } else {
        auto* s = cmd->add_option("--spec", d.specs, "StreamSpec JSON file")->expected(1);
        auto* f = cmd->add_option("--data", d.files, "CSV stream file: features then label")->expected(1);
        s->excludes(f);
    }
    cmd->add_option("--prefix", d.prefix, "labeled rows at the head of a CSV (default: one batch)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--batch", d.batch, "batch size for CSV streams")->check(CLI::PositiveNumber);
    cmd->add_flag("--header", d.header, "CSV files start with a header row");
}

inline std::vector<Dataset> load_datasets(const DataOptions& d) {
    if (d.specs.empty() && d.files.empty()) throw InvalidArgument("no dataset given (use --spec or --data)");
    if (!d.files.empty() && d.batch <= 0) throw InvalidArgument("--batch is required with --data");
    std::vector<Dataset> out;
    for (const auto& path : d.specs) out.push_back(dataset_from_spec(read_spec_file(path)));
    for (const auto& path : d.files) {
        std::ifstream probe(path);
        if (!probe) throw DataError("cannot open '" + path + "'");
        out.push_back(dataset_from_csv(path, d.prefix > 0 ? d.prefix : d.batch, d.batch, d.header));
    }
    return out;
}

struct AlgoOptions {
    std::optional<int> k;
    double cp = 0.35;
    std::optional<double> alpha;
    std::optional<int> gmm_k;
    std::optional<std::size_t> pool;
    double r = 0.1;
    double sigma = 1.0;
    double lambda = 0.1;
    int basis = 100;
    bool normalize = false;
    std::uint64_t seed = 0;
};

inline void add_algo_options(CLI::App* cmd, AlgoOptions& a) {
    cmd->add_option("--k", a.k, "clusters for COMPOSE variants and SCARGC (default: classes x modes)");
    cmd->add_option("--cp", a.cp, "compaction percentage for COMPOSE core supports");
    cmd->add_option("--alpha", a.alpha, "alpha-shape radius (default: automatic)");
    cmd->add_option("--gmm-k", a.gmm_k, "GMM components per class (default: modes per class)");
    cmd->add_option("--pool", a.pool, "SCARGC pool size (default: batch size)");
    cmd->add_option("--r", a.r, "MClassification radius threshold");
    cmd->add_option("--sigma", a.sigma, "LEVEL_IW kernel width");
    cmd->add_option("--lambda", a.lambda, "LEVEL_IW ridge regularizer");
    cmd->add_option("--basis", a.basis, "LEVEL_IW kernel basis count");
    cmd->add_flag("--normalize", a.normalize, "min-max scale features before running");
    cmd->add_option("--seed", a.seed, "algorithm seed");
}

inline AlgorithmConfig make_config(Algorithm algo, const AlgoOptions& a) {
    AlgorithmConfig c;
    c.algorithm = algo;
    c.k = a.k;
    c.cp = a.cp;
    c.alpha = a.alpha;
    c.gmm_components = a.gmm_k;
    c.pool_size = a.pool;
    c.r = a.r;
    c.sigma = a.sigma;
    c.lambda = a.lambda;
    c.basis_count = a.basis;
    c.normalize = a.normalize;
    c.seed = a.seed;
    if (c.k && *c.k < 1) throw InvalidArgument("--k must be at least 1");
    if (!(c.cp > 0.0 && c.cp <= 1.0)) throw InvalidArgument("--cp must be in (0, 1]");
    if (c.alpha && !(*c.alpha > 0.0)) throw InvalidArgument("--alpha must be positive");
    if (c.gmm_components && *c.gmm_components < 1) throw InvalidArgument("--gmm-k must be at least 1");
    if (c.pool_size && *c.pool_size < 1) throw InvalidArgument("--pool must be at least 1");
    if (!(c.r > 0.0)) throw InvalidArgument("--r must be positive");
    if (!(c.sigma > 0.0)) throw InvalidArgument("--sigma must be positive");
    if (!(c.lambda >= 0.0)) throw InvalidArgument("--lambda must be non-negative");
    if (c.basis_count < 1) throw InvalidArgument("--basis must be at least 1");
    return c;
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) throw DataError("cannot write '" + path + "'");
}

}  // namespace detail

inline int cli_dispatch(int argc, const char* const* argv, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
    CLI::App app{"Learning from initially labeled nonstationary streams: generators, learners, benchmarks"};
    app.require_subcommand(1);
    app.name("evl");

    // generate
    std::string gen_spec, gen_out;
    bool gen_header = false;
    auto* gen = app.add_subcommand("generate", "write a CSV stream from a StreamSpec JSON file");
    gen->add_option("--spec", gen_spec, "StreamSpec JSON file")->required();
    gen->add_option("--out", gen_out, "output CSV (default: standard output)");
    gen->add_flag("--header", gen_header, "emit a header row");

    // run
    std::string run_algo, run_out;
    detail::DataOptions run_data;
    detail::AlgoOptions run_opts;
    auto* run = app.add_subcommand("run", "run one algorithm on one stream");
    run->add_option("--algo", run_algo, "algorithm id")->required();
    detail::add_data_options(run, run_data, false);
    detail::add_algo_options(run, run_opts);
    run->add_option("--out", run_out, "RunResult JSON (default: standard output)");

    // bench
    std::vector<std::string> bench_algos;
    detail::DataOptions bench_data;
    detail::AlgoOptions bench_opts;
    std::string bench_dir;
    auto* bench = app.add_subcommand("bench", "run algorithms x datasets and render rank tables");
    bench->add_option("--algos", bench_algos, "comma-separated algorithm ids (default: all)")->delimiter(',');
    detail::add_data_options(bench, bench_data, true);
    detail::add_algo_options(bench, bench_opts);
    bench->add_option("--out-dir", bench_dir, "report directory (default: $EVL_OUTPUT_DIR or evl-report)");

    // sweep
    std::string sweep_algo, sweep_param, sweep_dir;
    std::vector<double> sweep_values;
    detail::DataOptions sweep_data;
    detail::AlgoOptions sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "vary one parameter of one algorithm");
    sweep->add_option("--algo", sweep_algo, "algorithm id")->required();
    sweep->add_option("--param", sweep_param, "k, r or sigma")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required()->delimiter(',');
    detail::add_data_options(sweep, sweep_data, false);
    detail::add_algo_options(sweep, sweep_opts);
    sweep->add_option("--out-dir", sweep_dir, "report directory (default: $EVL_OUTPUT_DIR or evl-report)");

    // report
    std::string report_in, report_dir;
    auto* report = app.add_subcommand("report", "render a bundle JSON to CSV, Markdown and SVG");
    report->add_option("--in", report_in, "bundle JSON written by bench or sweep")->required();
    report->add_option("--out-dir", report_dir, "report directory (default: $EVL_OUTPUT_DIR or evl-report)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (gen->parsed()) {
            const DriftStream stream = generate_stream(detail::read_spec_file(gen_spec));
            std::ostringstream csv;
            if (gen_header) {
                for (int j = 1; j <= stream.dimension(); ++j) csv << 'x' << j << ',';
                csv << "label\n";
            }
            write_csv_stream(stream, csv);
            detail::write_text(gen_out, csv.str(), out);
        } else if (run->parsed()) {
            const AlgorithmConfig config = detail::make_config(algorithm_from_string(run_algo), run_opts);
            const auto datasets = detail::load_datasets(run_data);
            const RunResult r = run_stream(config, datasets.front());
            detail::write_text(run_out, nlohmann::json(r).dump(2) + "\n", out);
        } else if (bench->parsed()) {
            std::vector<Algorithm> algos;
            if (bench_algos.empty())
                for (const auto& info : kAlgorithms) algos.push_back(info.algorithm);
            for (const auto& id : bench_algos) algos.push_back(algorithm_from_string(id));
            std::vector<AlgorithmConfig> configs;
            for (Algorithm a : algos) configs.push_back(detail::make_config(a, bench_opts));
            const auto datasets = detail::load_datasets(bench_data);
            ReportBundle bundle;
            bundle.output_dir = bench_dir.empty() ? detail::default_output_dir() : bench_dir;
            for (const auto& ds : datasets)
                for (const auto& c : configs) bundle.results.push_back(run_stream(c, ds));
            render_report(bundle);
            detail::write_text((std::filesystem::path(bundle.output_dir) / "bundle.json").string(),
                               nlohmann::json(bundle).dump(2) + "\n", out);
            out << rank_table_markdown(average_rank(bundle.results, RankMetric::accuracy),
                                       "Average classification accuracy (%)", true)
                << '\n'
                << rank_table_markdown(average_rank(bundle.results, RankMetric::runtime),
                                       "Average execution time (in seconds)", false);
        } else if (sweep->parsed()) {
            const AlgorithmConfig config = detail::make_config(algorithm_from_string(sweep_algo), sweep_opts);
            for (double v : sweep_values) (void)with_parameter(config, sweep_param, v);
            const auto datasets = detail::load_datasets(sweep_data);
            SweepTable table;
            table.algorithm = to_string(config.algorithm);
            table.dataset = datasets.front().id;
            table.parameter = sweep_param;
            table.values = sweep_values;
            table.results = sensitivity_sweep(config, datasets.front(), sweep_param, sweep_values);
            ReportBundle bundle;
            bundle.output_dir = sweep_dir.empty() ? detail::default_output_dir() : sweep_dir;
            bundle.sweeps.push_back(table);
            render_report(bundle);
            detail::write_text((std::filesystem::path(bundle.output_dir) / "bundle.json").string(),
                               nlohmann::json(bundle).dump(2) + "\n", out);
            out << sweep_markdown(table);
        } else if (report->parsed()) {
            ReportBundle bundle;
            try {
                bundle = detail::read_json_file(report_in).get<ReportBundle>();
            } catch (const nlohmann::json::exception& e) {
                throw DataError("'" + report_in + "': " + e.what());
            }
            bundle.output_dir = report_dir.empty() ? detail::default_output_dir() : report_dir;
            for (const auto& path : render_report(bundle)) out << path << '\n';
        }
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

inline int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    for (const auto& a : args) argv.push_back(a.c_str());
    argv.push_back(nullptr);
    return cli_dispatch(static_cast<int>(args.size()), argv.data(), out, err);
}

}  // namespace evl
