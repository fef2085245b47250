#include "ctxdev.hpp"
#include "ctxdev/server.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>

namespace {

httplib::Server* g_server = nullptr;

void stop_server(int) {
    if (g_server) g_server->stop();
}

int run_detect(const std::string& log_path, const std::string& config_path, const std::string& out_path, const std::string& format) {
    auto cfg = ctxdev::toolkit_config_from_json(ctxdev::load_config_file(config_path));
    auto log = ctxdev::load_log(log_path, cfg.csv);
    auto output = ctxdev::run_pipeline(log, cfg.pipeline);
    std::ofstream file;
    if (out_path != "-") {
        file.open(out_path, std::ios::binary);
        if (!file) throw ctxdev::ConfigError("cannot write '" + out_path + "'");
    }
    std::ostream& out = out_path == "-" ? std::cout : file;
    if (format == "jsonl") ctxdev::write_results_jsonl(out, output.results);
    else ctxdev::write_results_csv(out, output.results);
    return 0;
}

int run_evaluate(const std::string& grid_path, const std::string& out_dir) {
    auto t = grid_path.empty() ? ctxdev::ExperimentTemplate{} : ctxdev::experiment_from_json(ctxdev::load_config_file(grid_path));
    auto start = std::chrono::steady_clock::now();
    auto report = ctxdev::run_experiment_grid(t);
    ctxdev::write_grid_outputs(t, report, out_dir);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << report.cells.size() << " cell runs in " << seconds << " s, written to " << out_dir << '\n';
    for (const auto& s : report.summaries) {
        std::printf("%-18s accuracy %.6f -> %.6f  precision %.6f -> %.6f  n=>d_c correct %zu\n", s.scorer.c_str(),
                    s.mean_baseline.accuracy, s.mean_optimized.accuracy, s.mean_baseline.precision, s.mean_optimized.precision,
                    s.mean_optimized.confusion[1][1]);
    }
    return 0;
}

int run_generate(const std::string& out_path, const std::string& truth_path, std::size_t cases, std::uint64_t seed, double pct_deviating) {
    ctxdev::SyntheticSpec spec;
    spec.n_cases = cases;
    spec.seed = seed;
    auto data = ctxdev::generate_log(spec);
    if (pct_deviating > 0) data = ctxdev::inject_deviations(data, pct_deviating, ctxdev::detail::mix_seed(seed, 1000)).data;
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ctxdev::ConfigError("cannot write '" + out_path + "'");
    if (out_path.ends_with(".xes")) ctxdev::write_xes(out, data.log);
    else ctxdev::write_csv(out, data.log);
    if (!truth_path.empty()) {
        std::ofstream truth(truth_path, std::ios::binary);
        truth << "case,label\n";
        for (const auto& [c, label] : ctxdev::derive_trace_truth(data.log, data.truth)) truth << c << ',' << ctxdev::to_string(label) << '\n';
    }
    return 0;
}

int run_serve(ctxdev::ServerOptions options) {
    ctxdev::SessionStore store(options.data_dir);
    httplib::Server server;
    ctxdev::install_routes(server, store, options.upload_limit);
    if (options.static_dir && !server.set_mount_point("/", options.static_dir->string()))
        throw ctxdev::ConfigError("static directory '" + options.static_dir->string() + "' does not exist");
    g_server = &server;
    std::signal(SIGINT, stop_server);
    std::signal(SIGTERM, stop_server);
    std::cerr << "listening on " << options.host << ':' << options.port << ", data in " << options.data_dir.string() << '\n';
    if (!server.listen(options.host, options.port)) {
        std::cerr << "cannot listen on " << options.host << ':' << options.port << '\n';
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Context-aware deviation detection for event logs"};
    app.require_subcommand(1);

    std::string log_path, config_path, out_path = "-", format = "csv";
    auto* detect = app.add_subcommand("detect", "Score a log and revise scores with context");
    detect->add_option("log", log_path, "Event log (.csv or .xes)")->required()->check(CLI::ExistingFile);
    detect->add_option("-c,--config", config_path, "Pipeline config (TOML subset or JSON)")->required()->check(CLI::ExistingFile);
    detect->add_option("-o,--out", out_path, "Output file, - for stdout");
    detect->add_option("--format", format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

    std::string grid_path, out_dir = "results";
    auto* evaluate = app.add_subcommand("evaluate", "Run the synthetic evaluation grid");
    evaluate->add_option("--grid", grid_path, "Experiment config; defaults to the built-in grid")->check(CLI::ExistingFile);
    evaluate->add_option("--out", out_dir, "Output directory");

    std::string gen_out, truth_out;
    std::size_t cases = 2000;
    std::uint64_t seed = 1;
    double pct_deviating = 0;
    auto* generate = app.add_subcommand("generate", "Write a synthetic order-process log");
    generate->add_option("-o,--out", gen_out, "Output log (.csv or .xes)")->required();
    generate->add_option("--truth", truth_out, "Also write per-case ground-truth labels as CSV");
    generate->add_option("--cases", cases, "Number of cases")->check(CLI::PositiveNumber);
    generate->add_option("--seed", seed, "Random seed");
    generate->add_option("--deviating", pct_deviating, "Percent of events to mutate")->check(CLI::Range(0.0, 100.0));

    ctxdev::ServerOptions server_options;
    std::string addr, data_dir, static_dir;
    auto* serve = app.add_subcommand("serve", "Start the HTTP API");
    serve->add_option("--addr", addr, "host:port (env CTXDEV_ADDR)");
    serve->add_option("--data-dir", data_dir, "Session directory (env CTXDEV_DATA_DIR)");
    serve->add_option("--static-dir", static_dir, "Serve UI assets from this directory")->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*detect) return run_detect(log_path, config_path, out_path, format);
        if (*evaluate) return run_evaluate(grid_path, out_dir);
        if (*generate) return run_generate(gen_out, truth_out, cases, seed, pct_deviating);
        if (*serve) {
            server_options = ctxdev::ServerOptions::from_environment();
            if (!addr.empty()) server_options.set_address(addr);
            if (!data_dir.empty()) server_options.data_dir = data_dir;
            if (!static_dir.empty()) server_options.static_dir = static_dir;
            return run_serve(server_options);
        }
    } catch (const ctxdev::Error& e) {
        std::cerr << "error [" << e.code() << "]: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
