// Microbenchmarks: per-hop dispatch cost and introspection costs.

#include "pandora/bench.hpp"
#include "pandora/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

void print_result(const pandora::BenchResult& r) {
    std::printf("%-16s mean %10.2f ns   stderr %6.3f%%   runs %d\n", r.benchmark.c_str(),
                r.mean_ns, r.stderr_pct, r.runs);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pandora microbenchmarks"};
    int runs = 50;
    double min_sample_ms = 100.0;
    std::string csv;
    bool lax = false;
    app.add_option("--runs", runs, "runs per benchmark (default 50)");
    app.add_option("--min-sample-ms", min_sample_ms, "minimum sample duration");
    app.add_option("--csv", csv, "write results as CSV");
    app.add_flag("--lax", lax, "report unstable runs instead of failing");
    app.require_subcommand(1);

    std::vector<size_t> lengths{2, 3, 4, 6, 8, 10};
    auto* traversal = app.add_subcommand("traversal", "per-hop event dispatch cost");
    traversal->add_option("--lengths", lengths, "chain lengths to measure")->take_all();
    auto* sensors = app.add_subcommand("sensors", "sensor read vs reflective GET");

    CLI11_PARSE(app, argc, argv);

    pandora::BenchProtocol protocol;
    protocol.runs = runs;
    protocol.min_sample_ms = min_sample_ms;
    protocol.enforce_stability = !lax;

    std::vector<pandora::BenchResult> results;
    try {
        if (traversal->parsed()) {
            for (size_t n : lengths) {
                size_t events = pandora::traversal_events_for(n, protocol);
                results.push_back(pandora::bench_traversal(n, events, protocol));
                print_result(results.back());
            }
        }
        if (sensors->parsed()) {
            auto [si, ci] = pandora::introspection_iters_for(protocol);
            auto costs = pandora::bench_sensor_vs_mop(si, ci, protocol);
            results.push_back(costs.sensor_read);
            results.push_back(costs.control_get);
            print_result(costs.sensor_read);
            print_result(costs.control_get);
            std::printf("reflective GET / sensor read ratio: %.1fx\n", costs.ratio);
        }
    } catch (const pandora::Error& e) {
        std::cerr << "pandorabench: " << e.what() << '\n';
        return 1;
    }

    if (!csv.empty()) {
        std::ofstream out(csv, std::ios::binary);
        if (!out) {
            std::cerr << "pandorabench: cannot write " << csv << '\n';
            return 1;
        }
        pandora::write_csv(out, results);
    }
    return 0;
}
