// Deterministic synthetic trace generator for the demo pipeline.

#include "pandora/stdlib.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"synthetic query/response trace generator"};
    pandora::TraceGenSpec spec;
    std::string out_path = "-";
    app.add_option("--records", spec.records, "number of trace lines");
    app.add_option("--seed", spec.seed, "RNG seed");
    app.add_option("--orphan-rate", spec.orphan_rate, "responses without a query");
    app.add_option("--unanswered-rate", spec.unanswered_rate, "queries never answered");
    app.add_option("--tcp-share", spec.tcp_share, "share of tcp records");
    app.add_option("--out", out_path, "output file ('-' for stdout)");
    CLI11_PARSE(app, argc, argv);

    auto records = pandora::generate_trace(spec);
    if (out_path == "-") {
        pandora::write_trace(std::cout, records);
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "tracegen: cannot write " << out_path << '\n';
        return 1;
    }
    pandora::write_trace(out, records);
    return 0;
}
