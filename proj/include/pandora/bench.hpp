#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace pandora {

class Kernel;

// 50-run loop protocol: per-operation nanoseconds from million-scale loops,
// with loop overhead calibrated out. Accepted results need a standard error
// of the mean within max_stderr_pct; enforce_stability makes a miss an error.
struct BenchProtocol {
    int runs = 50;
    double min_sample_ms = 100.0;
    double max_stderr_pct = 1.0;
    bool enforce_stability = true;
};

struct BenchResult {
    std::string benchmark;
    double mean_ns = 0.0;
    double stderr_pct = 0.0;
    int runs = 0;
    std::vector<double> samples;
};

// Per-hop event dispatch cost: a chain of `chain_length` no-op components
// takes `events` events per sample; the cost of delivering into a
// single-component stack is measured with the same event count and
// subtracted, leaving the component-to-successor link cost
// (total - entry) / (events * (chain_length - 1)).
// chain_length must be >= 2; events == 0 is a no-samples error.
BenchResult bench_traversal(size_t chain_length, size_t events,
                            const BenchProtocol& protocol = {});

// Event count giving samples of roughly protocol.min_sample_ms.
size_t traversal_events_for(size_t chain_length, const BenchProtocol& protocol = {});

struct IntrospectionCosts {
    BenchResult sensor_read;   // passive sensor read through a held reference
    BenchResult control_get;   // in-process reflective GET (full name resolution)
    double ratio = 0.0;        // control_get / sensor_read
};

// iterations == 0 is a no-samples error; pick with introspection_iters_for.
IntrospectionCosts bench_sensor_vs_mop(size_t sensor_iterations, size_t control_iterations,
                                       const BenchProtocol& protocol = {});
std::pair<size_t, size_t> introspection_iters_for(const BenchProtocol& protocol = {});

// CSV: benchmark,mean_ns,stderr_pct,runs
void write_csv(std::ostream& out, const std::vector<BenchResult>& results);

} // namespace pandora
