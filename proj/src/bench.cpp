#include "pandora/bench.hpp"

#include "pandora/assembly.hpp"
#include "pandora/control.hpp"
#include "pandora/kernel.hpp"
#include "pandora/stdlib.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

namespace pandora {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ns(Clock::time_point t0, Clock::time_point t1) {
    return std::chrono::duration_cast<std::chrono::duration<double, std::nano>>(t1 - t0).count();
}

template <class T>
inline void do_not_optimize(T& value) {
    asm volatile("" : "+r,m"(value) : : "memory");
}

struct Nop : Component {
    void on_event(const EventPtr& e) override { forward(e); }
};

FactoryRegistry& bench_registry() {
    static FactoryRegistry reg;
    static bool once = [] {
        reg.register_factory(ComponentContract{"nop", {}, OutputKind::Linear, false},
                             [] { return std::make_unique<Nop>(); });
        return true;
    }();
    (void)once;
    return reg;
}

StackDefinition chain_definition(size_t n) {
    StackDefinition def;
    def.name = "bench";
    def.body.assign(n, ComponentNode{"nop", "", {}, NodeShape::Simple, {}});
    return def;
}

struct Stats {
    double mean = 0.0;
    double stderr_pct = 0.0;
};

Stats stats_of(const std::vector<double>& samples) {
    Stats s;
    if (samples.empty()) return s;
    double sum = 0.0;
    for (double v : samples) sum += v;
    s.mean = sum / static_cast<double>(samples.size());
    if (samples.size() > 1 && s.mean > 0.0) {
        double ss = 0.0;
        for (double v : samples) ss += (v - s.mean) * (v - s.mean);
        double sd = std::sqrt(ss / static_cast<double>(samples.size() - 1));
        double sem = sd / std::sqrt(static_cast<double>(samples.size()));
        s.stderr_pct = 100.0 * sem / s.mean;
    }
    return s;
}

BenchResult finish(std::string name, std::vector<double> samples, const BenchProtocol& protocol) {
    Stats s = stats_of(samples);
    BenchResult r;
    r.benchmark = std::move(name);
    r.mean_ns = s.mean;
    r.stderr_pct = s.stderr_pct;
    r.runs = static_cast<int>(samples.size());
    r.samples = std::move(samples);
    if (protocol.enforce_stability && s.stderr_pct > protocol.max_stderr_pct) {
        std::ostringstream os;
        os << r.benchmark << ": run unstable: standard error " << s.stderr_pct
           << "% exceeds " << protocol.max_stderr_pct << "%";
        throw Error(ErrorCode::Unstable, os.str());
    }
    return r;
}

// Per-iteration cost of the timing loop itself, subtracted from every
// reported figure.
double loop_overhead_ns(size_t iters) {
    uint64_t sink = 0;
    Clock::time_point t0 = Clock::now();
    for (size_t i = 0; i < iters; ++i) {
        ++sink;
        do_not_optimize(sink);
    }
    Clock::time_point t1 = Clock::now();
    return elapsed_ns(t0, t1) / static_cast<double>(iters);
}

double time_injections(StackAssembly& stack, const EventPtr& e, size_t events) {
    Clock::time_point t0 = Clock::now();
    for (size_t i = 0; i < events; ++i) {
        stack.inject(e);
    }
    Clock::time_point t1 = Clock::now();
    return elapsed_ns(t0, t1);
}

} // namespace

size_t traversal_events_for(size_t chain_length, const BenchProtocol& protocol) {
    auto stack = StackAssembly::instantiate(chain_definition(std::max<size_t>(chain_length, 2)),
                                            bench_registry());
    EventPtr e = make_event("tick");
    size_t events = 1024;
    while (true) {
        double ns = time_injections(*stack, e, events);
        if (ns >= protocol.min_sample_ms * 1e6) return events;
        double scale = protocol.min_sample_ms * 1e6 * 1.2 / std::max(ns, 1.0);
        events = static_cast<size_t>(static_cast<double>(events) * std::min(scale, 64.0)) + 1;
    }
}

BenchResult bench_traversal(size_t chain_length, size_t events, const BenchProtocol& protocol) {
    if (chain_length < 2) {
        throw Error(ErrorCode::Internal, "traversal needs a chain of at least 2 components");
    }
    if (events == 0 || protocol.runs <= 0) {
        throw Error(ErrorCode::NoSamples, "traversal benchmark: no samples (events == 0)");
    }
    auto chain = StackAssembly::instantiate(chain_definition(chain_length), bench_registry());
    auto entry = StackAssembly::instantiate(chain_definition(1), bench_registry());
    EventPtr e = make_event("tick");

    // Warm-up pass.
    time_injections(*entry, e, events / 16 + 1);
    time_injections(*chain, e, events / 16 + 1);

    double hops = static_cast<double>(events) * static_cast<double>(chain_length - 1);
    std::vector<double> samples;
    samples.reserve(static_cast<size_t>(protocol.runs));
    for (int run = 0; run < protocol.runs; ++run) {
        double entry_ns = time_injections(*entry, e, events);
        double chain_ns = time_injections(*chain, e, events);
        samples.push_back(std::max((chain_ns - entry_ns) / hops, 0.0));
    }
    return finish("traversal_n" + std::to_string(chain_length), std::move(samples), protocol);
}

namespace {

// A stack exposing the same value as an option (reflective path) and as a
// sensor (fast path).
struct Probe : Component {
    void on_start() override {
        SensorRef level = add_sensor("level", SensorKind::Int);
        level->write_int(option("level").as_int());
    }
    void on_option(const std::string& name, const ScalarValue& v) override {
        if (name == "level") {
            if (SensorRef ref = self().find_sensor("level")) ref->write_int(v.as_int());
        }
    }
    void on_event(const EventPtr& e) override { forward(e); }
};

struct IntrospectionRig {
    Kernel kernel;
    SensorRef sensor;

    IntrospectionRig() {
        kernel.registry().register_factory(
            ComponentContract{"probe",
                              {OptionDecl("level", ScalarKind::Int, ScalarValue(int64_t{7}))},
                              OutputKind::Linear,
                              false},
            [] { return std::make_unique<Probe>(); });
        StackDefinition def;
        def.name = "bench";
        def.body.push_back(ComponentNode{"probe", "p", {}, NodeShape::Simple, {}});
        kernel.start_stack(def);
        sensor = kernel.sensors().lookup("bench.p.level");
    }
};

template <class Op>
BenchResult run_loop(std::string name, Op&& op, size_t iterations,
                     const BenchProtocol& protocol) {
    if (iterations == 0 || protocol.runs <= 0) {
        throw Error(ErrorCode::NoSamples, name + ": no samples (0 iterations)");
    }
    for (size_t i = 0; i < iterations / 16 + 1; ++i) op();  // warm-up
    double overhead = loop_overhead_ns(std::max<size_t>(iterations, 1024));
    std::vector<double> samples;
    samples.reserve(static_cast<size_t>(protocol.runs));
    for (int run = 0; run < protocol.runs; ++run) {
        Clock::time_point t0 = Clock::now();
        for (size_t i = 0; i < iterations; ++i) op();
        Clock::time_point t1 = Clock::now();
        samples.push_back(
            std::max(elapsed_ns(t0, t1) / static_cast<double>(iterations) - overhead, 0.0));
    }
    return finish(std::move(name), std::move(samples), protocol);
}

template <class Op>
size_t iters_for(Op&& op, const BenchProtocol& protocol) {
    size_t iters = 1024;
    while (true) {
        Clock::time_point t0 = Clock::now();
        for (size_t i = 0; i < iters; ++i) op();
        Clock::time_point t1 = Clock::now();
        double ns = elapsed_ns(t0, t1);
        if (ns >= protocol.min_sample_ms * 1e6) return iters;
        double scale = protocol.min_sample_ms * 1e6 * 1.2 / std::max(ns, 1.0);
        iters = static_cast<size_t>(static_cast<double>(iters) * std::min(scale, 64.0)) + 1;
    }
}

} // namespace

std::pair<size_t, size_t> introspection_iters_for(const BenchProtocol& protocol) {
    IntrospectionRig rig;
    int64_t sink = 0;
    size_t sensor_iters = iters_for(
        [&] {
            sink += rig.sensor->read_int();
            do_not_optimize(sink);
        },
        protocol);
    size_t control_iters = iters_for(
        [&] {
            sink += control_get(rig.kernel, Scope::Active, "bench/0", "level").as_int();
            do_not_optimize(sink);
        },
        protocol);
    return {sensor_iters, control_iters};
}

IntrospectionCosts bench_sensor_vs_mop(size_t sensor_iterations, size_t control_iterations,
                                       const BenchProtocol& protocol) {
    IntrospectionRig rig;
    IntrospectionCosts out;
    int64_t sink = 0;
    out.sensor_read = run_loop(
        "sensor_read",
        [&] {
            sink += rig.sensor->read_int();
            do_not_optimize(sink);
        },
        sensor_iterations, protocol);
    out.control_get = run_loop(
        "control_get",
        [&] {
            sink += control_get(rig.kernel, Scope::Active, "bench/0", "level").as_int();
            do_not_optimize(sink);
        },
        control_iterations, protocol);
    if (out.sensor_read.mean_ns > 0.0) {
        out.ratio = out.control_get.mean_ns / out.sensor_read.mean_ns;
    }
    return out;
}

void write_csv(std::ostream& out, const std::vector<BenchResult>& results) {
    out << "benchmark,mean_ns,stderr_pct,runs\n";
    char buf[160];
    for (const auto& r : results) {
        std::snprintf(buf, sizeof buf, "%s,%.3f,%.4f,%d\n", r.benchmark.c_str(), r.mean_ns,
                      r.stderr_pct, r.runs);
        out << buf;
    }
}

} // namespace pandora
