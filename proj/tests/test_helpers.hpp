#pragma once

#include "pandora/assembly.hpp"
#include "pandora/component.hpp"
#include "pandora/registry.hpp"

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace pandora::test {

// Ctor/dtor audit used by the leak tests.
inline std::atomic<int>& live_probe_count() {
    static std::atomic<int> n{0};
    return n;
}

// Appends every event to a shared log, then forwards.
class Recorder : public Component {
public:
    explicit Recorder(std::shared_ptr<std::vector<EventPtr>> log) : log_(std::move(log)) {
        live_probe_count().fetch_add(1);
    }
    ~Recorder() override { live_probe_count().fetch_sub(1); }

    void on_event(const EventPtr& e) override {
        if (log_) log_->push_back(e);
        forward(e);
    }

private:
    std::shared_ptr<std::vector<EventPtr>> log_;
};

// Terminal component running a test-supplied function.
class FnSink : public Component {
public:
    explicit FnSink(std::function<void(const EventPtr&)> fn) : fn_(std::move(fn)) {}
    void on_event(const EventPtr& e) override {
        if (fn_) fn_(e);
    }

private:
    std::function<void(const EventPtr&)> fn_;
};

// Routes by the "port" attribute (alternative outputs).
class PortRouter : public Component {
public:
    void on_event(const EventPtr& e) override {
        const ScalarValue* v = e->attr("port");
        forward(v ? static_cast<size_t>(v->as_int()) : 0, e);
    }
};

// Routes by the "k" attribute (demux outputs).
class KeyRouter : public Component {
public:
    void on_event(const EventPtr& e) override {
        const ScalarValue* v = e->attr("k");
        forward_demux(v ? v->to_plain_string() : "", e);
    }
};

// Branch-identity probe: instances number themselves in creation order and
// log which instance saw which event.
class BranchProbe : public Component {
public:
    struct Shared {
        int next_id = 0;
        std::vector<int> creations;                       // probe ids, creation order
        std::vector<std::pair<int, EventPtr>> deliveries;  // (probe id, event)
    };

    explicit BranchProbe(std::shared_ptr<Shared> shared) : shared_(std::move(shared)) {
        id_ = shared_->next_id++;
        shared_->creations.push_back(id_);
        live_probe_count().fetch_add(1);
    }
    ~BranchProbe() override { live_probe_count().fetch_sub(1); }

    void on_event(const EventPtr& e) override {
        shared_->deliveries.emplace_back(id_, e);
        forward(e);
    }

private:
    std::shared_ptr<Shared> shared_;
    int id_ = 0;
};

class FailingCtor : public Component {
public:
    FailingCtor() { throw std::runtime_error("constructor exploded"); }
    void on_event(const EventPtr&) override {}
};

inline void register_routers(FactoryRegistry& reg) {
    reg.register_factory(ComponentContract{"alt", {}, OutputKind::Alternative, false},
                         [] { return std::make_unique<PortRouter>(); });
    reg.register_factory(ComponentContract{"dmx", {}, OutputKind::Demux, false},
                         [] { return std::make_unique<KeyRouter>(); });
}

inline void register_recorder(FactoryRegistry& reg, const std::string& id,
                              std::shared_ptr<std::vector<EventPtr>> log) {
    reg.register_factory(ComponentContract{id, {}, OutputKind::Linear, false},
                         [log] { return std::make_unique<Recorder>(log); });
}

inline void register_fn_sink(FactoryRegistry& reg, const std::string& id,
                             std::function<void(const EventPtr&)> fn) {
    reg.register_factory(ComponentContract{id, {}, OutputKind::Linear, false},
                         [fn] { return std::make_unique<FnSink>(fn); });
}

inline void register_probe(FactoryRegistry& reg, const std::string& id,
                           std::shared_ptr<BranchProbe::Shared> shared) {
    reg.register_factory(ComponentContract{id, {}, OutputKind::Linear, false},
                         [shared] { return std::make_unique<BranchProbe>(shared); });
}

inline void register_failing(FactoryRegistry& reg, const std::string& id) {
    reg.register_factory(ComponentContract{id, {}, OutputKind::Linear, false},
                         [] { return std::make_unique<FailingCtor>(); });
}

inline std::unique_ptr<StackAssembly> build(const std::string& text, FactoryRegistry& reg,
                                            InstantiateEnv env = {}) {
    auto assembly = StackAssembly::instantiate(parse_stack(text), reg, std::move(env));
    assembly->start_all();
    return assembly;
}

} // namespace pandora::test
