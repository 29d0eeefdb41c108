#pragma once

#include "pandora/adl.hpp"
#include "pandora/component.hpp"
#include "pandora/path.hpp"
#include "pandora/registry.hpp"
#include "pandora/sensors.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace pandora {

struct InstantiateEnv {
    // Optional; without a registry components get no sensors.
    SensorRegistry* sensors = nullptr;
    // Flat sensor name prefix for the stack ("dns" in "dns.count.n").
    std::string stack_key;
    Kernel* kernel = nullptr;
};

// A wired stack: the live component graph built from a definition. Demux
// branch instances appear lazily as keys arrive and live until the stack is
// torn down or reconfigured.
class StackAssembly {
public:
    struct Node;
    using Chain = std::vector<std::unique_ptr<Node>>;

    struct Node {
        ComponentNode def;
        ComponentInstance* inst = nullptr;           // owned by the assembly
        std::vector<Chain> alt_branches;             // static, wired at build
        std::map<std::string, Chain, std::less<>> demux_branches; // lazy
    };

    // Requires validate(def, registry) to be clean; throws EmptyStack for a
    // definition with no components. On constructor or option failure every
    // already-created component is destroyed (reverse creation order).
    static std::unique_ptr<StackAssembly> instantiate(const StackDefinition& def,
                                                      const FactoryRegistry& registry,
                                                      InstantiateEnv env = {});

    ~StackAssembly();

    const StackDefinition& definition() const { return def_; }
    const std::string& stack_key() const { return env_.stack_key; }
    const InstantiateEnv& env() const { return env_; }

    ComponentInstance* initial() const;

    // Cascade entry: delivers into the initial component and returns once
    // all downstream processing is done. Rejects re-entry from within a
    // cascade of the same stack.
    void inject(const EventPtr& e);

    // Lifecycle fan-out in (reverse) wiring order.
    void start_all();
    void stop_all();

    // Active-scope path resolution (segments after the stack selector).
    ComponentInstance* resolve(const std::vector<PathSegment>& segments) const;

    // Statically created instances, in wiring order.
    size_t static_instance_count() const { return static_count_; }
    size_t live_instance_count() const;

    const Chain& body() const { return body_; }

    // Reconfiguration support: detaches ownership of every instance and the
    // node tree so a new assembly can be rebuilt around kept instances.
    friend class ReconfigSurgeon;

private:
    StackAssembly() = default;

    struct Builder;

    ComponentInstance::DemuxMaker make_demux_maker(Node* node, ComponentInstance* join,
                                                   std::string branch_path_base);
    std::string claim_sensor_key(const std::string& base, const std::string& key_suffix);

    StackDefinition def_;
    InstantiateEnv env_;
    const FactoryRegistry* registry_ = nullptr;
    std::string sensor_stack_key_;
    Chain body_;
    std::vector<std::unique_ptr<ComponentInstance>> owned_;  // creation order
    std::map<std::string, int, std::less<>> sensor_keys_used_;
    size_t static_count_ = 0;
    bool in_cascade_ = false;
    bool started_ = false;
    mutable std::mutex structure_mu_;  // guards demux_branches maps + owned_ growth
};

} // namespace pandora
