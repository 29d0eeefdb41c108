#pragma once

#include "pandora/errors.hpp"
#include "pandora/event.hpp"
#include "pandora/option.hpp"
#include "pandora/sensors.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace pandora {

class Component;
class ComponentInstance;
class Kernel;

enum class OutputKind { Linear, Alternative, Demux };
enum class SendMode { Sync, Async };

const char* to_string(OutputKind kind);

// What a component author declares: identity, options, output arity and
// whether the component can drive a stack as its event producer.
struct ComponentContract {
    std::string type_id;
    std::vector<OptionDecl> options;
    OutputKind output = OutputKind::Linear;
    bool initial_capable = false;

    const OptionDecl* find_option(std::string_view name) const;
};

// Base class for component implementations. A component sees one anonymous
// input (on_event) and forwards through its output port(s) without knowing
// its successors. All calls arrive on the owning stack's context except
// on_option, which may arrive from the control context.
class Component {
public:
    virtual ~Component() = default;

    virtual void on_event(const EventPtr& e) = 0;

    // Initial-capable components implement the pull interface; returning
    // nullopt ends production for good.
    virtual std::optional<EventPtr> produce() { return std::nullopt; }

    virtual void on_start() {}
    virtual void on_stop() {}
    virtual void on_option(const std::string& name, const ScalarValue& value) {
        (void)name;
        (void)value;
    }

protected:
    // Downstream propagation is synchronous and depth-first: everything the
    // forwarded event triggers completes before forward returns.
    void forward(const EventPtr& e);
    void forward(size_t port, const EventPtr& e);
    void forward_demux(const std::string& key, const EventPtr& e);

    ScalarValue option(std::string_view name) const;
    SensorRef add_sensor(const std::string& local_name, SensorKind kind,
                         SensorMode mode = SensorMode::Passive);

    // Named inter-stack communication (needs a kernel-managed stack).
    void send_to_stack(std::string_view target, const EventPtr& e, SendMode mode);

    void set_demux_limit(int64_t max_categories);
    void set_demux_drop_hook(std::function<void(const EventPtr&)> hook);

    ComponentInstance& self();
    const ComponentInstance& self() const;

private:
    ComponentInstance* self_ = nullptr;
    friend class ComponentInstance;
};

using ComponentPtr = std::unique_ptr<Component>;

// A live component wired inside a stack: the component object plus its
// option store, sensors, and output wiring. Owned by the stack's assembly.
class ComponentInstance {
public:
    ComponentInstance(const ComponentContract* contract, ComponentPtr component,
                      std::string alias, std::string path_hint);
    ~ComponentInstance();

    ComponentInstance(const ComponentInstance&) = delete;
    ComponentInstance& operator=(const ComponentInstance&) = delete;

    const std::string& type_id() const { return contract_->type_id; }
    const std::string& alias() const { return alias_; }
    const ComponentContract& contract() const { return *contract_; }
    const std::string& path() const { return path_hint_; }
    void set_path(std::string path) { path_hint_ = std::move(path); }

    Component& component() { return *component_; }

    // Cascade entry for this component. Runs the component and, through its
    // forwards, the entire downstream subtree before returning.
    void deliver(const EventPtr& e);

    // Options
    OptionStore& options() { return options_; }
    const OptionStore& options() const { return options_; }
    void set_option(const std::string& name, const ScalarValue& v);

    // Sensors: local name -> flat "<stack>.<component>.<local>".
    void attach_sensors(SensorRegistry* registry, std::string prefix);
    SensorRef add_sensor(const std::string& local_name, SensorKind kind, SensorMode mode);
    SensorRef find_sensor(std::string_view local_name) const;

    // Wiring (assembly and reconfiguration only).
    void wire_linear(ComponentInstance* next);
    void wire_alternative(std::vector<ComponentInstance*> heads);
    using DemuxMaker = std::function<ComponentInstance*(const std::string& key)>;
    void wire_demux(DemuxMaker maker);
    void reset_demux_routes();
    void restore_demux_route(const std::string& key, ComponentInstance* head);

    void set_demux_limit(int64_t max_categories);
    void set_demux_drop_hook(std::function<void(const EventPtr&)> hook);

    // Lifecycle
    void start();
    void stop();               // on_stop + retire sensors + poison
    bool started() const { return started_; }

    void set_kernel(Kernel* kernel) { kernel_ = kernel; }
    Kernel* kernel() const { return kernel_; }
    const std::string& sensor_prefix() const { return sensor_prefix_; }

private:
    void forward_linear(const EventPtr& e);
    void forward_alternative(size_t port, const EventPtr& e);
    void forward_demux_key(const std::string& key, const EventPtr& e);

    const ComponentContract* contract_;
    ComponentPtr component_;
    std::string alias_;
    std::string path_hint_;
    OptionStore options_;

    // Output wiring.
    ComponentInstance* linear_next_ = nullptr;
    std::vector<ComponentInstance*> alt_heads_;
    struct DemuxState {
        std::mutex mu;
        std::map<std::string, ComponentInstance*, std::less<>> routes;
        DemuxMaker maker;
        std::atomic<int64_t> max_categories{0};
        std::function<void(const EventPtr&)> drop_hook;
    };
    std::unique_ptr<DemuxState> demux_;

    // Sensors
    SensorRegistry* sensor_registry_ = nullptr;
    std::string sensor_prefix_;
    std::vector<std::pair<std::string, SensorRef>> sensors_;

    Kernel* kernel_ = nullptr;

    bool entered_ = false;
    bool started_ = false;
    bool poisoned_ = false;

    friend class Component;
};

} // namespace pandora
