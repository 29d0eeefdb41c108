#include "pandora/component.hpp"

#include "pandora/kernel.hpp"

namespace pandora {

const char* to_string(OutputKind kind) {
    switch (kind) {
    case OutputKind::Linear: return "linear";
    case OutputKind::Alternative: return "alternative";
    case OutputKind::Demux: return "demux";
    }
    return "?";
}

const OptionDecl* ComponentContract::find_option(std::string_view name) const {
    for (const auto& decl : options) {
        if (decl.name() == name) return &decl;
    }
    return nullptr;
}

// --- Component: thin forwarding shims into the owning instance ---

ComponentInstance& Component::self() {
    PANDORA_CHECK(self_ != nullptr, "component is not wired into a stack");
    return *self_;
}

const ComponentInstance& Component::self() const {
    PANDORA_CHECK(self_ != nullptr, "component is not wired into a stack");
    return *self_;
}

void Component::forward(const EventPtr& e) { self().forward_linear(e); }
void Component::forward(size_t port, const EventPtr& e) { self().forward_alternative(port, e); }
void Component::forward_demux(const std::string& key, const EventPtr& e) {
    self().forward_demux_key(key, e);
}

ScalarValue Component::option(std::string_view name) const {
    return self().options().get(name);
}

SensorRef Component::add_sensor(const std::string& local_name, SensorKind kind, SensorMode mode) {
    return self().add_sensor(local_name, kind, mode);
}

void Component::send_to_stack(std::string_view target, const EventPtr& e, SendMode mode) {
    Kernel* kernel = self().kernel();
    if (!kernel) {
        throw Error(ErrorCode::Internal, "inter-stack send requires a kernel-managed stack");
    }
    kernel->send_to_stack(target, e, mode);
}

void Component::set_demux_limit(int64_t max_categories) { self().set_demux_limit(max_categories); }
void Component::set_demux_drop_hook(std::function<void(const EventPtr&)> hook) {
    self().set_demux_drop_hook(std::move(hook));
}

// --- ComponentInstance ---

ComponentInstance::ComponentInstance(const ComponentContract* contract, ComponentPtr component,
                                     std::string alias, std::string path_hint)
    : contract_(contract),
      component_(std::move(component)),
      alias_(std::move(alias)),
      path_hint_(std::move(path_hint)),
      options_(&contract->options) {
    PANDORA_CHECK(component_ != nullptr, "factory returned a null component");
    component_->self_ = this;
    if (contract_->output == OutputKind::Demux) demux_ = std::make_unique<DemuxState>();
}

ComponentInstance::~ComponentInstance() {
    if (sensor_registry_) {
        for (auto& [local, ref] : sensors_) {
            sensor_registry_->retire(ref->name());
        }
    }
    for (auto& [local, ref] : sensors_) ref->mark_stale();
}

void ComponentInstance::deliver(const EventPtr& e) {
    PANDORA_CHECK(!poisoned_, "event delivered to a stopped component");
    PANDORA_CHECK(!entered_, "re-entrant delivery to component " + path_hint_);
    entered_ = true;
    struct Reset {
        bool* flag;
        ~Reset() { *flag = false; }
    } reset{&entered_};
    component_->on_event(e);
}

void ComponentInstance::set_option(const std::string& name, const ScalarValue& v) {
    ScalarValue stored = options_.set(name, v, path_hint_);
    component_->on_option(name, stored);
}

void ComponentInstance::attach_sensors(SensorRegistry* registry, std::string prefix) {
    sensor_registry_ = registry;
    sensor_prefix_ = std::move(prefix);
}

SensorRef ComponentInstance::add_sensor(const std::string& local_name, SensorKind kind,
                                        SensorMode mode) {
    PANDORA_CHECK(is_identifier(local_name), "sensor name must be an identifier");
    for (const auto& [local, ref] : sensors_) {
        if (local == local_name) {
            throw Error(ErrorCode::DuplicateSensor,
                        path_hint_ + ": sensor '" + local_name + "' already registered");
        }
    }
    SensorRef ref;
    if (sensor_registry_) {
        ref = sensor_registry_->register_sensor(sensor_prefix_ + "." + local_name, kind, mode);
    } else {
        // Headless assemblies still get working cells, just not directory
        // entries.
        ref = std::make_shared<SensorCell>(sensor_prefix_ + "." + local_name, kind, mode);
    }
    sensors_.emplace_back(local_name, ref);
    return ref;
}

SensorRef ComponentInstance::find_sensor(std::string_view local_name) const {
    for (const auto& [local, ref] : sensors_) {
        if (local == local_name) return ref;
    }
    return nullptr;
}

void ComponentInstance::wire_linear(ComponentInstance* next) {
    linear_next_ = next;
}

void ComponentInstance::wire_alternative(std::vector<ComponentInstance*> heads) {
    alt_heads_ = std::move(heads);
}

void ComponentInstance::wire_demux(DemuxMaker maker) {
    PANDORA_CHECK(demux_ != nullptr, "wire_demux on a non-demux component");
    std::lock_guard lock(demux_->mu);
    demux_->maker = std::move(maker);
}

void ComponentInstance::reset_demux_routes() {
    if (!demux_) return;
    std::lock_guard lock(demux_->mu);
    demux_->routes.clear();
}

void ComponentInstance::restore_demux_route(const std::string& key, ComponentInstance* head) {
    PANDORA_CHECK(demux_ != nullptr, "restore_demux_route on a non-demux component");
    std::lock_guard lock(demux_->mu);
    demux_->routes[key] = head;
}

void ComponentInstance::set_demux_limit(int64_t max_categories) {
    PANDORA_CHECK(demux_ != nullptr, "demux limit on a non-demux component");
    demux_->max_categories.store(max_categories, std::memory_order_relaxed);
}

void ComponentInstance::set_demux_drop_hook(std::function<void(const EventPtr&)> hook) {
    PANDORA_CHECK(demux_ != nullptr, "demux drop hook on a non-demux component");
    std::lock_guard lock(demux_->mu);
    demux_->drop_hook = std::move(hook);
}

void ComponentInstance::start() {
    if (started_) return;
    component_->on_start();
    started_ = true;
}

void ComponentInstance::stop() {
    if (!started_) {
        poisoned_ = true;
        return;
    }
    started_ = false;
    poisoned_ = true;
    component_->on_stop();
    if (sensor_registry_) {
        for (auto& [local, ref] : sensors_) sensor_registry_->retire(ref->name());
    } else {
        for (auto& [local, ref] : sensors_) ref->mark_stale();
    }
}

void ComponentInstance::forward_linear(const EventPtr& e) {
    if (contract_->output == OutputKind::Alternative) {
        // Linear is the degenerate alternative with one port.
        forward_alternative(0, e);
        return;
    }
    if (contract_->output == OutputKind::Demux) {
        throw Error(ErrorCode::WiringError,
                    path_hint_ + ": demux component must forward with a category key");
    }
    if (linear_next_) linear_next_->deliver(e);
    // No successor: the event terminates here (sink behavior).
}

void ComponentInstance::forward_alternative(size_t port, const EventPtr& e) {
    if (contract_->output != OutputKind::Alternative) {
        throw Error(ErrorCode::WiringError,
                    path_hint_ + ": component has no alternative ports");
    }
    if (port >= alt_heads_.size()) {
        throw Error(ErrorCode::WiringError,
                    path_hint_ + ": alternative port " + std::to_string(port) +
                        " out of range (have " + std::to_string(alt_heads_.size()) + ")");
    }
    if (alt_heads_[port]) alt_heads_[port]->deliver(e);
}

void ComponentInstance::forward_demux_key(const std::string& key, const EventPtr& e) {
    if (contract_->output != OutputKind::Demux || !demux_) {
        throw Error(ErrorCode::WiringError, path_hint_ + ": component has no demux port");
    }
    ComponentInstance* head = nullptr;
    {
        std::lock_guard lock(demux_->mu);
        auto it = demux_->routes.find(key);
        if (it != demux_->routes.end()) {
            head = it->second;
        } else {
            int64_t cap = demux_->max_categories.load(std::memory_order_relaxed);
            if (cap > 0 && static_cast<int64_t>(demux_->routes.size()) >= cap) {
                if (demux_->drop_hook) demux_->drop_hook(e);
                return;
            }
            PANDORA_CHECK(static_cast<bool>(demux_->maker), "demux port is not wired");
            head = demux_->maker(key);
            demux_->routes.emplace(key, head);
        }
    }
    if (head) head->deliver(e);
}

} // namespace pandora
