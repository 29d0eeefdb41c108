#pragma once

#include "pandora/adl.hpp"
#include "pandora/assembly.hpp"
#include "pandora/path.hpp"
#include "pandora/registry.hpp"
#include "pandora/sensors.hpp"

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace pandora {

using Handle = uint64_t;

enum class StackState { Created, Running, Stopping, Stopped };
const char* to_string(StackState state);

enum class OverflowPolicy { Block, DropNewest };

// Bounded multi-producer single-consumer event queue for asynchronous
// inter-stack delivery.
class Mailbox {
public:
    enum class PushResult { Ok, Dropped, Closed };

    explicit Mailbox(size_t capacity = 1024, OverflowPolicy policy = OverflowPolicy::Block);

    PushResult push(EventPtr e);
    std::optional<EventPtr> try_pop();
    void close();
    size_t size() const;
    size_t capacity() const { return capacity_; }

private:
    mutable std::mutex mu_;
    std::condition_variable not_full_;
    std::deque<EventPtr> q_;
    size_t capacity_;
    OverflowPolicy policy_;
    bool closed_ = false;
};

struct StackRow {
    Handle handle = 0;
    std::string name;
    std::string alias;
    StackState state = StackState::Created;
};

namespace detail {
class RunningStack;
}

// Micro-kernel: stored definitions, the registry of running stacks, stack
// lifecycle, and named inter-stack communication. Control operations are
// serialized on one control context; each running stack owns a dedicated
// execution context.
class Kernel {
public:
    Kernel();
    ~Kernel();

    Kernel(const Kernel&) = delete;
    Kernel& operator=(const Kernel&) = delete;

    FactoryRegistry& registry() { return registry_; }
    const FactoryRegistry& registry() const { return registry_; }
    SensorRegistry& sensors() { return sensors_; }

    // --- definitions (stored vs. active) ---
    void store_definition(StackDefinition def);
    // All-or-nothing: a parse or validation failure leaves the store untouched.
    void load_config_text(std::string_view text);
    void load_config_file(const std::string& path);
    const StackDefinition* stored_definition(std::string_view name) const;
    std::vector<std::string> stored_names() const;

    // --- lifecycle ---
    Handle start_stack(const std::string& name, const std::string& alias = {});
    Handle start_stack(const StackDefinition& def, const std::string& alias = {});
    void stop_stack(Handle handle);
    void stop_all();
    std::vector<StackRow> list_stacks() const;

    // --- inter-stack communication ---
    // Sync: the full cascade in the target completes, on the target's
    // context, before this returns. Async: the event is queued in the
    // target's mailbox and drained between productions.
    void send_to_stack(std::string_view target, EventPtr e, SendMode mode);

    // --- options through the reflective interface ---
    ScalarValue get_option(Scope scope, const ComponentPath& path, const std::string& option);
    void set_option(Scope scope, const ComponentPath& path, const std::string& option,
                    const ScalarValue& value);

    // --- reconfiguration (see reconfig.hpp for the planning side) ---
    void reconfigure(Handle handle, const StackDefinition& new_def);

    // Pauses a stack at a cascade boundary, runs fn on the caller's context,
    // resumes. fn may replace the assembly; used by reconfiguration.
    void with_stack_parked(Handle handle,
                           const std::function<void(std::unique_ptr<StackAssembly>&)>& fn);

    const StackDefinition& active_definition(Handle handle) const;
    Handle resolve_handle(std::string_view target) const;

    // Mailbox parameters for subsequently started stacks.
    void set_mailbox_defaults(size_t capacity, OverflowPolicy policy);

private:
    friend class detail::RunningStack;

    std::shared_ptr<detail::RunningStack> find_stack(std::string_view target) const;
    std::shared_ptr<detail::RunningStack> find_stack(Handle handle) const;
    Handle start_locked(const StackDefinition& def, const std::string& alias);
    std::string stack_key_for(const StackDefinition& def, const std::string& alias) const;

    FactoryRegistry registry_;
    SensorRegistry sensors_;

    mutable std::mutex control_mu_;   // serializes control operations
    mutable std::mutex registry_mu_;  // guards the maps below (touched from stack contexts)

    std::map<std::string, StackDefinition, std::less<>> stored_;
    std::map<Handle, std::shared_ptr<detail::RunningStack>> stacks_;
    std::map<std::string, Handle, std::less<>> aliases_;
    Handle next_handle_ = 1;

    size_t mailbox_capacity_ = 1024;
    OverflowPolicy mailbox_policy_ = OverflowPolicy::Block;
};

} // namespace pandora
