#include "pandora/kernel.hpp"

#include "pandora/reconfig.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pandora {

const char* to_string(StackState state) {
    switch (state) {
    case StackState::Created: return "created";
    case StackState::Running: return "running";
    case StackState::Stopping: return "stopping";
    case StackState::Stopped: return "stopped";
    }
    return "?";
}

// --- Mailbox ---

Mailbox::Mailbox(size_t capacity, OverflowPolicy policy)
    : capacity_(capacity ? capacity : 1), policy_(policy) {}

Mailbox::PushResult Mailbox::push(EventPtr e) {
    std::unique_lock lock(mu_);
    if (closed_) return PushResult::Closed;
    if (q_.size() >= capacity_) {
        if (policy_ == OverflowPolicy::DropNewest) return PushResult::Dropped;
        not_full_.wait(lock, [&] { return q_.size() < capacity_ || closed_; });
        if (closed_) return PushResult::Closed;
    }
    q_.push_back(std::move(e));
    return PushResult::Ok;
}

std::optional<EventPtr> Mailbox::try_pop() {
    std::unique_lock lock(mu_);
    if (q_.empty()) return std::nullopt;
    EventPtr e = std::move(q_.front());
    q_.pop_front();
    lock.unlock();
    not_full_.notify_one();
    return e;
}

void Mailbox::close() {
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    not_full_.notify_all();
}

size_t Mailbox::size() const {
    std::lock_guard lock(mu_);
    return q_.size();
}

// --- RunningStack: one execution context per running stack ---

namespace detail {

namespace {
thread_local RunningStack* tls_current_stack = nullptr;
}

class RunningStack {
public:
    RunningStack(Kernel& kernel, std::unique_ptr<StackAssembly> assembly, Handle handle,
                 std::string name, std::string alias, size_t mailbox_capacity,
                 OverflowPolicy mailbox_policy)
        : kernel_(kernel),
          assembly_(std::move(assembly)),
          handle_(handle),
          name_(std::move(name)),
          alias_(std::move(alias)),
          mailbox_(mailbox_capacity, mailbox_policy) {
        producer_active_ = assembly_->initial()->contract().initial_capable;
        dropped_ = kernel_.sensors().register_sensor(
            assembly_->stack_key() + ".mailbox.dropped", SensorKind::Int, SensorMode::Passive);
    }

    Handle handle() const { return handle_; }
    const std::string& name() const { return name_; }
    const std::string& alias() const { return alias_; }
    StackState state() const { return state_.load(std::memory_order_relaxed); }
    StackAssembly& assembly() { return *assembly_; }
    std::unique_ptr<StackAssembly>& assembly_slot() { return assembly_; }

    void launch() {
        state_.store(StackState::Running, std::memory_order_relaxed);
        thread_ = std::thread([this] { run(); });
    }

    void request_stop() {
        {
            std::lock_guard lock(mu_);
            stop_ = true;
            park_requested_ = false;
        }
        state_.store(StackState::Stopping, std::memory_order_relaxed);
        cv_.notify_all();
    }

    void finish_stop() {
        if (thread_.joinable()) thread_.join();
        mailbox_.close();
        assembly_->stop_all();
        kernel_.sensors().retire(dropped_->name());
        state_.store(StackState::Stopped, std::memory_order_relaxed);
    }

    void deliver_sync(EventPtr e) {
        if (tls_current_stack == this) {
            throw Error(ErrorCode::SelfSend,
                        "synchronous send from stack '" + name_ + "' to itself would deadlock");
        }
        std::future<void> done;
        {
            std::lock_guard lock(mu_);
            if (stop_) {
                throw Error(ErrorCode::NotRunning, "stack '" + name_ + "' is stopping");
            }
            sync_q_.emplace_back();
            sync_q_.back().e = std::move(e);
            done = sync_q_.back().done.get_future();
        }
        cv_.notify_all();
        done.get();  // rethrows cascade failures on the sender
    }

    void deliver_async(EventPtr e) {
        Mailbox::PushResult r = mailbox_.push(std::move(e));
        switch (r) {
        case Mailbox::PushResult::Ok:
            break;
        case Mailbox::PushResult::Dropped:
            dropped_->add(1);  // silent by contract, but counted
            break;
        case Mailbox::PushResult::Closed:
            throw Error(ErrorCode::MailboxClosed, "stack '" + name_ + "' no longer accepts events");
        }
        {
            std::lock_guard lock(mu_);
        }
        cv_.notify_all();
    }

    // Waits until the context sits at a cascade boundary and stays there.
    void park() {
        std::unique_lock lock(mu_);
        PANDORA_CHECK(!park_requested_, "stack already parked");
        park_requested_ = true;
        cv_.notify_all();
        parked_cv_.wait(lock, [&] { return parked_ || stop_; });
    }

    void unpark() {
        {
            std::lock_guard lock(mu_);
            park_requested_ = false;
        }
        cv_.notify_all();
    }

    void reset_producer() {
        std::lock_guard lock(mu_);
        producer_active_ = assembly_->initial()->contract().initial_capable;
    }

    size_t mailbox_size() const { return mailbox_.size(); }

private:
    void run() {
        tls_current_stack = this;
        std::unique_lock lock(mu_);
        while (true) {
            if (stop_) break;
            if (park_requested_) {
                parked_ = true;
                parked_cv_.notify_all();
                cv_.wait(lock, [&] { return !park_requested_ || stop_; });
                parked_ = false;
                continue;
            }
            if (!sync_q_.empty()) {
                SyncCmd cmd = std::move(sync_q_.front());
                sync_q_.pop_front();
                StackAssembly* a = assembly_.get();
                lock.unlock();
                try {
                    a->inject(cmd.e);
                    cmd.done.set_value();
                } catch (...) {
                    cmd.done.set_exception(std::current_exception());
                }
                lock.lock();
                continue;
            }
            if (auto e = mailbox_.try_pop()) {
                StackAssembly* a = assembly_.get();
                lock.unlock();
                deliver_logged(*a, *e);
                lock.lock();
                continue;
            }
            if (producer_active_) {
                StackAssembly* a = assembly_.get();
                lock.unlock();
                bool keep_producing = produce_one(*a);
                lock.lock();
                if (!keep_producing) producer_active_ = false;
                continue;
            }
            cv_.wait(lock, [&] {
                return stop_ || park_requested_ || !sync_q_.empty() || mailbox_.size() > 0;
            });
        }
        // Teardown: serve whatever is already queued, then quit.
        while (!sync_q_.empty()) {
            SyncCmd cmd = std::move(sync_q_.front());
            sync_q_.pop_front();
            StackAssembly* a = assembly_.get();
            lock.unlock();
            try {
                a->inject(cmd.e);
                cmd.done.set_value();
            } catch (...) {
                cmd.done.set_exception(std::current_exception());
            }
            lock.lock();
        }
        lock.unlock();
        while (auto e = mailbox_.try_pop()) {
            deliver_logged(*assembly_, *e);
        }
        tls_current_stack = nullptr;
    }

    bool produce_one(StackAssembly& a) {
        try {
            if (auto e = a.initial()->component().produce()) {
                a.inject(*e);
                return true;
            }
            return false;
        } catch (const std::exception& ex) {
            std::fprintf(stderr, "[pandora] stack '%s': producer failed: %s\n", name_.c_str(),
                         ex.what());
            return false;
        }
    }

    void deliver_logged(StackAssembly& a, const EventPtr& e) {
        try {
            a.inject(e);
        } catch (const std::exception& ex) {
            std::fprintf(stderr, "[pandora] stack '%s': event processing failed: %s\n",
                         name_.c_str(), ex.what());
        }
    }

    struct SyncCmd {
        EventPtr e;
        std::promise<void> done;
    };

    Kernel& kernel_;
    std::unique_ptr<StackAssembly> assembly_;
    Handle handle_;
    std::string name_;
    std::string alias_;
    Mailbox mailbox_;
    SensorRef dropped_;

    std::thread thread_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::condition_variable parked_cv_;
    std::deque<SyncCmd> sync_q_;
    bool stop_ = false;
    bool park_requested_ = false;
    bool parked_ = false;
    bool producer_active_ = false;
    std::atomic<StackState> state_{StackState::Created};
};

} // namespace detail

// --- Kernel ---

Kernel::Kernel() = default;

Kernel::~Kernel() {
    try {
        stop_all();
    } catch (...) {
    }
}

void Kernel::store_definition(StackDefinition def) {
    std::lock_guard lock(control_mu_);
    stored_[def.name] = std::move(def);
}

void Kernel::load_config_text(std::string_view text) {
    auto defs = parse_config(text);
    // Validate everything before committing anything.
    for (const auto& def : defs) {
        auto diags = validate(def, registry_);
        if (!diags.empty()) {
            throw Error(ErrorCode::Validation, "stack '" + def.name + "': [" + diags[0].path +
                                                   "] " + diags[0].message);
        }
    }
    std::lock_guard lock(control_mu_);
    for (auto& def : defs) {
        stored_[def.name] = std::move(def);
    }
}

void Kernel::load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot read config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    load_config_text(buf.str());
}

const StackDefinition* Kernel::stored_definition(std::string_view name) const {
    std::lock_guard lock(control_mu_);
    auto it = stored_.find(name);
    return it == stored_.end() ? nullptr : &it->second;
}

std::vector<std::string> Kernel::stored_names() const {
    std::lock_guard lock(control_mu_);
    std::vector<std::string> out;
    out.reserve(stored_.size());
    for (const auto& [name, def] : stored_) out.push_back(name);
    return out;
}

std::string Kernel::stack_key_for(const StackDefinition& def, const std::string& alias) const {
    if (!alias.empty()) return alias;
    bool name_in_use = false;
    for (const auto& [h, rs] : stacks_) {
        if (rs->assembly().stack_key() == def.name) {
            name_in_use = true;
            break;
        }
    }
    if (!name_in_use) return def.name;
    return def.name + "#" + std::to_string(next_handle_);
}

Handle Kernel::start_locked(const StackDefinition& def, const std::string& alias) {
    if (!alias.empty() && !is_identifier(alias)) {
        throw Error(ErrorCode::Validation, "alias '" + alias + "' is not an identifier");
    }
    std::string stack_key;
    {
        std::lock_guard rlock(registry_mu_);
        if (!alias.empty() && aliases_.count(alias)) {
            throw Error(ErrorCode::AliasCollision, "alias '" + alias + "' is already in use");
        }
        stack_key = stack_key_for(def, alias);
    }
    InstantiateEnv env;
    env.sensors = &sensors_;
    env.stack_key = stack_key;
    env.kernel = this;
    auto assembly = StackAssembly::instantiate(def, registry_, std::move(env));
    assembly->start_all();

    std::shared_ptr<detail::RunningStack> rs;
    Handle handle = 0;
    {
        std::lock_guard rlock(registry_mu_);
        if (!alias.empty() && aliases_.count(alias)) {
            throw Error(ErrorCode::AliasCollision, "alias '" + alias + "' is already in use");
        }
        handle = next_handle_++;
        rs = std::make_shared<detail::RunningStack>(*this, std::move(assembly), handle, def.name,
                                                    alias, mailbox_capacity_, mailbox_policy_);
        stacks_.emplace(handle, rs);
        if (!alias.empty()) aliases_.emplace(alias, handle);
    }
    rs->launch();
    return handle;
}

Handle Kernel::start_stack(const std::string& name, const std::string& alias) {
    std::lock_guard lock(control_mu_);
    auto it = stored_.find(name);
    if (it == stored_.end()) {
        throw Error(ErrorCode::UnknownStack, "no stored definition named '" + name + "'");
    }
    StackDefinition def = it->second;  // copy: the active representation is detached
    return start_locked(def, alias);
}

Handle Kernel::start_stack(const StackDefinition& def, const std::string& alias) {
    std::lock_guard lock(control_mu_);
    return start_locked(def, alias);
}

void Kernel::stop_stack(Handle handle) {
    std::lock_guard lock(control_mu_);
    std::shared_ptr<detail::RunningStack> rs;
    {
        std::lock_guard rlock(registry_mu_);
        auto it = stacks_.find(handle);
        if (it == stacks_.end()) {
            throw Error(ErrorCode::UnknownHandle, "unknown handle " + std::to_string(handle));
        }
        rs = it->second;
        stacks_.erase(it);
        if (!rs->alias().empty()) aliases_.erase(rs->alias());
    }
    rs->request_stop();
    rs->finish_stop();
}

void Kernel::stop_all() {
    std::vector<Handle> handles;
    {
        std::lock_guard rlock(registry_mu_);
        for (const auto& [h, rs] : stacks_) handles.push_back(h);
    }
    for (Handle h : handles) {
        try {
            stop_stack(h);
        } catch (const Error&) {
        }
    }
}

std::vector<StackRow> Kernel::list_stacks() const {
    std::lock_guard rlock(registry_mu_);
    std::vector<StackRow> rows;
    rows.reserve(stacks_.size());
    for (const auto& [h, rs] : stacks_) {
        rows.push_back(StackRow{h, rs->name(), rs->alias(), rs->state()});
    }
    return rows;
}

std::shared_ptr<detail::RunningStack> Kernel::find_stack(std::string_view target) const {
    std::lock_guard rlock(registry_mu_);
    auto ait = aliases_.find(target);
    if (ait != aliases_.end()) {
        auto sit = stacks_.find(ait->second);
        if (sit != stacks_.end()) return sit->second;
    }
    // Name: several instances may coexist; pick the oldest for determinism.
    for (const auto& [h, rs] : stacks_) {
        if (rs->name() == target) return rs;
    }
    if (!target.empty() && target.find_first_not_of("0123456789") == std::string_view::npos) {
        Handle h = std::stoull(std::string(target));
        auto sit = stacks_.find(h);
        if (sit != stacks_.end()) return sit->second;
    }
    throw Error(ErrorCode::UnknownStack, "no running stack matches '" + std::string(target) + "'");
}

std::shared_ptr<detail::RunningStack> Kernel::find_stack(Handle handle) const {
    std::lock_guard rlock(registry_mu_);
    auto it = stacks_.find(handle);
    if (it == stacks_.end()) {
        throw Error(ErrorCode::UnknownHandle, "unknown handle " + std::to_string(handle));
    }
    return it->second;
}

Handle Kernel::resolve_handle(std::string_view target) const {
    return find_stack(target)->handle();
}

void Kernel::send_to_stack(std::string_view target, EventPtr e, SendMode mode) {
    auto rs = find_stack(target);
    if (mode == SendMode::Sync) {
        rs->deliver_sync(std::move(e));
    } else {
        rs->deliver_async(std::move(e));
    }
}

namespace {

// Stored-scope path walk. The single demux branch template is addressed as
// branch 0 (keys only exist on live instances).
const ComponentNode* resolve_stored_node(const StackDefinition& def,
                                         const std::vector<PathSegment>& segments) {
    const std::vector<ComponentNode>* chain = &def.body;
    for (size_t s = 0; s + 1 < segments.size(); ++s) {
        const PathSegment& seg = segments[s];
        if (seg.kind == PathSegment::Kind::DemuxBranch) {
            throw Error(ErrorCode::BadPath,
                        "demux keys address live branches; use stored branch .0");
        }
        if (seg.kind != PathSegment::Kind::AltBranch || seg.index >= chain->size()) {
            throw Error(ErrorCode::BadPath, "bad stored path segment");
        }
        const ComponentNode& node = (*chain)[seg.index];
        if (node.branches.empty() || seg.branch >= node.branches.size()) {
            throw Error(ErrorCode::BadPath,
                        "component " + std::to_string(seg.index) + " has no branch " +
                            std::to_string(seg.branch));
        }
        chain = &node.branches[seg.branch];
    }
    const PathSegment& last = segments.back();
    if (last.kind != PathSegment::Kind::Component || last.index >= chain->size()) {
        throw Error(ErrorCode::UnknownComponent, "component index out of range in stored path");
    }
    return &(*chain)[last.index];
}

} // namespace

ScalarValue Kernel::get_option(Scope scope, const ComponentPath& path, const std::string& option) {
    if (scope == Scope::Active) {
        auto rs = find_stack(std::string_view(path.stack));
        ComponentInstance* inst = rs->assembly().resolve(path.segments);
        return inst->options().get(option);
    }
    std::lock_guard lock(control_mu_);
    auto it = stored_.find(path.stack);
    if (it == stored_.end()) {
        throw Error(ErrorCode::UnknownStack, "no stored definition named '" + path.stack + "'");
    }
    const ComponentNode* node = resolve_stored_node(it->second, path.segments);
    for (const auto& binding : node->options) {
        if (binding.name == option && binding.value) return *binding.value;
    }
    if (const ComponentContract* contract = registry_.contract(node->type_id)) {
        if (const OptionDecl* decl = contract->find_option(option)) {
            if (decl->default_value()) return *decl->default_value();
            throw Error(ErrorCode::UnknownOption,
                        "option $" + option + " has no stored value and no default");
        }
    }
    throw Error(ErrorCode::UnknownOption,
                "component '@" + node->type_id + "' has no option $" + option);
}

void Kernel::set_option(Scope scope, const ComponentPath& path, const std::string& option,
                        const ScalarValue& value) {
    if (scope == Scope::Active) {
        auto rs = find_stack(std::string_view(path.stack));
        ComponentInstance* inst = rs->assembly().resolve(path.segments);
        inst->set_option(option, value);
        return;
    }
    std::lock_guard lock(control_mu_);
    auto it = stored_.find(path.stack);
    if (it == stored_.end()) {
        throw Error(ErrorCode::UnknownStack, "no stored definition named '" + path.stack + "'");
    }
    ComponentNode* node = const_cast<ComponentNode*>(resolve_stored_node(it->second, path.segments));
    const ComponentContract* contract = registry_.contract(node->type_id);
    if (!contract) {
        throw Error(ErrorCode::UnknownType, "unknown component type '@" + node->type_id + "'");
    }
    const OptionDecl* decl = contract->find_option(option);
    if (!decl) {
        throw Error(ErrorCode::UnknownOption,
                    "component '@" + node->type_id + "' has no option $" + option);
    }
    // Stored definitions keep the raw literal; hooks run at instantiation.
    if (!decl->has_hook() && value.kind() != decl->kind()) {
        throw Error(ErrorCode::KindMismatch, "option $" + option + " expects " +
                                                 to_string(decl->kind()) + ", got " +
                                                 to_string(value.kind()));
    }
    for (auto& binding : node->options) {
        if (binding.name == option) {
            binding.value = value;
            return;
        }
    }
    node->options.push_back(OptionBinding{option, "", value});
}

void Kernel::reconfigure(Handle handle, const StackDefinition& new_def) {
    apply(*this, handle, new_def);
}

void Kernel::with_stack_parked(Handle handle,
                               const std::function<void(std::unique_ptr<StackAssembly>&)>& fn) {
    std::lock_guard lock(control_mu_);
    auto rs = find_stack(handle);
    rs->park();
    try {
        fn(rs->assembly_slot());
    } catch (...) {
        rs->reset_producer();
        rs->unpark();
        throw;
    }
    rs->reset_producer();
    rs->unpark();
}

const StackDefinition& Kernel::active_definition(Handle handle) const {
    return find_stack(handle)->assembly().definition();
}

void Kernel::set_mailbox_defaults(size_t capacity, OverflowPolicy policy) {
    std::lock_guard lock(control_mu_);
    mailbox_capacity_ = capacity;
    mailbox_policy_ = policy;
}

} // namespace pandora
