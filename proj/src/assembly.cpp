#include "pandora/assembly.hpp"

#include <algorithm>

namespace pandora {

namespace {
std::string first_diagnostic_message(const std::vector<Diagnostic>& diags) {
    std::string msg = "definition is not valid";
    for (const auto& d : diags) {
        msg += "; [" + d.path + "] " + d.message;
    }
    return msg;
}
} // namespace

// Builds instances and wiring for one chain of definition nodes. Also used
// at routing time to materialize demux branches, under the structure lock.
struct StackAssembly::Builder {
    StackAssembly& owner;
    const FactoryRegistry& registry;
    std::vector<ComponentInstance*> created;  // this builder's additions, in order

    ComponentInstance* create_instance(const ComponentNode& def, const std::string& path_hint,
                                       const std::string& key_suffix) {
        const ComponentContract* contract = registry.contract(def.type_id);
        if (!contract) {
            throw Error(ErrorCode::UnknownType,
                        path_hint + ": unknown component type '@" + def.type_id + "'");
        }
        ComponentPtr comp;
        try {
            comp = registry.construct(def.type_id);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(ErrorCode::ConstructorFailure,
                        path_hint + ": constructor of '@" + def.type_id + "' failed: " + e.what());
        }
        auto inst = std::make_unique<ComponentInstance>(contract, std::move(comp), def.alias,
                                                        path_hint);
        inst->set_kernel(owner.env_.kernel);
        inst->attach_sensors(owner.env_.sensors,
                             owner.sensor_stack_key_ + "." +
                                 owner.claim_sensor_key(def.alias.empty() ? def.type_id
                                                                          : def.alias,
                                                        key_suffix));
        for (const auto& binding : def.options) {
            if (binding.value) inst->set_option(binding.name, *binding.value);
        }
        ComponentInstance* raw = inst.get();
        owner.owned_.push_back(std::move(inst));
        created.push_back(raw);
        return raw;
    }

    Chain build_chain(const std::vector<ComponentNode>& defs, const std::string& path_prefix,
                      const std::string& key_suffix) {
        Chain chain;
        chain.reserve(defs.size());
        for (size_t i = 0; i < defs.size(); ++i) {
            auto node = std::make_unique<Node>();
            node->def = defs[i];
            std::string here = path_prefix + std::to_string(i);
            node->inst = create_instance(node->def, here, key_suffix);
            if (node->def.shape == NodeShape::Alternative) {
                for (size_t b = 0; b < node->def.branches.size(); ++b) {
                    node->alt_branches.push_back(build_chain(
                        node->def.branches[b], here + "." + std::to_string(b) + "/", key_suffix));
                }
            }
            chain.push_back(std::move(node));
        }
        return chain;
    }

    void wire_chain(Chain& chain, ComponentInstance* join, const std::string& path_prefix) {
        for (size_t i = 0; i < chain.size(); ++i) {
            Node& node = *chain[i];
            ComponentInstance* next = (i + 1 < chain.size()) ? chain[i + 1]->inst : join;
            switch (node.def.shape) {
            case NodeShape::Simple:
                node.inst->wire_linear(next);
                break;
            case NodeShape::Alternative: {
                std::vector<ComponentInstance*> heads;
                heads.reserve(node.alt_branches.size());
                for (auto& branch : node.alt_branches) {
                    heads.push_back(branch.front()->inst);
                    wire_chain(branch, next, path_prefix);
                }
                node.inst->wire_alternative(std::move(heads));
                break;
            }
            case NodeShape::Demux: {
                node.inst->wire_demux(owner.make_demux_maker(
                    &node, next, path_prefix + std::to_string(i)));
                break;
            }
            }
        }
    }
};

ComponentInstance::DemuxMaker StackAssembly::make_demux_maker(Node* node, ComponentInstance* join,
                                                              std::string branch_path_base) {
    return [this, node, join, base = std::move(branch_path_base)](
               const std::string& key) -> ComponentInstance* {
        std::lock_guard lock(structure_mu_);
        Builder builder{*this, *registry_, {}};
        std::string prefix = base + "{" + key + "}/";
        Chain chain;
        try {
            chain = builder.build_chain(node->def.branches.front(), prefix, "{" + key + "}");
            builder.wire_chain(chain, join, prefix);
            if (started_) {
                for (auto* inst : builder.created) inst->start();
            }
        } catch (...) {
            // Unwind this builder's creations, newest first.
            for (auto it = builder.created.rbegin(); it != builder.created.rend(); ++it) {
                (void)it;
                owned_.pop_back();
            }
            throw;
        }
        ComponentInstance* head = chain.front()->inst;
        node->demux_branches.emplace(key, std::move(chain));
        return head;
    };
}

std::string StackAssembly::claim_sensor_key(const std::string& base,
                                            const std::string& key_suffix) {
    std::string candidate = base + key_suffix;
    int& n = sensor_keys_used_[candidate];
    ++n;
    if (n == 1) return candidate;
    return candidate + "_" + std::to_string(n);
}

std::unique_ptr<StackAssembly> StackAssembly::instantiate(const StackDefinition& def,
                                                          const FactoryRegistry& registry,
                                                          InstantiateEnv env) {
    auto diags = validate(def, registry);
    if (!diags.empty()) {
        throw Error(ErrorCode::Validation, first_diagnostic_message(diags));
    }
    if (def.body.empty()) {
        throw Error(ErrorCode::EmptyStack,
                    "stack '" + def.name + "' is empty: not runnable (no initial component)");
    }
    std::unique_ptr<StackAssembly> out(new StackAssembly());
    out->def_ = def;
    out->env_ = std::move(env);
    out->registry_ = &registry;
    out->sensor_stack_key_ = out->env_.stack_key.empty() ? def.name : out->env_.stack_key;
    std::string prefix = out->sensor_stack_key_ + "/";
    Builder builder{*out, registry, {}};
    try {
        out->body_ = builder.build_chain(def.body, prefix, "");
        builder.wire_chain(out->body_, nullptr, prefix);
    } catch (...) {
        while (!out->owned_.empty()) out->owned_.pop_back();
        throw;
    }
    out->static_count_ = out->owned_.size();
    return out;
}

StackAssembly::~StackAssembly() {
    body_.clear();
    // Reverse creation order.
    while (!owned_.empty()) owned_.pop_back();
}

ComponentInstance* StackAssembly::initial() const {
    PANDORA_CHECK(!body_.empty(), "stack has no initial component");
    return body_.front()->inst;
}

void StackAssembly::inject(const EventPtr& e) {
    PANDORA_CHECK(!in_cascade_,
                  "cascade re-entry on stack '" + sensor_stack_key_ + "': a component must not "
                  "start a new cascade while one is in flight");
    in_cascade_ = true;
    struct Reset {
        bool* flag;
        ~Reset() { *flag = false; }
    } reset{&in_cascade_};
    initial()->deliver(e);
}

void StackAssembly::start_all() {
    size_t started = 0;
    try {
        for (auto& inst : owned_) {
            inst->start();
            ++started;
        }
    } catch (...) {
        for (size_t i = started; i > 0; --i) owned_[i - 1]->stop();
        throw;
    }
    started_ = true;
}

void StackAssembly::stop_all() {
    started_ = false;
    for (auto it = owned_.rbegin(); it != owned_.rend(); ++it) (*it)->stop();
}

ComponentInstance* StackAssembly::resolve(const std::vector<PathSegment>& segments) const {
    if (segments.empty()) {
        throw Error(ErrorCode::BadPath, "component path has no segments");
    }
    std::lock_guard lock(structure_mu_);
    const Chain* chain = &body_;
    for (size_t s = 0; s + 1 < segments.size(); ++s) {
        const PathSegment& seg = segments[s];
        if (seg.kind == PathSegment::Kind::Component) {
            throw Error(ErrorCode::BadPath,
                        "intermediate path segments must select a branch (i.b or i{key})");
        }
        if (seg.index >= chain->size()) {
            throw Error(ErrorCode::UnknownComponent,
                        "component index " + std::to_string(seg.index) + " out of range");
        }
        const Node& node = *(*chain)[seg.index];
        if (seg.kind == PathSegment::Kind::AltBranch) {
            if (node.def.shape != NodeShape::Alternative) {
                throw Error(ErrorCode::BadPath,
                            "component " + std::to_string(seg.index) + " has no numbered branches");
            }
            if (seg.branch >= node.alt_branches.size()) {
                throw Error(ErrorCode::BadPath,
                            "branch " + std::to_string(seg.branch) + " out of range");
            }
            chain = &node.alt_branches[seg.branch];
        } else {
            if (node.def.shape != NodeShape::Demux) {
                throw Error(ErrorCode::BadPath,
                            "component " + std::to_string(seg.index) + " has no demux branches");
            }
            auto it = node.demux_branches.find(seg.key);
            if (it == node.demux_branches.end()) {
                throw Error(ErrorCode::UnknownComponent,
                            "no demux branch for key '" + seg.key + "'");
            }
            chain = &it->second;
        }
    }
    const PathSegment& last = segments.back();
    if (last.kind != PathSegment::Kind::Component) {
        throw Error(ErrorCode::BadPath, "path must end with a component index");
    }
    if (last.index >= chain->size()) {
        throw Error(ErrorCode::UnknownComponent,
                    "component index " + std::to_string(last.index) + " out of range");
    }
    return (*chain)[last.index]->inst;
}

size_t StackAssembly::live_instance_count() const {
    std::lock_guard lock(structure_mu_);
    return owned_.size();
}

} // namespace pandora
