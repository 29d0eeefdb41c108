#include "pandora/reconfig.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace pandora {

namespace {

struct FlatNode {
    const ComponentNode* def = nullptr;
    std::string path;            // "1.0/3"-style, definition-relative
    const void* container = nullptr;
    int match = -1;              // index into the other side's flat list
};

struct FlatSide {
    std::vector<FlatNode> nodes;
    std::map<const void*, std::vector<int>> by_container;  // flat indices, in order
};

void flatten(const std::vector<ComponentNode>& chain, const std::string& prefix, FlatSide& out) {
    for (size_t i = 0; i < chain.size(); ++i) {
        const ComponentNode& node = chain[i];
        std::string path = prefix + std::to_string(i);
        int flat = static_cast<int>(out.nodes.size());
        out.nodes.push_back(FlatNode{&node, path, &chain});
        out.by_container[&chain].push_back(flat);
        for (size_t b = 0; b < node.branches.size(); ++b) {
            flatten(node.branches[b], path + "." + std::to_string(b) + "/", out);
        }
    }
}

NodeRef make_ref(const FlatNode& n) {
    return NodeRef{n.path, n.def->type_id, n.def->alias};
}

std::string node_label(const FlatSide& side, int flat, bool created) {
    const FlatNode& n = side.nodes[flat];
    std::string tag = n.def->alias.empty() ? n.def->type_id : n.def->alias;
    return (created ? "+" : "") + n.path + ":" + tag;
}

// Static successor edges implied by the wiring rule (branch tails join at
// the component following the block).
void collect_edges(const std::vector<ComponentNode>& chain,
                   const std::map<const ComponentNode*, std::string>& labels,
                   const std::string& join_label,
                   std::set<std::pair<std::string, std::string>>& edges) {
    for (size_t i = 0; i < chain.size(); ++i) {
        const ComponentNode& node = chain[i];
        const std::string& me = labels.at(&node);
        std::string next = (i + 1 < chain.size()) ? labels.at(&chain[i + 1]) : join_label;
        if (node.shape == NodeShape::Simple) {
            if (!next.empty()) edges.emplace(me, next);
        } else {
            for (const auto& branch : node.branches) {
                edges.emplace(me, labels.at(&branch.front()));
                collect_edges(branch, labels, next, edges);
            }
        }
    }
}

std::map<std::string, ScalarValue> bound_values(const ComponentNode& node) {
    std::map<std::string, ScalarValue> out;
    for (const auto& b : node.options) {
        if (b.value) out.insert_or_assign(b.name, *b.value);
    }
    return out;
}

} // namespace

ReconfigPlan diff(const StackDefinition& old_def, const StackDefinition& new_def) {
    FlatSide olds, news;
    flatten(old_def.body, "", olds);
    flatten(new_def.body, "", news);

    // Rule 1: identical alias + type, anywhere.
    std::map<std::string, int> old_by_alias;
    for (size_t i = 0; i < olds.nodes.size(); ++i) {
        const auto& alias = olds.nodes[i].def->alias;
        if (!alias.empty()) old_by_alias.emplace(alias, static_cast<int>(i));
    }
    for (size_t j = 0; j < news.nodes.size(); ++j) {
        const auto& alias = news.nodes[j].def->alias;
        if (alias.empty()) continue;
        auto it = old_by_alias.find(alias);
        if (it == old_by_alias.end()) continue;
        FlatNode& o = olds.nodes[it->second];
        if (o.match >= 0 || o.def->type_id != news.nodes[j].def->type_id) continue;
        o.match = static_cast<int>(j);
        news.nodes[j].match = it->second;
    }

    // Rule 2: per paired container, match remaining unaliased nodes by type
    // and occurrence order. Containers pair at the root and below matched
    // nodes; repeat until no new container pair appears.
    std::set<std::pair<const void*, const void*>> processed;
    std::deque<std::pair<const void*, const void*>> work;
    work.emplace_back(&old_def.body, &new_def.body);

    auto positional_match = [&](const void* co, const void* cn) {
        std::map<std::string, std::vector<int>> old_rest, new_rest;
        auto oit = olds.by_container.find(co);
        auto nit = news.by_container.find(cn);
        if (oit != olds.by_container.end()) {
            for (int idx : oit->second) {
                const FlatNode& n = olds.nodes[idx];
                if (n.match < 0 && n.def->alias.empty()) old_rest[n.def->type_id].push_back(idx);
            }
        }
        if (nit != news.by_container.end()) {
            for (int idx : nit->second) {
                const FlatNode& n = news.nodes[idx];
                if (n.match < 0 && n.def->alias.empty()) new_rest[n.def->type_id].push_back(idx);
            }
        }
        for (auto& [type, old_list] : old_rest) {
            auto jt = new_rest.find(type);
            if (jt == new_rest.end()) continue;
            size_t n = std::min(old_list.size(), jt->second.size());
            for (size_t k = 0; k < n; ++k) {
                olds.nodes[old_list[k]].match = jt->second[k];
                news.nodes[jt->second[k]].match = old_list[k];
            }
        }
    };

    bool changed = true;
    while (changed) {
        while (!work.empty()) {
            auto [co, cn] = work.front();
            work.pop_front();
            if (!processed.emplace(co, cn).second) continue;
            positional_match(co, cn);
        }
        changed = false;
        for (const auto& o : olds.nodes) {
            if (o.match < 0) continue;
            const FlatNode& n = news.nodes[o.match];
            size_t branches = std::min(o.def->branches.size(), n.def->branches.size());
            for (size_t b = 0; b < branches; ++b) {
                auto key = std::make_pair<const void*, const void*>(&o.def->branches[b],
                                                                    &n.def->branches[b]);
                if (!processed.count(key)) {
                    work.push_back(key);
                    changed = true;
                }
            }
        }
    }

    ReconfigPlan plan;
    for (const auto& o : olds.nodes) {
        if (o.match < 0) {
            plan.destroy.push_back(make_ref(o));
            continue;
        }
        const FlatNode& n = news.nodes[o.match];
        ReconfigPlan::Match m{make_ref(o), make_ref(n), false};
        if (o.def->shape == NodeShape::Demux && n.def->shape == NodeShape::Demux) {
            m.template_changed = o.def->branches.front() != n.def->branches.front();
        }
        plan.keep.push_back(std::move(m));

        auto old_vals = bound_values(*o.def);
        for (const auto& binding : n.def->options) {
            if (!binding.value) continue;
            auto it = old_vals.find(binding.name);
            if (it == old_vals.end() || !(it->second == *binding.value)) {
                plan.option_updates.push_back({make_ref(o), binding});
            }
        }
    }
    for (const auto& n : news.nodes) {
        if (n.match < 0) plan.create.push_back(make_ref(n));
    }

    // Link changes: edges of the new graph that the old graph lacked, with
    // surviving nodes labelled by their old-side address.
    std::map<const ComponentNode*, std::string> old_labels, new_labels;
    for (size_t i = 0; i < olds.nodes.size(); ++i) {
        old_labels[olds.nodes[i].def] = node_label(olds, static_cast<int>(i), false);
    }
    for (size_t j = 0; j < news.nodes.size(); ++j) {
        const FlatNode& n = news.nodes[j];
        new_labels[n.def] = (n.match >= 0) ? node_label(olds, n.match, false)
                                           : node_label(news, static_cast<int>(j), true);
    }
    std::set<std::pair<std::string, std::string>> old_edges, new_edges;
    collect_edges(old_def.body, old_labels, "", old_edges);
    collect_edges(new_def.body, new_labels, "", new_edges);
    for (const auto& e : new_edges) {
        if (!old_edges.count(e)) plan.rewire.push_back(e.first + " -> " + e.second);
    }
    return plan;
}

// --- live application ---

class ReconfigSurgeon {
public:
    static void rebuild(Kernel& kernel, std::unique_ptr<StackAssembly>& slot,
                        const StackDefinition& new_def, const ReconfigPlan& plan);
};

namespace {

using Node = StackAssembly::Node;
using Chain = StackAssembly::Chain;

void index_old_nodes(Chain& chain, const std::string& prefix,
                     std::map<std::string, Node*>& out) {
    for (size_t i = 0; i < chain.size(); ++i) {
        Node& node = *chain[i];
        std::string path = prefix + std::to_string(i);
        out.emplace(path, &node);
        for (size_t b = 0; b < node.alt_branches.size(); ++b) {
            index_old_nodes(node.alt_branches[b], path + "." + std::to_string(b) + "/", out);
        }
        // Demux branch instances are handled wholesale through their node.
    }
}

void collect_chain_instances(const Chain& chain, std::vector<ComponentInstance*>& out) {
    for (const auto& node : chain) {
        out.push_back(node->inst);
        for (const auto& branch : node->alt_branches) collect_chain_instances(branch, out);
        for (const auto& [key, branch] : node->demux_branches) {
            collect_chain_instances(branch, out);
        }
    }
}

} // namespace

void ReconfigSurgeon::rebuild(Kernel& kernel, std::unique_ptr<StackAssembly>& slot,
                              const StackDefinition& new_def, const ReconfigPlan& plan) {
    (void)kernel;
    StackAssembly& a = *slot;

    std::map<std::string, Node*> old_nodes;
    index_old_nodes(a.body_, "", old_nodes);

    std::map<std::string, std::string> new_to_old;
    std::map<std::string, const ReconfigPlan::Match*> match_by_old;
    for (const auto& m : plan.keep) {
        new_to_old.emplace(m.new_node.path, m.old_node.path);
        match_by_old.emplace(m.old_node.path, &m);
    }

    // Phase 1: construct, bind and start every created component. Failures
    // here unwind cleanly without touching the running graph.
    std::map<std::string, int, std::less<>> key_map = a.sensor_keys_used_;
    auto claim_key = [&key_map](const std::string& base) {
        int& n = key_map[base];
        ++n;
        return n == 1 ? base : base + "_" + std::to_string(n);
    };

    struct Staged {
        std::unique_ptr<ComponentInstance> inst;
    };
    std::map<std::string, Staged> staged;  // new path -> instance

    struct StageWalker {
        StackAssembly& a;
        std::map<std::string, std::string>& new_to_old;
        std::map<std::string, Staged>& staged;
        const std::function<std::string(const std::string&)>& claim;

        void walk(const std::vector<ComponentNode>& defs, const std::string& prefix) {
            for (size_t i = 0; i < defs.size(); ++i) {
                const ComponentNode& def = defs[i];
                std::string path = prefix + std::to_string(i);
                if (!new_to_old.count(path)) {
                    const ComponentContract* contract = a.registry_->contract(def.type_id);
                    if (!contract) {
                        throw Error(ErrorCode::UnknownType,
                                    path + ": unknown component type '@" + def.type_id + "'");
                    }
                    ComponentPtr comp;
                    try {
                        comp = a.registry_->construct(def.type_id);
                    } catch (const Error&) {
                        throw;
                    } catch (const std::exception& e) {
                        throw Error(ErrorCode::ConstructorFailure,
                                    path + ": constructor of '@" + def.type_id +
                                        "' failed: " + e.what());
                    }
                    auto inst = std::make_unique<ComponentInstance>(
                        contract, std::move(comp), def.alias,
                        a.sensor_stack_key_ + "/" + path);
                    inst->set_kernel(a.env_.kernel);
                    inst->attach_sensors(a.env_.sensors,
                                         a.sensor_stack_key_ + "." +
                                             claim(def.alias.empty() ? def.type_id : def.alias));
                    for (const auto& binding : def.options) {
                        if (binding.value) inst->set_option(binding.name, *binding.value);
                    }
                    if (a.started_) inst->start();
                    staged.emplace(path, Staged{std::move(inst)});
                }
                for (size_t b = 0; b < def.branches.size(); ++b) {
                    walk(def.branches[b], path + "." + std::to_string(b) + "/");
                }
            }
        }
    };

    std::function<std::string(const std::string&)> claim_fn = claim_key;
    StageWalker stage{a, new_to_old, staged, claim_fn};
    try {
        stage.walk(new_def.body, "");
    } catch (...) {
        // Stop what was started, newest first, then let the map unwind.
        for (auto it = staged.rbegin(); it != staged.rend(); ++it) {
            if (it->second.inst->started()) it->second.inst->stop();
        }
        throw;
    }

    // Phase 2: assemble the new graph. Nothing below throws.
    std::unique_ptr<StackAssembly> fresh(new StackAssembly());
    StackAssembly& b = *fresh;
    b.def_ = new_def;
    b.env_ = a.env_;
    b.registry_ = a.registry_;
    b.sensor_stack_key_ = a.sensor_stack_key_;
    b.sensor_keys_used_ = std::move(key_map);
    b.started_ = a.started_;

    auto take_owned = [&a](ComponentInstance* raw) -> std::unique_ptr<ComponentInstance> {
        for (auto& slot_ptr : a.owned_) {
            if (slot_ptr.get() == raw) return std::move(slot_ptr);
        }
        contract_violation("kept instance is not owned by the old assembly");
    };

    struct BuildWalker {
        StackAssembly& a;
        StackAssembly& b;
        std::map<std::string, Node*>& old_nodes;
        std::map<std::string, std::string>& new_to_old;
        std::map<std::string, const ReconfigPlan::Match*>& match_by_old;
        std::map<std::string, Staged>& staged;
        const std::function<std::unique_ptr<ComponentInstance>(ComponentInstance*)> take;

        Chain walk(const std::vector<ComponentNode>& defs, const std::string& prefix) {
            Chain chain;
            chain.reserve(defs.size());
            for (size_t i = 0; i < defs.size(); ++i) {
                const ComponentNode& def = defs[i];
                std::string path = prefix + std::to_string(i);
                auto node = std::make_unique<Node>();
                node->def = def;

                auto kept = new_to_old.find(path);
                if (kept != new_to_old.end()) {
                    Node* old_node = old_nodes.at(kept->second);
                    b.owned_.push_back(take(old_node->inst));
                    node->inst = old_node->inst;
                    const ReconfigPlan::Match* m = match_by_old.at(kept->second);
                    if (def.shape == NodeShape::Demux && !m->template_changed) {
                        node->demux_branches = std::move(old_node->demux_branches);
                        for (const auto& [key, branch] : node->demux_branches) {
                            std::vector<ComponentInstance*> insts;
                            collect_chain_instances(branch, insts);
                            for (auto* inst : insts) b.owned_.push_back(take(inst));
                        }
                    } else if (def.shape == NodeShape::Demux) {
                        node->inst->reset_demux_routes();
                    }
                } else {
                    auto& st = staged.at(path);
                    node->inst = st.inst.get();
                    b.owned_.push_back(std::move(st.inst));
                }

                if (def.shape == NodeShape::Alternative) {
                    for (size_t br = 0; br < def.branches.size(); ++br) {
                        node->alt_branches.push_back(
                            walk(def.branches[br], path + "." + std::to_string(br) + "/"));
                    }
                }
                chain.push_back(std::move(node));
            }
            return chain;
        }
    };

    BuildWalker build{a, b, old_nodes, new_to_old, match_by_old, staged, take_owned};
    b.body_ = build.walk(new_def.body, "");

    // Full wiring pass: linear links, alternative heads, fresh demux makers,
    // and existing demux branches rewired onto the new joins.
    struct WireWalker {
        StackAssembly& b;
        std::string stack_prefix;

        void wire(Chain& chain, ComponentInstance* join, const std::string& prefix) {
            for (size_t i = 0; i < chain.size(); ++i) {
                Node& node = *chain[i];
                ComponentInstance* next = (i + 1 < chain.size()) ? chain[i + 1]->inst : join;
                std::string here = prefix + std::to_string(i);
                node.inst->set_path(stack_prefix + here);
                switch (node.def.shape) {
                case NodeShape::Simple:
                    node.inst->wire_linear(next);
                    break;
                case NodeShape::Alternative: {
                    std::vector<ComponentInstance*> heads;
                    heads.reserve(node.alt_branches.size());
                    for (size_t br = 0; br < node.alt_branches.size(); ++br) {
                        heads.push_back(node.alt_branches[br].front()->inst);
                        wire(node.alt_branches[br], next,
                             here + "." + std::to_string(br) + "/");
                    }
                    node.inst->wire_alternative(std::move(heads));
                    break;
                }
                case NodeShape::Demux: {
                    node.inst->wire_demux(
                        b.make_demux_maker(&node, next, stack_prefix + here));
                    for (auto& [key, branch] : node.demux_branches) {
                        wire(branch, next, here + "{" + key + "}/");
                        node.inst->restore_demux_route(key, branch.front()->inst);
                    }
                    break;
                }
                }
            }
        }
    };
    WireWalker wirer{b, b.sensor_stack_key_ + "/"};
    wirer.wire(b.body_, nullptr, "");

    // Phase 3: option updates on kept instances (hooks pre-validated by the
    // caller), then destruction of everything the new graph does not use.
    for (const auto& update : plan.option_updates) {
        if (!update.binding.value) continue;
        Node* old_node = old_nodes.count(update.node.path) ? old_nodes.at(update.node.path)
                                                           : nullptr;
        if (old_node && old_node->inst) {
            old_node->inst->set_option(update.binding.name, *update.binding.value);
        }
    }

    a.body_.clear();  // node shells; instances are owned separately
    for (auto it = a.owned_.rbegin(); it != a.owned_.rend(); ++it) {
        if (*it && (*it)->started()) (*it)->stop();
    }
    while (!a.owned_.empty()) a.owned_.pop_back();

    slot = std::move(fresh);
}

void apply(Kernel& kernel, Handle handle, const StackDefinition& new_def) {
    auto diags = validate(new_def, kernel.registry());
    if (!diags.empty()) {
        throw Error(ErrorCode::Validation,
                    "new definition: [" + diags[0].path + "] " + diags[0].message);
    }
    if (new_def.body.empty()) {
        throw Error(ErrorCode::EmptyStack, "new definition is empty: not runnable");
    }

    const StackDefinition old_def = kernel.active_definition(handle);
    ReconfigPlan plan = diff(old_def, new_def);

    // Dry-run option hooks so phase 3 below cannot fail: hooks are pure.
    for (const auto& update : plan.option_updates) {
        if (!update.binding.value) continue;
        const ComponentContract* contract = nullptr;
        for (const auto& m : plan.keep) {
            if (m.old_node.path == update.node.path) {
                contract = kernel.registry().contract(m.new_node.type_id);
                break;
            }
        }
        if (!contract) continue;
        if (const OptionDecl* decl = contract->find_option(update.binding.name)) {
            decl->apply(*update.binding.value, update.node.path);
        }
    }

    kernel.with_stack_parked(handle, [&](std::unique_ptr<StackAssembly>& slot) {
        ReconfigSurgeon::rebuild(kernel, slot, new_def, plan);
    });
}

} // namespace pandora
