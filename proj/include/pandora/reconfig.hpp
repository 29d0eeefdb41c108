#pragma once

#include "pandora/adl.hpp"
#include "pandora/kernel.hpp"

#include <string>
#include <vector>

namespace pandora {

// Definition-relative node address: "2", "1.0/3", "0{udp}/1"-style strings
// (demux keys never appear in plans; plans are computed on definitions).
struct NodeRef {
    std::string path;
    std::string type_id;
    std::string alias;  // empty = none

    bool operator==(const NodeRef&) const = default;
};

// Diff between an old and a new definition: which instances survive, which
// are created and destroyed, which links change and which options are
// re-bound on survivors.
struct ReconfigPlan {
    struct Match {
        NodeRef old_node;
        NodeRef new_node;
        bool template_changed = false;  // demux nodes: branch instances rebuilt
    };
    struct OptionUpdate {
        NodeRef node;  // old-side reference of a kept instance
        OptionBinding binding;
    };

    std::vector<Match> keep;
    std::vector<NodeRef> create;      // new-side
    std::vector<NodeRef> destroy;     // old-side
    std::vector<std::string> rewire;  // "from -> to" link descriptions
    std::vector<OptionUpdate> option_updates;
};

// Deterministic matching: first by identical alias + type anywhere, then by
// (type, occurrence order) among unaliased siblings of paired containers.
// Containers pair at the root and below matched branch-bearing nodes.
ReconfigPlan diff(const StackDefinition& old_def, const StackDefinition& new_def);

// Quiesces the stack, applies the plan (creations, rewiring, option updates,
// destructions, in that order) and resumes. Kept components retain their
// internal state; failures roll back to the old wiring.
void apply(Kernel& kernel, Handle handle, const StackDefinition& new_def);

} // namespace pandora
