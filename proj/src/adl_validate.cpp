#include "pandora/adl.hpp"
#include "pandora/registry.hpp"

#include <string>

namespace pandora {

namespace {

NodeShape shape_for(OutputKind kind) {
    switch (kind) {
    case OutputKind::Linear: return NodeShape::Simple;
    case OutputKind::Alternative: return NodeShape::Alternative;
    case OutputKind::Demux: return NodeShape::Demux;
    }
    return NodeShape::Simple;
}

const char* shape_name(NodeShape shape) {
    switch (shape) {
    case NodeShape::Simple: return "simple";
    case NodeShape::Demux: return "demux";
    case NodeShape::Alternative: return "alternative";
    }
    return "?";
}

void check_node(const ComponentNode& node, const std::string& path,
                const FactoryRegistry& registry, std::vector<Diagnostic>& out) {
    const ComponentContract* contract = registry.contract(node.type_id);
    if (!contract) {
        out.push_back({path, "unknown-type",
                       "unknown component type '@" + node.type_id + "'"});
    } else {
        NodeShape want = shape_for(contract->output);
        if (node.shape != want) {
            out.push_back({path, "shape-mismatch",
                           "component '@" + node.type_id + "' declares " +
                               to_string(contract->output) + " output but is written as " +
                               shape_name(node.shape)});
        }
        for (const auto& binding : node.options) {
            const OptionDecl* decl = contract->find_option(binding.name);
            if (!decl) {
                out.push_back({path, "unknown-option",
                               "component '@" + node.type_id + "' has no option $" +
                                   binding.name});
                continue;
            }
            if (binding.value && !decl->has_hook() && binding.value->kind() != decl->kind()) {
                out.push_back({path, "kind-mismatch",
                               "option $" + binding.name + " of '@" + node.type_id +
                                   "' expects " + to_string(decl->kind()) + ", got " +
                                   to_string(binding.value->kind())});
            }
        }
    }
    for (size_t b = 0; b < node.branches.size(); ++b) {
        const auto& branch = node.branches[b];
        for (size_t i = 0; i < branch.size(); ++i) {
            check_node(branch[i], path + "." + std::to_string(b) + "/" + std::to_string(i),
                       registry, out);
        }
    }
}

} // namespace

std::vector<Diagnostic> validate(const StackDefinition& def, const FactoryRegistry& registry) {
    std::vector<Diagnostic> out;
    for (size_t i = 0; i < def.body.size(); ++i) {
        check_node(def.body[i], std::to_string(i), registry, out);
    }
    return out;
}

} // namespace pandora
