#pragma once

#include "pandora/errors.hpp"
#include "pandora/value.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pandora {

class FactoryRegistry;

// `$name`, `$name:alias`, `$name=value`, `$name:alias=value`. A binding
// without a value only declares an exposure point for later setting.
struct OptionBinding {
    std::string name;
    std::string alias;                 // empty = none
    std::optional<ScalarValue> value;

    bool operator==(const OptionBinding&) const = default;
};

enum class NodeShape { Simple, Demux, Alternative };

struct ComponentNode {
    std::string type_id;
    std::string alias;                 // empty = none
    std::vector<OptionBinding> options;
    NodeShape shape = NodeShape::Simple;

    // Demux: branches.front() is the single branch template.
    // Alternative: one entry per numbered port; every branch is non-empty.
    std::vector<std::vector<ComponentNode>> branches;

    bool operator==(const ComponentNode&) const = default;
};

// Parsed form of one `%name { ... }` definition.
struct StackDefinition {
    std::string name;
    std::string alias;                 // empty = none
    std::vector<ComponentNode> body;

    bool operator==(const StackDefinition&) const = default;
};

// Parses exactly one stack definition; trailing input other than whitespace
// and comments is a syntax error. Whitespace between tokens is insignificant
// and `#` starts a comment running to end of line.
StackDefinition parse_stack(std::string_view text);

// Zero or more definitions, concatenated (the config-file format).
std::vector<StackDefinition> parse_config(std::string_view text);

// Canonical single-line form; parse(render(d)) is structurally equal to d.
std::string render_stack(const StackDefinition& def);
std::string render_component(const ComponentNode& node);

// One value literal (integer, float, boolean or quoted string), nothing else.
ScalarValue parse_literal(std::string_view text);

struct Diagnostic {
    std::string path;     // e.g. "dns/2" (definition-relative)
    std::string code;     // unknown-type | shape-mismatch | unknown-option | kind-mismatch
    std::string message;
};

// Checks every node against the registry: type registered, option names and
// kinds match the declarations, node shape matches the declared output kind.
std::vector<Diagnostic> validate(const StackDefinition& def, const FactoryRegistry& registry);

} // namespace pandora
