#pragma once

#include "pandora/errors.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pandora {

enum class Scope { Stored, Active };

Scope parse_scope(std::string_view s);
const char* to_string(Scope scope);

// Text form: `stack[/seg]*`. Every segment but the last descends into a
// branch: `i.b` picks alternative branch b of node i, `i{key}` picks the
// demux branch created for key. The final segment is a plain component
// index within the selected chain.
struct PathSegment {
    enum class Kind { Component, AltBranch, DemuxBranch };
    Kind kind = Kind::Component;
    size_t index = 0;
    size_t branch = 0;   // AltBranch
    std::string key;     // DemuxBranch

    bool operator==(const PathSegment&) const = default;
};

struct ComponentPath {
    std::string stack;                  // name, alias, or decimal handle
    std::vector<PathSegment> segments;  // non-empty; last is Kind::Component

    bool operator==(const ComponentPath&) const = default;
};

ComponentPath parse_path(std::string_view text);
std::string render_path(const ComponentPath& path);

} // namespace pandora
