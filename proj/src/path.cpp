#include "pandora/path.hpp"

#include "pandora/value.hpp"

#include <charconv>

namespace pandora {

Scope parse_scope(std::string_view s) {
    if (s == "stored") return Scope::Stored;
    if (s == "active") return Scope::Active;
    throw Error(ErrorCode::BadScope, "scope must be 'stored' or 'active', got '" +
                                         std::string(s) + "'");
}

const char* to_string(Scope scope) {
    return scope == Scope::Stored ? "stored" : "active";
}

namespace {

size_t parse_index(std::string_view text, std::string_view whole) {
    size_t value = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || p != text.data() + text.size()) {
        throw Error(ErrorCode::BadPath, "bad index '" + std::string(text) + "' in path '" +
                                            std::string(whole) + "'");
    }
    return value;
}

PathSegment parse_segment(std::string_view seg, std::string_view whole) {
    if (seg.empty()) {
        throw Error(ErrorCode::BadPath, "empty segment in path '" + std::string(whole) + "'");
    }
    PathSegment out;
    if (auto brace = seg.find('{'); brace != std::string_view::npos) {
        if (seg.back() != '}' || brace + 1 > seg.size() - 1) {
            throw Error(ErrorCode::BadPath,
                        "malformed demux segment in path '" + std::string(whole) + "'");
        }
        out.kind = PathSegment::Kind::DemuxBranch;
        out.index = parse_index(seg.substr(0, brace), whole);
        out.key = std::string(seg.substr(brace + 1, seg.size() - brace - 2));
        return out;
    }
    if (auto dot = seg.find('.'); dot != std::string_view::npos) {
        out.kind = PathSegment::Kind::AltBranch;
        out.index = parse_index(seg.substr(0, dot), whole);
        out.branch = parse_index(seg.substr(dot + 1), whole);
        return out;
    }
    out.kind = PathSegment::Kind::Component;
    out.index = parse_index(seg, whole);
    return out;
}

} // namespace

ComponentPath parse_path(std::string_view text) {
    ComponentPath path;
    size_t slash = text.find('/');
    if (slash == std::string_view::npos || slash == 0) {
        throw Error(ErrorCode::BadPath,
                    "component path must be stack/segment[/segment...]: '" + std::string(text) +
                        "'");
    }
    path.stack = std::string(text.substr(0, slash));
    std::string_view rest = text.substr(slash + 1);
    while (true) {
        size_t next = rest.find('/');
        std::string_view seg = next == std::string_view::npos ? rest : rest.substr(0, next);
        path.segments.push_back(parse_segment(seg, text));
        if (next == std::string_view::npos) break;
        rest = rest.substr(next + 1);
    }
    for (size_t i = 0; i + 1 < path.segments.size(); ++i) {
        if (path.segments[i].kind == PathSegment::Kind::Component) {
            throw Error(ErrorCode::BadPath,
                        "intermediate segments must select a branch: '" + std::string(text) + "'");
        }
    }
    if (path.segments.back().kind != PathSegment::Kind::Component) {
        throw Error(ErrorCode::BadPath,
                    "path must end with a component index: '" + std::string(text) + "'");
    }
    return path;
}

std::string render_path(const ComponentPath& path) {
    std::string out = path.stack;
    for (const auto& seg : path.segments) {
        out += '/';
        out += std::to_string(seg.index);
        if (seg.kind == PathSegment::Kind::AltBranch) {
            out += '.';
            out += std::to_string(seg.branch);
        } else if (seg.kind == PathSegment::Kind::DemuxBranch) {
            out += '{';
            out += seg.key;
            out += '}';
        }
    }
    return out;
}

} // namespace pandora
