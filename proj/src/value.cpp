#include "pandora/value.hpp"

#include "pandora/errors.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <string>

namespace pandora {

const char* to_string(ScalarKind kind) {
    switch (kind) {
    case ScalarKind::Int: return "int";
    case ScalarKind::Float: return "float";
    case ScalarKind::Bool: return "bool";
    case ScalarKind::String: return "string";
    }
    return "?";
}

ScalarKind ScalarValue::kind() const noexcept {
    switch (v_.index()) {
    case 0: return ScalarKind::Int;
    case 1: return ScalarKind::Float;
    case 2: return ScalarKind::Bool;
    default: return ScalarKind::String;
    }
}

namespace {
[[noreturn]] void wrong_kind(ScalarKind want, ScalarKind have) {
    throw Error(ErrorCode::KindMismatch, std::string("expected ") + to_string(want) +
                                             ", have " + to_string(have));
}
} // namespace

int64_t ScalarValue::as_int() const {
    if (auto* p = std::get_if<int64_t>(&v_)) return *p;
    wrong_kind(ScalarKind::Int, kind());
}

double ScalarValue::as_float() const {
    if (auto* p = std::get_if<double>(&v_)) return *p;
    wrong_kind(ScalarKind::Float, kind());
}

bool ScalarValue::as_bool() const {
    if (auto* p = std::get_if<bool>(&v_)) return *p;
    wrong_kind(ScalarKind::Bool, kind());
}

const std::string& ScalarValue::as_string() const {
    if (auto* p = std::get_if<std::string>(&v_)) return *p;
    wrong_kind(ScalarKind::String, kind());
}

double ScalarValue::numeric() const {
    if (auto* p = std::get_if<int64_t>(&v_)) return static_cast<double>(*p);
    if (auto* p = std::get_if<double>(&v_)) return *p;
    wrong_kind(ScalarKind::Float, kind());
}

std::string render_float(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    std::string s(buf, end);
    if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
        s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
        s += ".0";
    }
    return s;
}

std::string quote_string(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 2);
    out += '"';
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string ScalarValue::render() const {
    switch (kind()) {
    case ScalarKind::Int: return std::to_string(std::get<int64_t>(v_));
    case ScalarKind::Float: return render_float(std::get<double>(v_));
    case ScalarKind::Bool: return std::get<bool>(v_) ? "true" : "false";
    case ScalarKind::String: return quote_string(std::get<std::string>(v_));
    }
    return {};
}

std::string ScalarValue::to_plain_string() const {
    if (auto* p = std::get_if<std::string>(&v_)) return *p;
    return render();
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!std::isalpha(static_cast<unsigned char>(s[0]))) return false;
    for (size_t i = 1; i < s.size(); ++i) {
        char c = s[i];
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    }
    return true;
}

} // namespace pandora
