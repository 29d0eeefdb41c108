#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace pandora {

enum class ScalarKind { Int, Float, Bool, String };

const char* to_string(ScalarKind kind);

// The four value kinds of the description language. The kind is fixed at
// construction; conversions only happen through explicit option hooks.
class ScalarValue {
public:
    ScalarValue() : v_(int64_t{0}) {}
    ScalarValue(int64_t v) : v_(v) {}
    ScalarValue(double v) : v_(v) {}
    ScalarValue(bool v) : v_(v) {}
    ScalarValue(std::string v) : v_(std::move(v)) {}
    ScalarValue(const char* v) : v_(std::string(v)) {}

    ScalarKind kind() const noexcept;

    bool is_int() const noexcept { return kind() == ScalarKind::Int; }
    bool is_float() const noexcept { return kind() == ScalarKind::Float; }
    bool is_bool() const noexcept { return kind() == ScalarKind::Bool; }
    bool is_string() const noexcept { return kind() == ScalarKind::String; }

    // Checked accessors; throw KindMismatch on the wrong kind.
    int64_t as_int() const;
    double as_float() const;
    bool as_bool() const;
    const std::string& as_string() const;

    // Numeric view: int or float widened to double, error otherwise.
    double numeric() const;

    // Literal syntax of the description language: 42, 3.5, true, "text".
    std::string render() const;

    // Unquoted textual form (strings verbatim); used for matching and
    // display, never re-parsed.
    std::string to_plain_string() const;

    bool operator==(const ScalarValue& other) const { return v_ == other.v_; }
    bool operator!=(const ScalarValue& other) const { return !(*this == other); }

private:
    std::variant<int64_t, double, bool, std::string> v_;
};

// Renders a double so that parsing the result yields the same value; always
// a valid float literal (contains '.' or an exponent).
std::string render_float(double v);

// Escapes only '"' and '\\'.
std::string quote_string(std::string_view s);

bool is_identifier(std::string_view s);

} // namespace pandora
