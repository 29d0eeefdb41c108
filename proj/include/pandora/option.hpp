#pragma once

#include "pandora/errors.hpp"
#include "pandora/value.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace pandora {

// Conversion/validation hook applied on every assignment. Must be pure;
// rejects by throwing. The result must have the declared kind.
using OptionHook = std::function<ScalarValue(const ScalarValue&)>;

class OptionDecl {
public:
    OptionDecl(std::string name, ScalarKind kind,
               std::optional<ScalarValue> default_value = std::nullopt,
               OptionHook on_set = nullptr);

    const std::string& name() const noexcept { return name_; }
    ScalarKind kind() const noexcept { return kind_; }
    const std::optional<ScalarValue>& default_value() const noexcept { return default_; }
    bool has_hook() const noexcept { return static_cast<bool>(on_set_); }

    // Kind check plus hook. `where` qualifies error messages with the
    // component path.
    ScalarValue apply(const ScalarValue& v, const std::string& where) const;

private:
    std::string name_;
    ScalarKind kind_;
    std::optional<ScalarValue> default_;
    OptionHook on_set_;
};

// Current option values of one component instance. Written from the control
// context, read from the stack context.
class OptionStore {
public:
    explicit OptionStore(const std::vector<OptionDecl>* decls);

    const OptionDecl* decl(std::string_view name) const;

    // Applies the declaration hook and stores the result. Throws
    // UnknownOption / KindMismatch / HookRejected.
    ScalarValue set(const std::string& name, const ScalarValue& v, const std::string& where);

    ScalarValue get(std::string_view name) const;
    bool is_set(std::string_view name) const;

private:
    const std::vector<OptionDecl>* decls_;
    mutable std::mutex mu_;
    std::map<std::string, ScalarValue, std::less<>> values_;
};

} // namespace pandora
