#include "pandora/option.hpp"

namespace pandora {

OptionDecl::OptionDecl(std::string name, ScalarKind kind,
                       std::optional<ScalarValue> default_value, OptionHook on_set)
    : name_(std::move(name)), kind_(kind), on_set_(std::move(on_set)) {
    PANDORA_CHECK(is_identifier(name_), "option name must be an identifier");
    if (default_value) {
        // The default must itself pass the hook.
        default_ = apply(*default_value, "<default of $" + name_ + ">");
    }
}

ScalarValue OptionDecl::apply(const ScalarValue& v, const std::string& where) const {
    ScalarValue result = v;
    if (on_set_) {
        try {
            result = on_set_(v);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(ErrorCode::HookRejected,
                        where + ": $" + name_ + " rejected value " + v.render() + ": " + e.what());
        }
    } else if (v.kind() != kind_) {
        throw Error(ErrorCode::KindMismatch, where + ": $" + name_ + " expects " +
                                                 to_string(kind_) + ", got " +
                                                 to_string(v.kind()) + " " + v.render());
    }
    if (result.kind() != kind_) {
        throw Error(ErrorCode::HookRejected, where + ": $" + name_ + " hook produced " +
                                                 to_string(result.kind()) + ", expected " +
                                                 to_string(kind_));
    }
    return result;
}

OptionStore::OptionStore(const std::vector<OptionDecl>* decls) : decls_(decls) {
    if (!decls_) return;
    for (const auto& decl : *decls_) {
        if (decl.default_value()) values_.emplace(decl.name(), *decl.default_value());
    }
}

const OptionDecl* OptionStore::decl(std::string_view name) const {
    if (!decls_) return nullptr;
    for (const auto& d : *decls_) {
        if (d.name() == name) return &d;
    }
    return nullptr;
}

ScalarValue OptionStore::set(const std::string& name, const ScalarValue& v,
                             const std::string& where) {
    const OptionDecl* d = decl(name);
    if (!d) {
        throw Error(ErrorCode::UnknownOption, where + ": unknown option $" + name);
    }
    ScalarValue stored = d->apply(v, where);
    {
        std::lock_guard lock(mu_);
        values_[name] = stored;
    }
    return stored;
}

ScalarValue OptionStore::get(std::string_view name) const {
    const OptionDecl* d = decl(name);
    if (!d) {
        throw Error(ErrorCode::UnknownOption, "unknown option $" + std::string(name));
    }
    std::lock_guard lock(mu_);
    auto it = values_.find(name);
    if (it == values_.end()) {
        throw Error(ErrorCode::UnknownOption,
                    "option $" + std::string(name) + " has no value and no default");
    }
    return it->second;
}

bool OptionStore::is_set(std::string_view name) const {
    std::lock_guard lock(mu_);
    return values_.find(name) != values_.end();
}

} // namespace pandora
