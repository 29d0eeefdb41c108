#include "pandora/registry.hpp"

namespace pandora {

void FactoryRegistry::register_factory(ComponentContract contract, ComponentCtor ctor) {
    PANDORA_CHECK(is_identifier(contract.type_id), "type id must be an identifier");
    PANDORA_CHECK(static_cast<bool>(ctor), "factory requires a constructor");
    std::lock_guard lock(mu_);
    if (entries_.count(contract.type_id)) {
        throw Error(ErrorCode::DuplicateRegistration,
                    "component type '" + contract.type_id + "' already registered");
    }
    std::string id = contract.type_id;
    entries_.emplace(std::move(id), Entry{std::move(contract), std::move(ctor)});
}

bool FactoryRegistry::has(std::string_view type_id) const {
    std::lock_guard lock(mu_);
    return entries_.find(type_id) != entries_.end();
}

const ComponentContract* FactoryRegistry::contract(std::string_view type_id) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(type_id);
    return it == entries_.end() ? nullptr : &it->second.contract;
}

ComponentPtr FactoryRegistry::construct(std::string_view type_id) const {
    ComponentCtor ctor;
    {
        std::lock_guard lock(mu_);
        auto it = entries_.find(type_id);
        if (it == entries_.end()) {
            throw Error(ErrorCode::UnknownType,
                        "unknown component type '" + std::string(type_id) + "'");
        }
        ctor = it->second.ctor;
    }
    return ctor();
}

} // namespace pandora
