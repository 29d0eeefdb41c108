#pragma once

#include "pandora/component.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace pandora {

using ComponentCtor = std::function<ComponentPtr()>;

// Maps type identifiers to contracts and constructors. Registration is
// write-once per type id; the registry must outlive every stack built from
// it (demux branches instantiate lazily through it).
class FactoryRegistry {
public:
    void register_factory(ComponentContract contract, ComponentCtor ctor);

    bool has(std::string_view type_id) const;
    const ComponentContract* contract(std::string_view type_id) const;
    ComponentPtr construct(std::string_view type_id) const;

private:
    struct Entry {
        ComponentContract contract;
        ComponentCtor ctor;
    };
    mutable std::mutex mu_;
    std::map<std::string, Entry, std::less<>> entries_;
};

} // namespace pandora
