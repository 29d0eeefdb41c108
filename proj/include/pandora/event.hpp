#pragma once

#include "pandora/value.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pandora {

namespace detail {
struct EventTypeData {
    std::string tag;
};
} // namespace detail

// Interned event type: interning the same tag twice yields the same identity
// for the lifetime of the process.
class EventType {
public:
    EventType() : data_(nullptr) {}

    const std::string& tag() const { return data_->tag; }
    bool valid() const noexcept { return data_ != nullptr; }

    bool operator==(const EventType& other) const noexcept { return data_ == other.data_; }
    bool operator!=(const EventType& other) const noexcept { return data_ != other.data_; }

private:
    explicit EventType(const detail::EventTypeData* data) : data_(data) {}
    const detail::EventTypeData* data_;

    friend EventType intern_event_type(std::string_view tag);
    friend struct std::hash<EventType>;
};

// Tag must match the identifier syntax; malformed tags are a syntax error.
EventType intern_event_type(std::string_view tag);

using Attribute = std::pair<std::string, ScalarValue>;

// Immutable message unit. Attribute names are unique and keep insertion
// order; the payload is an opaque byte string.
class Event {
public:
    Event(EventType etype, std::vector<Attribute> attributes = {}, std::string payload = {});

    EventType etype() const noexcept { return etype_; }
    const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
    const std::string& payload() const noexcept { return payload_; }

    const ScalarValue* attr(std::string_view name) const noexcept;

    // Stable content hash (FNV-1a); equal before and after any traversal.
    uint64_t digest() const noexcept;

private:
    EventType etype_;
    std::vector<Attribute> attributes_;
    std::string payload_;
};

using EventPtr = std::shared_ptr<const Event>;

EventPtr make_event(std::string_view tag, std::vector<Attribute> attributes = {},
                    std::string payload = {});

} // namespace pandora

template <>
struct std::hash<pandora::EventType> {
    size_t operator()(const pandora::EventType& t) const noexcept {
        return std::hash<const void*>()(t.data_);
    }
};
