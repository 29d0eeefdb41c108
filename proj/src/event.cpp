#include "pandora/event.hpp"

#include "pandora/errors.hpp"

#include <deque>
#include <mutex>
#include <unordered_map>

namespace pandora {

namespace {

struct Interner {
    std::mutex mu;
    // Deque keeps addresses stable; the map owns nothing.
    std::deque<detail::EventTypeData> storage;
    std::unordered_map<std::string_view, const detail::EventTypeData*> by_tag;
};

Interner& interner() {
    static Interner instance;
    return instance;
}

} // namespace

EventType intern_event_type(std::string_view tag) {
    if (!is_identifier(tag)) {
        throw SyntaxError(1, 1, "malformed event type tag '" + std::string(tag) + "'",
                          {"identifier"});
    }
    auto& in = interner();
    std::lock_guard lock(in.mu);
    auto it = in.by_tag.find(tag);
    if (it != in.by_tag.end()) return EventType(it->second);
    in.storage.push_back(detail::EventTypeData{std::string(tag)});
    const auto* data = &in.storage.back();
    in.by_tag.emplace(std::string_view(data->tag), data);
    return EventType(data);
}

Event::Event(EventType etype, std::vector<Attribute> attributes, std::string payload)
    : etype_(etype), attributes_(std::move(attributes)), payload_(std::move(payload)) {
    PANDORA_CHECK(etype_.valid(), "event requires an interned type");
    for (size_t i = 0; i < attributes_.size(); ++i) {
        for (size_t j = i + 1; j < attributes_.size(); ++j) {
            if (attributes_[i].first == attributes_[j].first) {
                throw Error(ErrorCode::Internal,
                            "duplicate event attribute '" + attributes_[i].first + "'");
            }
        }
    }
}

const ScalarValue* Event::attr(std::string_view name) const noexcept {
    for (const auto& [key, value] : attributes_) {
        if (key == name) return &value;
    }
    return nullptr;
}

namespace {
void fnv(uint64_t& h, std::string_view bytes) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
}
} // namespace

uint64_t Event::digest() const noexcept {
    uint64_t h = 0xcbf29ce484222325ull;
    fnv(h, etype_.tag());
    for (const auto& [key, value] : attributes_) {
        fnv(h, "\x1f");
        fnv(h, key);
        fnv(h, "=");
        fnv(h, value.render());
    }
    fnv(h, "\x1e");
    fnv(h, payload_);
    return h;
}

EventPtr make_event(std::string_view tag, std::vector<Attribute> attributes,
                    std::string payload) {
    return std::make_shared<Event>(intern_event_type(tag), std::move(attributes),
                                   std::move(payload));
}

} // namespace pandora
