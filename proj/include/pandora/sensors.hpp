#pragma once

#include "pandora/errors.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace pandora {

enum class SensorKind { Int, Float };
enum class SensorMode { Passive, Active };

// One 64-bit numeric cell. Reads are wait-free and never fail: the cell
// outlives its owning component and is merely flagged stale on destruction.
class SensorCell {
public:
    SensorCell(std::string name, SensorKind kind, SensorMode mode);

    const std::string& name() const noexcept { return name_; }
    SensorKind kind() const noexcept { return kind_; }
    SensorMode mode() const noexcept { return mode_; }
    bool stale() const noexcept { return stale_.load(std::memory_order_relaxed); }

    int64_t read_int() const noexcept;
    double read_float() const noexcept;
    std::string render() const;

    // Single writer (the owning component's context). Integer add is a
    // fetch-add and therefore safe from several contexts.
    void write_int(int64_t v);
    void write_float(double v);
    void add(int64_t delta);

    void mark_stale() noexcept { stale_.store(true, std::memory_order_relaxed); }

private:
    void notify();

    std::string name_;
    SensorKind kind_;
    SensorMode mode_;
    std::atomic<uint64_t> bits_{0};
    std::atomic<bool> stale_{false};

    std::mutex subscribers_mu_;
    std::vector<std::pair<uint64_t, std::function<void(const SensorCell&)>>> subscribers_;

    friend class Monitor;
};

using SensorRef = std::shared_ptr<SensorCell>;

// Flat-name directory. The name is resolved once, at lookup or registration;
// reads through the returned reference involve no further lookup.
class SensorRegistry {
public:
    SensorRef register_sensor(const std::string& flat_name, SensorKind kind, SensorMode mode);
    SensorRef lookup(std::string_view flat_name) const;

    // Drops the name from the directory and flags the cell; held references
    // keep reading the last value.
    void retire(const std::string& flat_name);

    std::vector<SensorRef> list() const;

private:
    mutable std::mutex mu_;
    std::map<std::string, SensorRef, std::less<>> cells_;
};

// Consumes sensor values, either by polling (passive sensors) or through a
// callback fired on every write (active sensors). Callbacks run on the
// writer's context and must be brief.
class Monitor {
public:
    explicit Monitor(std::function<void(const SensorCell&)> callback = nullptr);
    ~Monitor();

    Monitor(const Monitor&) = delete;
    Monitor& operator=(const Monitor&) = delete;

    void subscribe(const SensorRef& ref);
    void unsubscribe_all();

    const std::vector<SensorRef>& subscriptions() const noexcept { return subscriptions_; }

private:
    uint64_t id_;
    std::function<void(const SensorCell&)> callback_;
    std::vector<SensorRef> subscriptions_;
};

} // namespace pandora
