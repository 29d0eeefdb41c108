#include "pandora/sensors.hpp"

#include "pandora/value.hpp"

#include <algorithm>
#include <atomic>
#include <bit>

namespace pandora {

SensorCell::SensorCell(std::string name, SensorKind kind, SensorMode mode)
    : name_(std::move(name)), kind_(kind), mode_(mode) {
    if (kind_ == SensorKind::Float) {
        bits_.store(std::bit_cast<uint64_t>(0.0), std::memory_order_relaxed);
    }
}

int64_t SensorCell::read_int() const noexcept {
    uint64_t raw = bits_.load(std::memory_order_relaxed);
    if (kind_ == SensorKind::Float) return static_cast<int64_t>(std::bit_cast<double>(raw));
    return static_cast<int64_t>(raw);
}

double SensorCell::read_float() const noexcept {
    uint64_t raw = bits_.load(std::memory_order_relaxed);
    if (kind_ == SensorKind::Float) return std::bit_cast<double>(raw);
    return static_cast<double>(static_cast<int64_t>(raw));
}

std::string SensorCell::render() const {
    if (kind_ == SensorKind::Float) return render_float(read_float());
    return std::to_string(read_int());
}

void SensorCell::write_int(int64_t v) {
    if (kind_ == SensorKind::Float) {
        bits_.store(std::bit_cast<uint64_t>(static_cast<double>(v)), std::memory_order_relaxed);
    } else {
        bits_.store(static_cast<uint64_t>(v), std::memory_order_relaxed);
    }
    if (mode_ == SensorMode::Active) notify();
}

void SensorCell::write_float(double v) {
    if (kind_ == SensorKind::Float) {
        bits_.store(std::bit_cast<uint64_t>(v), std::memory_order_relaxed);
    } else {
        bits_.store(static_cast<uint64_t>(static_cast<int64_t>(v)), std::memory_order_relaxed);
    }
    if (mode_ == SensorMode::Active) notify();
}

void SensorCell::add(int64_t delta) {
    if (kind_ == SensorKind::Float) {
        write_float(read_float() + static_cast<double>(delta));
    } else {
        bits_.fetch_add(static_cast<uint64_t>(delta), std::memory_order_relaxed);
        if (mode_ == SensorMode::Active) notify();
    }
}

void SensorCell::notify() {
    std::lock_guard lock(subscribers_mu_);
    for (auto& [id, callback] : subscribers_) callback(*this);
}

SensorRef SensorRegistry::register_sensor(const std::string& flat_name, SensorKind kind,
                                          SensorMode mode) {
    std::lock_guard lock(mu_);
    auto it = cells_.find(flat_name);
    if (it != cells_.end()) {
        throw Error(ErrorCode::DuplicateSensor, "sensor '" + flat_name + "' already registered");
    }
    auto cell = std::make_shared<SensorCell>(flat_name, kind, mode);
    cells_.emplace(flat_name, cell);
    return cell;
}

SensorRef SensorRegistry::lookup(std::string_view flat_name) const {
    std::lock_guard lock(mu_);
    auto it = cells_.find(flat_name);
    if (it == cells_.end()) {
        throw Error(ErrorCode::UnknownSensor, "unknown sensor '" + std::string(flat_name) + "'");
    }
    return it->second;
}

void SensorRegistry::retire(const std::string& flat_name) {
    SensorRef cell;
    {
        std::lock_guard lock(mu_);
        auto it = cells_.find(flat_name);
        if (it == cells_.end()) return;
        cell = it->second;
        cells_.erase(it);
    }
    cell->mark_stale();
}

std::vector<SensorRef> SensorRegistry::list() const {
    std::lock_guard lock(mu_);
    std::vector<SensorRef> out;
    out.reserve(cells_.size());
    for (const auto& [name, cell] : cells_) out.push_back(cell);
    return out;
}

namespace {
std::atomic<uint64_t> next_monitor_id{1};
}

Monitor::Monitor(std::function<void(const SensorCell&)> callback)
    : id_(next_monitor_id.fetch_add(1)), callback_(std::move(callback)) {}

Monitor::~Monitor() { unsubscribe_all(); }

void Monitor::subscribe(const SensorRef& ref) {
    PANDORA_CHECK(ref != nullptr, "subscribe requires a sensor reference");
    if (ref->mode() == SensorMode::Active) {
        PANDORA_CHECK(static_cast<bool>(callback_), "active subscription requires a callback");
        std::lock_guard lock(ref->subscribers_mu_);
        ref->subscribers_.emplace_back(id_, callback_);
    }
    subscriptions_.push_back(ref);
}

void Monitor::unsubscribe_all() {
    for (auto& ref : subscriptions_) {
        std::lock_guard lock(ref->subscribers_mu_);
        auto& subs = ref->subscribers_;
        subs.erase(std::remove_if(subs.begin(), subs.end(),
                                  [&](const auto& p) { return p.first == id_; }),
                   subs.end());
    }
    subscriptions_.clear();
}

} // namespace pandora
