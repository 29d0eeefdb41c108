#include "pandora/stdlib.hpp"

#include "pandora/component.hpp"

#include <chrono>
#include <deque>
#include <fstream>
#include <map>
#include <thread>
#include <tuple>

namespace pandora {

namespace {

// Numeric options accept integer literals and widen them.
ScalarValue to_float_hook(const ScalarValue& v) {
    if (v.is_int()) return ScalarValue(static_cast<double>(v.as_int()));
    if (v.is_float()) return v;
    throw std::runtime_error("expected a number");
}

void sleep_until_slot(std::chrono::steady_clock::time_point start, double rate, size_t done) {
    if (rate <= 0.0) return;
    auto target = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(static_cast<double>(done) / rate));
    std::this_thread::sleep_until(target);
}

// --- trace_source: replays a text trace as `pkt` events ---

class TraceSource : public Component {
public:
    void on_start() override {
        path_ = option("path").as_string();
        in_.open(path_, std::ios::binary);
        if (!in_) {
            throw Error(ErrorCode::Io, "trace_source: cannot read '" + path_ + "'");
        }
        start_ = std::chrono::steady_clock::now();
        emitted_ = 0;
    }

    void on_stop() override { in_.close(); }

    std::optional<EventPtr> produce() override {
        std::string line;
        while (std::getline(in_, line)) {
            if (line.empty()) continue;
            sleep_until_slot(start_, option("rate").as_float(), emitted_);
            ++emitted_;
            return event_from_record(parse_trace_line(line));
        }
        return std::nullopt;
    }

    void on_event(const EventPtr& e) override { forward(e); }

private:
    std::string path_;
    std::ifstream in_;
    std::chrono::steady_clock::time_point start_;
    size_t emitted_ = 0;
};

// --- tick: synthetic event source ---

class Tick : public Component {
public:
    void on_start() override {
        start_ = std::chrono::steady_clock::now();
        produced_ = 0;
    }

    std::optional<EventPtr> produce() override {
        int64_t n = option("n").as_int();
        if (n > 0 && produced_ >= n) return std::nullopt;
        double interval = option("interval").as_float();
        if (interval > 0.0) {
            sleep_until_slot(start_, 1.0 / interval, static_cast<size_t>(produced_));
        }
        return make_event("tick", {{"seq", ScalarValue(produced_++)}});
    }

    void on_event(const EventPtr& e) override { forward(e); }

private:
    std::chrono::steady_clock::time_point start_;
    int64_t produced_ = 0;
};

// --- proto_demux: one branch per observed attribute value ---

class ProtoDemux : public Component {
public:
    void on_start() override {
        dropped_ = add_sensor("dropped", SensorKind::Int);
        set_demux_limit(option("max_categories").as_int());
        set_demux_drop_hook([this](const EventPtr&) { dropped_->add(1); });
    }

    void on_option(const std::string& name, const ScalarValue& v) override {
        if (name == "max_categories") set_demux_limit(v.as_int());
    }

    void on_event(const EventPtr& e) override {
        const ScalarValue* v = e->attr(option("field").as_string());
        forward_demux(v ? v->to_plain_string() : "", e);
    }

private:
    SensorRef dropped_;
};

// --- pair_matcher: reconstructs query/response transactions ---

class PairMatcher : public Component {
public:
    void on_start() override {
        pending_sensor_ = add_sensor("pending", SensorKind::Int);
        matched_sensor_ = add_sensor("matched", SensorKind::Int);
        orphans_sensor_ = add_sensor("orphans", SensorKind::Int);
    }

    void on_event(const EventPtr& e) override {
        const ScalarValue* is_resp = e->attr("is_response");
        if (!is_resp || !is_resp->is_bool()) {
            forward(e);  // not a query/response event; stay out of its way
            return;
        }
        const ScalarValue* ts_attr = e->attr("ts");
        double ts = ts_attr ? ts_attr->numeric() : 0.0;
        evict_stale(ts);

        std::string src = plain_attr(e, "src");
        std::string dst = plain_attr(e, "dst");
        Key key = make_key(src, dst, plain_attr(e, "qid"));

        if (!is_resp->as_bool()) {
            auto& queue = pending_[key];
            queue.push_back(PendingQuery{ts, src, dst, plain_attr(e, "proto"),
                                         plain_attr(e, "qname")});
            order_.push_back({ts, key});
            pending_sensor_->add(1);
            return;
        }

        auto it = pending_.find(key);
        if (it == pending_.end() || it->second.empty()) {
            orphans_sensor_->add(1);
            return;
        }
        PendingQuery q = std::move(it->second.front());
        it->second.pop_front();
        if (it->second.empty()) pending_.erase(it);
        pending_sensor_->add(-1);
        // Both the query and the response are consumed by this transaction.
        matched_sensor_->add(2);

        forward(make_event("txn", {{"ts", ScalarValue(ts)},
                                   {"src", ScalarValue(q.src)},
                                   {"dst", ScalarValue(q.dst)},
                                   {"proto", ScalarValue(q.proto)},
                                   {"qid", ScalarValue(key_qid(key))},
                                   {"qname", ScalarValue(q.qname)},
                                   {"latency", ScalarValue(ts - q.ts)}}));
    }

private:
    using Key = std::tuple<std::string, std::string, std::string>;

    struct PendingQuery {
        double ts = 0.0;
        std::string src, dst, proto, qname;
    };

    static std::string plain_attr(const EventPtr& e, std::string_view name) {
        const ScalarValue* v = e->attr(name);
        return v ? v->to_plain_string() : std::string();
    }

    // Direction-insensitive endpoint pair: the response travels the reverse
    // path of its query.
    static Key make_key(const std::string& a, const std::string& b, std::string qid) {
        if (a <= b) return Key(a, b, std::move(qid));
        return Key(b, a, std::move(qid));
    }

    static std::string key_qid(const Key& k) { return std::get<2>(k); }

    void evict_stale(double now) {
        double timeout = option("timeout").as_float();
        while (!order_.empty() && order_.front().first < now - timeout) {
            Key key = std::move(order_.front().second);
            order_.pop_front();
            auto it = pending_.find(key);
            if (it == pending_.end()) continue;
            // Oldest entries sit at the queue front.
            while (!it->second.empty() && it->second.front().ts < now - timeout) {
                it->second.pop_front();
                pending_sensor_->add(-1);
                orphans_sensor_->add(1);
            }
            if (it->second.empty()) pending_.erase(it);
        }
    }

    std::map<Key, std::deque<PendingQuery>> pending_;
    std::deque<std::pair<double, Key>> order_;
    SensorRef pending_sensor_, matched_sensor_, orphans_sensor_;
};

// --- count: passthrough event counter ---

class Count : public Component {
public:
    void on_start() override { n_ = add_sensor("n", SensorKind::Int); }

    void on_event(const EventPtr& e) override {
        std::string field = option("field").as_string();
        if (field.empty() || e->attr(field)) n_->add(1);
        forward(e);
    }

private:
    SensorRef n_;
};

// --- filter: forwards events whose attribute matches ---

class Filter : public Component {
public:
    void on_event(const EventPtr& e) override {
        std::string field = option("field").as_string();
        if (field.empty()) {
            forward(e);
            return;
        }
        const ScalarValue* v = e->attr(field);
        if (v && v->to_plain_string() == option("equals").as_string()) forward(e);
    }
};

// --- rate_limit: paces the passthrough stream ---

class RateLimit : public Component {
public:
    void on_event(const EventPtr& e) override {
        if (passed_ == 0) start_ = std::chrono::steady_clock::now();
        sleep_until_slot(start_, option("rate").as_float(), passed_);
        ++passed_;
        forward(e);
    }

private:
    std::chrono::steady_clock::time_point start_;
    size_t passed_ = 0;
};

// --- file_sink: event persistence, one line per event ---

class FileSink : public Component {
public:
    void on_start() override {
        std::string path = option("path").as_string();
        out_.open(path, std::ios::binary | std::ios::app);
        if (!out_) {
            throw Error(ErrorCode::Io, "file_sink: cannot write '" + path + "'");
        }
    }

    void on_stop() override { out_.close(); }

    void on_event(const EventPtr& e) override {
        out_ << serialize_event(*e) << '\n';
        out_.flush();
        forward(e);
    }

private:
    std::ofstream out_;
};

class NullSink : public Component {
public:
    void on_event(const EventPtr&) override {}
};

template <class T>
ComponentCtor ctor_of() {
    return [] { return std::make_unique<T>(); };
}

} // namespace

void register_stdlib(FactoryRegistry& registry) {
    registry.register_factory(
        ComponentContract{"trace_source",
                          {OptionDecl("path", ScalarKind::String),
                           OptionDecl("rate", ScalarKind::Float, ScalarValue(0.0), to_float_hook)},
                          OutputKind::Linear,
                          true},
        ctor_of<TraceSource>());
    registry.register_factory(
        ComponentContract{"tick",
                          {OptionDecl("n", ScalarKind::Int, ScalarValue(int64_t{0})),
                           OptionDecl("interval", ScalarKind::Float, ScalarValue(0.0),
                                      to_float_hook)},
                          OutputKind::Linear,
                          true},
        ctor_of<Tick>());
    registry.register_factory(
        ComponentContract{"proto_demux",
                          {OptionDecl("field", ScalarKind::String, ScalarValue("proto")),
                           OptionDecl("max_categories", ScalarKind::Int, ScalarValue(int64_t{0}))},
                          OutputKind::Demux,
                          false},
        ctor_of<ProtoDemux>());
    registry.register_factory(
        ComponentContract{"pair_matcher",
                          {OptionDecl("timeout", ScalarKind::Float, ScalarValue(5.0),
                                      to_float_hook)},
                          OutputKind::Linear,
                          false},
        ctor_of<PairMatcher>());
    registry.register_factory(
        ComponentContract{"count",
                          {OptionDecl("field", ScalarKind::String, ScalarValue(""))},
                          OutputKind::Linear,
                          false},
        ctor_of<Count>());
    registry.register_factory(
        ComponentContract{"filter",
                          {OptionDecl("field", ScalarKind::String, ScalarValue("")),
                           OptionDecl("equals", ScalarKind::String, ScalarValue(""))},
                          OutputKind::Linear,
                          false},
        ctor_of<Filter>());
    registry.register_factory(
        ComponentContract{"rate_limit",
                          {OptionDecl("rate", ScalarKind::Float, ScalarValue(0.0),
                                      to_float_hook)},
                          OutputKind::Linear,
                          false},
        ctor_of<RateLimit>());
    registry.register_factory(
        ComponentContract{"file_sink",
                          {OptionDecl("path", ScalarKind::String)},
                          OutputKind::Linear,
                          false},
        ctor_of<FileSink>());
    registry.register_factory(ComponentContract{"null_sink", {}, OutputKind::Linear, false},
                              ctor_of<NullSink>());
}

} // namespace pandora
