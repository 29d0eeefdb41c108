#include "pandora/adl.hpp"
#include "pandora/event.hpp"
#include "pandora/option.hpp"
#include "pandora/value.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <arpa/inet.h>
#include <netdb.h>

#include <bit>
#include <cmath>
#include <map>
#include <random>

using namespace pandora;
using namespace pandora::test;

TEST_CASE("event type interning is idempotent") {
    EventType a = intern_event_type("udp");
    EventType b = intern_event_type("udp");
    CHECK(a == b);
    CHECK(&a.tag() == &b.tag());

    EventType c = intern_event_type("dns");
    CHECK(a != c);
    CHECK(c.tag() == "dns");
}

TEST_CASE("event type tags follow the identifier syntax") {
    CHECK_THROWS_AS((void)intern_event_type("9bad"), SyntaxError);
    CHECK_THROWS_AS((void)intern_event_type(""), SyntaxError);
    CHECK_THROWS_AS((void)intern_event_type("a-b"), SyntaxError);
    CHECK_NOTHROW((void)intern_event_type("a9_ok"));
}

TEST_CASE("event attributes are unique and ordered") {
    EventPtr e = make_event("pkt", {{"a", ScalarValue(int64_t{1})}, {"b", ScalarValue("x")}});
    CHECK(e->attributes().size() == 2);
    CHECK(e->attributes()[0].first == "a");
    CHECK(e->attr("b")->as_string() == "x");
    CHECK(e->attr("nope") == nullptr);

    CHECK_THROWS(
        (void)make_event("pkt", {{"a", ScalarValue(int64_t{1})}, {"a", ScalarValue(int64_t{2})}}));
}

TEST_CASE("event digest is stable across a stack traversal") {
    FactoryRegistry reg;
    auto log = std::make_shared<std::vector<EventPtr>>();
    register_recorder(reg, "rec", log);
    auto stack = build("%s { @rec @rec @rec }", reg);

    EventPtr e = make_event("pkt", {{"n", ScalarValue(int64_t{42})}}, "payload-bytes");
    uint64_t before = e->digest();
    stack->inject(e);
    CHECK(e->digest() == before);
    for (const auto& seen : *log) CHECK(seen->digest() == before);
}

TEST_CASE("chain forwarding is synchronous and depth-first") {
    FactoryRegistry reg;
    auto log = std::make_shared<std::vector<EventPtr>>();
    register_recorder(reg, "rec", log);
    auto stack = build("%s { @rec:a @rec:b @rec:c }", reg);

    EventPtr e = make_event("tick");
    stack->inject(e);
    // All downstream processing finished before inject returned.
    CHECK(log->size() == 3);
    stack->inject(e);
    CHECK(log->size() == 6);
}

TEST_CASE("forwarding with no successor terminates silently") {
    FactoryRegistry reg;
    auto log = std::make_shared<std::vector<EventPtr>>();
    register_recorder(reg, "rec", log);
    auto stack = build("%s { @rec }", reg);
    CHECK_NOTHROW(stack->inject(make_event("tick")));
    CHECK(log->size() == 1);
}

TEST_CASE("alternative port selection routes to the numbered branch") {
    FactoryRegistry reg;
    register_routers(reg);
    auto shared = std::make_shared<BranchProbe::Shared>();
    register_probe(reg, "probe", shared);
    auto stack = build("%s { @alt(@probe | @probe) }", reg);

    stack->inject(make_event("tick", {{"port", ScalarValue(int64_t{1})}}));
    stack->inject(make_event("tick", {{"port", ScalarValue(int64_t{0})}}));
    stack->inject(make_event("tick", {{"port", ScalarValue(int64_t{1})}}));
    REQUIRE(shared->deliveries.size() == 3);
    CHECK(shared->deliveries[0].first == 1);
    CHECK(shared->deliveries[1].first == 0);
    CHECK(shared->deliveries[2].first == 1);
}

TEST_CASE("alternative index out of range is a wiring error") {
    FactoryRegistry reg;
    register_routers(reg);
    auto shared = std::make_shared<BranchProbe::Shared>();
    register_probe(reg, "probe", shared);
    auto stack = build("%s { @alt(@probe | @probe) }", reg);

    try {
        stack->inject(make_event("tick", {{"port", ScalarValue(int64_t{2})}}));
        FAIL("expected wiring error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::WiringError);
    }
}

TEST_CASE("demux creates one branch per key and routes deterministically") {
    FactoryRegistry reg;
    register_routers(reg);
    auto shared = std::make_shared<BranchProbe::Shared>();
    register_probe(reg, "probe", shared);
    auto stack = build("%s { @dmx<@probe> }", reg);

    for (const char* k : {"a", "b", "a"}) {
        stack->inject(make_event("tick", {{"k", ScalarValue(k)}}));
    }
    CHECK(shared->creations.size() == 2);  // keys a, b
    REQUIRE(shared->deliveries.size() == 3);
    CHECK(shared->deliveries[2].first == shared->deliveries[0].first);  // third event -> branch "a"
    CHECK(shared->deliveries[1].first != shared->deliveries[0].first);
}

TEST_CASE("demux routing matches a brute-force map oracle") {
    FactoryRegistry reg;
    register_routers(reg);
    auto shared = std::make_shared<BranchProbe::Shared>();
    register_probe(reg, "probe", shared);
    auto stack = build("%s { @dmx<@probe> }", reg);

    std::mt19937 rng(7);
    std::vector<std::string> keys;
    for (int i = 0; i < 2000; ++i) {
        keys.push_back("k" + std::to_string(rng() % 37));
    }
    for (const auto& k : keys) {
        stack->inject(make_event("tick", {{"k", ScalarValue(k)}}));
    }

    // Oracle: plain map, branch id = number of distinct keys seen before.
    std::map<std::string, int> oracle;
    std::vector<int> expected_route;
    std::vector<int> expected_creations;
    for (const auto& k : keys) {
        auto it = oracle.find(k);
        if (it == oracle.end()) {
            int id = static_cast<int>(oracle.size());
            oracle.emplace(k, id);
            expected_creations.push_back(id);
            expected_route.push_back(id);
        } else {
            expected_route.push_back(it->second);
        }
    }
    CHECK(shared->creations == expected_creations);
    REQUIRE(shared->deliveries.size() == expected_route.size());
    for (size_t i = 0; i < expected_route.size(); ++i) {
        REQUIRE(shared->deliveries[i].first == expected_route[i]);
    }
}

TEST_CASE("set_option applies kinds, hooks and defaults") {
    std::vector<OptionDecl> decls;
    decls.emplace_back("device", ScalarKind::String, ScalarValue("any"));
    decls.emplace_back("threshold", ScalarKind::Int, ScalarValue(int64_t{10}));
    OptionStore store(&decls);

    CHECK(store.get("device").as_string() == "any");
    store.set("device", ScalarValue("eth0"), "test");
    CHECK(store.get("device").as_string() == "eth0");

    try {
        store.set("threshold", ScalarValue(true), "test");
        FAIL("expected kind mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::KindMismatch);
    }
    try {
        store.set("nope", ScalarValue(int64_t{1}), "test");
        FAIL("expected unknown option");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownOption);
    }
}

namespace {

// The canonical conversion-hook example: host name to numeric address.
ScalarValue resolve_hostname(const ScalarValue& v) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(v.as_string().c_str(), nullptr, &hints, &res) != 0 || !res) {
        throw std::runtime_error("cannot resolve '" + v.as_string() + "'");
    }
    char buf[INET_ADDRSTRLEN] = {};
    auto* sin = reinterpret_cast<sockaddr_in*>(res->ai_addr);
    inet_ntop(AF_INET, &sin->sin_addr, buf, sizeof buf);
    freeaddrinfo(res);
    return ScalarValue(std::string(buf));
}

} // namespace

TEST_CASE("on_set hook converts host names through the platform resolver") {
    std::vector<OptionDecl> decls;
    decls.emplace_back("host", ScalarKind::String, std::nullopt, resolve_hostname);
    OptionStore store(&decls);
    store.set("host", ScalarValue("localhost"), "test");

    // Independent check: ask the resolver directly.
    ScalarValue expected = resolve_hostname(ScalarValue("localhost"));
    CHECK(store.get("host").as_string() == expected.as_string());
    CHECK(store.get("host").as_string() == "127.0.0.1");
}

TEST_CASE("hook rejection surfaces as an error") {
    std::vector<OptionDecl> decls;
    decls.emplace_back("pct", ScalarKind::Int, std::nullopt, [](const ScalarValue& v) {
        if (v.as_int() < 0 || v.as_int() > 100) throw std::runtime_error("out of range");
        return v;
    });
    OptionStore store(&decls);
    CHECK_NOTHROW(store.set("pct", ScalarValue(int64_t{50}), "test"));
    try {
        store.set("pct", ScalarValue(int64_t{999}), "test");
        FAIL("expected hook rejection");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HookRejected);
    }
}

TEST_CASE("re-entrant cascade on one stack is rejected") {
    FactoryRegistry reg;
    StackAssembly* stack_ptr = nullptr;
    bool caught = false;
    register_fn_sink(reg, "evil", [&](const EventPtr& e) {
        try {
            stack_ptr->inject(e);  // starting a new cascade mid-cascade
        } catch (const Error& err) {
            caught = err.code() == ErrorCode::Internal;
        }
    });
    auto stack = build("%s { @evil }", reg);
    stack_ptr = stack.get();
    stack->inject(make_event("tick"));
    CHECK(caught);
}

TEST_CASE("scalar rendering round-trips through the literal parser") {
    std::mt19937_64 rng(11);
    int tested = 0;
    while (tested < 500) {
        double d = std::bit_cast<double>(rng());
        if (!std::isfinite(d)) continue;
        ++tested;
        ScalarValue v(d);
        CHECK(parse_literal(v.render()) == v);
    }
    CHECK(parse_literal(ScalarValue(int64_t{-7}).render()).as_int() == -7);
    CHECK(parse_literal(ScalarValue(true).render()).as_bool());
    CHECK(parse_literal(ScalarValue("a \"quoted\" \\ string").render()).as_string() ==
          "a \"quoted\" \\ string");
}
