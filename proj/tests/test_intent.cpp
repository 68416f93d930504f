// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <map>

#include "ibnsec/intent.hpp"
#include "test_support.hpp"

using namespace ibnsec;
using namespace ibnsec::intent;
using pki::Role;
using ibnsec::test::Rng;

namespace {

constexpr uint64_t kNow = 1700000000;

std::vector<Expectation> area_a_expectations() {
    return {{"service", "remote-industrial-control", std::nullopt},
            {"area", "A", std::nullopt}};
}

Intent random_intent(Rng& rng) {
    Scope scope = Scope(rng.below(3));
    Intent i;
    for (auto& b : i.id) b = uint8_t(rng.u64());
    i.scope = scope;
    i.owner = owner_for(scope);
    i.handler = handler_for(scope);
    if (scope != Scope::IntentCSC) {
        IntentId parent;
        for (auto& b : parent) b = uint8_t(rng.u64());
        i.parent_id = parent;
    }
    i.state = LifecycleState(rng.below(6));
    i.created_at = rng.u64();
    size_t n = rng.below(5);
    for (size_t k = 0; k < n; ++k) {
        Expectation e;
        e.key = "key-" + std::to_string(rng.below(100));
        e.value = std::string(rng.below(20), 'v');
        if (rng.below(2)) e.target = Target{double(rng.below(1000)) / 7.0, "ms"};
        i.expectations.push_back(std::move(e));
    }
    return i;
}

}  // namespace

TEST_CASE("new_intent: the consumer scenario") {
    Intent i = new_intent(Scope::IntentCSC, Role::CSC, area_a_expectations(), kNow);
    CHECK(i.scope == Scope::IntentCSC);
    CHECK(i.owner == Role::CSC);
    CHECK(i.handler == Role::CSP);
    CHECK(i.state == LifecycleState::Received);
    CHECK_FALSE(i.parent_id.has_value());
    CHECK(i.expectation_value("service") == "remote-industrial-control");

    Intent j = new_intent(Scope::IntentCSC, Role::CSC, area_a_expectations(), kNow);
    CHECK(i.id != j.id);  // distinct ids

    try {
        new_intent(Scope::IntentCSP, Role::CSC, {}, kNow);
        FAIL("expected ScopeOwnerMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ScopeOwnerMismatch);
    }
}

TEST_CASE("translate walks the scope ladder with the default rules") {
    auto rules = default_rules();

    Intent csc = new_intent(Scope::IntentCSC, Role::CSC, area_a_expectations(), kNow);
    Intent csp = translate(csc, rules, kNow);
    CHECK(csc.state == LifecycleState::Translated);
    CHECK(csp.scope == Scope::IntentCSP);
    CHECK(csp.owner == Role::CSP);
    CHECK(csp.handler == Role::NOP);
    CHECK(csp.parent_id == csc.id);
    CHECK(csp.expectation_value("network-capability") == "industrial-control");
    CHECK(csp.expectation_value("area") == "A");  // carried through the template

    Intent nop = translate(csp, rules, kNow);
    CHECK(nop.scope == Scope::IntentNOP);
    CHECK(nop.owner == Role::NOP);
    CHECK(nop.handler == Role::VISP);
    CHECK(nop.parent_id == csp.id);
    CHECK(nop.expectation_value("ran-area") == "A");
    CHECK(nop.expectation_value("core-capability") == "ultra-reliable-communications");

    // lineage: NOP → CSC in exactly two hops
    CHECK(nop.parent_id == csp.id);
    CHECK(csp.parent_id == csc.id);

    try {
        translate(nop, rules, kNow);
        FAIL("expected TerminalScope");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TerminalScope);
    }

    Intent other = new_intent(Scope::IntentCSC, Role::CSC, {{"service", "x", std::nullopt}}, kNow);
    try {
        translate(other, std::span<const TranslationRule>{}, kNow);
        FAIL("expected NoMatchingRule");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoMatchingRule);
    }
}

TEST_CASE("generic bandwidth and latency rules chain to the terminal scope") {
    auto rules = default_rules();
    Intent bw = new_intent(Scope::IntentCSC, Role::CSC,
                           {{"bandwidth-mbps", "250", std::nullopt}}, kNow);
    Intent bw_csp = translate(bw, rules, kNow);
    CHECK(bw_csp.expectation_value("link-capacity-mbps") == "250");
    Intent bw_nop = translate(bw_csp, rules, kNow);
    CHECK(bw_nop.expectation_value("transport-capacity-mbps") == "250");

    Intent lat = new_intent(Scope::IntentCSC, Role::CSC,
                            {{"latency-ms", "10", std::nullopt}}, kNow);
    Intent lat_csp = translate(lat, rules, kNow);
    CHECK(lat_csp.expectation_value("max-latency-ms") == "10");
}

TEST_CASE("ownership chain: derived.owner == parent.handler") {
    auto rules = default_rules();
    Intent csc = new_intent(Scope::IntentCSC, Role::CSC, area_a_expectations(), kNow);
    Intent csp = translate(csc, rules, kNow);
    CHECK(csp.owner == csc.handler);
    Intent nop = translate(csp, rules, kNow);
    CHECK(nop.owner == csp.handler);
}

TEST_CASE("transition table matches the edge-list oracle exhaustively") {
    using S = LifecycleState;
    using E = LifecycleEvent;
    // independent statement of the documented edge list; Fail is any→Failed
    std::map<std::pair<S, E>, S> edges = {
        {{S::Received, E::Translate}, S::Translated},
        {{S::Received, E::Deploy}, S::Deployed},
        {{S::Translated, E::ChildDeployed}, S::Deployed},
        {{S::Deployed, E::AssuranceOk}, S::Assured},
        {{S::Deployed, E::AssuranceDegraded}, S::Degraded},
        {{S::Degraded, E::AssuranceOk}, S::Assured},
    };
    for (int s = 0; s < kLifecycleStateCount; ++s)
        edges[{S(s), E::Fail}] = S::Failed;

    int legal = 0;
    for (int s = 0; s < kLifecycleStateCount; ++s) {
        for (int e = 0; e < kLifecycleEventCount; ++e) {
            auto it = edges.find({S(s), E(e)});
            CAPTURE(s);
            CAPTURE(e);
            if (it != edges.end()) {
                CHECK(transition(S(s), E(e)) == it->second);
                ++legal;
            } else {
                CHECK_THROWS_AS(transition(S(s), E(e)), Error);
            }
        }
    }
    CHECK(legal == 6 + 6);  // 6 named edges + any→Failed over 6 states
}

TEST_CASE("no path reaches Assured without passing Deployed") {
    using S = LifecycleState;
    using E = LifecycleEvent;
    // BFS over the reachable graph from Received, tracking deployment
    struct Node {
        S state;
        bool deployed;
        bool operator<(const Node& o) const {
            return std::tie(state, deployed) < std::tie(o.state, o.deployed);
        }
    };
    std::set<Node> seen;
    std::vector<Node> frontier{{S::Received, false}};
    while (!frontier.empty()) {
        Node n = frontier.back();
        frontier.pop_back();
        if (!seen.insert(n).second) continue;
        if (n.state == S::Assured) CHECK(n.deployed);
        for (int e = 0; e < kLifecycleEventCount; ++e) {
            try {
                S next = transition(n.state, E(e));
                frontier.push_back({next, n.deployed || next == S::Deployed});
            } catch (const Error&) {
            }
        }
    }
}

TEST_CASE("scope gating of lifecycle events") {
    CHECK(event_permitted_for_scope(Scope::IntentCSC, LifecycleEvent::Translate));
    CHECK(event_permitted_for_scope(Scope::IntentCSP, LifecycleEvent::ChildDeployed));
    CHECK_FALSE(event_permitted_for_scope(Scope::IntentNOP, LifecycleEvent::Translate));
    CHECK_FALSE(event_permitted_for_scope(Scope::IntentNOP, LifecycleEvent::ChildDeployed));
    CHECK(event_permitted_for_scope(Scope::IntentNOP, LifecycleEvent::Deploy));
    CHECK_FALSE(event_permitted_for_scope(Scope::IntentCSC, LifecycleEvent::Deploy));
    CHECK(event_permitted_for_scope(Scope::IntentNOP, LifecycleEvent::Fail));
}

TEST_CASE("intent envelope codec: roundtrip, stability, malformed input") {
    Rng rng(401);
    for (int i = 0; i < 100; ++i) {
        Intent intent = random_intent(rng);
        Bytes encoded = encode_intent(intent);
        CHECK(decode_intent(encoded) == intent);
        CHECK(encode_intent(intent) == encoded);  // byte-stable

        // truncation always fails cleanly
        if (!encoded.empty()) {
            Bytes truncated(encoded.begin(), encoded.end() - 1);
            CHECK_THROWS_AS(decode_intent(truncated), Error);
        }
        Bytes extended = encoded;
        extended.push_back(0);
        CHECK_THROWS_AS(decode_intent(extended), Error);
    }

    // encode is injective over a corpus
    std::set<Bytes> images;
    for (int i = 0; i < 200; ++i) CHECK(images.insert(encode_intent(random_intent(rng))).second);

    // decode totality over random bytes
    for (int i = 0; i < 20000; ++i) {
        Bytes buf = rng.bytes(rng.below(120));
        if (!buf.empty()) buf[0] = 1;
        try {
            decode_intent(buf);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MalformedEnvelope);
        }
    }
}

TEST_CASE("rules save/load roundtrip") {
    namespace fs = std::filesystem;
    fs::path path = fs::temp_directory_path() / "ibnsec_rules_test.json";
    auto rules = default_rules();
    save_rules(rules, path);
    auto loaded = load_rules(path);
    REQUIRE(loaded.size() == rules.size());
    for (size_t i = 0; i < rules.size(); ++i) {
        CHECK(loaded[i].match_scope == rules[i].match_scope);
        CHECK(loaded[i].match == rules[i].match);
        CHECK(loaded[i].produce == rules[i].produce);
    }
    fs::remove(path);

    CHECK_THROWS_AS(load_rules(fs::path("/nonexistent/rules.json")), Error);
}
