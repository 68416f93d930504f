// SPDX-License-Identifier: Apache-2.0
#include "ibnsec/intent.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ibnsec/crypto.hpp"

namespace ibnsec::intent {

using nlohmann::json;

const char* scope_name(Scope scope) {
    switch (scope) {
        case Scope::IntentCSC: return "intent-csc";
        case Scope::IntentCSP: return "intent-csp";
        case Scope::IntentNOP: return "intent-nop";
    }
    return "?";
}

std::optional<Scope> scope_from_name(std::string_view name) {
    for (Scope s : {Scope::IntentCSC, Scope::IntentCSP, Scope::IntentNOP})
        if (name == scope_name(s)) return s;
    return std::nullopt;
}

Role owner_for(Scope scope) {
    switch (scope) {
        case Scope::IntentCSC: return Role::CSC;
        case Scope::IntentCSP: return Role::CSP;
        case Scope::IntentNOP: return Role::NOP;
    }
    return Role::CSC;
}

Role handler_for(Scope scope) {
    switch (scope) {
        case Scope::IntentCSC: return Role::CSP;
        case Scope::IntentCSP: return Role::NOP;
        case Scope::IntentNOP: return Role::VISP;
    }
    return Role::CSP;
}

bool is_terminal(Scope scope) {
    return scope == Scope::IntentNOP;
}

const char* state_name(LifecycleState state) {
    switch (state) {
        case LifecycleState::Received: return "received";
        case LifecycleState::Translated: return "translated";
        case LifecycleState::Deployed: return "deployed";
        case LifecycleState::Assured: return "assured";
        case LifecycleState::Degraded: return "degraded";
        case LifecycleState::Failed: return "failed";
    }
    return "?";
}

std::optional<LifecycleState> state_from_name(std::string_view name) {
    for (int i = 0; i < kLifecycleStateCount; ++i)
        if (name == state_name(LifecycleState(i))) return LifecycleState(i);
    return std::nullopt;
}

const char* event_name(LifecycleEvent event) {
    switch (event) {
        case LifecycleEvent::Translate: return "translate";
        case LifecycleEvent::Deploy: return "deploy";
        case LifecycleEvent::ChildDeployed: return "child-deployed";
        case LifecycleEvent::AssuranceOk: return "assurance-ok";
        case LifecycleEvent::AssuranceDegraded: return "assurance-degraded";
        case LifecycleEvent::Fail: return "fail";
    }
    return "?";
}

LifecycleState transition(LifecycleState state, LifecycleEvent event) {
    if (event == LifecycleEvent::Fail) return LifecycleState::Failed;
    switch (state) {
        case LifecycleState::Received:
            if (event == LifecycleEvent::Translate) return LifecycleState::Translated;
            if (event == LifecycleEvent::Deploy) return LifecycleState::Deployed;
            break;
        case LifecycleState::Translated:
            if (event == LifecycleEvent::ChildDeployed) return LifecycleState::Deployed;
            break;
        case LifecycleState::Deployed:
            if (event == LifecycleEvent::AssuranceOk) return LifecycleState::Assured;
            if (event == LifecycleEvent::AssuranceDegraded) return LifecycleState::Degraded;
            break;
        case LifecycleState::Degraded:
            if (event == LifecycleEvent::AssuranceOk) return LifecycleState::Assured;
            break;
        case LifecycleState::Assured:
        case LifecycleState::Failed:
            break;
    }
    fail(ErrorCode::IllegalTransition, std::string(state_name(state)) + " + " + event_name(event));
}

bool event_permitted_for_scope(Scope scope, LifecycleEvent event) {
    switch (event) {
        case LifecycleEvent::Translate:
        case LifecycleEvent::ChildDeployed:
            return !is_terminal(scope);
        case LifecycleEvent::Deploy:
            return is_terminal(scope);
        default:
            return true;
    }
}

std::string id_hex(const IntentId& id) {
    return to_hex(id);
}

IntentId id_from_hex(std::string_view hex) {
    return array_from_hex<16>(hex);
}

std::optional<std::string> Intent::expectation_value(std::string_view key) const {
    for (const auto& e : expectations)
        if (e.key == key) return e.value;
    return std::nullopt;
}

Intent new_intent(Scope scope, Role owner, std::vector<Expectation> expectations, uint64_t now) {
    if (owner != owner_for(scope))
        fail(ErrorCode::ScopeOwnerMismatch, std::string(role_name(owner)) + " cannot own " +
                                                scope_name(scope));
    Intent intent;
    crypto::random_fill(intent.id);
    intent.scope = scope;
    intent.owner = owner;
    intent.handler = handler_for(scope);
    intent.expectations = std::move(expectations);
    intent.state = LifecycleState::Received;
    intent.created_at = now;
    return intent;
}

namespace {

bool rule_matches(const TranslationRule& rule, const Intent& intent) {
    if (rule.match_scope != intent.scope) return false;
    for (const auto& [key, required] : rule.match) {
        auto v = intent.expectation_value(key);
        if (!v) return false;
        if (!required.empty() && *v != required) return false;
    }
    return true;
}

std::string substitute(const std::string& tmpl, const Intent& parent) {
    std::string out;
    size_t pos = 0;
    while (pos < tmpl.size()) {
        size_t open = tmpl.find("${", pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        size_t close = tmpl.find('}', open);
        if (close == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        std::string key = tmpl.substr(open + 2, close - open - 2);
        auto v = parent.expectation_value(key);
        out += v ? *v : tmpl.substr(open, close - open + 1);  // unknown key stays literal
        pos = close + 1;
    }
    return out;
}

}  // namespace

Intent translate(Intent& intent, std::span<const TranslationRule> rules, uint64_t now) {
    if (is_terminal(intent.scope))
        fail(ErrorCode::TerminalScope, "intent-nop is fulfilled, not re-delegated");
    const TranslationRule* hit = nullptr;
    for (const auto& rule : rules) {
        if (rule_matches(rule, intent)) {
            hit = &rule;
            break;
        }
    }
    if (!hit) fail(ErrorCode::NoMatchingRule, "no translation rule matches");

    Scope child_scope = Scope(uint8_t(intent.scope) + 1);
    Intent derived;
    crypto::random_fill(derived.id);
    derived.scope = child_scope;
    derived.owner = intent.handler;  // the consumer/producer relay
    derived.handler = handler_for(child_scope);
    derived.parent_id = intent.id;
    derived.state = LifecycleState::Received;
    derived.created_at = now;
    for (const auto& e : hit->produce) {
        Expectation out;
        out.key = e.key;
        out.value = substitute(e.value, intent);
        out.target = e.target;
        derived.expectations.push_back(std::move(out));
    }
    intent.state = transition(intent.state, LifecycleEvent::Translate);
    return derived;
}

std::vector<TranslationRule> default_rules() {
    std::vector<TranslationRule> rules;

    // the worked consumer scenario: remote industrial control of an area
    rules.push_back({Scope::IntentCSC,
                     {{"service", "remote-industrial-control"}},
                     {{"network-capability", "industrial-control", std::nullopt},
                      {"area", "${area}", std::nullopt}}});
    rules.push_back({Scope::IntentCSP,
                     {{"network-capability", "industrial-control"}},
                     {{"ran-area", "${area}", std::nullopt},
                      {"core-capability", "ultra-reliable-communications", std::nullopt}}});

    // generic bandwidth chain
    rules.push_back({Scope::IntentCSC,
                     {{"bandwidth-mbps", ""}},
                     {{"link-capacity-mbps", "${bandwidth-mbps}", std::nullopt}}});
    rules.push_back({Scope::IntentCSP,
                     {{"link-capacity-mbps", ""}},
                     {{"transport-capacity-mbps", "${link-capacity-mbps}", std::nullopt}}});

    // generic latency chain
    rules.push_back({Scope::IntentCSC,
                     {{"latency-ms", ""}},
                     {{"max-latency-ms", "${latency-ms}", std::nullopt}}});
    rules.push_back({Scope::IntentCSP,
                     {{"max-latency-ms", ""}},
                     {{"scheduling-latency-ms", "${max-latency-ms}", std::nullopt}}});
    return rules;
}

std::vector<TranslationRule> load_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::MissingFile, path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, std::string("rules: ") + e.what());
    }
    std::vector<TranslationRule> rules;
    try {
        for (const auto& jr : doc) {
            TranslationRule rule;
            auto scope = scope_from_name(jr.at("match_scope").get<std::string>());
            if (!scope) fail(ErrorCode::ParseError, "rules: bad match_scope");
            rule.match_scope = *scope;
            for (const auto& [k, v] : jr.at("match").items())
                rule.match.emplace_back(k, v.get<std::string>());
            for (const auto& jp : jr.at("produce")) {
                Expectation e;
                e.key = jp.at("key").get<std::string>();
                e.value = jp.at("value").get<std::string>();
                if (jp.contains("target"))
                    e.target = Target{jp["target"].at("value").get<double>(),
                                      jp["target"].at("unit").get<std::string>()};
                rule.produce.push_back(std::move(e));
            }
            rules.push_back(std::move(rule));
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::ParseError, std::string("rules: ") + e.what());
    }
    return rules;
}

void save_rules(std::span<const TranslationRule> rules, const std::filesystem::path& path) {
    json doc = json::array();
    for (const auto& rule : rules) {
        json jr;
        jr["match_scope"] = scope_name(rule.match_scope);
        jr["match"] = json::object();
        for (const auto& [k, v] : rule.match) jr["match"][k] = v;
        jr["produce"] = json::array();
        for (const auto& e : rule.produce) {
            json jp{{"key", e.key}, {"value", e.value}};
            if (e.target) jp["target"] = {{"value", e.target->value}, {"unit", e.target->unit}};
            jr["produce"].push_back(jp);
        }
        doc.push_back(jr);
    }
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, path.string());
    out << doc.dump(2) << '\n';
}

// --- canonical envelope ---

namespace {

constexpr uint8_t kEnvelopeVersion = 1;
constexpr size_t kMaxExpectations = 256;
constexpr size_t kMaxStringLen = 4096;

void put_string(Bytes& out, const std::string& s) {
    if (s.size() > kMaxStringLen) fail(ErrorCode::MalformedEnvelope, "string too long");
    size_t at = out.size();
    out.resize(at + 2);
    put_u16le(out.data() + at, uint16_t(s.size()));
    append(out, str_span(s));
}

struct Reader {
    ByteSpan data;
    size_t pos = 0;

    void need(size_t n) {
        if (pos + n > data.size()) fail(ErrorCode::MalformedEnvelope, "truncated envelope");
    }
    uint8_t u8() {
        need(1);
        return data[pos++];
    }
    uint16_t u16() {
        need(2);
        uint16_t v = get_u16le(data.data() + pos);
        pos += 2;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = get_u64le(data.data() + pos);
        pos += 8;
        return v;
    }
    std::string string() {
        uint16_t n = u16();
        if (n > kMaxStringLen) fail(ErrorCode::MalformedEnvelope, "string too long");
        need(n);
        std::string s(reinterpret_cast<const char*>(data.data() + pos), n);
        pos += n;
        return s;
    }
    template <size_t N>
    std::array<uint8_t, N> array() {
        need(N);
        std::array<uint8_t, N> out;
        std::memcpy(out.data(), data.data() + pos, N);
        pos += N;
        return out;
    }
};

}  // namespace

Bytes encode_intent(const Intent& intent) {
    Bytes out;
    out.push_back(kEnvelopeVersion);
    append(out, intent.id);
    out.push_back(uint8_t(intent.scope));
    out.push_back(uint8_t(intent.owner));
    out.push_back(uint8_t(intent.handler));
    out.push_back(intent.parent_id ? 1 : 0);
    if (intent.parent_id) append(out, *intent.parent_id);
    out.push_back(uint8_t(intent.state));
    size_t at = out.size();
    out.resize(at + 8);
    put_u64le(out.data() + at, intent.created_at);
    if (intent.expectations.size() > kMaxExpectations)
        fail(ErrorCode::MalformedEnvelope, "too many expectations");
    at = out.size();
    out.resize(at + 2);
    put_u16le(out.data() + at, uint16_t(intent.expectations.size()));
    for (const auto& e : intent.expectations) {
        put_string(out, e.key);
        put_string(out, e.value);
        out.push_back(e.target ? 1 : 0);
        if (e.target) {
            uint64_t bits;
            static_assert(sizeof(bits) == sizeof(e.target->value));
            std::memcpy(&bits, &e.target->value, 8);
            size_t t = out.size();
            out.resize(t + 8);
            put_u64le(out.data() + t, bits);
            put_string(out, e.target->unit);
        }
    }
    return out;
}

Intent decode_intent(ByteSpan bytes) {
    Reader r{bytes};
    if (r.u8() != kEnvelopeVersion) fail(ErrorCode::MalformedEnvelope, "bad envelope version");
    Intent intent;
    intent.id = r.array<16>();
    uint8_t scope = r.u8(), owner = r.u8(), handler = r.u8();
    if (scope > uint8_t(Scope::IntentNOP) || owner > uint8_t(Role::VISP) ||
        handler > uint8_t(Role::VISP))
        fail(ErrorCode::MalformedEnvelope, "bad enum byte");
    intent.scope = Scope(scope);
    intent.owner = Role(owner);
    intent.handler = Role(handler);
    uint8_t has_parent = r.u8();
    if (has_parent > 1) fail(ErrorCode::MalformedEnvelope, "bad parent flag");
    if (has_parent) intent.parent_id = r.array<16>();
    // lineage invariant: parent present iff below the top scope
    if (has_parent == (intent.scope == Scope::IntentCSC ? 1 : 0))
        fail(ErrorCode::MalformedEnvelope, "parent flag inconsistent with scope");
    uint8_t state = r.u8();
    if (state >= kLifecycleStateCount) fail(ErrorCode::MalformedEnvelope, "bad state byte");
    intent.state = LifecycleState(state);
    intent.created_at = r.u64();
    uint16_t n = r.u16();
    if (n > kMaxExpectations) fail(ErrorCode::MalformedEnvelope, "too many expectations");
    for (uint16_t i = 0; i < n; ++i) {
        Expectation e;
        e.key = r.string();
        e.value = r.string();
        uint8_t has_target = r.u8();
        if (has_target > 1) fail(ErrorCode::MalformedEnvelope, "bad target flag");
        if (has_target) {
            uint64_t bits = r.u64();
            double v;
            std::memcpy(&v, &bits, 8);
            std::string unit = r.string();
            e.target = Target{v, std::move(unit)};
        }
        intent.expectations.push_back(std::move(e));
    }
    if (r.pos != bytes.size()) fail(ErrorCode::MalformedEnvelope, "trailing bytes");
    return intent;
}

}  // namespace ibnsec::intent
