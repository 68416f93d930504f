// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>

#include "ibnsec/common.hpp"
#include "ibnsec/pki.hpp"

namespace ibnsec::intent {

using pki::Role;

/// Scope ladder: a consumer at each level delegates one level down.
///   IntentCSC: owner CSC, handler CSP
///   IntentCSP: owner CSP, handler NOP
///   IntentNOP: owner NOP, handler VISP (terminal — fulfilled, not delegated)
enum class Scope : uint8_t { IntentCSC = 0, IntentCSP = 1, IntentNOP = 2 };

const char* scope_name(Scope scope);
std::optional<Scope> scope_from_name(std::string_view name);
Role owner_for(Scope scope);
Role handler_for(Scope scope);
bool is_terminal(Scope scope);

enum class LifecycleState : uint8_t {
    Received = 0,
    Translated = 1,
    Deployed = 2,
    Assured = 3,
    Degraded = 4,
    Failed = 5,
};
const char* state_name(LifecycleState state);
std::optional<LifecycleState> state_from_name(std::string_view name);

enum class LifecycleEvent : uint8_t {
    Translate = 0,       // handler derived a child intent
    Deploy = 1,          // terminal handler fulfilled directly
    ChildDeployed = 2,   // child intent reported deployed
    AssuranceOk = 3,
    AssuranceDegraded = 4,
    Fail = 5,
};
const char* event_name(LifecycleEvent event);
inline constexpr int kLifecycleStateCount = 6;
inline constexpr int kLifecycleEventCount = 6;

/// The pure state machine. Edges:
///   Received→Translated (Translate), Received→Deployed (Deploy),
///   Translated→Deployed (ChildDeployed), Deployed→Assured (AssuranceOk),
///   Deployed→Degraded (AssuranceDegraded), Degraded→Assured (AssuranceOk),
///   any→Failed (Fail). Everything else throws IllegalTransition.
LifecycleState transition(LifecycleState state, LifecycleEvent event);

/// Scope gate applied by record keepers on top of transition(): Translate and
/// ChildDeployed only make sense below the terminal scope, Deploy only at it.
bool event_permitted_for_scope(Scope scope, LifecycleEvent event);

using IntentId = std::array<uint8_t, 16>;
std::string id_hex(const IntentId& id);
IntentId id_from_hex(std::string_view hex);

struct Target {
    double value = 0;
    std::string unit;
    bool operator==(const Target&) const = default;
};

struct Expectation {
    std::string key;
    std::string value;
    std::optional<Target> target;
    bool operator==(const Expectation&) const = default;
};

struct Intent {
    IntentId id{};
    Scope scope = Scope::IntentCSC;
    Role owner = Role::CSC;
    Role handler = Role::CSP;
    std::optional<IntentId> parent_id;
    std::vector<Expectation> expectations;
    LifecycleState state = LifecycleState::Received;
    uint64_t created_at = 0;  // UTC seconds

    bool operator==(const Intent&) const = default;
    std::optional<std::string> expectation_value(std::string_view key) const;
};

Intent new_intent(Scope scope, Role owner, std::vector<Expectation> expectations,
                  uint64_t now);  // ScopeOwnerMismatch

/// Pattern → template rule for deriving the next-scope intent. `match`
/// entries are (expectation key, required value); an empty value matches any.
/// `produce` values may reference parent expectations via ${key}.
struct TranslationRule {
    Scope match_scope = Scope::IntentCSC;
    std::vector<std::pair<std::string, std::string>> match;
    std::vector<Expectation> produce;
};

/// Derive the one-level-deeper intent from the first matching rule and move
/// the original Received→Translated. Throws TerminalScope for IntentNOP,
/// NoMatchingRule when nothing matches.
Intent translate(Intent& intent, std::span<const TranslationRule> rules, uint64_t now);

std::vector<TranslationRule> default_rules();
std::vector<TranslationRule> load_rules(const std::filesystem::path& path);
void save_rules(std::span<const TranslationRule> rules, const std::filesystem::path& path);

/// Canonical length-prefixed binary envelope; byte-stable for a fixed intent.
Bytes encode_intent(const Intent& intent);
Intent decode_intent(ByteSpan bytes);  // throws MalformedEnvelope

}  // namespace ibnsec::intent
