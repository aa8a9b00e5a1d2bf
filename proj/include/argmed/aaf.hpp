#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "argmed/errors.hpp"

namespace argmed {

// Argument token, unique within one framework. Ordered by string compare so
// every set-valued result iterates in a stable order.
struct ArgumentId {
    std::string value;

    ArgumentId() = default;
    explicit ArgumentId(std::string v) : value(std::move(v)) {}

    auto operator<=>(const ArgumentId&) const = default;
};

inline namespace literals {
inline ArgumentId operator""_id(const char* s, std::size_t n) {
    return ArgumentId(std::string(s, n));
}
}  // namespace literals

enum class ArgumentKind { Decision, Belief };

inline const char* kind_name(ArgumentKind k) {
    return k == ArgumentKind::Decision ? "decision" : "belief";
}

// Parses "decision"/"belief"; nullopt on anything else.
inline std::optional<ArgumentKind> kind_from_name(const std::string& name) {
    if (name == "decision") return ArgumentKind::Decision;
    if (name == "belief") return ArgumentKind::Belief;
    return std::nullopt;
}

// One node of a framework. Content fields (premises, conclusion, bindings) are
// carried verbatim; arguments born from a scheme get them filled by
// instantiation, arguments loaded from the bare text format may leave them
// empty. A Decision's conclusion is expected to name a single candidate
// action; that is a modelling convention, not machine-checked.
struct Argument {
    ArgumentId id;
    ArgumentKind kind = ArgumentKind::Belief;
    std::optional<std::string> scheme_id;
    std::vector<std::string> premises;
    std::string conclusion;
    std::map<std::string, std::string> bindings;

    bool operator==(const Argument&) const = default;
};

struct Attack {
    ArgumentId from;
    ArgumentId to;

    auto operator<=>(const Attack&) const = default;
};

enum class ViolationKind { MissingMutualAttack, ForbiddenAttack, DanglingEndpoint };

inline const char* violation_name(ViolationKind k) {
    switch (k) {
        case ViolationKind::MissingMutualAttack: return "missing-mutual-attack";
        case ViolationKind::ForbiddenAttack: return "forbidden-attack";
        case ViolationKind::DanglingEndpoint: return "dangling-endpoint";
    }
    return "unknown";
}

struct Violation {
    ViolationKind kind;
    std::string detail;

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<std::string> warnings;

    bool ok() const { return violations.empty(); }
};

// Typed abstract argumentation framework. The mutating API enforces the typing
// rules (distinct Decisions always attack each other; a Decision never attacks
// a Belief); the insert_*_raw methods bypass them so deserialized content can
// be inspected by validate() instead of being rejected at construction.
class ArgumentationFramework {
public:
    using AttackSet = std::set<Attack>;

    ArgumentationFramework() = default;

    // Registers a copy of arg and, when arg is a Decision, inserts the mutual
    // attacks against every Decision already present.
    ArgumentId add_argument(Argument arg) {
        if (arg.id.value.empty())
            throw Error(Err::UnknownArgument, "argument id must be non-empty");
        if (args_.contains(arg.id))
            throw Error(Err::DuplicateId, "argument '" + arg.id.value + "' already exists");
        ArgumentId id = arg.id;
        if (arg.kind == ArgumentKind::Decision) {
            for (const auto& [other_id, other] : args_) {
                if (other.kind == ArgumentKind::Decision) {
                    link(id, other_id);
                    link(other_id, id);
                }
            }
        }
        args_.emplace(id, std::move(arg));
        touch(id);
        return id;
    }

    // Inserts (from, to). Rejects endpoints that are not registered and the
    // Decision-attacks-Belief direction; re-adding an existing attack is a
    // no-op.
    void add_attack(const ArgumentId& from, const ArgumentId& to) {
        const Argument& src = argument(from);
        const Argument& dst = argument(to);
        if (src.kind == ArgumentKind::Decision && dst.kind == ArgumentKind::Belief)
            throw Error(Err::ForbiddenAttack,
                        "decision '" + from.value + "' may not attack belief '" + to.value + "'");
        link(from, to);
    }

    // Deserialization entry points: no typing rules, so validate() can report
    // exactly what a file contains.
    void insert_argument_raw(Argument arg) {
        if (arg.id.value.empty())
            throw Error(Err::UnknownArgument, "argument id must be non-empty");
        if (args_.contains(arg.id))
            throw Error(Err::DuplicateId, "argument '" + arg.id.value + "' already exists");
        ArgumentId id = arg.id;
        args_.emplace(id, std::move(arg));
        touch(id);
    }

    void insert_attack_raw(const ArgumentId& from, const ArgumentId& to) { link(from, to); }

    bool contains(const ArgumentId& id) const { return args_.contains(id); }

    const Argument& argument(const ArgumentId& id) const {
        auto it = args_.find(id);
        if (it == args_.end())
            throw Error(Err::UnknownArgument, "unknown argument '" + id.value + "'");
        return it->second;
    }

    // Exact attacker set {x | (x, id) in attacks}; may include unregistered
    // ids after raw insertion.
    const std::set<ArgumentId>& attackers(const ArgumentId& id) const {
        require(id);
        auto it = attackers_.find(id);
        return it == attackers_.end() ? empty_set() : it->second;
    }

    const std::set<ArgumentId>& targets_of(const ArgumentId& id) const {
        require(id);
        auto it = targets_.find(id);
        return it == targets_.end() ? empty_set() : it->second;
    }

    bool has_attack(const ArgumentId& from, const ArgumentId& to) const {
        return attacks_.contains(Attack{from, to});
    }

    std::size_t argument_count() const { return args_.size(); }
    std::size_t attack_count() const { return attacks_.size(); }

    std::vector<ArgumentId> ids() const {
        std::vector<ArgumentId> out;
        out.reserve(args_.size());
        for (const auto& [id, _] : args_) out.push_back(id);
        return out;
    }

    std::vector<ArgumentId> decision_ids() const {
        std::vector<ArgumentId> out;
        for (const auto& [id, arg] : args_)
            if (arg.kind == ArgumentKind::Decision) out.push_back(id);
        return out;
    }

    const std::map<ArgumentId, Argument>& arguments() const { return args_; }
    const AttackSet& attacks() const { return attacks_; }

    // Checks the typing rules over the stored relation. Violations: a missing
    // mutual attack between two Decisions, a Decision-to-Belief edge, an edge
    // endpoint with no registered argument. Self-attacks are only warned
    // about. Order of findings is deterministic (sorted ids / sorted edges).
    ValidationReport validate() const {
        ValidationReport report;
        std::vector<ArgumentId> decisions = decision_ids();
        for (const ArgumentId& a : decisions) {
            for (const ArgumentId& b : decisions) {
                if (a == b) continue;
                if (!has_attack(a, b))
                    report.violations.push_back(
                        {ViolationKind::MissingMutualAttack,
                         "decisions '" + a.value + "' and '" + b.value +
                             "' must attack each other, but (" + a.value + "," + b.value +
                             ") is missing"});
            }
        }
        for (const Attack& at : attacks_) {
            const bool from_known = contains(at.from);
            const bool to_known = contains(at.to);
            if (!from_known)
                report.violations.push_back(
                    {ViolationKind::DanglingEndpoint,
                     "attack (" + at.from.value + "," + at.to.value + ") names unknown source '" +
                         at.from.value + "'"});
            if (!to_known)
                report.violations.push_back(
                    {ViolationKind::DanglingEndpoint,
                     "attack (" + at.from.value + "," + at.to.value + ") names unknown target '" +
                         at.to.value + "'"});
            if (from_known && to_known) {
                if (args_.at(at.from).kind == ArgumentKind::Decision &&
                    args_.at(at.to).kind == ArgumentKind::Belief)
                    report.violations.push_back(
                        {ViolationKind::ForbiddenAttack,
                         "decision '" + at.from.value + "' attacks belief '" + at.to.value + "'"});
                if (at.from == at.to)
                    report.warnings.push_back("argument '" + at.from.value + "' attacks itself");
            }
        }
        return report;
    }

    bool operator==(const ArgumentationFramework& other) const {
        return args_ == other.args_ && attacks_ == other.attacks_;
    }

private:
    void require(const ArgumentId& id) const { argument(id); }

    void link(const ArgumentId& from, const ArgumentId& to) {
        attacks_.insert(Attack{from, to});
        attackers_[to].insert(from);
        targets_[from].insert(to);
    }

    // Ensures adjacency rows exist so attackers()/targets_of() can hand out
    // references without mutating.
    void touch(const ArgumentId& id) {
        attackers_.try_emplace(id);
        targets_.try_emplace(id);
    }

    static const std::set<ArgumentId>& empty_set() {
        static const std::set<ArgumentId> empty;
        return empty;
    }

    std::map<ArgumentId, Argument> args_;
    AttackSet attacks_;
    std::map<ArgumentId, std::set<ArgumentId>> attackers_;
    std::map<ArgumentId, std::set<ArgumentId>> targets_;
};

inline ArgumentationFramework new_framework() { return ArgumentationFramework{}; }

// Structural equality: same ids, same kinds, same attack relation. Content
// fields are ignored, which is what the text format can represent.
inline bool same_structure(const ArgumentationFramework& a, const ArgumentationFramework& b) {
    if (a.attacks() != b.attacks()) return false;
    const auto& am = a.arguments();
    const auto& bm = b.arguments();
    if (am.size() != bm.size()) return false;
    for (auto ai = am.begin(), bi = bm.begin(); ai != am.end(); ++ai, ++bi) {
        if (ai->first != bi->first) return false;
        if (ai->second.kind != bi->second.kind) return false;
    }
    return true;
}

}  // namespace argmed
