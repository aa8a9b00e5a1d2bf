#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "argmed/aaf.hpp"
#include "argmed/errors.hpp"
#include "argmed/semantics.hpp"

namespace argmed {

// One way to settle the case: a single decision plus the coherent beliefs that
// stand with it. full_set() is the underlying preferred extension.
struct ExplanationSet {
    ArgumentId decision;
    Extension supporters;  // the extension minus the decision itself

    Extension full_set() const {
        Extension s = supporters;
        s.insert(decision);
        return s;
    }

    bool operator==(const ExplanationSet&) const = default;
};

struct DecisionReport {
    std::vector<ArgumentId> optional_decisions;
    std::vector<ExplanationSet> explanation_sets;
    bool error_flag = false;
    std::string error_note;  // non-empty exactly when error_flag is set
    bool exclusivity_checked = false;

    bool operator==(const DecisionReport&) const = default;
};

namespace detail {

inline void require_valid(const ArgumentationFramework& fw) {
    ValidationReport report = fw.validate();
    if (report.ok()) return;
    std::string msg = "framework fails validation:";
    for (const Violation& v : report.violations) msg += " [" + v.detail + "]";
    throw Error(Err::InvalidFramework, msg);
}

inline std::string join_ids(const std::set<ArgumentId>& ids) {
    std::string out;
    for (const ArgumentId& id : ids) {
        if (!out.empty()) out += ", ";
        out += id.value;
    }
    return out.empty() ? "(none)" : out;
}

inline std::string set_to_string(const Extension& e) { return "{" + join_ids(e) + "}"; }

}  // namespace detail

// Decisions that appear in at least one preferred extension, sorted.
inline std::vector<ArgumentId> optional_decisions(const ArgumentationFramework& fw) {
    detail::require_valid(fw);
    std::vector<Extension> prefs = preferred_extensions(fw);
    std::vector<ArgumentId> out;
    for (const ArgumentId& d : fw.decision_ids()) {
        for (const Extension& e : prefs) {
            if (e.contains(d)) {
                out.push_back(d);
                break;
            }
        }
    }
    return out;
}

// One explanation set per preferred extension that contains a decision. A
// conflict-free set holds at most one decision (distinct decisions attack each
// other), so the decision slot is unique.
inline std::vector<ExplanationSet> explanation_sets(const ArgumentationFramework& fw) {
    detail::require_valid(fw);
    std::vector<ExplanationSet> out;
    for (const Extension& e : preferred_extensions(fw)) {
        ExplanationSet set;
        bool found = false;
        for (const ArgumentId& member : e) {
            if (fw.argument(member).kind != ArgumentKind::Decision) continue;
            if (found)
                throw Error(Err::InternalInconsistency,
                            "preferred extension " + detail::set_to_string(e) +
                                " holds two decisions");
            set.decision = member;
            found = true;
        }
        if (!found) continue;
        set.supporters = e;
        set.supporters.erase(set.decision);
        out.push_back(std::move(set));
    }
    return out;
}

// Full analysis of a validated framework. error_flag is set exactly when no
// decision is credulously accepted under preferred semantics; the note then
// explains what defeated each decision and which coherent belief sets remain.
inline DecisionReport detect_reasoning_error(const ArgumentationFramework& fw) {
    detail::require_valid(fw);
    DecisionReport report;
    report.optional_decisions = optional_decisions(fw);
    report.explanation_sets = explanation_sets(fw);
    report.error_flag = report.optional_decisions.empty();
    if (!report.error_flag) return report;

    std::vector<ArgumentId> decisions = fw.decision_ids();
    if (decisions.empty()) {
        report.error_note = "no decision arguments are present in the framework";
        return report;
    }
    std::string note =
        "no decision argument is credulously accepted under preferred semantics";
    for (const ArgumentId& d : decisions) {
        std::set<ArgumentId> hostile;
        for (const ArgumentId& b : fw.attackers(d))
            if (fw.contains(b) && fw.argument(b).kind == ArgumentKind::Belief)
                hostile.insert(b);
        note += "; decision " + d.value + " is defeated by " + detail::join_ids(hostile);
    }
    std::vector<Extension> prefs = preferred_extensions(fw);
    bool any_nonempty = false;
    std::string sets;
    for (const Extension& e : prefs) {
        if (!sets.empty()) sets += ", ";
        sets += detail::set_to_string(e);
        if (!e.empty()) any_nonempty = true;
    }
    note += any_nonempty ? "; surviving belief sets: " + sets
                         : "; only the empty set is coherent";
    report.error_note = note;
    return report;
}

// Confirms each explanation set names exactly one decision and marks the
// report as checked. The framework supplies the kind information. Raised on a
// report whose sets were corrupted after construction.
inline DecisionReport exclusivity_filter(const ArgumentationFramework& fw, DecisionReport report) {
    for (const ExplanationSet& set : report.explanation_sets) {
        if (!fw.contains(set.decision) ||
            fw.argument(set.decision).kind != ArgumentKind::Decision)
            throw Error(Err::InternalInconsistency,
                        "explanation set names '" + set.decision.value +
                            "' which is not a decision");
        for (const ArgumentId& s : set.supporters) {
            if (fw.contains(s) && fw.argument(s).kind == ArgumentKind::Decision)
                throw Error(Err::InternalInconsistency,
                            "explanation set for '" + set.decision.value +
                                "' holds a second decision '" + s.value + "'");
        }
    }
    report.exclusivity_checked = true;
    return report;
}

inline nlohmann::json report_to_json(const DecisionReport& report) {
    nlohmann::json j;
    j["optional_decisions"] = nlohmann::json::array();
    for (const ArgumentId& d : report.optional_decisions)
        j["optional_decisions"].push_back(d.value);
    j["explanation_sets"] = nlohmann::json::array();
    for (const ExplanationSet& set : report.explanation_sets) {
        nlohmann::json entry;
        entry["decision"] = set.decision.value;
        entry["supporters"] = nlohmann::json::array();
        for (const ArgumentId& s : set.supporters) entry["supporters"].push_back(s.value);
        j["explanation_sets"].push_back(entry);
    }
    j["error_flag"] = report.error_flag;
    if (report.error_flag) j["error_note"] = report.error_note;
    return j;
}

inline DecisionReport report_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("report document must be a JSON object");
    DecisionReport report;
    if (!j.contains("optional_decisions") || !j["optional_decisions"].is_array())
        throw ParseError("report needs an 'optional_decisions' array");
    for (const auto& d : j["optional_decisions"]) {
        if (!d.is_string()) throw ParseError("optional_decisions entries must be strings");
        report.optional_decisions.push_back(ArgumentId(d.get<std::string>()));
    }
    if (!j.contains("explanation_sets") || !j["explanation_sets"].is_array())
        throw ParseError("report needs an 'explanation_sets' array");
    for (const auto& entry : j["explanation_sets"]) {
        if (!entry.is_object() || !entry.contains("decision") || !entry["decision"].is_string() ||
            !entry.contains("supporters") || !entry["supporters"].is_array())
            throw ParseError("each explanation set needs 'decision' and 'supporters'");
        ExplanationSet set;
        set.decision = ArgumentId(entry["decision"].get<std::string>());
        for (const auto& s : entry["supporters"]) {
            if (!s.is_string()) throw ParseError("supporters entries must be strings");
            set.supporters.insert(ArgumentId(s.get<std::string>()));
        }
        report.explanation_sets.push_back(std::move(set));
    }
    if (!j.contains("error_flag") || !j["error_flag"].is_boolean())
        throw ParseError("report needs a boolean 'error_flag'");
    report.error_flag = j["error_flag"].get<bool>();
    if (report.error_flag) {
        if (!j.contains("error_note") || !j["error_note"].is_string())
            throw ParseError("a flagged report needs an 'error_note'");
        report.error_note = j["error_note"].get<std::string>();
    } else if (j.contains("error_note")) {
        throw ParseError("error_note is only present on a flagged report");
    }
    return report;
}

}  // namespace argmed
