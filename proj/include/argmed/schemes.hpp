#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "argmed/aaf.hpp"
#include "argmed/errors.hpp"

namespace argmed {

// Reusable premise/conclusion pattern. Templates use {name} placeholders;
// literal braces are written doubled ({{ and }}).
struct Scheme {
    std::string id;
    std::vector<std::string> premise_templates;
    std::string conclusion_template;
    std::vector<std::string> variables;
    ArgumentKind produces_kind = ArgumentKind::Belief;

    bool operator==(const Scheme&) const = default;
};

// Standardized challenge against an instantiation of its scheme. A rejected
// question may point at the scheme the resulting counterargument should use.
struct CriticalQuestion {
    std::string id;
    std::string scheme_id;
    std::string text_template;
    std::optional<std::string> on_reject_scheme;

    bool operator==(const CriticalQuestion&) const = default;
};

using Binding = std::map<std::string, std::string>;

namespace tmpl {

namespace detail {
inline bool name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
}  // namespace detail

// Placeholder names referenced by tpl. Throws MalformedTemplate on stray or
// unterminated braces and on empty or ill-formed names.
inline std::set<std::string> placeholders(const std::string& tpl) {
    std::set<std::string> names;
    for (std::size_t i = 0; i < tpl.size();) {
        char c = tpl[i];
        if (c == '{') {
            if (i + 1 < tpl.size() && tpl[i + 1] == '{') {
                i += 2;
                continue;
            }
            std::size_t j = i + 1;
            if (j >= tpl.size() || !detail::name_start(tpl[j]))
                throw Error(Err::MalformedTemplate,
                            "bad placeholder at offset " + std::to_string(i) + " in '" + tpl + "'");
            while (j < tpl.size() && detail::name_char(tpl[j])) ++j;
            if (j >= tpl.size() || tpl[j] != '}')
                throw Error(Err::MalformedTemplate,
                            "unterminated placeholder in '" + tpl + "'");
            names.insert(tpl.substr(i + 1, j - i - 1));
            i = j + 1;
        } else if (c == '}') {
            if (i + 1 < tpl.size() && tpl[i + 1] == '}') {
                i += 2;
                continue;
            }
            throw Error(Err::MalformedTemplate, "unmatched '}' in '" + tpl + "'");
        } else {
            ++i;
        }
    }
    return names;
}

// Substitutes placeholders; doubled braces become single literal braces.
// Throws IncompleteBinding when a referenced name is unbound.
inline std::string render(const std::string& tpl, const Binding& binding) {
    std::string out;
    out.reserve(tpl.size());
    for (std::size_t i = 0; i < tpl.size();) {
        char c = tpl[i];
        if (c == '{') {
            if (i + 1 < tpl.size() && tpl[i + 1] == '{') {
                out += '{';
                i += 2;
                continue;
            }
            std::size_t j = i + 1;
            while (j < tpl.size() && tpl[j] != '}') ++j;
            if (j >= tpl.size())
                throw Error(Err::MalformedTemplate, "unterminated placeholder in '" + tpl + "'");
            std::string name = tpl.substr(i + 1, j - i - 1);
            auto it = binding.find(name);
            if (it == binding.end())
                throw Error(Err::IncompleteBinding, "no value bound for '" + name + "'");
            out += it->second;
            i = j + 1;
        } else if (c == '}' && i + 1 < tpl.size() && tpl[i + 1] == '}') {
            out += '}';
            i += 2;
        } else {
            out += c;
            ++i;
        }
    }
    return out;
}

}  // namespace tmpl

class SchemeRegistry {
public:
    // Validates the scheme before storing it: non-empty id, at least one
    // premise, non-empty conclusion, and every placeholder declared among the
    // scheme's variables.
    void register_scheme(Scheme s) {
        if (s.id.empty()) throw Error(Err::MalformedTemplate, "scheme id must be non-empty");
        if (schemes_.contains(s.id))
            throw Error(Err::DuplicateScheme, "scheme '" + s.id + "' already registered");
        if (s.premise_templates.empty())
            throw Error(Err::MalformedTemplate,
                        "scheme '" + s.id + "' needs at least one premise template");
        if (s.conclusion_template.empty())
            throw Error(Err::MalformedTemplate,
                        "scheme '" + s.id + "' needs a conclusion template");
        std::set<std::string> declared(s.variables.begin(), s.variables.end());
        if (declared.size() != s.variables.size())
            throw Error(Err::MalformedTemplate, "scheme '" + s.id + "' declares a variable twice");
        for (const std::string& v : s.variables)
            if (v.empty())
                throw Error(Err::MalformedTemplate,
                            "scheme '" + s.id + "' declares an empty variable name");
        auto check = [&](const std::string& tpl) {
            for (const std::string& name : tmpl::placeholders(tpl))
                if (!declared.contains(name))
                    throw Error(Err::MalformedTemplate, "scheme '" + s.id +
                                                            "' references undeclared variable '" +
                                                            name + "'");
        };
        for (const std::string& p : s.premise_templates) check(p);
        check(s.conclusion_template);
        std::string id = s.id;
        schemes_.emplace(std::move(id), std::move(s));
    }

    // Questions attach to a registered scheme; ids are unique across the
    // registry and on_reject_scheme must already be registered.
    void register_critical_question(CriticalQuestion cq) {
        if (cq.id.empty())
            throw Error(Err::MalformedTemplate, "critical question id must be non-empty");
        if (cq_ids_.contains(cq.id))
            throw Error(Err::DuplicateCriticalQuestion,
                        "critical question '" + cq.id + "' already registered");
        const Scheme& host = scheme(cq.scheme_id);
        std::set<std::string> declared(host.variables.begin(), host.variables.end());
        for (const std::string& name : tmpl::placeholders(cq.text_template))
            if (!declared.contains(name))
                throw Error(Err::MalformedTemplate,
                            "critical question '" + cq.id + "' references undeclared variable '" +
                                name + "'");
        if (cq.on_reject_scheme && !schemes_.contains(*cq.on_reject_scheme))
            throw Error(Err::UnknownScheme, "critical question '" + cq.id +
                                                "' points at unregistered scheme '" +
                                                *cq.on_reject_scheme + "'");
        cq_ids_.insert(cq.id);
        cqs_[cq.scheme_id].push_back(std::move(cq));
    }

    bool has_scheme(const std::string& id) const { return schemes_.contains(id); }

    const Scheme& scheme(const std::string& id) const {
        auto it = schemes_.find(id);
        if (it == schemes_.end())
            throw Error(Err::UnknownScheme, "unknown scheme '" + id + "'");
        return it->second;
    }

    std::vector<std::string> scheme_ids() const {
        std::vector<std::string> out;
        for (const auto& [id, _] : schemes_) out.push_back(id);
        return out;
    }

    // Questions in registration order; evaluation order is meaningful.
    const std::vector<CriticalQuestion>& cqs_for(const std::string& scheme_id) const {
        scheme(scheme_id);
        static const std::vector<CriticalQuestion> none;
        auto it = cqs_.find(scheme_id);
        return it == cqs_.end() ? none : it->second;
    }

    const CriticalQuestion& critical_question(const std::string& cq_id) const {
        for (const auto& [_, list] : cqs_)
            for (const CriticalQuestion& cq : list)
                if (cq.id == cq_id) return cq;
        throw Error(Err::UnknownScheme, "unknown critical question '" + cq_id + "'");
    }

    // Builds the argument the binding describes. The binding must cover every
    // declared variable with a non-empty value; extra keys are dropped.
    Argument instantiate(const std::string& scheme_id, const Binding& binding,
                         ArgumentId id) const {
        const Scheme& s = scheme(scheme_id);
        Binding used;
        for (const std::string& v : s.variables) {
            auto it = binding.find(v);
            if (it == binding.end())
                throw Error(Err::IncompleteBinding,
                            "scheme '" + scheme_id + "' needs a value for '" + v + "'");
            if (it->second.empty())
                throw Error(Err::IncompleteBinding,
                            "scheme '" + scheme_id + "' got an empty value for '" + v + "'");
            used.emplace(v, it->second);
        }
        Argument a;
        a.id = std::move(id);
        a.kind = s.produces_kind;
        a.scheme_id = s.id;
        for (const std::string& p : s.premise_templates)
            a.premises.push_back(tmpl::render(p, used));
        a.conclusion = tmpl::render(s.conclusion_template, used);
        a.bindings = std::move(used);
        return a;
    }

    // The scheme's question texts rendered against the binding, in order.
    std::vector<std::string> critical_questions_for(const std::string& scheme_id,
                                                    const Binding& binding) const {
        std::vector<std::string> out;
        for (const CriticalQuestion& cq : cqs_for(scheme_id))
            out.push_back(tmpl::render(cq.text_template, binding));
        return out;
    }

    const std::map<std::string, Scheme>& schemes() const { return schemes_; }
    const std::map<std::string, std::vector<CriticalQuestion>>& questions() const { return cqs_; }

private:
    std::map<std::string, Scheme> schemes_;
    std::map<std::string, std::vector<CriticalQuestion>> cqs_;
    std::set<std::string> cq_ids_;
};

// ---------------------------------------------------------------------------
// Scheme packs: a registry serialized as one JSON document.
// ---------------------------------------------------------------------------

inline SchemeRegistry scheme_pack_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("schemes") || !j["schemes"].is_array())
        throw ParseError("scheme pack needs a 'schemes' array");
    SchemeRegistry reg;
    for (const auto& entry : j["schemes"]) {
        if (!entry.is_object()) throw ParseError("scheme entries must be objects");
        Scheme s;
        if (!entry.contains("id") || !entry["id"].is_string())
            throw ParseError("scheme entry needs a string 'id'");
        s.id = entry["id"].get<std::string>();
        if (!entry.contains("produces_kind") || !entry["produces_kind"].is_string())
            throw ParseError("scheme '" + s.id + "' needs a 'produces_kind'");
        auto k = kind_from_name(entry["produces_kind"].get<std::string>());
        if (!k) throw ParseError("scheme '" + s.id + "' has unknown produces_kind");
        s.produces_kind = *k;
        if (!entry.contains("variables") || !entry["variables"].is_array())
            throw ParseError("scheme '" + s.id + "' needs a 'variables' array");
        for (const auto& v : entry["variables"]) {
            if (!v.is_string()) throw ParseError("scheme variables must be strings");
            s.variables.push_back(v.get<std::string>());
        }
        if (!entry.contains("premises") || !entry["premises"].is_array())
            throw ParseError("scheme '" + s.id + "' needs a 'premises' array");
        for (const auto& p : entry["premises"]) {
            if (!p.is_string()) throw ParseError("scheme premises must be strings");
            s.premise_templates.push_back(p.get<std::string>());
        }
        if (!entry.contains("conclusion") || !entry["conclusion"].is_string())
            throw ParseError("scheme '" + s.id + "' needs a 'conclusion'");
        s.conclusion_template = entry["conclusion"].get<std::string>();
        reg.register_scheme(std::move(s));
    }
    if (j.contains("critical_questions")) {
        if (!j["critical_questions"].is_array())
            throw ParseError("'critical_questions' must be an array");
        for (const auto& entry : j["critical_questions"]) {
            if (!entry.is_object()) throw ParseError("critical question entries must be objects");
            CriticalQuestion cq;
            if (!entry.contains("id") || !entry["id"].is_string())
                throw ParseError("critical question entry needs a string 'id'");
            cq.id = entry["id"].get<std::string>();
            if (!entry.contains("scheme_id") || !entry["scheme_id"].is_string())
                throw ParseError("critical question '" + cq.id + "' needs a 'scheme_id'");
            cq.scheme_id = entry["scheme_id"].get<std::string>();
            if (!entry.contains("text") || !entry["text"].is_string())
                throw ParseError("critical question '" + cq.id + "' needs a 'text'");
            cq.text_template = entry["text"].get<std::string>();
            if (entry.contains("on_reject_scheme") && !entry["on_reject_scheme"].is_null()) {
                if (!entry["on_reject_scheme"].is_string())
                    throw ParseError("on_reject_scheme must be a string");
                cq.on_reject_scheme = entry["on_reject_scheme"].get<std::string>();
            }
            reg.register_critical_question(std::move(cq));
        }
    }
    return reg;
}

inline nlohmann::json scheme_pack_to_json(const SchemeRegistry& reg) {
    nlohmann::json j;
    j["schemes"] = nlohmann::json::array();
    for (const auto& [id, s] : reg.schemes()) {
        nlohmann::json entry;
        entry["id"] = s.id;
        entry["produces_kind"] = kind_name(s.produces_kind);
        entry["variables"] = s.variables;
        entry["premises"] = s.premise_templates;
        entry["conclusion"] = s.conclusion_template;
        j["schemes"].push_back(entry);
    }
    j["critical_questions"] = nlohmann::json::array();
    for (const auto& [scheme_id, list] : reg.questions()) {
        for (const CriticalQuestion& cq : list) {
            nlohmann::json entry;
            entry["id"] = cq.id;
            entry["scheme_id"] = cq.scheme_id;
            entry["text"] = cq.text_template;
            entry["on_reject_scheme"] =
                cq.on_reject_scheme ? nlohmann::json(*cq.on_reject_scheme) : nlohmann::json(nullptr);
            j["critical_questions"].push_back(entry);
        }
    }
    return j;
}

inline SchemeRegistry load_scheme_pack(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("'" + path + "' is not valid JSON");
    return scheme_pack_from_json(j);
}

// Default clinical pack: a decision scheme for proposing a treatment and two
// belief schemes for countering one, with the side-effect question wired to
// the side-effect scheme. data/schemes/default_pack.json ships the same pack
// for editing and overriding.
inline const std::string& builtin_pack_text() {
    static const std::string text = R"PACK({
  "schemes": [
    {
      "id": "ASDM",
      "produces_kind": "decision",
      "variables": ["situation", "goal", "treatment"],
      "premises": [
        "The patient presents with {situation}.",
        "The goal of care is {goal}.",
        "Administering {treatment} promotes {goal} in {situation}."
      ],
      "conclusion": "Treatment {treatment} should be administered."
    },
    {
      "id": "ASSE",
      "produces_kind": "belief",
      "variables": ["treatment", "side_effect"],
      "premises": [
        "Administering {treatment} causes {side_effect}.",
        "{side_effect} is an unacceptable harm for this patient."
      ],
      "conclusion": "Treatment {treatment} should not be administered."
    },
    {
      "id": "ASDA",
      "produces_kind": "belief",
      "variables": ["treatment", "situation", "danger"],
      "premises": [
        "The patient presents with {situation}.",
        "In {situation}, administering {treatment} exposes the patient to {danger}."
      ],
      "conclusion": "Treatment {treatment} is dangerous in {situation}."
    }
  ],
  "critical_questions": [
    {
      "id": "ASDM-CQ1",
      "scheme_id": "ASDM",
      "text": "Is there a better alternative to {treatment} for promoting {goal}?",
      "on_reject_scheme": "ASDM"
    },
    {
      "id": "ASDM-CQ2",
      "scheme_id": "ASDM",
      "text": "Does administering {treatment} cause a side effect that outweighs {goal}?",
      "on_reject_scheme": "ASSE"
    },
    {
      "id": "ASDM-CQ3",
      "scheme_id": "ASDM",
      "text": "Is {treatment} contraindicated or dangerous given {situation}?",
      "on_reject_scheme": "ASDA"
    },
    {
      "id": "ASDM-CQ4",
      "scheme_id": "ASDM",
      "text": "Is {treatment} actually effective at promoting {goal}?"
    },
    {
      "id": "ASSE-CQ1",
      "scheme_id": "ASSE",
      "text": "Is the evidence that {treatment} causes {side_effect} reliable?"
    },
    {
      "id": "ASDA-CQ1",
      "scheme_id": "ASDA",
      "text": "Does {danger} apply to this patient's presentation of {situation}?"
    }
  ]
})PACK";
    return text;
}

inline SchemeRegistry builtin_schemes() {
    return scheme_pack_from_json(nlohmann::json::parse(builtin_pack_text()));
}

}  // namespace argmed
