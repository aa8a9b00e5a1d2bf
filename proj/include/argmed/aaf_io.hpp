#pragma once

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "argmed/aaf.hpp"
#include "argmed/errors.hpp"

namespace argmed {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Text format: arg(<id>)., att(<from>,<to>)., kind(<id>,decision|belief).
// '%' and '#' start comments. An argument with no kind line defaults to
// belief, as does one with an unrecognized kind token; both produce warnings.
// Attacks may name undeclared ids; validate() reports them as dangling.
// ---------------------------------------------------------------------------

struct TextReadResult {
    ArgumentationFramework framework;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline bool valid_token(const std::string& t) {
    if (t.empty()) return false;
    for (char c : t) {
        if (std::isspace(static_cast<unsigned char>(c))) return false;
        if (c == '(' || c == ')' || c == ',' || c == '.') return false;
    }
    return true;
}

struct Directive {
    std::string head;
    std::vector<std::string> parts;
};

// Parses one "head(a)."/"head(a,b)." statement; throws ParseError at line.
inline Directive parse_directive(const std::string& line, int lineno) {
    auto open = line.find('(');
    if (open == std::string::npos)
        throw ParseError("expected '(' in '" + line + "'", lineno);
    if (line.size() < 2 || line.back() != '.')
        throw ParseError("statement must end with '.' in '" + line + "'", lineno);
    auto close = line.rfind(')');
    if (close == std::string::npos || close < open || close != line.size() - 2)
        throw ParseError("expected ').' at end of '" + line + "'", lineno);
    Directive d;
    d.head = trim(line.substr(0, open));
    std::string inner = line.substr(open + 1, close - open - 1);
    std::string part;
    std::istringstream ss(inner);
    while (std::getline(ss, part, ',')) d.parts.push_back(trim(part));
    if (!inner.empty() && inner.back() == ',') d.parts.push_back("");
    for (const std::string& p : d.parts)
        if (!valid_token(p))
            throw ParseError("bad identifier '" + p + "' in '" + line + "'", lineno);
    return d;
}

inline std::string strip_comment(const std::string& line) {
    auto pos = line.find_first_of("%#");
    return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace detail

inline TextReadResult read_text_framework(std::istream& in) {
    std::map<ArgumentId, ArgumentKind> declared;
    std::set<ArgumentId> kinded;
    std::vector<Attack> edges;
    TextReadResult out;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = detail::trim(detail::strip_comment(line));
        if (body.empty()) continue;
        detail::Directive d = detail::parse_directive(body, lineno);
        if (d.head == "arg") {
            if (d.parts.size() != 1) throw ParseError("arg takes one identifier", lineno);
            ArgumentId id(d.parts[0]);
            if (declared.contains(id))
                throw ParseError("duplicate argument '" + id.value + "'", lineno);
            declared.emplace(id, ArgumentKind::Belief);
        } else if (d.head == "kind") {
            if (d.parts.size() != 2)
                throw ParseError("kind takes an identifier and a kind name", lineno);
            ArgumentId id(d.parts[0]);
            auto it = declared.find(id);
            if (it == declared.end())
                throw ParseError("kind names undeclared argument '" + id.value + "'", lineno);
            if (!kinded.insert(id).second)
                throw ParseError("kind of '" + id.value + "' declared twice", lineno);
            auto k = kind_from_name(d.parts[1]);
            if (!k) {
                out.warnings.push_back("line " + std::to_string(lineno) + ": unknown kind '" +
                                       d.parts[1] + "' for '" + id.value +
                                       "', defaulting to belief");
                k = ArgumentKind::Belief;
            }
            it->second = *k;
        } else if (d.head == "att") {
            if (d.parts.size() != 2) throw ParseError("att takes two identifiers", lineno);
            edges.push_back(Attack{ArgumentId(d.parts[0]), ArgumentId(d.parts[1])});
        } else {
            throw ParseError("unknown statement '" + d.head + "'", lineno);
        }
    }

    for (const auto& [id, kind] : declared) {
        Argument a;
        a.id = id;
        a.kind = kind;
        out.framework.insert_argument_raw(std::move(a));
    }
    for (const Attack& at : edges) out.framework.insert_attack_raw(at.from, at.to);

    std::string missing;
    for (const auto& [id, _] : declared) {
        if (!kinded.contains(id)) {
            if (!missing.empty()) missing += ", ";
            missing += id.value;
        }
    }
    if (!missing.empty())
        out.warnings.push_back("no kind declared for: " + missing + " (defaulting to belief)");
    return out;
}

inline TextReadResult read_text_framework(const std::string& text) {
    std::istringstream in(text);
    return read_text_framework(in);
}

inline void write_text_framework(const ArgumentationFramework& fw, std::ostream& os) {
    for (const ArgumentId& id : fw.ids()) os << "arg(" << id.value << ").\n";
    for (const auto& [id, arg] : fw.arguments())
        os << "kind(" << id.value << "," << kind_name(arg.kind) << ").\n";
    for (const Attack& at : fw.attacks())
        os << "att(" << at.from.value << "," << at.to.value << ").\n";
}

inline std::string to_text(const ArgumentationFramework& fw) {
    std::ostringstream os;
    write_text_framework(fw, os);
    return os.str();
}

// ---------------------------------------------------------------------------
// JSON format. Carries the full argument content, so round-trips are exact.
// ---------------------------------------------------------------------------

inline json argument_to_json(const Argument& a) {
    json j;
    j["id"] = a.id.value;
    j["kind"] = kind_name(a.kind);
    j["premises"] = a.premises;
    j["conclusion"] = a.conclusion;
    j["scheme_id"] = a.scheme_id ? json(*a.scheme_id) : json(nullptr);
    j["bindings"] = a.bindings;
    return j;
}

inline Argument argument_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("argument entry must be an object");
    Argument a;
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty())
        throw ParseError("argument entry needs a non-empty string 'id'");
    a.id = ArgumentId(j["id"].get<std::string>());
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ParseError("argument '" + a.id.value + "' needs a string 'kind'");
    auto k = kind_from_name(j["kind"].get<std::string>());
    if (!k)
        throw ParseError("argument '" + a.id.value + "' has unknown kind '" +
                         j["kind"].get<std::string>() + "'");
    a.kind = *k;
    if (j.contains("premises")) {
        if (!j["premises"].is_array())
            throw ParseError("argument '" + a.id.value + "': premises must be an array");
        for (const auto& p : j["premises"]) {
            if (!p.is_string())
                throw ParseError("argument '" + a.id.value + "': premises must be strings");
            a.premises.push_back(p.get<std::string>());
        }
    }
    if (j.contains("conclusion")) {
        if (!j["conclusion"].is_string())
            throw ParseError("argument '" + a.id.value + "': conclusion must be a string");
        a.conclusion = j["conclusion"].get<std::string>();
    }
    if (j.contains("scheme_id") && !j["scheme_id"].is_null()) {
        if (!j["scheme_id"].is_string())
            throw ParseError("argument '" + a.id.value + "': scheme_id must be a string");
        a.scheme_id = j["scheme_id"].get<std::string>();
    }
    if (j.contains("bindings")) {
        if (!j["bindings"].is_object())
            throw ParseError("argument '" + a.id.value + "': bindings must be an object");
        for (const auto& [k2, v] : j["bindings"].items()) {
            if (!v.is_string())
                throw ParseError("argument '" + a.id.value + "': binding values must be strings");
            a.bindings[k2] = v.get<std::string>();
        }
    }
    return a;
}

inline json framework_to_json(const ArgumentationFramework& fw) {
    json j;
    j["arguments"] = json::array();
    for (const auto& [id, arg] : fw.arguments()) j["arguments"].push_back(argument_to_json(arg));
    j["attacks"] = json::array();
    for (const Attack& at : fw.attacks())
        j["attacks"].push_back(json::array({at.from.value, at.to.value}));
    return j;
}

inline ArgumentationFramework framework_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("framework document must be a JSON object");
    if (!j.contains("arguments") || !j["arguments"].is_array())
        throw ParseError("framework document needs an 'arguments' array");
    if (!j.contains("attacks") || !j["attacks"].is_array())
        throw ParseError("framework document needs an 'attacks' array");
    ArgumentationFramework fw;
    for (const auto& entry : j["arguments"]) {
        Argument a = argument_from_json(entry);
        if (fw.contains(a.id)) throw ParseError("duplicate argument '" + a.id.value + "'");
        fw.insert_argument_raw(std::move(a));
    }
    for (const auto& entry : j["attacks"]) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
            !entry[1].is_string())
            throw ParseError("each attack must be a [from, to] pair of strings");
        fw.insert_attack_raw(ArgumentId(entry[0].get<std::string>()),
                             ArgumentId(entry[1].get<std::string>()));
    }
    return fw;
}

// Serialized documents are byte-stable: object keys are sorted (library map
// order) and the indent is fixed.
inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// File helpers. Format is sniffed: .json extension or a leading '{' means the
// JSON document format, anything else the text format.
// ---------------------------------------------------------------------------

enum class FrameworkFormat { Auto, Text, Json };

inline TextReadResult load_framework(const std::string& path,
                                     FrameworkFormat fmt = FrameworkFormat::Auto) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    if (fmt == FrameworkFormat::Auto) {
        bool json_ext = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
        std::string lead = detail::trim(text.substr(0, text.find_first_of('\n')));
        fmt = (json_ext || (!lead.empty() && lead[0] == '{')) ? FrameworkFormat::Json
                                                              : FrameworkFormat::Text;
    }
    if (fmt == FrameworkFormat::Json) {
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded()) throw ParseError("'" + path + "' is not valid JSON");
        return {framework_from_json(j), {}};
    }
    return read_text_framework(text);
}

inline void save_framework_json(const ArgumentationFramework& fw, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << dump_json(framework_to_json(fw));
}

inline void save_framework_text(const ArgumentationFramework& fw, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    write_text_framework(fw, out);
}

}  // namespace argmed
