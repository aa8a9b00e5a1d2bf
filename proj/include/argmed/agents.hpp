#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "argmed/aaf.hpp"
#include "argmed/aaf_io.hpp"
#include "argmed/decision.hpp"
#include "argmed/dialogue.hpp"
#include "argmed/errors.hpp"
#include "argmed/schemes.hpp"

namespace argmed {

// ---------------------------------------------------------------------------
// Backend interface. One call is one chat completion: a system prompt, the
// dialogue so far as alternating messages, and this turn's instruction.
// ---------------------------------------------------------------------------

struct ChatMessage {
    std::string role;  // "user" or "assistant"
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

struct BackendRequest {
    std::string role_name;  // "generator" or "verifier"
    std::string system_prompt;
    std::vector<ChatMessage> context;
    std::string instruction;
};

class AgentBackend {
public:
    virtual ~AgentBackend() = default;
    virtual std::string complete(const BackendRequest& request) = 0;
    virtual bool deterministic() const = 0;
};

enum class BackendKind { Scripted, Recorded, Remote };

// Connection settings. credential_env names the environment variable holding
// the API key; the key itself is never stored in configuration.
struct BackendConfig {
    BackendKind kind = BackendKind::Scripted;
    std::string endpoint;
    std::string model_name;
    double temperature = 0.0;
    int timeout_ms = 30000;
    int max_retries = 3;
    std::string credential_env = "ARGMED_API_KEY";
    std::string script_path;           // scripted/recorded: completions file
    std::vector<std::string> script;   // scripted: inline completions
};

inline BackendConfig backend_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("backend config must be a JSON object");
    BackendConfig cfg;
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ParseError("backend config needs a 'kind'");
    std::string kind = j["kind"].get<std::string>();
    if (kind == "scripted")
        cfg.kind = BackendKind::Scripted;
    else if (kind == "recorded")
        cfg.kind = BackendKind::Recorded;
    else if (kind == "remote")
        cfg.kind = BackendKind::Remote;
    else
        throw ParseError("unknown backend kind '" + kind + "'");
    auto opt_string = [&](const char* key, std::string& slot) {
        if (!j.contains(key)) return;
        if (!j[key].is_string()) throw ParseError(std::string("'") + key + "' must be a string");
        slot = j[key].get<std::string>();
    };
    opt_string("endpoint", cfg.endpoint);
    opt_string("model_name", cfg.model_name);
    opt_string("credential_env", cfg.credential_env);
    opt_string("script_path", cfg.script_path);
    if (j.contains("temperature")) {
        if (!j["temperature"].is_number()) throw ParseError("'temperature' must be a number");
        cfg.temperature = j["temperature"].get<double>();
    }
    if (j.contains("timeout_ms")) {
        if (!j["timeout_ms"].is_number_integer())
            throw ParseError("'timeout_ms' must be an integer");
        cfg.timeout_ms = j["timeout_ms"].get<int>();
    }
    if (j.contains("max_retries")) {
        if (!j["max_retries"].is_number_integer())
            throw ParseError("'max_retries' must be an integer");
        cfg.max_retries = j["max_retries"].get<int>();
    }
    if (j.contains("script")) {
        if (!j["script"].is_array()) throw ParseError("'script' must be an array of strings");
        for (const auto& s : j["script"]) {
            if (!s.is_string()) throw ParseError("'script' must be an array of strings");
            cfg.script.push_back(s.get<std::string>());
        }
    }
    return cfg;
}

// Plays back a fixed list of completions in order; used for tests and for
// replaying recorded sessions. Requests are kept for inspection.
class ScriptedBackend final : public AgentBackend {
public:
    explicit ScriptedBackend(std::vector<std::string> completions)
        : completions_(std::move(completions)) {}

    std::string complete(const BackendRequest& request) override {
        calls_.push_back(request);
        if (next_ >= completions_.size())
            throw Error(Err::BackendFailure, "script exhausted after " +
                                                 std::to_string(completions_.size()) +
                                                 " completions");
        return completions_[next_++];
    }

    bool deterministic() const override { return true; }

    const std::vector<BackendRequest>& calls() const { return calls_; }
    std::size_t remaining() const { return completions_.size() - next_; }

private:
    std::vector<std::string> completions_;
    std::size_t next_ = 0;
    std::vector<BackendRequest> calls_;
};

// Completions file: either a JSON array of strings or {"completions": [...]}.
inline std::vector<std::string> load_completion_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("'" + path + "' is not valid JSON");
    const nlohmann::json* arr = nullptr;
    if (j.is_array())
        arr = &j;
    else if (j.is_object() && j.contains("completions") && j["completions"].is_array())
        arr = &j["completions"];
    else
        throw ParseError("'" + path + "' must be an array or hold a 'completions' array");
    std::vector<std::string> out;
    for (const auto& s : *arr) {
        if (!s.is_string()) throw ParseError("completions must be strings in '" + path + "'");
        out.push_back(s.get<std::string>());
    }
    return out;
}

inline std::unique_ptr<ScriptedBackend> scripted_backend(std::vector<std::string> completions) {
    return std::make_unique<ScriptedBackend>(std::move(completions));
}

inline std::unique_ptr<ScriptedBackend> recorded_backend(const std::string& path) {
    return std::make_unique<ScriptedBackend>(load_completion_script(path));
}

// Decorator that captures completions so a live session can be replayed later
// through a recorded backend.
class RecordingBackend final : public AgentBackend {
public:
    explicit RecordingBackend(std::unique_ptr<AgentBackend> inner) : inner_(std::move(inner)) {}

    std::string complete(const BackendRequest& request) override {
        std::string reply = inner_->complete(request);
        completions_.push_back(reply);
        return reply;
    }

    bool deterministic() const override { return inner_->deterministic(); }

    const std::vector<std::string>& completions() const { return completions_; }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw ParseError("cannot write '" + path + "'");
        nlohmann::json j;
        j["completions"] = completions_;
        out << dump_json(j);
    }

private:
    std::unique_ptr<AgentBackend> inner_;
    std::vector<std::string> completions_;
};

// ---------------------------------------------------------------------------
// Reply envelope. Agents answer with one fenced block tagged "argmed" holding
// a JSON object; everything outside the fence is ignored, and the last such
// block wins when a reply contains several.
// ---------------------------------------------------------------------------

struct NewArgument {
    std::string scheme_id;
    Binding bindings;
    std::optional<ArgumentId> attacks_target;
};

struct CqVerdict {
    std::string cq_id;
    bool rejected = false;
    std::string reason;
};

struct DoneSignal {};

struct Unparseable {
    std::string diagnostic;
};

using ParsedResponse = std::variant<NewArgument, CqVerdict, DoneSignal, Unparseable>;

// Total: every string maps to some variant, malformed input to Unparseable
// with a diagnostic suitable for a reprompt.
inline ParsedResponse parse_response(const std::string& raw) {
    const std::string open_tag = "```argmed";
    std::size_t open = raw.rfind(open_tag);
    if (open == std::string::npos)
        return Unparseable{"reply contains no ```argmed block"};
    std::size_t body_start = raw.find('\n', open);
    if (body_start == std::string::npos)
        return Unparseable{"```argmed block has no content"};
    ++body_start;
    std::size_t close = raw.find("```", body_start);
    if (close == std::string::npos)
        return Unparseable{"```argmed block is not closed"};
    std::string body = raw.substr(body_start, close - body_start);

    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        return Unparseable{"```argmed block does not hold a JSON object"};
    if (!j.contains("type") || !j["type"].is_string())
        return Unparseable{"envelope is missing a string 'type'"};
    std::string type = j["type"].get<std::string>();

    if (type == "done") return DoneSignal{};

    if (type == "argument") {
        NewArgument na;
        if (!j.contains("scheme") || !j["scheme"].is_string())
            return Unparseable{"argument envelope needs a string 'scheme'"};
        na.scheme_id = j["scheme"].get<std::string>();
        if (j.contains("bindings")) {
            if (!j["bindings"].is_object())
                return Unparseable{"argument envelope 'bindings' must be an object"};
            for (const auto& [k, v] : j["bindings"].items()) {
                if (!v.is_string())
                    return Unparseable{"argument envelope binding values must be strings"};
                na.bindings[k] = v.get<std::string>();
            }
        }
        if (j.contains("attacks") && !j["attacks"].is_null()) {
            if (!j["attacks"].is_string())
                return Unparseable{"argument envelope 'attacks' must be an argument id"};
            na.attacks_target = ArgumentId(j["attacks"].get<std::string>());
        }
        return na;
    }

    if (type == "verdict") {
        CqVerdict v;
        if (!j.contains("cq") || !j["cq"].is_string())
            return Unparseable{"verdict envelope needs a string 'cq'"};
        v.cq_id = j["cq"].get<std::string>();
        if (!j.contains("verdict") || !j["verdict"].is_string())
            return Unparseable{"verdict envelope needs 'verdict': \"pass\" or \"reject\""};
        std::string word = j["verdict"].get<std::string>();
        if (word == "pass")
            v.rejected = false;
        else if (word == "reject")
            v.rejected = true;
        else
            return Unparseable{"verdict must be \"pass\" or \"reject\", got \"" + word + "\""};
        if (j.contains("reason")) {
            if (!j["reason"].is_string())
                return Unparseable{"verdict 'reason' must be a string"};
            v.reason = j["reason"].get<std::string>();
        }
        if (v.rejected && v.reason.empty())
            return Unparseable{"a rejecting verdict needs a non-empty 'reason'"};
        return v;
    }

    return Unparseable{"unknown envelope type '" + type + "'"};
}

// ---------------------------------------------------------------------------
// Prompts. Slots are templates over {{token}} markers; single braces pass
// through untouched, so JSON examples need no escaping.
// ---------------------------------------------------------------------------

using PromptValues = std::map<std::string, std::string>;

inline std::string render_prompt(const std::string& tpl, const PromptValues& values) {
    std::string out;
    out.reserve(tpl.size());
    for (std::size_t i = 0; i < tpl.size();) {
        if (tpl.compare(i, 2, "{{") == 0) {
            std::size_t end = tpl.find("}}", i + 2);
            if (end == std::string::npos)
                throw Error(Err::MalformedTemplate, "unterminated {{token}} in prompt template");
            std::string name = tpl.substr(i + 2, end - i - 2);
            auto it = values.find(name);
            if (it == values.end())
                throw Error(Err::IncompleteBinding,
                            "prompt template references unknown token '" + name + "'");
            out += it->second;
            i = end + 2;
        } else {
            out += tpl[i];
            ++i;
        }
    }
    return out;
}

struct PromptPack {
    std::string generator_system;
    std::string verifier_system;
    std::string generator_first;
    std::string generator_next;
    std::string generator_counter;
    std::string verifier_question;
    std::string reprompt_parse;
    std::string reprompt_illegal;
};

inline const std::string& envelope_spec() {
    static const std::string text =
        "Reply with exactly one fenced block tagged argmed holding one JSON object.\n"
        "To propose an argument:\n"
        "```argmed\n"
        "{\"type\": \"argument\", \"scheme\": \"<scheme id>\", "
        "\"bindings\": {\"<variable>\": \"<value>\"}, \"attacks\": \"<argument id, optional>\"}\n"
        "```\n"
        "To answer a critical question:\n"
        "```argmed\n"
        "{\"type\": \"verdict\", \"cq\": \"<question id>\", \"verdict\": \"pass\", "
        "\"reason\": \"<required when the verdict is reject>\"}\n"
        "```\n"
        "To state that the case is settled:\n"
        "```argmed\n"
        "{\"type\": \"done\"}\n"
        "```\n"
        "Text outside the fenced block is ignored.";
    return text;
}

inline PromptPack default_prompts() {
    PromptPack p;
    p.generator_system =
        "You are the generator in a clinical decision dialogue. You propose treatment\n"
        "decisions for the case and, when a proposal is challenged, arguments that\n"
        "capture the objection. Use only the schemes listed below and fill every\n"
        "variable from the case.\n\n"
        "Case:\n{{case_text}}\n\n"
        "Candidate options: {{options}}\n\n"
        "Schemes:\n{{schemes}}\n\n{{envelope}}";
    p.verifier_system =
        "You are the verifier in a clinical decision dialogue. You examine each\n"
        "proposed argument by answering its critical questions strictly on the facts\n"
        "of the case; reject a question only on a concrete clinical ground.\n\n"
        "Case:\n{{case_text}}\n\n"
        "Schemes:\n{{schemes}}\n\n{{envelope}}";
    p.generator_first =
        "Propose your first argument: a treatment decision for this case, using a\n"
        "decision scheme.";
    p.generator_next =
        "Propose your next argument: a further treatment decision or additional\n"
        "evidence. If the case is settled, reply with the done envelope.";
    p.generator_counter =
        "Your argument {{target_id}} was challenged.\n{{target_text}}\n"
        "Question {{cq_id}}: {{cq_text}}\n"
        "It was rejected: {{reason}}\n"
        "Propose the counterargument this rejection describes, typically with scheme\n"
        "{{suggested_scheme}}, attacking {{target_id}}.";
    p.verifier_question =
        "Examine argument {{target_id}}.\n{{target_text}}\n"
        "Answer critical question {{cq_id}}: {{cq_text}}\n"
        "Reply with a verdict envelope for {{cq_id}}.";
    p.reprompt_parse =
        "Your previous reply could not be used: {{diagnostic}}\n"
        "Reply again, following the envelope contract exactly, with one fenced\n"
        "argmed block.";
    p.reprompt_illegal =
        "Your previous proposal was not admitted: {{problem}}\n"
        "Propose a different argument that follows the protocol, or reply with the\n"
        "done envelope.";
    return p;
}

// Overrides default slots with <dir>/<slot>.txt files when present.
inline PromptPack load_prompts(const std::string& dir) {
    PromptPack p = default_prompts();
    auto load = [&](const char* name, std::string& slot) {
        std::filesystem::path path = std::filesystem::path(dir) / (std::string(name) + ".txt");
        std::ifstream in(path);
        if (!in) return;
        std::ostringstream buf;
        buf << in.rdbuf();
        slot = buf.str();
    };
    load("generator_system", p.generator_system);
    load("verifier_system", p.verifier_system);
    load("generator_first", p.generator_first);
    load("generator_next", p.generator_next);
    load("generator_counter", p.generator_counter);
    load("verifier_question", p.verifier_question);
    load("reprompt_parse", p.reprompt_parse);
    load("reprompt_illegal", p.reprompt_illegal);
    return p;
}

// ---------------------------------------------------------------------------
// Cases and prompt rendering helpers.
// ---------------------------------------------------------------------------

struct CaseSpec {
    std::string case_id;
    std::string text;
    std::vector<std::string> options;
};

inline bool filesystem_safe(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

inline CaseSpec case_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("case document must be a JSON object");
    CaseSpec c;
    if (!j.contains("case_id") || !j["case_id"].is_string())
        throw ParseError("case document needs a string 'case_id'");
    c.case_id = j["case_id"].get<std::string>();
    if (!filesystem_safe(c.case_id))
        throw ParseError("case_id must use only letters, digits, '-' and '_'");
    if (!j.contains("text") || !j["text"].is_string())
        throw ParseError("case document needs a string 'text'");
    c.text = j["text"].get<std::string>();
    if (j.contains("options")) {
        if (!j["options"].is_array()) throw ParseError("'options' must be an array");
        for (const auto& o : j["options"]) {
            if (!o.is_string()) throw ParseError("'options' entries must be strings");
            c.options.push_back(o.get<std::string>());
        }
    }
    return c;
}

inline CaseSpec load_case(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError("'" + path + "' is not valid JSON");
    return case_from_json(j);
}

inline std::string describe_argument(const Argument& a) {
    std::string out = a.id.value + " [" + std::string(kind_name(a.kind));
    if (a.scheme_id) out += ", scheme " + *a.scheme_id;
    out += "]";
    for (const std::string& p : a.premises) out += "\n  premise: " + p;
    if (!a.conclusion.empty()) out += "\n  conclusion: " + a.conclusion;
    return out;
}

inline std::string describe_schemes(const SchemeRegistry& reg) {
    std::string out;
    for (const std::string& id : reg.scheme_ids()) {
        const Scheme& s = reg.scheme(id);
        if (!out.empty()) out += "\n";
        out += id + " (produces a " + kind_name(s.produces_kind) + "), variables: ";
        for (std::size_t i = 0; i < s.variables.size(); ++i)
            out += (i ? ", " : "") + s.variables[i];
        for (const std::string& p : s.premise_templates) out += "\n  premise: " + p;
        out += "\n  conclusion: " + s.conclusion_template;
        for (const CriticalQuestion& cq : reg.cqs_for(id)) {
            out += "\n  question " + cq.id + ": " + cq.text_template;
            if (cq.on_reject_scheme) out += " (counter scheme: " + *cq.on_reject_scheme + ")";
        }
    }
    return out;
}

inline std::string describe_move(const Move& m) {
    std::string head = "Move " + std::to_string(m.index) + " (" +
                       speaker_name(m.speaker) + "): ";
    if (const auto* p = std::get_if<ProposeArgument>(&m.payload)) {
        std::string out = head + "proposed " + describe_argument(p->argument);
        if (p->attacks_target) out += "\n  attacks: " + p->attacks_target->value;
        return out;
    }
    if (const auto* cq = std::get_if<PoseCq>(&m.payload)) {
        std::string out = head + "posed " + cq->cq_id + " against " + cq->target.value;
        out += cq->rejected ? " and rejected it: " + cq->reason : "";
        return out;
    }
    return head + "accepted " + std::get<AcceptArgument>(m.payload).target.value;
}

// Transcript as chat context; the backend's own past moves are "assistant"
// messages, the other role's are "user".
inline std::vector<ChatMessage> transcript_context(const DialogueTranscript& t, Speaker self) {
    std::vector<ChatMessage> out;
    for (const Move& m : t.moves())
        out.push_back({m.speaker == self ? "assistant" : "user", describe_move(m)});
    return out;
}

inline std::string join_options(const std::vector<std::string>& options) {
    if (options.empty()) return "(open)";
    std::string out;
    for (std::size_t i = 0; i < options.size(); ++i) out += (i ? "; " : "") + options[i];
    return out;
}

// ---------------------------------------------------------------------------
// Single steps. Each allows one diagnostic reprompt before giving up with a
// Parse error, keeping agent sloppiness from crashing a session outright.
// ---------------------------------------------------------------------------

struct StepResult {
    ParsedResponse parsed;
    std::string raw;
};

namespace detail {

inline bool acceptable_generator_reply(const ParsedResponse& r) {
    return std::holds_alternative<NewArgument>(r) || std::holds_alternative<DoneSignal>(r);
}

inline std::string reply_problem(const ParsedResponse& r, const std::string& expectation) {
    if (const auto* u = std::get_if<Unparseable>(&r)) return u->diagnostic;
    return "expected " + expectation;
}

}  // namespace detail

// One generator completion, expecting an argument or done envelope.
inline StepResult generator_step(AgentBackend& backend, const BackendRequest& request,
                                 const PromptPack& prompts) {
    StepResult step;
    step.raw = backend.complete(request);
    step.parsed = parse_response(step.raw);
    if (detail::acceptable_generator_reply(step.parsed)) return step;
    std::string diagnostic =
        detail::reply_problem(step.parsed, "an argument or done envelope");
    BackendRequest again = request;
    again.context.push_back({"assistant", step.raw});
    again.context.push_back({"user", request.instruction});
    again.instruction = render_prompt(prompts.reprompt_parse, {{"diagnostic", diagnostic}});
    step.raw = backend.complete(again);
    step.parsed = parse_response(step.raw);
    if (detail::acceptable_generator_reply(step.parsed)) return step;
    throw Error(Err::Parse, "generator reply unusable after a reprompt: " +
                                detail::reply_problem(step.parsed,
                                                      "an argument or done envelope"));
}

// Walks the critical questions of target's scheme in order, one completion
// per question. The first rejection short-circuits; nullopt means every
// question passed (or the scheme has none) and the argument is to be
// accepted.
inline std::optional<CqVerdict> verifier_step(AgentBackend& backend, const Argument& target,
                                              const SchemeRegistry& registry,
                                              const PromptPack& prompts,
                                              const BackendRequest& base_request) {
    if (!target.scheme_id) return std::nullopt;
    for (const CriticalQuestion& cq : registry.cqs_for(*target.scheme_id)) {
        std::string cq_text = tmpl::render(cq.text_template, target.bindings);
        BackendRequest req = base_request;
        req.instruction = render_prompt(prompts.verifier_question,
                                        {{"target_id", target.id.value},
                                         {"target_text", describe_argument(target)},
                                         {"cq_id", cq.id},
                                         {"cq_text", cq_text}});
        std::string raw = backend.complete(req);
        ParsedResponse parsed = parse_response(raw);
        const CqVerdict* verdict = std::get_if<CqVerdict>(&parsed);
        if (!verdict || verdict->cq_id != cq.id) {
            std::string diagnostic =
                verdict ? "verdict names '" + verdict->cq_id + "' but the question was '" +
                              cq.id + "'"
                        : detail::reply_problem(parsed, "a verdict envelope");
            BackendRequest again = req;
            again.context.push_back({"assistant", raw});
            again.context.push_back({"user", req.instruction});
            again.instruction =
                render_prompt(prompts.reprompt_parse, {{"diagnostic", diagnostic}});
            raw = backend.complete(again);
            parsed = parse_response(raw);
            verdict = std::get_if<CqVerdict>(&parsed);
            if (!verdict || verdict->cq_id != cq.id)
                throw Error(Err::Parse, "verifier reply unusable after a reprompt: " +
                                            detail::reply_problem(parsed,
                                                                  "a verdict envelope for " +
                                                                      cq.id));
        }
        if (verdict->rejected) return *verdict;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Session orchestration. The generator and verifier alternate; the protocol
// machinery (move legality, compilation, analysis) is symbolic and local.
// ---------------------------------------------------------------------------

struct SessionOutcome {
    std::string case_id;
    DialogueTranscript transcript;
    ArgumentationFramework framework;
    DecisionReport report;
};

struct RunOptions {
    // Invoked after every accepted move and every termination; lets callers
    // persist partial transcripts so a failed session still leaves a bundle.
    std::function<void(const DialogueTranscript&)> checkpoint;
};

// 0 -> "A", 25 -> "Z", 26 -> "AA", ...
inline std::string alpha_id(int n) {
    std::string s;
    ++n;
    while (n > 0) {
        --n;
        s += static_cast<char>('A' + n % 26);
        n /= 26;
    }
    return std::string(s.rbegin(), s.rend());
}

namespace detail {

class SessionRunner {
public:
    SessionRunner(const CaseSpec& spec, const SchemeRegistry& registry,
                  const PromptPack& prompts, AgentBackend& generator, AgentBackend& verifier,
                  SessionConfig config, const RunOptions& options)
        : spec_(spec),
          registry_(registry),
          prompts_(prompts),
          generator_(generator),
          verifier_(verifier),
          transcript_(config),
          options_(options) {}

    SessionOutcome run() {
        while (transcript_.active()) {
            if (!generator_turn()) break;
            if (!transcript_.active()) break;
            if (!verifier_turn()) break;
        }
        checkpoint();
        SessionOutcome outcome;
        outcome.case_id = spec_.case_id;
        outcome.transcript = transcript_;
        outcome.framework = to_framework(transcript_);
        outcome.report = exclusivity_filter(outcome.framework,
                                            detect_reasoning_error(outcome.framework));
        return outcome;
    }

private:
    struct Obligation {
        ArgumentId target;
        std::string cq_id;
        std::string cq_text;
        std::string reason;
        std::optional<std::string> suggested_scheme;
    };

    void checkpoint() {
        if (options_.checkpoint) options_.checkpoint(transcript_);
    }

    BackendRequest base_request(Speaker self) {
        BackendRequest req;
        req.role_name = speaker_name(self);
        const std::string& system_tpl =
            self == Speaker::Generator ? prompts_.generator_system : prompts_.verifier_system;
        req.system_prompt = render_prompt(system_tpl, {{"case_text", spec_.text},
                                                       {"options", join_options(spec_.options)},
                                                       {"schemes", describe_schemes(registry_)},
                                                       {"envelope", envelope_spec()}});
        req.context = transcript_context(transcript_, self);
        return req;
    }

    std::string generator_instruction() {
        if (!obligations_.empty()) {
            const Obligation& ob = obligations_.back();
            const Argument* target = transcript_.find_argument(ob.target);
            return render_prompt(
                prompts_.generator_counter,
                {{"target_id", ob.target.value},
                 {"target_text", target ? describe_argument(*target) : ob.target.value},
                 {"cq_id", ob.cq_id},
                 {"cq_text", ob.cq_text},
                 {"reason", ob.reason},
                 {"suggested_scheme",
                  ob.suggested_scheme ? *ob.suggested_scheme : "any applicable scheme"}});
        }
        if (transcript_.moves().empty()) return render_prompt(prompts_.generator_first, {});
        return render_prompt(prompts_.generator_next, {});
    }

    // Instantiates and submits the proposal; returns an empty string on
    // success and the problem description otherwise.
    std::string try_submit(const NewArgument& na) {
        Argument arg;
        try {
            arg = registry_.instantiate(na.scheme_id, na.bindings,
                                        ArgumentId(alpha_id(arg_counter_)));
        } catch (const Error& e) {
            if (e.code() == Err::UnknownScheme || e.code() == Err::IncompleteBinding ||
                e.code() == Err::MalformedTemplate)
                return e.what();
            throw;
        }
        if (arg.kind == ArgumentKind::Decision && na.attacks_target) {
            const Argument* target = transcript_.find_argument(*na.attacks_target);
            if (target && target->kind == ArgumentKind::Belief)
                return "a decision cannot attack a belief";
        }
        Move mv = make_proposal(std::move(arg), na.attacks_target);
        LegalityResult check = transcript_.legal(mv);
        if (!check) return check.reason;
        last_proposed_ = std::get<ProposeArgument>(mv.payload).argument;
        transcript_.submit(std::move(mv));
        ++arg_counter_;
        checkpoint();
        return "";
    }

    // One generator move. False means the session is over (done, parse
    // failure, or protocol failure); the status reason says which.
    bool generator_turn() {
        const bool had_obligation = !obligations_.empty();
        BackendRequest req = base_request(Speaker::Generator);
        req.instruction = generator_instruction();
        StepResult step;
        try {
            step = generator_step(generator_, req, prompts_);
        } catch (const Error& e) {
            if (e.code() == Err::Parse) {
                transcript_.finish("parse");
                return false;
            }
            throw;
        }
        for (int attempt = 0;; ++attempt) {
            if (std::holds_alternative<DoneSignal>(step.parsed)) {
                transcript_.finish("accepted");
                return false;
            }
            std::string problem = try_submit(std::get<NewArgument>(step.parsed));
            if (problem.empty()) {
                if (had_obligation) obligations_.pop_back();
                return true;
            }
            if (attempt == 1) {
                transcript_.finish("protocol");
                return false;
            }
            BackendRequest again = req;
            again.context.push_back({"assistant", step.raw});
            again.context.push_back({"user", req.instruction});
            again.instruction = render_prompt(prompts_.reprompt_illegal, {{"problem", problem}});
            try {
                step = generator_step(generator_, again, prompts_);
            } catch (const Error& e) {
                if (e.code() == Err::Parse) {
                    transcript_.finish("parse");
                    return false;
                }
                throw;
            }
        }
    }

    // One verifier move against the latest proposal. False on parse failure.
    bool verifier_turn() {
        std::optional<CqVerdict> verdict;
        try {
            verdict = verifier_step(verifier_, last_proposed_, registry_, prompts_,
                                    base_request(Speaker::Verifier));
        } catch (const Error& e) {
            if (e.code() == Err::Parse) {
                transcript_.finish("parse");
                return false;
            }
            throw;
        }
        Move mv = verdict ? make_cq(verdict->cq_id, last_proposed_.id, true, verdict->reason)
                          : make_accept(last_proposed_.id);
        LegalityResult check = transcript_.legal(mv);
        if (!check)
            throw Error(Err::InternalInconsistency,
                        "orchestrator built an illegal verifier move: " + check.reason);
        transcript_.submit(std::move(mv));
        checkpoint();
        if (verdict) {
            const CriticalQuestion& cq = registry_.critical_question(verdict->cq_id);
            obligations_.push_back({last_proposed_.id, cq.id,
                                    tmpl::render(cq.text_template, last_proposed_.bindings),
                                    verdict->reason, cq.on_reject_scheme});
        }
        return true;
    }

    const CaseSpec& spec_;
    const SchemeRegistry& registry_;
    const PromptPack& prompts_;
    AgentBackend& generator_;
    AgentBackend& verifier_;
    DialogueTranscript transcript_;
    const RunOptions& options_;
    std::vector<Obligation> obligations_;
    Argument last_proposed_;
    int arg_counter_ = 0;
};

}  // namespace detail

// Runs one full dialogue for the case and compiles the outcome. Parse and
// protocol failures terminate the session with the matching status reason and
// still compile; backend failures propagate after the checkpoint callback has
// seen the partial transcript.
inline SessionOutcome run_case(const CaseSpec& spec, const SchemeRegistry& registry,
                               const PromptPack& prompts, AgentBackend& generator,
                               AgentBackend& verifier, SessionConfig config = {},
                               const RunOptions& options = {}) {
    detail::SessionRunner runner(spec, registry, prompts, generator, verifier, config, options);
    return runner.run();
}

// ---------------------------------------------------------------------------
// Bundles: the three documents a session leaves on disk.
// ---------------------------------------------------------------------------

inline void write_bundle(const std::filesystem::path& dir, const SessionOutcome& outcome) {
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const nlohmann::json& j) {
        std::ofstream out(dir / name);
        if (!out) throw ParseError("cannot write '" + (dir / name).string() + "'");
        out << dump_json(j);
    };
    write("transcript.json", transcript_to_json(outcome.transcript));
    write("framework.json", framework_to_json(outcome.framework));
    write("report.json", report_to_json(outcome.report));
}

}  // namespace argmed
