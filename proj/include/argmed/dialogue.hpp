#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "argmed/aaf.hpp"
#include "argmed/aaf_io.hpp"
#include "argmed/errors.hpp"

namespace argmed {

struct SessionConfig {
    int dialogue_limit = 8;  // every move counts, both speakers
    int max_decisions = 4;   // distinct decision proposals per session

    bool operator==(const SessionConfig&) const = default;
};

enum class Speaker { Generator, Verifier };

inline const char* speaker_name(Speaker s) {
    return s == Speaker::Generator ? "generator" : "verifier";
}

// Generator move: put a new argument on the table, optionally declaring which
// earlier argument it attacks.
struct ProposeArgument {
    Argument argument;
    std::optional<ArgumentId> attacks_target;

    bool operator==(const ProposeArgument&) const = default;
};

// Verifier move: pose one critical question against a proposed argument.
// rejected means the verifier answers its own question against the argument;
// reason carries the ground for rejection.
struct PoseCq {
    std::string cq_id;
    ArgumentId target;
    bool rejected = false;
    std::string reason;

    bool operator==(const PoseCq&) const = default;
};

// Verifier move: explicitly endorse a proposed argument.
struct AcceptArgument {
    ArgumentId target;

    bool operator==(const AcceptArgument&) const = default;
};

using MovePayload = std::variant<ProposeArgument, PoseCq, AcceptArgument>;

struct Move {
    int index = 0;  // 1-based position; assigned on submission
    Speaker speaker = Speaker::Generator;
    MovePayload payload;

    bool operator==(const Move&) const = default;
};

inline Move make_proposal(Argument a, std::optional<ArgumentId> target = std::nullopt) {
    return Move{0, Speaker::Generator, ProposeArgument{std::move(a), std::move(target)}};
}

inline Move make_cq(std::string cq_id, ArgumentId target, bool rejected, std::string reason = "") {
    return Move{0, Speaker::Verifier,
                PoseCq{std::move(cq_id), std::move(target), rejected, std::move(reason)}};
}

inline Move make_accept(ArgumentId target) {
    return Move{0, Speaker::Verifier, AcceptArgument{std::move(target)}};
}

struct SessionStatus {
    bool active = true;
    std::string reason;  // set exactly when not active

    bool operator==(const SessionStatus&) const = default;
};

struct LegalityResult {
    bool legal = true;
    std::string reason;

    explicit operator bool() const { return legal; }
};

// Session state. Moves are appended through submit() only, so invariants hold
// by construction: contiguous indices, unique proposal ids, targets that
// exist, the decision cap, the dialogue limit, and the alternation rule (a
// generator proposal may not attack the immediately preceding generator
// proposal; two decisions always attack each other, a declared target is an
// attack by fiat).
class DialogueTranscript {
public:
    explicit DialogueTranscript(SessionConfig cfg = {}) : cfg_(cfg) {
        if (cfg.dialogue_limit < 1)
            throw Error(Err::InvalidConfig, "dialogue_limit must be at least 1");
        if (cfg.max_decisions < 1)
            throw Error(Err::InvalidConfig, "max_decisions must be at least 1");
    }

    const SessionConfig& config() const { return cfg_; }
    const std::vector<Move>& moves() const { return moves_; }
    const SessionStatus& status() const { return status_; }
    bool active() const { return status_.active; }

    bool proposed(const ArgumentId& id) const { return proposed_.contains(id); }

    const Argument* find_argument(const ArgumentId& id) const {
        auto it = proposed_.find(id);
        return it == proposed_.end() ? nullptr : &it->second;
    }

    bool accepted(const ArgumentId& id) const { return accepted_.contains(id); }

    int decision_count() const { return decisions_; }

    // Checks everything except scheme-level content. The reason strings are
    // stable; callers surface them to users and to reprompted agents.
    LegalityResult legal(const Move& m) const {
        if (!status_.active)
            return {false, "session terminated (" + status_.reason + ")"};
        if (static_cast<int>(moves_.size()) >= cfg_.dialogue_limit)
            return {false, "dialogue limit of " + std::to_string(cfg_.dialogue_limit) + " reached"};
        if (std::holds_alternative<ProposeArgument>(m.payload)) {
            if (m.speaker != Speaker::Generator)
                return {false, "only the generator proposes arguments"};
            const auto& p = std::get<ProposeArgument>(m.payload);
            if (p.argument.id.value.empty()) return {false, "proposed argument has no id"};
            if (proposed_.contains(p.argument.id))
                return {false, "argument '" + p.argument.id.value + "' already proposed"};
            if (p.attacks_target) {
                if (!proposed_.contains(*p.attacks_target))
                    return {false,
                            "attack target '" + p.attacks_target->value + "' not in session"};
            }
            if (p.argument.kind == ArgumentKind::Decision && decisions_ >= cfg_.max_decisions)
                return {false,
                        "decision cap of " + std::to_string(cfg_.max_decisions) + " reached"};
            if (!moves_.empty()) {
                const Move& prev = moves_.back();
                if (prev.speaker == Speaker::Generator &&
                    std::holds_alternative<ProposeArgument>(prev.payload)) {
                    const auto& q = std::get<ProposeArgument>(prev.payload);
                    bool attacks_prev =
                        (p.attacks_target && *p.attacks_target == q.argument.id) ||
                        (p.argument.kind == ArgumentKind::Decision &&
                         q.argument.kind == ArgumentKind::Decision);
                    if (attacks_prev)
                        return {false,
                                "proposal attacks the preceding proposal '" +
                                    q.argument.id.value + "' without an intervening verifier move"};
                }
            }
            return {};
        }
        if (std::holds_alternative<PoseCq>(m.payload)) {
            if (m.speaker != Speaker::Verifier)
                return {false, "only the verifier poses critical questions"};
            const auto& cq = std::get<PoseCq>(m.payload);
            if (cq.cq_id.empty()) return {false, "critical question move has no cq id"};
            if (!proposed_.contains(cq.target))
                return {false, "question target '" + cq.target.value + "' not in session"};
            if (accepted_.contains(cq.target))
                return {false, "argument '" + cq.target.value + "' was already accepted"};
            return {};
        }
        const auto& acc = std::get<AcceptArgument>(m.payload);
        if (m.speaker != Speaker::Verifier)
            return {false, "only the verifier accepts arguments"};
        if (!proposed_.contains(acc.target))
            return {false, "acceptance target '" + acc.target.value + "' not in session"};
        if (accepted_.contains(acc.target))
            return {false, "argument '" + acc.target.value + "' was already accepted"};
        return {};
    }

    // Appends the move with the next index. Throws SessionTerminated on a
    // closed session and IllegalMove (with index and reason) otherwise.
    // Reaching the dialogue limit terminates the session.
    void submit(Move m) {
        if (!status_.active)
            throw Error(Err::SessionTerminated,
                        "session terminated (" + status_.reason + ")");
        LegalityResult check = legal(m);
        if (!check)
            throw IllegalMoveError(static_cast<int>(moves_.size()) + 1, check.reason);
        m.index = static_cast<int>(moves_.size()) + 1;
        if (const auto* p = std::get_if<ProposeArgument>(&m.payload)) {
            proposed_.emplace(p->argument.id, p->argument);
            if (p->argument.kind == ArgumentKind::Decision) ++decisions_;
        } else if (const auto* acc = std::get_if<AcceptArgument>(&m.payload)) {
            accepted_.insert(acc->target);
        }
        moves_.push_back(std::move(m));
        if (static_cast<int>(moves_.size()) >= cfg_.dialogue_limit)
            status_ = {false, "limit"};
    }

    // Closes the session with the given reason (e.g. "accepted", "parse",
    // "protocol"). Termination is always an explicit act or the limit.
    void finish(std::string reason) {
        if (!status_.active)
            throw Error(Err::SessionTerminated,
                        "session already terminated (" + status_.reason + ")");
        status_ = {false, std::move(reason)};
    }

    bool operator==(const DialogueTranscript& other) const {
        return cfg_ == other.cfg_ && moves_ == other.moves_ && status_ == other.status_;
    }

private:
    SessionConfig cfg_;
    std::vector<Move> moves_;
    SessionStatus status_;
    std::map<ArgumentId, Argument> proposed_;
    std::set<ArgumentId> accepted_;
    int decisions_ = 0;
};

inline DialogueTranscript new_session(SessionConfig cfg = {}) { return DialogueTranscript(cfg); }

inline LegalityResult is_legal(const DialogueTranscript& t, const Move& m) { return t.legal(m); }

inline void submit_move(DialogueTranscript& t, Move m) { t.submit(std::move(m)); }

// Compiles a finished session into a framework: proposals become arguments
// (decision proposals pick up the mutual attacks), declared targets become
// attack edges. A decision declaring a belief target surfaces here as
// ForbiddenAttack. Acceptance state does not add edges; endorsed membership is
// read off the extensions afterwards.
inline ArgumentationFramework to_framework(const DialogueTranscript& t) {
    if (t.active())
        throw Error(Err::SessionActive, "cannot compile an active session");
    ArgumentationFramework fw;
    for (const Move& m : t.moves()) {
        const auto* p = std::get_if<ProposeArgument>(&m.payload);
        if (!p) continue;
        fw.add_argument(p->argument);
        if (p->attacks_target) fw.add_attack(p->argument.id, *p->attacks_target);
    }
    return fw;
}

// Replays a recorded move list against a fresh session. The first illegal
// move raises IllegalMoveAt with its 1-based position; a move after the limit
// is illegal at position limit+1. final_status, when terminated, is applied
// after the last move (a still-active replayed session stays active without
// it).
inline DialogueTranscript replay(const std::vector<Move>& moves, SessionConfig cfg = {},
                                 const std::optional<SessionStatus>& final_status = std::nullopt) {
    DialogueTranscript t(cfg);
    int pos = 0;
    for (const Move& m : moves) {
        ++pos;
        if (m.index != 0 && m.index != pos)
            throw IllegalMoveError(pos, "move carries index " + std::to_string(m.index) +
                                            " but sits at position " + std::to_string(pos));
        try {
            t.submit(m);
        } catch (const IllegalMoveError&) {
            throw;
        } catch (const Error& e) {
            if (e.code() == Err::SessionTerminated)
                throw IllegalMoveError(pos, t.status().reason == "limit"
                                                ? "dialogue limit of " +
                                                      std::to_string(cfg.dialogue_limit) +
                                                      " reached"
                                                : e.what());
            throw;
        }
    }
    if (final_status && !final_status->active && t.active()) t.finish(final_status->reason);
    return t;
}

// ---------------------------------------------------------------------------
// Transcript JSON. The document carries config, status, and the move list;
// loading parses shape only, replay() re-checks legality.
// ---------------------------------------------------------------------------

inline json move_to_json(const Move& m) {
    json j;
    j["index"] = m.index;
    j["speaker"] = speaker_name(m.speaker);
    if (const auto* p = std::get_if<ProposeArgument>(&m.payload)) {
        j["type"] = "propose";
        j["argument"] = argument_to_json(p->argument);
        j["attacks_target"] = p->attacks_target ? json(p->attacks_target->value) : json(nullptr);
    } else if (const auto* cq = std::get_if<PoseCq>(&m.payload)) {
        j["type"] = "cq";
        j["cq_id"] = cq->cq_id;
        j["target"] = cq->target.value;
        j["rejected"] = cq->rejected;
        j["reason"] = cq->reason;
    } else {
        const auto& acc = std::get<AcceptArgument>(m.payload);
        j["type"] = "accept";
        j["target"] = acc.target.value;
    }
    return j;
}

inline Move move_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("move entry must be an object");
    Move m;
    if (j.contains("index")) {
        if (!j["index"].is_number_integer()) throw ParseError("move index must be an integer");
        m.index = j["index"].get<int>();
    }
    if (!j.contains("speaker") || !j["speaker"].is_string())
        throw ParseError("move needs a 'speaker'");
    std::string speaker = j["speaker"].get<std::string>();
    if (speaker == "generator")
        m.speaker = Speaker::Generator;
    else if (speaker == "verifier")
        m.speaker = Speaker::Verifier;
    else
        throw ParseError("unknown speaker '" + speaker + "'");
    if (!j.contains("type") || !j["type"].is_string())
        throw ParseError("move needs a 'type'");
    std::string type = j["type"].get<std::string>();
    if (type == "propose") {
        ProposeArgument p;
        if (!j.contains("argument")) throw ParseError("propose move needs an 'argument'");
        p.argument = argument_from_json(j["argument"]);
        if (j.contains("attacks_target") && !j["attacks_target"].is_null()) {
            if (!j["attacks_target"].is_string())
                throw ParseError("attacks_target must be a string");
            p.attacks_target = ArgumentId(j["attacks_target"].get<std::string>());
        }
        m.payload = std::move(p);
    } else if (type == "cq") {
        PoseCq cq;
        if (!j.contains("cq_id") || !j["cq_id"].is_string())
            throw ParseError("cq move needs a 'cq_id'");
        cq.cq_id = j["cq_id"].get<std::string>();
        if (!j.contains("target") || !j["target"].is_string())
            throw ParseError("cq move needs a 'target'");
        cq.target = ArgumentId(j["target"].get<std::string>());
        if (j.contains("rejected")) {
            if (!j["rejected"].is_boolean()) throw ParseError("'rejected' must be a boolean");
            cq.rejected = j["rejected"].get<bool>();
        }
        if (j.contains("reason")) {
            if (!j["reason"].is_string()) throw ParseError("'reason' must be a string");
            cq.reason = j["reason"].get<std::string>();
        }
        m.payload = std::move(cq);
    } else if (type == "accept") {
        AcceptArgument acc;
        if (!j.contains("target") || !j["target"].is_string())
            throw ParseError("accept move needs a 'target'");
        acc.target = ArgumentId(j["target"].get<std::string>());
        m.payload = std::move(acc);
    } else {
        throw ParseError("unknown move type '" + type + "'");
    }
    return m;
}

inline json session_config_to_json(const SessionConfig& cfg) {
    json j;
    j["dialogue_limit"] = cfg.dialogue_limit;
    j["max_decisions"] = cfg.max_decisions;
    return j;
}

inline SessionConfig session_config_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("session config must be an object");
    SessionConfig cfg;
    if (j.contains("dialogue_limit")) {
        if (!j["dialogue_limit"].is_number_integer())
            throw ParseError("dialogue_limit must be an integer");
        cfg.dialogue_limit = j["dialogue_limit"].get<int>();
    }
    if (j.contains("max_decisions")) {
        if (!j["max_decisions"].is_number_integer())
            throw ParseError("max_decisions must be an integer");
        cfg.max_decisions = j["max_decisions"].get<int>();
    }
    return cfg;
}

inline json transcript_to_json(const DialogueTranscript& t) {
    json j;
    j["config"] = session_config_to_json(t.config());
    j["status"]["state"] = t.active() ? "active" : "terminated";
    j["status"]["reason"] = t.status().reason;
    j["moves"] = json::array();
    for (const Move& m : t.moves()) j["moves"].push_back(move_to_json(m));
    return j;
}

// Shape-parsed transcript document; semantics are re-established by replay.
struct TranscriptFile {
    SessionConfig config;
    std::vector<Move> moves;
    SessionStatus status;
};

inline TranscriptFile transcript_file_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("transcript document must be a JSON object");
    TranscriptFile tf;
    if (j.contains("config")) tf.config = session_config_from_json(j["config"]);
    if (!j.contains("moves") || !j["moves"].is_array())
        throw ParseError("transcript document needs a 'moves' array");
    for (const auto& entry : j["moves"]) tf.moves.push_back(move_from_json(entry));
    if (j.contains("status")) {
        const json& st = j["status"];
        if (!st.is_object() || !st.contains("state") || !st["state"].is_string())
            throw ParseError("transcript status needs a 'state'");
        std::string state = st["state"].get<std::string>();
        if (state == "active") {
            tf.status = {true, ""};
        } else if (state == "terminated") {
            if (!st.contains("reason") || !st["reason"].is_string())
                throw ParseError("a terminated status needs a 'reason'");
            tf.status = {false, st["reason"].get<std::string>()};
        } else {
            throw ParseError("unknown session state '" + state + "'");
        }
    }
    return tf;
}

inline DialogueTranscript replay(const TranscriptFile& tf) {
    return replay(tf.moves, tf.config, tf.status);
}

}  // namespace argmed
