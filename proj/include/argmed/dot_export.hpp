#pragma once

#include <map>
#include <sstream>
#include <string>

#include "argmed/aaf.hpp"
#include "argmed/dialogue.hpp"

namespace argmed {

// Rendering knobs. Decisions and beliefs stay visually distinct through both
// shape and fill color; move_index, when filled, annotates nodes with the
// dialogue move that introduced them.
struct DotOptions {
    std::string graph_name = "argmed";
    std::string decision_shape = "box";
    std::string belief_shape = "ellipse";
    std::string decision_color = "indianred1";
    std::string belief_color = "khaki1";
    std::map<ArgumentId, int> move_index;
};

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

}  // namespace detail

// Deterministic digraph: nodes sorted by id, edges in attack-set order.
inline std::string to_dot(const ArgumentationFramework& fw, const DotOptions& opts = {}) {
    std::ostringstream os;
    os << "digraph " << opts.graph_name << " {\n";
    for (const auto& [id, arg] : fw.arguments()) {
        const bool decision = arg.kind == ArgumentKind::Decision;
        std::string label = id.value;
        auto mi = opts.move_index.find(id);
        if (mi != opts.move_index.end())
            label += "\nmove " + std::to_string(mi->second);
        os << "  \"" << detail::dot_escape(id.value) << "\" [shape="
           << (decision ? opts.decision_shape : opts.belief_shape) << ", style=filled, fillcolor=\""
           << detail::dot_escape(decision ? opts.decision_color : opts.belief_color)
           << "\", class=\"" << kind_name(arg.kind) << "\", label=\""
           << detail::dot_escape(label) << "\"";
        if (!arg.conclusion.empty())
            os << ", tooltip=\"" << detail::dot_escape(arg.conclusion) << "\"";
        os << "];\n";
    }
    for (const Attack& at : fw.attacks())
        os << "  \"" << detail::dot_escape(at.from.value) << "\" -> \""
           << detail::dot_escape(at.to.value) << "\";\n";
    os << "}\n";
    return os.str();
}

// Move annotations for a session bundle: each argument mapped to the index of
// the proposal that introduced it.
inline std::map<ArgumentId, int> move_annotations(const std::vector<Move>& moves) {
    std::map<ArgumentId, int> out;
    for (const Move& m : moves)
        if (const auto* p = std::get_if<ProposeArgument>(&m.payload))
            out.emplace(p->argument.id, m.index);
    return out;
}

}  // namespace argmed
