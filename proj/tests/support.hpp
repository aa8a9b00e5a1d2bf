#pragma once

// Shared fixtures and helpers for the test suites: deterministic random
// framework generation, the migraine fixture, a DOT well-formedness checker,
// and a subprocess runner for driving the CLI binary.

#include <array>
#include <atomic>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "argmed/aaf.hpp"
#include "argmed/semantics.hpp"

namespace testsupport {

using namespace argmed;

// Deterministic id for node i: a0, a1, ...
inline ArgumentId node_id(int i) { return ArgumentId("a" + std::to_string(i)); }

// Random typed framework with n arguments. Each argument is a decision with
// probability decision_p; each ordered non-decision-pair edge appears with
// probability density. Decision mutual attacks come from the typed API, and
// the decision-to-belief direction is skipped, so the result always
// validates.
inline ArgumentationFramework random_framework(std::mt19937_64& rng, int n, double density,
                                               double decision_p = 0.3) {
    ArgumentationFramework fw;
    std::vector<ArgumentKind> kinds(n);
    auto coin = [&](double p) {
        return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
    };
    for (int i = 0; i < n; ++i) {
        Argument a;
        a.id = node_id(i);
        a.kind = coin(decision_p) ? ArgumentKind::Decision : ArgumentKind::Belief;
        kinds[i] = a.kind;
        a.conclusion = "claim " + std::to_string(i);
        fw.add_argument(std::move(a));
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (kinds[i] == ArgumentKind::Decision && kinds[j] == ArgumentKind::Decision)
                continue;  // already mutual via the typed API
            if (kinds[i] == ArgumentKind::Decision && kinds[j] == ArgumentKind::Belief)
                continue;  // forbidden direction
            if (coin(density)) fw.add_attack(node_id(i), node_id(j));
        }
    }
    return fw;
}

// Migraine prophylaxis fixture: decisions A, B, C; unattacked beliefs D and E
// both attacking A. Preferred extensions {B,D,E} and {C,D,E}.
inline ArgumentationFramework migraine_framework() {
    ArgumentationFramework fw;
    auto add = [&](const char* id, ArgumentKind kind, const char* conclusion) {
        Argument a;
        a.id = ArgumentId(id);
        a.kind = kind;
        a.conclusion = conclusion;
        fw.add_argument(std::move(a));
    };
    add("A", ArgumentKind::Decision, "Start the topiramate-analog prophylactic.");
    add("B", ArgumentKind::Decision, "Start propranolol.");
    add("C", ArgumentKind::Decision, "Start verapamil.");
    add("D", ArgumentKind::Belief, "The tremor comorbidity counts against the first option.");
    add("E", ArgumentKind::Belief, "A prior adverse reaction counts against the first option.");
    fw.add_attack(ArgumentId("D"), ArgumentId("A"));
    fw.add_attack(ArgumentId("E"), ArgumentId("A"));
    return fw;
}

inline Extension ext(std::initializer_list<const char*> ids) {
    Extension e;
    for (const char* id : ids) e.insert(ArgumentId(id));
    return e;
}

// ---------------------------------------------------------------------------
// DOT checker: accepts the digraph subset the exporter emits and verifies
// structure (one digraph block, quoted node statements with attribute lists,
// quoted edge statements) rather than trusting string containment.
// ---------------------------------------------------------------------------

struct DotDocument {
    std::string graph_name;
    std::vector<std::string> nodes;
    std::vector<std::pair<std::string, std::string>> edges;
    std::map<std::string, std::map<std::string, std::string>> attrs;
};

// Parses or throws std::runtime_error with the offending line.
inline DotDocument parse_dot(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    DotDocument doc;
    bool in_graph = false, closed = false;

    auto fail = [&](const std::string& why) {
        throw std::runtime_error("dot checker: " + why + " in line: " + line);
    };
    auto read_quoted = [&](const std::string& s, std::size_t& pos) {
        if (pos >= s.size() || s[pos] != '"') fail("expected '\"'");
        std::string out;
        ++pos;
        while (pos < s.size() && s[pos] != '"') {
            if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
            out += s[pos++];
        }
        if (pos >= s.size()) fail("unterminated quote");
        ++pos;
        return out;
    };

    while (std::getline(in, line)) {
        std::string t = line;
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(0, 1);
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
        if (t.empty()) continue;
        if (!in_graph) {
            if (t.rfind("digraph ", 0) != 0 || t.back() != '{') fail("expected digraph header");
            doc.graph_name = t.substr(8, t.size() - 9);
            while (!doc.graph_name.empty() && doc.graph_name.back() == ' ')
                doc.graph_name.pop_back();
            if (doc.graph_name.empty()) fail("empty graph name");
            in_graph = true;
            continue;
        }
        if (t == "}") {
            closed = true;
            continue;
        }
        if (closed) fail("content after closing brace");
        std::size_t pos = 0;
        std::string first = read_quoted(t, pos);
        while (pos < t.size() && t[pos] == ' ') ++pos;
        if (t.compare(pos, 2, "->") == 0) {
            pos += 2;
            while (pos < t.size() && t[pos] == ' ') ++pos;
            std::string second = read_quoted(t, pos);
            if (t.substr(pos) != ";") fail("edge statement must end with ';'");
            doc.edges.emplace_back(first, second);
            continue;
        }
        if (t[pos] != '[') fail("expected attribute list");
        std::size_t close = t.rfind("];");
        if (close == std::string::npos || close + 2 != t.size())
            fail("node statement must end with '];'");
        std::string attrs = t.substr(pos + 1, close - pos - 1);
        std::map<std::string, std::string> kv;
        std::size_t ap = 0;
        while (ap < attrs.size()) {
            while (ap < attrs.size() && (attrs[ap] == ' ' || attrs[ap] == ',')) ++ap;
            if (ap >= attrs.size()) break;
            std::size_t eq = attrs.find('=', ap);
            if (eq == std::string::npos) fail("attribute without '='");
            std::string key = attrs.substr(ap, eq - ap);
            ap = eq + 1;
            std::string value;
            if (attrs[ap] == '"') {
                value = read_quoted(attrs, ap);
            } else {
                while (ap < attrs.size() && attrs[ap] != ',') value += attrs[ap++];
            }
            kv[key] = value;
        }
        doc.nodes.push_back(first);
        doc.attrs[first] = std::move(kv);
    }
    if (!in_graph) throw std::runtime_error("dot checker: no digraph found");
    if (!closed) throw std::runtime_error("dot checker: digraph never closed");
    return doc;
}

// ---------------------------------------------------------------------------
// Subprocess runner for the CLI binary.
// ---------------------------------------------------------------------------

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline CommandResult run_command(const std::string& command) {
    namespace fs = std::filesystem;
    fs::path err_file =
        fs::temp_directory_path() / ("argmed-test-err-" + std::to_string(::getpid()) + ".txt");
    std::string full = command + " 2>" + err_file.string();
    CommandResult result;
    FILE* pipe = popen(full.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed for: " + command);
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream err(err_file);
    std::ostringstream errbuf;
    errbuf << err.rdbuf();
    result.err = errbuf.str();
    fs::remove(err_file);
    return result;
}

inline std::string cli_path() { return ARGMED_CLI_PATH; }
inline std::string data_dir() { return ARGMED_DATA_DIR; }

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        dir_ = std::filesystem::temp_directory_path() /
               ("argmed-" + tag + "-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    const std::filesystem::path& path() const { return dir_; }
    std::string str(const std::string& name = "") const {
        return name.empty() ? dir_.string() : (dir_ / name).string();
    }

private:
    std::filesystem::path dir_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace testsupport
