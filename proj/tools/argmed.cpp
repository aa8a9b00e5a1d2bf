// Command-line front end: solve/validate/export analyze framework files,
// replay re-checks recorded transcripts, run drives generator/verifier
// sessions against a backend, schemes inspects scheme packs.
//
// Exit codes: 0 success, 1 usage or input errors, 2 when the decision report
// carries the reasoning-error flag, 3 when a backend or the protocol failed
// hard during run.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "argmed/argmed.hpp"

namespace fs = std::filesystem;
using argmed::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitReasoningError = 2;
constexpr int kExitBackend = 3;

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string extension_to_string(const argmed::Extension& e) {
    std::string out = "{";
    bool first = true;
    for (const argmed::ArgumentId& id : e) {
        if (!first) out += ", ";
        out += id.value;
        first = false;
    }
    return out + "}";
}

std::string id_list(const std::vector<argmed::ArgumentId>& ids) {
    if (ids.empty()) return "(none)";
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? ", " : "") + ids[i].value;
    return out;
}

void print_report_human(const argmed::DecisionReport& report, std::ostream& os) {
    os << "optional decisions: " << id_list(report.optional_decisions) << "\n";
    if (report.explanation_sets.empty()) {
        os << "explanation sets: (none)\n";
    } else {
        os << "explanation sets (mutually exclusive alternatives):\n";
        for (const argmed::ExplanationSet& set : report.explanation_sets) {
            os << "  decision " << set.decision.value;
            if (!set.supporters.empty()) {
                os << " with ";
                bool first = true;
                for (const argmed::ArgumentId& s : set.supporters) {
                    if (!first) os << ", ";
                    os << s.value;
                    first = false;
                }
            }
            os << "\n";
        }
    }
    if (report.error_flag)
        os << "REASONING ERROR: " << report.error_note << "\n";
    else
        os << "no reasoning error detected\n";
}

void write_or_print(const std::string& content, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(output_path);
    if (!out) throw argmed::ParseError("cannot write '" + output_path + "'");
    out << content;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveArgs {
    std::string input;
    std::string format = "human";
    std::string output;
    std::string semantics = "preferred";
    bool extensions = false;
    bool oracle = false;
    std::size_t oracle_cap = argmed::kDefaultOracleCap;
};

int run_solve(const SolveArgs& args) {
    argmed::TextReadResult loaded = argmed::load_framework(args.input);
    print_warnings(loaded.warnings);
    const argmed::ArgumentationFramework& fw = loaded.framework;

    argmed::ValidationReport validation = fw.validate();
    print_warnings(validation.warnings);
    if (!validation.ok()) {
        for (const argmed::Violation& v : validation.violations)
            std::cerr << "violation [" << argmed::violation_name(v.kind) << "]: " << v.detail
                      << "\n";
        std::cerr << "error: framework fails validation\n";
        return kExitInput;
    }

    if (args.oracle) {
        auto fast = argmed::preferred_extensions(fw);
        auto reference = argmed::brute_force_preferred(fw, args.oracle_cap);
        if (fast != reference) {
            std::cerr << "error: solver and exhaustive reference disagree\n";
            std::cerr << "  solver:";
            for (const auto& e : fast) std::cerr << " " << extension_to_string(e);
            std::cerr << "\n  reference:";
            for (const auto& e : reference) std::cerr << " " << extension_to_string(e);
            std::cerr << "\n";
            return kExitInput;
        }
        std::cerr << "oracle check passed (" << reference.size() << " preferred extensions)\n";
    }

    argmed::DecisionReport report =
        argmed::exclusivity_filter(fw, argmed::detect_reasoning_error(fw));

    std::ostringstream body;
    if (args.format == "json") {
        json j = argmed::report_to_json(report);
        if (args.extensions) {
            j["extensions"] = json::array();
            auto exts = args.semantics == "grounded"
                            ? std::vector<argmed::Extension>{argmed::grounded_extension(fw)}
                            : argmed::preferred_extensions(fw);
            for (const auto& e : exts) {
                json je = json::array();
                for (const argmed::ArgumentId& id : e) je.push_back(id.value);
                j["extensions"].push_back(je);
            }
        }
        body << argmed::dump_json(j);
    } else {
        body << "framework: " << fw.argument_count() << " arguments, " << fw.attack_count()
             << " attacks\n";
        if (args.extensions) {
            if (args.semantics == "grounded") {
                body << "grounded extension: "
                     << extension_to_string(argmed::grounded_extension(fw)) << "\n";
            } else {
                body << "preferred extensions:\n";
                for (const auto& e : argmed::preferred_extensions(fw))
                    body << "  " << extension_to_string(e) << "\n";
            }
        }
        print_report_human(report, body);
    }
    write_or_print(body.str(), args.output);
    return report.error_flag ? kExitReasoningError : kExitOk;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

int run_validate(const std::string& input) {
    argmed::TextReadResult loaded = argmed::load_framework(input);
    print_warnings(loaded.warnings);
    argmed::ValidationReport validation = loaded.framework.validate();
    print_warnings(validation.warnings);
    for (const argmed::Violation& v : validation.violations)
        std::cout << "violation [" << argmed::violation_name(v.kind) << "]: " << v.detail << "\n";
    if (!validation.ok()) {
        std::cout << validation.violations.size() << " violation(s)\n";
        return kExitInput;
    }
    std::cout << "framework is valid (" << loaded.framework.argument_count() << " arguments, "
              << loaded.framework.attack_count() << " attacks)\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// export
// ---------------------------------------------------------------------------

struct ExportArgs {
    std::string input;
    std::string output;
    argmed::DotOptions options;
};

int run_export(const ExportArgs& args) {
    argmed::ArgumentationFramework fw;
    argmed::DotOptions options = args.options;
    if (fs::is_directory(args.input)) {
        fs::path dir(args.input);
        argmed::TextReadResult loaded = argmed::load_framework((dir / "framework.json").string());
        fw = loaded.framework;
        std::ifstream tin(dir / "transcript.json");
        if (tin) {
            json tj = json::parse(tin, nullptr, false);
            if (tj.is_discarded())
                throw argmed::ParseError("'" + (dir / "transcript.json").string() +
                                         "' is not valid JSON");
            argmed::TranscriptFile tf = argmed::transcript_file_from_json(tj);
            options.move_index = argmed::move_annotations(tf.moves);
        }
    } else {
        argmed::TextReadResult loaded = argmed::load_framework(args.input);
        print_warnings(loaded.warnings);
        fw = loaded.framework;
    }
    write_or_print(argmed::to_dot(fw, options), args.output);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// replay
// ---------------------------------------------------------------------------

struct ReplayArgs {
    std::string input;
    std::string format = "human";
    std::string out_dir;
};

int run_replay(const ReplayArgs& args) {
    std::ifstream in(args.input);
    if (!in) throw argmed::ParseError("cannot open '" + args.input + "'");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw argmed::ParseError("'" + args.input + "' is not valid JSON");
    argmed::TranscriptFile tf = argmed::transcript_file_from_json(j);

    argmed::DialogueTranscript transcript = [&] {
        try {
            return argmed::replay(tf);
        } catch (const argmed::IllegalMoveError& e) {
            std::cerr << "error: " << e.what() << "\n";
            std::exit(kExitInput);
        }
    }();

    if (transcript.active()) {
        std::cerr << "error: transcript is still active; only terminated sessions compile\n";
        return kExitInput;
    }
    argmed::ArgumentationFramework fw = argmed::to_framework(transcript);
    argmed::DecisionReport report =
        argmed::exclusivity_filter(fw, argmed::detect_reasoning_error(fw));

    if (!args.out_dir.empty()) {
        argmed::SessionOutcome outcome{fs::path(args.input).stem().string(), transcript, fw,
                                       report};
        argmed::write_bundle(args.out_dir, outcome);
    }
    if (args.format == "json") {
        std::cout << argmed::dump_json(argmed::report_to_json(report));
    } else {
        std::cout << "replayed " << transcript.moves().size() << " moves; session "
                  << (transcript.active() ? "active" : "terminated (" +
                                                           transcript.status().reason + ")")
                  << "\n";
        print_report_human(report, std::cout);
    }
    return report.error_flag ? kExitReasoningError : kExitOk;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunArgs {
    std::vector<std::string> cases;
    std::string backend_config;
    std::string schemes_pack;
    std::string prompts_dir;
    std::string out_dir = ".";
    std::string format = "human";
    bool record = false;
    int parallel = 1;
    int dialogue_limit = argmed::SessionConfig{}.dialogue_limit;
    int max_decisions = argmed::SessionConfig{}.max_decisions;
};

struct BackendPair {
    argmed::BackendConfig generator;
    argmed::BackendConfig verifier;
};

BackendPair load_backend_pair(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw argmed::ParseError("cannot open '" + path + "'");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw argmed::ParseError("'" + path + "' is not valid JSON");
    if (j.is_object() && j.contains("generator") && j.contains("verifier"))
        return {argmed::backend_config_from_json(j["generator"]),
                argmed::backend_config_from_json(j["verifier"])};
    argmed::BackendConfig both = argmed::backend_config_from_json(j);
    return {both, both};
}

struct CaseResult {
    std::string case_id;
    bool hard_failure = false;
    std::string failure;
    std::optional<argmed::SessionOutcome> outcome;
};

CaseResult run_one_case(const std::string& case_path, const RunArgs& args,
                        const BackendPair& pair, const argmed::SchemeRegistry& registry,
                        const argmed::PromptPack& prompts) {
    CaseResult result;
    argmed::CaseSpec spec = argmed::load_case(case_path);
    result.case_id = spec.case_id;
    fs::path bundle_dir = fs::path(args.out_dir) / spec.case_id;
    fs::create_directories(bundle_dir);

    std::unique_ptr<argmed::AgentBackend> generator = argmed::make_backend(pair.generator);
    std::unique_ptr<argmed::AgentBackend> verifier = argmed::make_backend(pair.verifier);
    argmed::RecordingBackend* rec_gen = nullptr;
    argmed::RecordingBackend* rec_ver = nullptr;
    if (args.record) {
        auto g = std::make_unique<argmed::RecordingBackend>(std::move(generator));
        auto v = std::make_unique<argmed::RecordingBackend>(std::move(verifier));
        rec_gen = g.get();
        rec_ver = v.get();
        generator = std::move(g);
        verifier = std::move(v);
    }

    argmed::SessionConfig config{args.dialogue_limit, args.max_decisions};
    argmed::DialogueTranscript partial(config);
    argmed::RunOptions options;
    options.checkpoint = [&](const argmed::DialogueTranscript& t) {
        partial = t;
        std::ofstream out(bundle_dir / "transcript.json");
        if (out) out << argmed::dump_json(argmed::transcript_to_json(t));
    };

    try {
        argmed::SessionOutcome outcome = argmed::run_case(spec, registry, prompts, *generator,
                                                          *verifier, config, options);
        argmed::write_bundle(bundle_dir, outcome);
        result.outcome = std::move(outcome);
    } catch (const argmed::Error& e) {
        // The session died outside the protocol (backend gone, internal
        // fault). Close the partial transcript and leave an analyzable
        // bundle anyway.
        result.hard_failure = true;
        result.failure = e.what();
        if (partial.active()) partial.finish("backend-failure");
        argmed::SessionOutcome outcome;
        outcome.case_id = spec.case_id;
        outcome.transcript = partial;
        outcome.framework = argmed::to_framework(partial);
        outcome.report = argmed::exclusivity_filter(
            outcome.framework, argmed::detect_reasoning_error(outcome.framework));
        argmed::write_bundle(bundle_dir, outcome);
        result.outcome = std::move(outcome);
    }
    if (rec_gen) rec_gen->save((bundle_dir / "generator_completions.json").string());
    if (rec_ver) rec_ver->save((bundle_dir / "verifier_completions.json").string());
    return result;
}

int run_run(const RunArgs& args) {
    BackendPair pair = load_backend_pair(args.backend_config);
    argmed::SchemeRegistry registry = args.schemes_pack.empty()
                                          ? argmed::builtin_schemes()
                                          : argmed::load_scheme_pack(args.schemes_pack);
    argmed::PromptPack prompts = args.prompts_dir.empty() ? argmed::default_prompts()
                                                          : argmed::load_prompts(args.prompts_dir);

    std::vector<CaseResult> results(args.cases.size());
    const int workers = std::max(1, std::min<int>(args.parallel,
                                                  static_cast<int>(args.cases.size())));
    std::mutex fail_mutex;
    std::vector<std::string> infra_failures;
    std::size_t next = 0;
    std::mutex next_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= args.cases.size()) return;
                i = next++;
            }
            try {
                results[i] = run_one_case(args.cases[i], args, pair, registry, prompts);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                infra_failures.push_back(args.cases[i] + ": " + e.what());
                results[i].case_id = args.cases[i];
                results[i].hard_failure = true;
                results[i].failure = e.what();
            }
        }
    };
    std::vector<std::thread> threads;
    for (int i = 0; i < workers; ++i) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();

    int exit_code = kExitOk;
    json summary = json::array();
    for (const CaseResult& r : results) {
        if (r.hard_failure) exit_code = std::max(exit_code, kExitBackend);
        if (r.outcome && r.outcome->report.error_flag)
            exit_code = std::max(exit_code, kExitReasoningError);
        if (args.format == "json") {
            json entry;
            entry["case_id"] = r.case_id;
            entry["hard_failure"] = r.hard_failure;
            if (!r.failure.empty()) entry["failure"] = r.failure;
            if (r.outcome) {
                entry["status"] = r.outcome->transcript.status().reason;
                entry["moves"] = r.outcome->transcript.moves().size();
                entry["report"] = argmed::report_to_json(r.outcome->report);
            }
            summary.push_back(entry);
        } else {
            std::cout << "case " << r.case_id << ": ";
            if (!r.outcome) {
                std::cout << "FAILED (" << r.failure << ")\n";
                continue;
            }
            std::cout << "terminated (" << r.outcome->transcript.status().reason << ") after "
                      << r.outcome->transcript.moves().size() << " moves; optional decisions: "
                      << id_list(r.outcome->report.optional_decisions);
            if (r.hard_failure) std::cout << "; FAILED (" << r.failure << ")";
            if (r.outcome->report.error_flag)
                std::cout << "; REASONING ERROR: " << r.outcome->report.error_note;
            std::cout << "\n";
        }
    }
    if (args.format == "json") std::cout << argmed::dump_json(summary);
    return exit_code;
}

// ---------------------------------------------------------------------------
// schemes
// ---------------------------------------------------------------------------

int run_schemes(const std::string& pack_path, bool dump) {
    argmed::SchemeRegistry registry =
        pack_path.empty() ? argmed::builtin_schemes() : argmed::load_scheme_pack(pack_path);
    if (dump) {
        std::cout << argmed::dump_json(argmed::scheme_pack_to_json(registry));
        return kExitOk;
    }
    for (const std::string& id : registry.scheme_ids()) {
        const argmed::Scheme& s = registry.scheme(id);
        std::cout << id << " (" << argmed::kind_name(s.produces_kind) << "): "
                  << s.premise_templates.size() << " premises, " << registry.cqs_for(id).size()
                  << " critical questions\n";
        for (const argmed::CriticalQuestion& cq : registry.cqs_for(id)) {
            std::cout << "  " << cq.id << ": " << cq.text_template;
            if (cq.on_reject_scheme) std::cout << " -> " << *cq.on_reject_scheme;
            std::cout << "\n";
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Typed argumentation for clinical decisions: solve frameworks, run "
                 "generator/verifier dialogues, and audit the results"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "Analyze a framework file");
    solve->add_option("framework", solve_args.input, "Framework file (text or JSON)")
        ->required();
    solve->add_option("--format", solve_args.format, "Output format")
        ->check(CLI::IsMember({"human", "json"}));
    solve->add_option("--output", solve_args.output, "Write the result to a file");
    solve->add_flag("--extensions", solve_args.extensions, "List extensions");
    solve->add_option("--semantics", solve_args.semantics,
                      "Extension listing semantics (the report always uses preferred)")
        ->check(CLI::IsMember({"preferred", "grounded"}));
    solve->add_flag("--oracle", solve_args.oracle,
                    "Cross-check the solver against the exhaustive reference");
    solve->add_option("--oracle-cap", solve_args.oracle_cap,
                      "Argument-count cap for the exhaustive reference");

    std::string validate_input;
    CLI::App* validate = app.add_subcommand("validate", "Check the typing rules of a framework");
    validate->add_option("framework", validate_input, "Framework file (text or JSON)")
        ->required();

    ExportArgs export_args;
    CLI::App* exporter = app.add_subcommand("export", "Render a framework or bundle as DOT");
    exporter->add_option("input", export_args.input, "Framework file or bundle directory")
        ->required();
    exporter->add_option("--output", export_args.output, "Write DOT to a file");
    exporter->add_option("--name", export_args.options.graph_name, "Graph name");
    exporter->add_option("--decision-shape", export_args.options.decision_shape,
                         "Node shape for decisions");
    exporter->add_option("--belief-shape", export_args.options.belief_shape,
                         "Node shape for beliefs");
    exporter->add_option("--decision-color", export_args.options.decision_color,
                         "Fill color for decisions");
    exporter->add_option("--belief-color", export_args.options.belief_color,
                         "Fill color for beliefs");

    ReplayArgs replay_args;
    CLI::App* replay = app.add_subcommand("replay", "Re-check a transcript and compile it");
    replay->add_option("transcript", replay_args.input, "Transcript JSON file")->required();
    replay->add_option("--format", replay_args.format, "Output format")
        ->check(CLI::IsMember({"human", "json"}));
    replay->add_option("--out-dir", replay_args.out_dir, "Write the compiled bundle here");

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run dialogue sessions for case files");
    run->add_option("cases", run_args.cases, "Case JSON files")->required()->expected(-1);
    run->add_option("--backend", run_args.backend_config,
                    "Backend config JSON ({generator, verifier} or a single config)")
        ->required();
    run->add_option("--schemes", run_args.schemes_pack, "Scheme pack override");
    run->add_option("--prompts", run_args.prompts_dir, "Prompt template directory");
    run->add_option("--out-dir", run_args.out_dir, "Bundle output directory");
    run->add_option("--format", run_args.format, "Summary format")
        ->check(CLI::IsMember({"human", "json"}));
    run->add_flag("--record", run_args.record, "Save raw completions next to each bundle");
    run->add_option("--parallel", run_args.parallel, "Run up to N cases concurrently")
        ->check(CLI::PositiveNumber);
    run->add_option("--dialogue-limit", run_args.dialogue_limit, "Moves allowed per session");
    run->add_option("--max-decisions", run_args.max_decisions, "Decision proposals allowed");

    std::string schemes_pack;
    bool schemes_dump = false;
    CLI::App* schemes = app.add_subcommand("schemes", "List or dump a scheme pack");
    schemes->add_option("--pack", schemes_pack, "Scheme pack file (defaults to the builtin)");
    schemes->add_flag("--dump", schemes_dump, "Print the pack as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return run_solve(solve_args);
        if (validate->parsed()) return run_validate(validate_input);
        if (exporter->parsed()) return run_export(export_args);
        if (replay->parsed()) return run_replay(replay_args);
        if (run->parsed()) return run_run(run_args);
        if (schemes->parsed()) return run_schemes(schemes_pack, schemes_dump);
    } catch (const argmed::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const argmed::Error& e) {
        std::cerr << "error [" << argmed::err_name(e.code()) << "]: " << e.what() << "\n";
        return e.code() == argmed::Err::BackendFailure || e.code() == argmed::Err::Timeout
                   ? kExitBackend
                   : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
