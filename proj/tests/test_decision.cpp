#include <catch2/catch_amalgamated.hpp>

#include "argmed/decision.hpp"
#include "support.hpp"

using namespace argmed;
using namespace argmed::literals;
using Catch::Matchers::ContainsSubstring;
using testsupport::ext;

namespace {

Argument typed(const char* id, ArgumentKind kind) {
    Argument a;
    a.id = ArgumentId(id);
    a.kind = kind;
    return a;
}

// Two decisions, each defeated by an unattacked belief.
ArgumentationFramework defeated_framework() {
    ArgumentationFramework fw;
    fw.add_argument(typed("d1", ArgumentKind::Decision));
    fw.add_argument(typed("d2", ArgumentKind::Decision));
    fw.add_argument(typed("b1", ArgumentKind::Belief));
    fw.add_argument(typed("b2", ArgumentKind::Belief));
    fw.add_attack("b1"_id, "d1"_id);
    fw.add_attack("b2"_id, "d2"_id);
    return fw;
}

}  // namespace

TEST_CASE("optional decisions are the credulously accepted ones, sorted") {
    auto fw = testsupport::migraine_framework();
    CHECK(optional_decisions(fw) == std::vector<ArgumentId>{"B"_id, "C"_id});
}

TEST_CASE("explanation sets pair each surviving decision with its supporters") {
    auto fw = testsupport::migraine_framework();
    auto sets = explanation_sets(fw);
    REQUIRE(sets.size() == 2);
    CHECK(sets[0].decision == "B"_id);
    CHECK(sets[0].supporters == ext({"D", "E"}));
    CHECK(sets[0].full_set() == ext({"B", "D", "E"}));
    CHECK(sets[1].decision == "C"_id);
    CHECK(sets[1].supporters == ext({"D", "E"}));
}

TEST_CASE("a clean framework reports no reasoning error") {
    auto report = detect_reasoning_error(testsupport::migraine_framework());
    CHECK_FALSE(report.error_flag);
    CHECK(report.error_note.empty());
    CHECK(report.optional_decisions == std::vector<ArgumentId>{"B"_id, "C"_id});
    CHECK(report.explanation_sets.size() == 2);
    CHECK_FALSE(report.exclusivity_checked);
}

TEST_CASE("all decisions defeated raises the flag with a diagnostic note") {
    auto report = detect_reasoning_error(defeated_framework());
    CHECK(report.error_flag);
    CHECK(report.optional_decisions.empty());
    CHECK(report.explanation_sets.empty());
    CHECK_THAT(report.error_note,
               ContainsSubstring(
                   "no decision argument is credulously accepted under preferred semantics"));
    CHECK_THAT(report.error_note, ContainsSubstring("decision d1 is defeated by b1"));
    CHECK_THAT(report.error_note, ContainsSubstring("decision d2 is defeated by b2"));
    CHECK_THAT(report.error_note, ContainsSubstring("surviving belief sets: {b1, b2}"));
}

TEST_CASE("a framework without decisions is flagged with its own note") {
    ArgumentationFramework fw;
    fw.add_argument(typed("b", ArgumentKind::Belief));
    auto report = detect_reasoning_error(fw);
    CHECK(report.error_flag);
    CHECK(report.error_note == "no decision arguments are present in the framework");
}

TEST_CASE("decisions silenced by an odd belief cycle leave only the empty set") {
    // The belief cycle admits nothing, and b1 in the cycle defeats the decision.
    ArgumentationFramework fw;
    fw.add_argument(typed("d", ArgumentKind::Decision));
    for (const char* id : {"b1", "b2", "b3"}) fw.add_argument(typed(id, ArgumentKind::Belief));
    fw.add_attack("b1"_id, "b2"_id);
    fw.add_attack("b2"_id, "b3"_id);
    fw.add_attack("b3"_id, "b1"_id);
    fw.add_attack("b1"_id, "d"_id);
    auto report = detect_reasoning_error(fw);
    CHECK(report.error_flag);
    CHECK_THAT(report.error_note, ContainsSubstring("only the empty set is coherent"));
}

TEST_CASE("decision analysis refuses an invalid framework") {
    ArgumentationFramework fw;
    fw.insert_argument_raw(typed("d1", ArgumentKind::Decision));
    fw.insert_argument_raw(typed("d2", ArgumentKind::Decision));
    for (auto* call : {"optional", "sets", "detect"}) {
        try {
            if (call == std::string("optional"))
                optional_decisions(fw);
            else if (call == std::string("sets"))
                explanation_sets(fw);
            else
                detect_reasoning_error(fw);
            FAIL("expected InvalidFramework from " << call);
        } catch (const Error& e) {
            CHECK(e.code() == Err::InvalidFramework);
            CHECK_THAT(e.what(), ContainsSubstring("fails validation"));
        }
    }
}

TEST_CASE("the error flag tracks emptiness of optional decisions on random input") {
    std::mt19937_64 rng(606);
    int flagged = 0, clean = 0;
    for (int i = 0; i < 120; ++i) {
        auto fw = testsupport::random_framework(rng, 1 + static_cast<int>(rng() % 10), 0.3);
        auto report = detect_reasoning_error(fw);
        CHECK(report.error_flag == report.optional_decisions.empty());
        CHECK(report.error_note.empty() == !report.error_flag);
        report.error_flag ? ++flagged : ++clean;

        // Every explanation set's full set is one of the preferred extensions.
        auto prefs = preferred_extensions(fw);
        for (const auto& set : report.explanation_sets) {
            CHECK(std::find(prefs.begin(), prefs.end(), set.full_set()) != prefs.end());
        }
    }
    // The generator must exercise both outcomes for this test to mean much.
    CHECK(flagged > 0);
    CHECK(clean > 0);
}

TEST_CASE("exclusivity filter accepts well-formed reports and marks them") {
    auto fw = testsupport::migraine_framework();
    auto report = exclusivity_filter(fw, detect_reasoning_error(fw));
    CHECK(report.exclusivity_checked);
    CHECK(report.optional_decisions == std::vector<ArgumentId>{"B"_id, "C"_id});
}

TEST_CASE("exclusivity filter rejects corrupted explanation sets") {
    auto fw = testsupport::migraine_framework();
    auto base = detect_reasoning_error(fw);

    SECTION("decision slot pointing at a belief") {
        auto bad = base;
        bad.explanation_sets[0].decision = "D"_id;
        try {
            exclusivity_filter(fw, bad);
            FAIL("expected InternalInconsistency");
        } catch (const Error& e) {
            CHECK(e.code() == Err::InternalInconsistency);
            CHECK_THAT(e.what(), ContainsSubstring("not a decision"));
        }
    }
    SECTION("decision slot pointing at nothing") {
        auto bad = base;
        bad.explanation_sets[0].decision = "ghost"_id;
        CHECK_THROWS_AS(exclusivity_filter(fw, bad), Error);
    }
    SECTION("a second decision hiding among the supporters") {
        auto bad = base;
        bad.explanation_sets[0].supporters.insert("C"_id);
        try {
            exclusivity_filter(fw, bad);
            FAIL("expected InternalInconsistency");
        } catch (const Error& e) {
            CHECK(e.code() == Err::InternalInconsistency);
            CHECK_THAT(e.what(), ContainsSubstring("second decision"));
        }
    }
}

TEST_CASE("report json round-trips and encodes the note only when flagged") {
    auto fw = testsupport::migraine_framework();
    auto clean = detect_reasoning_error(fw);
    auto jc = report_to_json(clean);
    CHECK_FALSE(jc.contains("error_note"));
    CHECK(jc["optional_decisions"] == nlohmann::json({"B", "C"}));
    CHECK(report_from_json(jc) == clean);

    auto flagged = detect_reasoning_error(defeated_framework());
    auto jf = report_to_json(flagged);
    REQUIRE(jf.contains("error_note"));
    CHECK(report_from_json(jf) == flagged);
}

TEST_CASE("report json parsing enforces its shape") {
    CHECK_THROWS_AS(report_from_json(nlohmann::json::array()), ParseError);
    CHECK_THROWS_AS(report_from_json(nlohmann::json{{"error_flag", false}}), ParseError);

    nlohmann::json base = {{"optional_decisions", nlohmann::json::array()},
                           {"explanation_sets", nlohmann::json::array()},
                           {"error_flag", false}};
    CHECK(report_from_json(base).error_flag == false);

    auto missing_note = base;
    missing_note["error_flag"] = true;
    CHECK_THROWS_AS(report_from_json(missing_note), ParseError);

    auto stray_note = base;
    stray_note["error_note"] = "should not be here";
    try {
        report_from_json(stray_note);
        FAIL("expected ParseError for a note on an unflagged report");
    } catch (const ParseError& e) {
        CHECK_THAT(e.what(), ContainsSubstring("only present on a flagged report"));
    }

    auto bad_set = base;
    bad_set["explanation_sets"].push_back({{"decision", "d"}});
    CHECK_THROWS_AS(report_from_json(bad_set), ParseError);
}
