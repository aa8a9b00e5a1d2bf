#include <catch2/catch_amalgamated.hpp>

#include "argmed/aaf.hpp"
#include "support.hpp"

using namespace argmed;
using namespace argmed::literals;
using testsupport::ext;

namespace {

Argument make(const char* id, ArgumentKind kind) {
    Argument a;
    a.id = ArgumentId(id);
    a.kind = kind;
    return a;
}

}  // namespace

TEST_CASE("argument ids order lexicographically and support the literal suffix") {
    CHECK("a"_id < "b"_id);
    CHECK("A"_id < "a"_id);
    CHECK("a"_id == ArgumentId("a"));
    std::set<ArgumentId> s{"c"_id, "a"_id, "b"_id};
    CHECK(*s.begin() == "a"_id);
}

TEST_CASE("add_argument rejects empty and duplicate ids") {
    ArgumentationFramework fw;
    Argument empty;
    CHECK_THROWS_AS(fw.add_argument(empty), Error);
    fw.add_argument(make("x", ArgumentKind::Belief));
    try {
        fw.add_argument(make("x", ArgumentKind::Decision));
        FAIL("expected DuplicateId");
    } catch (const Error& e) {
        CHECK(e.code() == Err::DuplicateId);
    }
    CHECK(fw.argument_count() == 1);
}

TEST_CASE("decision arguments attack each other automatically") {
    ArgumentationFramework fw;
    fw.add_argument(make("d1", ArgumentKind::Decision));
    fw.add_argument(make("d2", ArgumentKind::Decision));
    fw.add_argument(make("d3", ArgumentKind::Decision));
    fw.add_argument(make("b", ArgumentKind::Belief));
    CHECK(fw.attack_count() == 6);
    for (const char* a : {"d1", "d2", "d3"})
        for (const char* b : {"d1", "d2", "d3"})
            if (std::string(a) != b) CHECK(fw.has_attack(ArgumentId(a), ArgumentId(b)));
    CHECK_FALSE(fw.has_attack("b"_id, "d1"_id));
    CHECK(fw.validate().ok());
}

TEST_CASE("belief may attack anything; decision may not attack belief") {
    ArgumentationFramework fw;
    fw.add_argument(make("d", ArgumentKind::Decision));
    fw.add_argument(make("b1", ArgumentKind::Belief));
    fw.add_argument(make("b2", ArgumentKind::Belief));
    fw.add_attack("b1"_id, "d"_id);
    fw.add_attack("b1"_id, "b2"_id);
    try {
        fw.add_attack("d"_id, "b1"_id);
        FAIL("expected ForbiddenAttack");
    } catch (const Error& e) {
        CHECK(e.code() == Err::ForbiddenAttack);
    }
    CHECK(fw.attack_count() == 2);
}

TEST_CASE("add_attack requires both endpoints and dedupes") {
    ArgumentationFramework fw;
    fw.add_argument(make("a", ArgumentKind::Belief));
    fw.add_argument(make("b", ArgumentKind::Belief));
    try {
        fw.add_attack("a"_id, "ghost"_id);
        FAIL("expected UnknownArgument");
    } catch (const Error& e) {
        CHECK(e.code() == Err::UnknownArgument);
    }
    fw.add_attack("a"_id, "b"_id);
    fw.add_attack("a"_id, "b"_id);
    CHECK(fw.attack_count() == 1);
}

TEST_CASE("adjacency views expose attackers and targets") {
    ArgumentationFramework fw;
    fw.add_argument(make("a", ArgumentKind::Belief));
    fw.add_argument(make("b", ArgumentKind::Belief));
    fw.add_argument(make("c", ArgumentKind::Belief));
    fw.add_attack("a"_id, "c"_id);
    fw.add_attack("b"_id, "c"_id);
    CHECK(fw.attackers("c"_id) == ext({"a", "b"}));
    CHECK(fw.targets_of("a"_id) == ext({"c"}));
    CHECK(fw.attackers("a"_id).empty());
    CHECK_THROWS_AS(fw.attackers("ghost"_id), Error);
    CHECK_THROWS_AS(fw.targets_of("ghost"_id), Error);
}

TEST_CASE("ids and decision_ids come back sorted") {
    ArgumentationFramework fw;
    fw.add_argument(make("zeta", ArgumentKind::Decision));
    fw.add_argument(make("alpha", ArgumentKind::Belief));
    fw.add_argument(make("mid", ArgumentKind::Decision));
    CHECK(fw.ids() == std::vector<ArgumentId>{"alpha"_id, "mid"_id, "zeta"_id});
    CHECK(fw.decision_ids() == std::vector<ArgumentId>{"mid"_id, "zeta"_id});
}

TEST_CASE("raw insertion bypasses typing so validate can report the damage") {
    ArgumentationFramework fw;
    fw.insert_argument_raw(make("d1", ArgumentKind::Decision));
    fw.insert_argument_raw(make("d2", ArgumentKind::Decision));
    fw.insert_argument_raw(make("b", ArgumentKind::Belief));
    fw.insert_attack_raw("d1"_id, "b"_id);  // forbidden direction
    fw.insert_attack_raw("x"_id, "d1"_id);  // dangling source
    fw.insert_attack_raw("b"_id, "y"_id);   // dangling target
    fw.insert_attack_raw("b"_id, "b"_id);   // self-attack warning
    auto report = fw.validate();
    CHECK_FALSE(report.ok());

    std::map<ViolationKind, int> counts;
    for (const auto& v : report.violations) counts[v.kind]++;
    // d1<->d2 mutual pair missing in both directions.
    CHECK(counts[ViolationKind::MissingMutualAttack] == 2);
    CHECK(counts[ViolationKind::ForbiddenAttack] == 1);
    CHECK(counts[ViolationKind::DanglingEndpoint] == 2);
    CHECK(report.warnings.size() == 1);
    CHECK_THAT(report.warnings.front(), Catch::Matchers::ContainsSubstring("attacks itself"));
}

TEST_CASE("validate is clean on typed-API output") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        auto fw = testsupport::random_framework(rng, 1 + static_cast<int>(rng() % 12), 0.3);
        auto report = fw.validate();
        INFO("framework with " << fw.argument_count() << " arguments");
        CHECK(report.violations.empty());
    }
}

TEST_CASE("frameworks compare by full content, same_structure by shape only") {
    auto a = testsupport::migraine_framework();
    auto b = testsupport::migraine_framework();
    CHECK(a == b);
    CHECK(same_structure(a, b));

    // Perturb metadata only: equality breaks, structure holds.
    ArgumentationFramework c;
    for (const auto& [id, arg] : a.arguments()) {
        Argument copy = arg;
        copy.conclusion = "";
        c.insert_argument_raw(copy);
    }
    for (const auto& at : a.attacks()) c.insert_attack_raw(at.from, at.to);
    CHECK_FALSE(a == c);
    CHECK(same_structure(a, c));

    // Perturb shape: both break.
    ArgumentationFramework d = b;
    d.add_attack("D"_id, "B"_id);
    CHECK_FALSE(a == d);
    CHECK_FALSE(same_structure(a, d));
}

TEST_CASE("argument metadata round-trips through the framework") {
    ArgumentationFramework fw;
    Argument a;
    a.id = "arg"_id;
    a.kind = ArgumentKind::Belief;
    a.scheme_id = "ASDM";
    a.premises = {"first premise", "second premise"};
    a.conclusion = "the conclusion";
    a.bindings = {{"treatment", "propranolol"}};
    fw.add_argument(a);
    const Argument& back = fw.argument("arg"_id);
    CHECK(back == a);
    CHECK(fw.contains("arg"_id));
    CHECK_FALSE(fw.contains("other"_id));
}

TEST_CASE("kind names round-trip") {
    CHECK(kind_name(ArgumentKind::Decision) == std::string("decision"));
    CHECK(kind_name(ArgumentKind::Belief) == std::string("belief"));
    CHECK(kind_from_name("decision") == ArgumentKind::Decision);
    CHECK(kind_from_name("belief") == ArgumentKind::Belief);
    CHECK_FALSE(kind_from_name("bogus").has_value());
}
