#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "argmed/aaf_io.hpp"
#include "argmed/semantics.hpp"
#include "support.hpp"

using namespace argmed;
using namespace argmed::literals;
using testsupport::ext;

namespace {

ArgumentationFramework beliefs(std::initializer_list<const char*> ids,
                               std::initializer_list<std::pair<const char*, const char*>> edges) {
    ArgumentationFramework fw;
    for (const char* id : ids) {
        Argument a;
        a.id = ArgumentId(id);
        fw.add_argument(std::move(a));
    }
    for (auto [from, to] : edges) fw.add_attack(ArgumentId(from), ArgumentId(to));
    return fw;
}

bool subset(const Extension& a, const Extension& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

TEST_CASE("conflict-freeness, defense, and admissibility on a chain") {
    // c attacks b attacks a.
    auto fw = beliefs({"a", "b", "c"}, {{"c", "b"}, {"b", "a"}});
    CHECK(is_conflict_free(fw, ext({})));
    CHECK(is_conflict_free(fw, ext({"a", "c"})));
    CHECK_FALSE(is_conflict_free(fw, ext({"a", "b"})));
    CHECK(defends(fw, ext({"c"}), "a"_id));
    CHECK_FALSE(defends(fw, ext({}), "a"_id));
    CHECK(is_admissible(fw, ext({})));
    CHECK(is_admissible(fw, ext({"c"})));
    CHECK(is_admissible(fw, ext({"a", "c"})));
    CHECK_FALSE(is_admissible(fw, ext({"a"})));  // undefended
    CHECK_FALSE(is_admissible(fw, ext({"a", "b"})));
}

TEST_CASE("grounded extension of fixed shapes") {
    SECTION("empty framework") {
        CHECK(grounded_extension(ArgumentationFramework{}).empty());
    }
    SECTION("chain keeps the unattacked and the reinstated") {
        auto fw = beliefs({"a", "b", "c"}, {{"c", "b"}, {"b", "a"}});
        CHECK(grounded_extension(fw) == ext({"a", "c"}));
    }
    SECTION("odd cycle grounds to nothing") {
        auto fw = beliefs({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"c", "a"}});
        CHECK(grounded_extension(fw).empty());
    }
    SECTION("even cycle grounds to nothing but has two preferred") {
        auto fw = beliefs({"a", "b"}, {{"a", "b"}, {"b", "a"}});
        CHECK(grounded_extension(fw).empty());
        auto pref = preferred_extensions(fw);
        REQUIRE(pref.size() == 2);
        CHECK(pref[0] == ext({"a"}));
        CHECK(pref[1] == ext({"b"}));
    }
    SECTION("self-attacker never enters") {
        auto fw = beliefs({"a", "b"}, {{"a", "a"}});
        CHECK(grounded_extension(fw) == ext({"b"}));
    }
}

TEST_CASE("preferred extensions of fixed shapes") {
    SECTION("empty framework yields the empty extension") {
        auto pref = preferred_extensions(ArgumentationFramework{});
        REQUIRE(pref.size() == 1);
        CHECK(pref[0].empty());
    }
    SECTION("odd cycle yields only the empty extension") {
        auto fw = beliefs({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"c", "a"}});
        auto pref = preferred_extensions(fw);
        REQUIRE(pref.size() == 1);
        CHECK(pref[0].empty());
    }
    SECTION("chain yields its grounded extension") {
        auto fw = beliefs({"a", "b", "c"}, {{"c", "b"}, {"b", "a"}});
        auto pref = preferred_extensions(fw);
        REQUIRE(pref.size() == 1);
        CHECK(pref[0] == ext({"a", "c"}));
    }
    SECTION("migraine fixture yields the two surviving decisions with their support") {
        auto fw = testsupport::migraine_framework();
        auto pref = preferred_extensions(fw);
        REQUIRE(pref.size() == 2);
        CHECK(pref[0] == ext({"B", "D", "E"}));
        CHECK(pref[1] == ext({"C", "D", "E"}));
        CHECK(grounded_extension(fw) == ext({"D", "E"}));
    }
    SECTION("two mutually attacking decisions split into singletons") {
        ArgumentationFramework fw;
        for (const char* id : {"d1", "d2"}) {
            Argument a;
            a.id = ArgumentId(id);
            a.kind = ArgumentKind::Decision;
            fw.add_argument(std::move(a));
        }
        auto pref = preferred_extensions(fw);
        REQUIRE(pref.size() == 2);
        CHECK(pref[0] == ext({"d1"}));
        CHECK(pref[1] == ext({"d2"}));
    }
}

TEST_CASE("credulous acceptance mirrors preferred membership") {
    auto fw = testsupport::migraine_framework();
    CHECK_FALSE(is_acceptable_credulous(fw, "A"_id));
    CHECK(is_acceptable_credulous(fw, "B"_id));
    CHECK(is_acceptable_credulous(fw, "C"_id));
    CHECK(is_acceptable_credulous(fw, "D"_id));
    CHECK(is_acceptable_credulous(fw, "E"_id));
}

TEST_CASE("oracle agrees with the labelling solver on random frameworks") {
    std::mt19937_64 rng(101);
    int checked = 0;
    for (int i = 0; i < 150; ++i) {
        int n = 1 + static_cast<int>(rng() % 12);
        double density = 0.1 + 0.4 * std::uniform_real_distribution<double>(0, 1)(rng);
        auto fw = testsupport::random_framework(rng, n, density);
        auto fast = preferred_extensions(fw);
        auto slow = brute_force_preferred(fw);
        INFO("seed case " << i << " with " << n << " arguments, density " << density);
        REQUIRE(fast == slow);
        ++checked;
    }
    CHECK(checked == 150);
}

TEST_CASE("structural properties hold on random frameworks") {
    std::mt19937_64 rng(202);
    for (int i = 0; i < 80; ++i) {
        auto fw = testsupport::random_framework(rng, 1 + static_cast<int>(rng() % 12), 0.3);
        auto grounded = grounded_extension(fw);
        auto pref = preferred_extensions(fw);
        INFO("case " << i << ": " << to_text(fw));

        CHECK(is_admissible(fw, grounded));
        REQUIRE_FALSE(pref.empty());
        for (const auto& e : pref) {
            CHECK(is_admissible(fw, e));
            CHECK(subset(grounded, e));
        }
        // Pairwise incomparability.
        for (std::size_t a = 0; a < pref.size(); ++a)
            for (std::size_t b = 0; b < pref.size(); ++b)
                if (a != b) CHECK_FALSE(subset(pref[a], pref[b]));
        // Sorted and duplicate-free output.
        CHECK(std::is_sorted(pref.begin(), pref.end()));
        CHECK(std::adjacent_find(pref.begin(), pref.end()) == pref.end());
    }
}

TEST_CASE("every preferred extension is maximal among admissible sets") {
    // Direct check by enumeration on small frameworks: no admissible strict
    // superset of a preferred extension exists.
    std::mt19937_64 rng(303);
    for (int i = 0; i < 25; ++i) {
        int n = 1 + static_cast<int>(rng() % 8);
        auto fw = testsupport::random_framework(rng, n, 0.3);
        auto ids = fw.ids();
        auto pref = preferred_extensions(fw);
        for (const auto& e : pref) {
            for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
                Extension s;
                for (int b = 0; b < n; ++b)
                    if (mask & (1ull << b)) s.insert(ids[static_cast<std::size_t>(b)]);
                if (subset(e, s) && s != e) {
                    INFO("superset of a preferred extension must not be admissible");
                    CHECK_FALSE(is_admissible(fw, s));
                }
            }
        }
    }
}

TEST_CASE("complete extensions bracket grounded and preferred") {
    std::mt19937_64 rng(404);
    for (int i = 0; i < 40; ++i) {
        auto fw = testsupport::random_framework(rng, 1 + static_cast<int>(rng() % 10), 0.3);
        auto complete = complete_extensions(fw);
        auto grounded = grounded_extension(fw);
        auto pref = preferred_extensions(fw);
        INFO(to_text(fw));

        // Grounded is the least complete extension.
        REQUIRE(std::find(complete.begin(), complete.end(), grounded) != complete.end());
        for (const auto& c : complete) CHECK(subset(grounded, c));

        // Preferred are exactly the maximal complete extensions.
        std::vector<Extension> maximal;
        for (const auto& c : complete) {
            bool dominated = false;
            for (const auto& other : complete)
                if (other != c && subset(c, other)) dominated = true;
            if (!dominated) maximal.push_back(c);
        }
        std::sort(maximal.begin(), maximal.end());
        CHECK(maximal == pref);

        // Stable extensions are preferred.
        for (const auto& s : stable_extensions(fw))
            CHECK(std::find(pref.begin(), pref.end(), s) != pref.end());
    }
}

TEST_CASE("labellings are legal for admissible extensions") {
    std::mt19937_64 rng(505);
    for (int i = 0; i < 30; ++i) {
        auto fw = testsupport::random_framework(rng, 1 + static_cast<int>(rng() % 10), 0.3);
        for (const auto& e : preferred_extensions(fw)) {
            auto lab = labelling_for(fw, e);
            REQUIRE(lab.size() == fw.argument_count());
            for (const auto& [id, label] : lab) {
                bool in_e = e.count(id) > 0;
                CHECK(in_e == (label == Label::In));
                if (label == Label::Out) {
                    // An Out argument has an In attacker.
                    bool attacked_by_in = false;
                    for (const auto& at : fw.attackers(id))
                        if (e.count(at)) attacked_by_in = true;
                    CHECK(attacked_by_in);
                }
                if (label == Label::In) {
                    // All attackers of an In argument are Out.
                    for (const auto& at : fw.attackers(id))
                        if (fw.contains(at)) CHECK(lab.at(at) == Label::Out);
                }
            }
        }
    }
}

TEST_CASE("the oracle refuses frameworks above its cap") {
    ArgumentationFramework fw;
    for (int i = 0; i < 5; ++i) {
        Argument a;
        a.id = testsupport::node_id(i);
        fw.add_argument(std::move(a));
    }
    CHECK(brute_force_preferred(fw, 5).size() >= 1);
    try {
        brute_force_preferred(fw, 4);
        FAIL("expected TooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == Err::TooLarge);
    }
    try {
        brute_force_preferred(fw, 64);
        FAIL("expected TooLarge for cap above 63");
    } catch (const Error& e) {
        CHECK(e.code() == Err::TooLarge);
        CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("63"));
    }
}

TEST_CASE("semantics ignore dangling raw edges") {
    ArgumentationFramework fw;
    Argument a;
    a.id = "a"_id;
    fw.insert_argument_raw(a);
    fw.insert_attack_raw("ghost"_id, "a"_id);
    // The dangling attacker cannot defeat a registered argument.
    CHECK(grounded_extension(fw) == ext({"a"}));
    auto pref = preferred_extensions(fw);
    REQUIRE(pref.size() == 1);
    CHECK(pref[0] == ext({"a"}));
}
