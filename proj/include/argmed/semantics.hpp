#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "argmed/aaf.hpp"
#include "argmed/errors.hpp"

namespace argmed {

using Extension = std::set<ArgumentId>;

enum class Label { In, Out, Undecided };

using Labelling = std::map<ArgumentId, Label>;

namespace detail {

// Index-compressed view of a framework. Edges with an unregistered endpoint
// (possible after raw insertion) are dropped; they only matter to validate().
struct IndexedGraph {
    std::vector<ArgumentId> ids;  // sorted; index in this vector is the node id
    std::map<ArgumentId, int> index;
    std::vector<std::vector<int>> attackers;
    std::vector<std::vector<int>> targets;

    explicit IndexedGraph(const ArgumentationFramework& fw) {
        ids = fw.ids();
        for (int i = 0; i < static_cast<int>(ids.size()); ++i) index.emplace(ids[i], i);
        attackers.resize(ids.size());
        targets.resize(ids.size());
        for (const Attack& at : fw.attacks()) {
            auto f = index.find(at.from);
            auto t = index.find(at.to);
            if (f == index.end() || t == index.end()) continue;
            attackers[t->second].push_back(f->second);
            targets[f->second].push_back(t->second);
        }
    }

    int size() const { return static_cast<int>(ids.size()); }

    int require(const ArgumentId& id) const {
        auto it = index.find(id);
        if (it == index.end())
            throw Error(Err::UnknownArgument, "unknown argument '" + id.value + "'");
        return it->second;
    }

    Extension to_extension(const std::vector<char>& member) const {
        Extension e;
        for (int i = 0; i < size(); ++i)
            if (member[i]) e.insert(ids[i]);
        return e;
    }

    std::vector<char> to_member(const Extension& s) const {
        std::vector<char> member(ids.size(), 0);
        for (const ArgumentId& id : s) member[require(id)] = 1;
        return member;
    }
};

}  // namespace detail

// No member of s attacks a member of s.
inline bool is_conflict_free(const ArgumentationFramework& fw, const Extension& s) {
    detail::IndexedGraph g(fw);
    std::vector<char> member = g.to_member(s);
    for (int i = 0; i < g.size(); ++i) {
        if (!member[i]) continue;
        for (int j : g.targets[i])
            if (member[j]) return false;
    }
    return true;
}

// Every attacker of a is attacked by some member of s.
inline bool defends(const ArgumentationFramework& fw, const Extension& s, const ArgumentId& a) {
    detail::IndexedGraph g(fw);
    std::vector<char> member = g.to_member(s);
    int target = g.require(a);
    std::vector<char> attacked(g.size(), 0);
    for (int i = 0; i < g.size(); ++i)
        if (member[i])
            for (int j : g.targets[i]) attacked[j] = 1;
    for (int b : g.attackers[target])
        if (!attacked[b]) return false;
    return true;
}

// Conflict-free and self-defending.
inline bool is_admissible(const ArgumentationFramework& fw, const Extension& s) {
    if (!is_conflict_free(fw, s)) return false;
    for (const ArgumentId& a : s)
        if (!defends(fw, s, a)) return false;
    return true;
}

// Least fixed point of the defense operator: start empty, repeatedly add every
// argument all of whose attackers are attacked by the set.
inline Extension grounded_extension(const ArgumentationFramework& fw) {
    detail::IndexedGraph g(fw);
    std::vector<char> member(g.size(), 0);
    std::vector<char> attacked(g.size(), 0);
    bool grew = true;
    while (grew) {
        grew = false;
        for (int i = 0; i < g.size(); ++i) {
            if (member[i]) continue;
            bool defended = true;
            for (int b : g.attackers[i]) {
                if (!attacked[b]) {
                    defended = false;
                    break;
                }
            }
            if (defended) {
                member[i] = 1;
                for (int j : g.targets[i]) attacked[j] = 1;
                grew = true;
            }
        }
    }
    return g.to_extension(member);
}

namespace detail {

// Labelling-transition search for preferred extensions. Start from the
// all-In labelling; while some In argument has a non-Out attacker (illegally
// In), pick such arguments and transition: the argument goes Out, then it and
// any of its targets flip from Out to Undecided when they have no In attacker
// left. Terminal labellings have admissible In-sets that include every
// preferred extension; a final maximality pass filters them.
class PreferredSearch {
public:
    explicit PreferredSearch(const IndexedGraph& g) : g_(g) {}

    // Returns In-membership vectors (1 = member) of the maximal terminals.
    std::vector<std::vector<char>> run() {
        std::vector<char> lab(g_.size(), kIn);
        walk(lab);
        std::vector<std::vector<char>> maximal;
        for (std::size_t i = 0; i < found_.size(); ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < found_.size(); ++j)
                if (i != j && subset_eq(found_[i], found_[j]) && found_[i] != found_[j]) {
                    dominated = true;
                    break;
                }
            if (!dominated) maximal.push_back(found_[i]);
        }
        return maximal;
    }

private:
    static constexpr char kIn = 0, kOut = 1, kUndec = 2;

    static std::vector<char> in_members(const std::vector<char>& lab) {
        std::vector<char> m(lab.size(), 0);
        for (std::size_t i = 0; i < lab.size(); ++i) m[i] = lab[i] == kIn ? 1 : 0;
        return m;
    }

    bool legally_in(const std::vector<char>& lab, int x) const {
        if (lab[x] != kIn) return false;
        for (int b : g_.attackers[x])
            if (lab[b] != kOut) return false;
        return true;
    }

    bool illegally_in(const std::vector<char>& lab, int x) const {
        return lab[x] == kIn && !legally_in(lab, x);
    }

    // Attacked by a legally-In or Undecided argument; transitioning such a
    // node alone is sound and trims sibling branches.
    bool super_illegal(const std::vector<char>& lab, int x) const {
        for (int b : g_.attackers[x])
            if (lab[b] == kUndec || legally_in(lab, b)) return true;
        return false;
    }

    std::vector<char> transition(std::vector<char> lab, int x) const {
        lab[x] = kOut;
        auto reconsider = [&](int y) {
            if (lab[y] != kOut) return;
            for (int b : g_.attackers[y])
                if (lab[b] == kIn) return;
            lab[y] = kUndec;
        };
        reconsider(x);
        for (int y : g_.targets[x]) reconsider(y);
        return lab;
    }

    // True when every member of a is a member of b.
    static bool subset_eq(const std::vector<char>& a, const std::vector<char>& b) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i] && !b[i]) return false;
        return true;
    }

    bool dominated_by_found(const std::vector<char>& members) const {
        for (const auto& f : found_)
            if (subset_eq(members, f)) return true;
        return false;
    }

    void walk(const std::vector<char>& lab) {
        if (!visited_.insert(lab).second) return;
        std::vector<int> illegal;
        for (int x = 0; x < g_.size(); ++x)
            if (illegally_in(lab, x)) illegal.push_back(x);
        if (illegal.empty()) {
            std::vector<char> members = in_members(lab);
            if (!dominated_by_found(members)) found_.push_back(std::move(members));
            return;
        }
        // Transitions only shrink the In-set, so a found superset of the
        // current In-set makes every terminal below redundant.
        if (dominated_by_found(in_members(lab))) return;
        for (int x : illegal) {
            if (super_illegal(lab, x)) {
                walk(transition(lab, x));
                return;
            }
        }
        for (int x : illegal) walk(transition(lab, x));
    }

    const IndexedGraph& g_;
    std::vector<std::vector<char>> found_;
    std::set<std::vector<char>> visited_;
};

}  // namespace detail

// All subset-maximal admissible sets, sorted lexicographically by member ids.
// A framework with no admissible set but the empty one yields [{}].
inline std::vector<Extension> preferred_extensions(const ArgumentationFramework& fw) {
    detail::IndexedGraph g(fw);
    detail::PreferredSearch search(g);
    std::vector<Extension> out;
    for (const auto& members : search.run()) out.push_back(g.to_extension(members));
    std::sort(out.begin(), out.end());
    return out;
}

// a is in at least one preferred extension.
inline bool is_acceptable_credulous(const ArgumentationFramework& fw, const ArgumentId& a) {
    detail::IndexedGraph g(fw);
    g.require(a);
    for (const Extension& e : preferred_extensions(fw))
        if (e.contains(a)) return true;
    return false;
}

inline constexpr std::size_t kDefaultOracleCap = 16;

namespace detail {

struct MaskGraph {
    std::vector<ArgumentId> ids;
    std::vector<std::uint64_t> attacker_mask;
    std::vector<std::uint64_t> target_mask;
    int n = 0;

    MaskGraph(const ArgumentationFramework& fw, std::size_t cap, const char* op) {
        IndexedGraph g(fw);
        n = g.size();
        if (cap > 63)
            throw Error(Err::TooLarge, std::string(op) + ": cap above 63 is not supported");
        if (static_cast<std::size_t>(n) > cap)
            throw Error(Err::TooLarge, std::string(op) + ": framework has " + std::to_string(n) +
                                           " arguments, cap is " + std::to_string(cap));
        ids = g.ids;
        attacker_mask.assign(n, 0);
        target_mask.assign(n, 0);
        for (int i = 0; i < n; ++i) {
            for (int b : g.attackers[i]) attacker_mask[i] |= std::uint64_t{1} << b;
            for (int t : g.targets[i]) target_mask[i] |= std::uint64_t{1} << t;
        }
    }

    bool conflict_free(std::uint64_t s) const {
        for (int i = 0; i < n; ++i)
            if ((s >> i) & 1 && (attacker_mask[i] & s)) return false;
        return true;
    }

    bool admissible(std::uint64_t s) const {
        if (!conflict_free(s)) return false;
        std::uint64_t attacked = 0;
        for (int i = 0; i < n; ++i)
            if ((s >> i) & 1) attacked |= target_mask[i];
        for (int i = 0; i < n; ++i)
            if ((s >> i) & 1 && (attacker_mask[i] & ~attacked)) return false;
        return true;
    }

    Extension to_extension(std::uint64_t s) const {
        Extension e;
        for (int i = 0; i < n; ++i)
            if ((s >> i) & 1) e.insert(ids[i]);
        return e;
    }
};

inline std::vector<Extension> collect_sorted(const MaskGraph& g,
                                             const std::vector<std::uint64_t>& masks) {
    std::vector<Extension> out;
    out.reserve(masks.size());
    for (std::uint64_t m : masks) out.push_back(g.to_extension(m));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// Exhaustive reference computation of the preferred extensions: enumerate all
// 2^n subsets, keep the admissible ones, filter subset-maximal. Deliberately
// shares no traversal logic with preferred_extensions. Throws TooLarge above
// cap arguments.
inline std::vector<Extension> brute_force_preferred(const ArgumentationFramework& fw,
                                                    std::size_t cap = kDefaultOracleCap) {
    detail::MaskGraph g(fw, cap, "brute_force_preferred");
    std::vector<std::uint64_t> admissible;
    const std::uint64_t total = std::uint64_t{1} << g.n;
    for (std::uint64_t s = 0; s < total; ++s)
        if (g.admissible(s)) admissible.push_back(s);
    // Descending popcount: every proper superset of a set precedes it, so
    // checking against kept sets alone suffices for maximality.
    std::stable_sort(admissible.begin(), admissible.end(),
                     [](std::uint64_t a, std::uint64_t b) {
                         return std::popcount(a) > std::popcount(b);
                     });
    std::vector<std::uint64_t> kept;
    for (std::uint64_t s : admissible) {
        bool dominated = false;
        for (std::uint64_t k : kept)
            if ((s | k) == k && s != k) {
                dominated = true;
                break;
            }
        if (!dominated) kept.push_back(s);
    }
    return detail::collect_sorted(g, kept);
}

// Exhaustive complete extensions (admissible and containing every argument
// the set defends). Test support; cap-guarded like the oracle.
inline std::vector<Extension> complete_extensions(const ArgumentationFramework& fw,
                                                  std::size_t cap = kDefaultOracleCap) {
    detail::MaskGraph g(fw, cap, "complete_extensions");
    std::vector<std::uint64_t> found;
    const std::uint64_t total = std::uint64_t{1} << g.n;
    for (std::uint64_t s = 0; s < total; ++s) {
        if (!g.admissible(s)) continue;
        std::uint64_t attacked = 0;
        for (int i = 0; i < g.n; ++i)
            if ((s >> i) & 1) attacked |= g.target_mask[i];
        bool complete = true;
        for (int i = 0; i < g.n && complete; ++i) {
            if ((s >> i) & 1) continue;
            if ((g.attacker_mask[i] & ~attacked) == 0) complete = false;  // defended but absent
        }
        if (complete) found.push_back(s);
    }
    return detail::collect_sorted(g, found);
}

// Exhaustive stable extensions (conflict-free and attacking every outsider).
// Test support; may be empty.
inline std::vector<Extension> stable_extensions(const ArgumentationFramework& fw,
                                                std::size_t cap = kDefaultOracleCap) {
    detail::MaskGraph g(fw, cap, "stable_extensions");
    std::vector<std::uint64_t> found;
    const std::uint64_t total = std::uint64_t{1} << g.n;
    const std::uint64_t all = total - 1;
    for (std::uint64_t s = 0; s < total; ++s) {
        if (!g.conflict_free(s)) continue;
        std::uint64_t attacked = 0;
        for (int i = 0; i < g.n; ++i)
            if ((s >> i) & 1) attacked |= g.target_mask[i];
        if ((s | attacked) == all) found.push_back(s);
    }
    return detail::collect_sorted(g, found);
}

// In for members, Out for arguments attacked by a member, Undecided otherwise.
inline Labelling labelling_for(const ArgumentationFramework& fw, const Extension& e) {
    detail::IndexedGraph g(fw);
    std::vector<char> member = g.to_member(e);
    Labelling lab;
    std::vector<char> attacked(g.size(), 0);
    for (int i = 0; i < g.size(); ++i)
        if (member[i])
            for (int j : g.targets[i]) attacked[j] = 1;
    for (int i = 0; i < g.size(); ++i) {
        Label l = Label::Undecided;
        if (member[i])
            l = Label::In;
        else if (attacked[i])
            l = Label::Out;
        lab.emplace(g.ids[i], l);
    }
    return lab;
}

}  // namespace argmed
