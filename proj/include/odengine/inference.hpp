#pragma once

// Axiomatic reasoning over order dependencies: six primitive rules, a
// registry of derived rules each carrying a machine-checked derivation, a
// strict proof checker, and a bounded forward-chaining proof search.

#include <functional>
#include <optional>

#include "core.hpp"

namespace odengine {

enum class RuleId {
    Premise,         // statement is a declared member of the constraint set
    Definition,      // bookkeeping: unfolding ↔/∼ or restating a cited step
    Reflexivity,     // ⊢ XY ↦ X
    Prefix,          // X ↦ Y ⊢ ZX ↦ ZY
    Normalization,   // ⊢ WXYXV ↔ WXYV
    Transitivity,    // X ↦ Y, Y ↦ Z ⊢ X ↦ Z
    Suffix,          // X ↦ Y ⊢ X ↔ YX
    Chain,           // compatibility chain with frozen middles ⊢ X ∼ Z
    Union,           // X ↦ Y, X ↦ Z ⊢ X ↦ YZ
    Augmentation,    // X ↦ Y ⊢ XZ ↦ Y
    Shift,           // W ↔ V, X ↦ Y ⊢ WX ↦ VY
    Decomposition,   // X ↦ ZY ⊢ X ↦ Z
    Replace,         // M ↔ N ⊢ XMZ ↔ XNZ
    Eliminate,       // X ↦ Y ⊢ MXNYW ↔ MXNW
    LeftEliminate,   // X ↦ Y ⊢ VYXZ ↔ VXZ
    Drop,            // X ↦ VYZW, X ↔ V ⊢ X ↦ VZ
    Path,            // X ↦ YW, Y ↔ VMN ⊢ X ↦ YMW
    Partition,       // X ↦ Y, X ↦ Z, set(Y)=set(Z) ⊢ Y ↔ Z
    DownwardClosure, // XY ∼ ZV ⊢ X ∼ Z
    Permutation,     // X ↦ XY ⊢ X' ↦ X'Y' for reorderings X', Y'
    OdSplitFd,       // X ↦ Y ⊢ X ↦ XY
    OdSplitCompat,   // X ↦ Y ⊢ X ∼ Y
    OdSplitCompose,  // X ↦ XY, XY ↔ YX ⊢ X ↦ Y
};

inline const char* rule_name(RuleId id) {
    switch (id) {
        case RuleId::Premise: return "Premise";
        case RuleId::Definition: return "Definition";
        case RuleId::Reflexivity: return "Reflexivity";
        case RuleId::Prefix: return "Prefix";
        case RuleId::Normalization: return "Normalization";
        case RuleId::Transitivity: return "Transitivity";
        case RuleId::Suffix: return "Suffix";
        case RuleId::Chain: return "Chain";
        case RuleId::Union: return "Union";
        case RuleId::Augmentation: return "Augmentation";
        case RuleId::Shift: return "Shift";
        case RuleId::Decomposition: return "Decomposition";
        case RuleId::Replace: return "Replace";
        case RuleId::Eliminate: return "Eliminate";
        case RuleId::LeftEliminate: return "LeftEliminate";
        case RuleId::Drop: return "Drop";
        case RuleId::Path: return "Path";
        case RuleId::Partition: return "Partition";
        case RuleId::DownwardClosure: return "DownwardClosure";
        case RuleId::Permutation: return "Permutation";
        case RuleId::OdSplitFd: return "OdSplitFd";
        case RuleId::OdSplitCompat: return "OdSplitCompat";
        case RuleId::OdSplitCompose: return "OdSplitCompose";
    }
    return "?";
}

inline std::optional<RuleId> rule_from_name(const std::string& s) {
    for (int i = 0; i <= static_cast<int>(RuleId::OdSplitCompose); ++i) {
        auto id = static_cast<RuleId>(i);
        if (s == rule_name(id)) return id;
    }
    return std::nullopt;
}

// Assignment of concrete lists to a rule's schema variables. Chain
// additionally binds its length n and middles Y1..Yn.
struct Binding {
    std::map<std::string, MarkedList> lists;
    int chain_n = 0;

    const MarkedList& at(const std::string& var) const {
        auto it = lists.find(var);
        if (it == lists.end())
            throw RuleError("schema variable " + var + " is unbound");
        return it->second;
    }

    bool operator==(const Binding&) const = default;
};

struct ProofStep {
    Dependency statement;
    RuleId rule;
    std::vector<std::size_t> premises;  // 1-based indices of earlier steps
    Binding binding;

    bool operator==(const ProofStep&) const = default;
};

struct Proof {
    Dependency goal;
    std::vector<ProofStep> steps;

    bool operator==(const Proof&) const = default;
};

struct CheckResult {
    bool ok = false;
    std::size_t step = 0;  // 1-based index of the first bad step, 0 if none
    std::string reason;

    explicit operator bool() const { return ok; }
};

namespace detail {

inline Binding bmk(std::initializer_list<std::pair<const char*, MarkedList>> xs,
                   int n = 0) {
    Binding b;
    for (const auto& [k, v] : xs) b.lists.emplace(k, v);
    b.chain_n = n;
    return b;
}

inline std::vector<OrderDep> exp_union(const std::vector<Dependency>& ds) {
    std::vector<OrderDep> all;
    for (const auto& d : ds) {
        auto e = expansion(d);
        all.insert(all.end(), e.begin(), e.end());
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    return all;
}

}  // namespace detail

// Schema of one rule: premises and conclusion as functions of a binding,
// optional side condition, and for derived rules a generator producing the
// registered derivation (hypothesis steps first, conclusion last).
struct RuleDef {
    RuleId id{};
    bool axiom = false;
    std::vector<std::string> vars;
    std::function<std::vector<Dependency>(const Binding&)> premises;
    std::function<Dependency(const Binding&)> conclude;
    std::function<void(const Binding&)> side;  // throws RuleError when violated
    std::function<std::vector<ProofStep>(const Binding&)> derive;
};

class Registry;

namespace detail {
CheckResult check_with(const Registry& reg, const std::set<RuleId>& allowed,
                       const ConstraintSet& m, const Proof& p);
}

// All rules, keyed by id. Derived rules are validated on construction: the
// registered derivation of each must pass the checker using only rules
// registered before it.
class Registry {
public:
    static const Registry& get() {
        static const Registry r;
        return r;
    }

    bool known(RuleId id) const { return defs_.count(id) != 0; }

    const RuleDef& rule(RuleId id) const {
        auto it = defs_.find(id);
        if (it == defs_.end())
            throw RuleError(std::string("no schema for rule ") + rule_name(id));
        return it->second;
    }

    const std::vector<RuleId>& derived_order() const { return derived_; }

    std::set<RuleId> all_rules() const {
        std::set<RuleId> r{RuleId::Premise, RuleId::Definition};
        for (const auto& [id, def] : defs_) r.insert(id);
        return r;
    }

private:
    Registry();

    void add(RuleDef def) { defs_.emplace(def.id, std::move(def)); }

    std::map<RuleId, RuleDef> defs_;
    std::vector<RuleId> derived_;
};

namespace detail {

// premises must all resolve strictly earlier than the step that cites them
inline bool refs_ok(const std::vector<std::size_t>& refs, std::size_t k) {
    for (auto r : refs)
        if (r < 1 || r >= k) return false;
    return true;
}

inline CheckResult bad(std::size_t k, std::string why) {
    return {false, k, std::move(why)};
}

inline CheckResult check_with(const Registry& reg, const std::set<RuleId>& allowed,
                              const ConstraintSet& m, const Proof& p) {
    if (p.steps.empty()) return bad(0, "proof has no steps");
    for (std::size_t k = 1; k <= p.steps.size(); ++k) {
        const auto& st = p.steps[k - 1];
        if (!allowed.count(st.rule))
            return bad(k, std::string("rule ") + rule_name(st.rule) +
                              " is not available");
        if (!refs_ok(st.premises, k))
            return bad(k, "cited step out of range");

        if (st.rule == RuleId::Premise) {
            if (!st.premises.empty())
                return bad(k, "premise step must not cite prior steps");
            if (!m.member(st.statement))
                return bad(k, "statement is not a member of the constraint set");
            continue;
        }

        std::vector<Dependency> cited;
        for (auto r : st.premises) cited.push_back(p.steps[r - 1].statement);
        auto have = exp_union(cited);

        if (st.rule == RuleId::Definition) {
            if (!expansion_subset(expansion(st.statement), have))
                return bad(k, "statement is not covered by the cited steps");
            continue;
        }

        try {
            const auto& def = reg.rule(st.rule);
            if (def.side) def.side(st.binding);
            auto required = def.premises(st.binding);
            for (std::size_t i = 0; i < required.size(); ++i)
                if (!expansion_subset(expansion(required[i]), have))
                    return bad(k, std::string("required premise ") +
                                      std::to_string(i + 1) + " of " +
                                      rule_name(st.rule) +
                                      " is not among the cited steps");
            auto concl = def.conclude(st.binding);
            if (!expansion_subset(expansion(st.statement), expansion(concl)))
                return bad(k, std::string("statement does not follow from ") +
                                  rule_name(st.rule) + " under this binding");
        } catch (const EngineError& e) {
            return bad(k, e.what());
        }
    }
    if (!same_statement(p.goal, p.steps.back().statement))
        return bad(p.steps.size(), "final statement differs from the goal");
    return {true, 0, ""};
}

}  // namespace detail

inline Registry::Registry() {
    using ML = MarkedList;
    const ML E;  // empty list

    auto dep_od = [](ML l, ML r) { return Dependency(OrderDep{std::move(l), std::move(r)}); };
    auto dep_eq = [](ML l, ML r) { return Dependency(OrderEquiv{std::move(l), std::move(r)}); };
    auto dep_cp = [](ML l, ML r) { return Dependency(OrderCompat{std::move(l), std::move(r)}); };

    auto st = [](Dependency d, RuleId rule, std::vector<std::size_t> prem,
                 Binding b) {
        return ProofStep{std::move(d), rule, std::move(prem), std::move(b)};
    };

    // hypothesis steps shared by every derivation
    auto hyps = [&](const std::vector<Dependency>& hs) {
        std::vector<ProofStep> out;
        for (const auto& h : hs)
            out.push_back(ProofStep{h, RuleId::Premise, {}, {}});
        return out;
    };

    // ---- primitive rules ----

    add({RuleId::Reflexivity, true, {"X", "Y"},
         [](const Binding&) { return std::vector<Dependency>{}; },
         [=](const Binding& b) { return dep_od(b.at("X") + b.at("Y"), b.at("X")); },
         nullptr, nullptr});

    add({RuleId::Prefix, true, {"X", "Y", "Z"},
         [=](const Binding& b) {
             return std::vector<Dependency>{dep_od(b.at("X"), b.at("Y"))};
         },
         [=](const Binding& b) {
             return dep_od(b.at("Z") + b.at("X"), b.at("Z") + b.at("Y"));
         },
         nullptr, nullptr});

    add({RuleId::Normalization, true, {"W", "X", "Y", "V"},
         [](const Binding&) { return std::vector<Dependency>{}; },
         [=](const Binding& b) {
             return dep_eq(b.at("W") + b.at("X") + b.at("Y") + b.at("X") + b.at("V"),
                           b.at("W") + b.at("X") + b.at("Y") + b.at("V"));
         },
         nullptr, nullptr});

    add({RuleId::Transitivity, true, {"X", "Y", "Z"},
         [=](const Binding& b) {
             return std::vector<Dependency>{dep_od(b.at("X"), b.at("Y")),
                                            dep_od(b.at("Y"), b.at("Z"))};
         },
         [=](const Binding& b) { return dep_od(b.at("X"), b.at("Z")); },
         nullptr, nullptr});

    add({RuleId::Suffix, true, {"X", "Y"},
         [=](const Binding& b) {
             return std::vector<Dependency>{dep_od(b.at("X"), b.at("Y"))};
         },
         [=](const Binding& b) { return dep_eq(b.at("X"), b.at("Y") + b.at("X")); },
         nullptr, nullptr});

    add({RuleId::Chain, true, {"X", "Z"},
         [=](const Binding& b) {
             if (b.chain_n < 1) throw RuleError("chain length n must be at least 1");
             std::vector<Dependency> ps;
             auto y = [&](int i) { return b.at("Y" + std::to_string(i)); };
             ps.push_back(dep_cp(b.at("X"), y(1)));
             for (int i = 1; i < b.chain_n; ++i)
                 ps.push_back(dep_cp(y(i), y(i + 1)));
             ps.push_back(dep_cp(y(b.chain_n), b.at("Z")));
             for (int i = 1; i <= b.chain_n; ++i)
                 ps.push_back(dep_cp(y(i) + b.at("X"), y(i) + b.at("Z")));
             return ps;
         },
         [=](const Binding& b) { return dep_cp(b.at("X"), b.at("Z")); },
         nullptr, nullptr});

    // ---- derived rules, each with its registered derivation ----

    RuleDef unio{RuleId::Union, false, {"X", "Y", "Z"},
        [=](const Binding& b) {
            return std::vector<Dependency>{dep_od(b.at("X"), b.at("Y")),
                                           dep_od(b.at("X"), b.at("Z"))};
        },
        [=](const Binding& b) { return dep_od(b.at("X"), b.at("Y") + b.at("Z")); },
        nullptr, nullptr};
    unio.derive = [=, prem = unio.premises](const Binding& b) {
        ML X = b.at("X"), Y = b.at("Y"), Z = b.at("Z");
        auto out = hyps(prem(b));
        out.push_back(st(dep_od(Y + X, Y + Z), RuleId::Prefix, {2},
                         detail::bmk({{"X", X}, {"Y", Z}, {"Z", Y}})));
        out.push_back(st(dep_eq(X, Y + X), RuleId::Suffix, {1},
                         detail::bmk({{"X", X}, {"Y", Y}})));
        out.push_back(st(dep_od(X, Y + Z), RuleId::Transitivity, {3, 4},
                         detail::bmk({{"X", X}, {"Y", Y + X}, {"Z", Y + Z}})));
        return out;
    };
    add(unio);

    RuleDef aug{RuleId::Augmentation, false, {"X", "Y", "Z"},
        [=](const Binding& b) {
            return std::vector<Dependency>{dep_od(b.at("X"), b.at("Y"))};
        },
        [=](const Binding& b) { return dep_od(b.at("X") + b.at("Z"), b.at("Y")); },
        nullptr, nullptr};
    aug.derive = [=, prem = aug.premises](const Binding& b) {
        ML X = b.at("X"), Y = b.at("Y"), Z = b.at("Z");
        auto out = hyps(prem(b));
        out.push_back(st(dep_od(X + Z, X), RuleId::Reflexivity, {},
                         detail::bmk({{"X", X}, {"Y", Z}})));
        out.push_back(st(dep_od(X + Z, Y), RuleId::Transitivity, {2, 1},
                         detail::bmk({{"X", X + Z}, {"Y", X}, {"Z", Y}})));
        return out;
    };
    add(aug);

    RuleDef shift{RuleId::Shift, false, {"W", "V", "X", "Y"},
        [=](const Binding& b) {
            return std::vector<Dependency>{dep_eq(b.at("W"), b.at("V")),
                                           dep_od(b.at("X"), b.at("Y"))};
        },
        [=](const Binding& b) {
            return dep_od(b.at("W") + b.at("X"), b.at("V") + b.at("Y"));
        },
        nullptr, nullptr};
    shift.derive = [=, prem = shift.premises](const Binding& b) {
        ML W = b.at("W"), V = b.at("V"), X = b.at("X"), Y = b.at("Y");
        auto out = hyps(prem(b));
        out.push_back(st(dep_od(V + X, W), RuleId::Augmentation, {1},
                         detail::bmk({{"X", V}, {"Y", W}, {"Z", X}})));      // 3
        out.push_back(st(dep_od(V + V + X, V + W), RuleId::Prefix, {3},
                         detail::bmk({{"X", V + X}, {"Y", W}, {"Z", V}})));  // 4
        out.push_back(st(dep_eq(V + V + X, V + X), RuleId::Normalization, {},
                         detail::bmk({{"W", E}, {"X", V}, {"Y", E}, {"V", X}})));  // 5
        out.push_back(st(dep_od(V + X, V + W), RuleId::Transitivity, {5, 4},
                         detail::bmk({{"X", V + X}, {"Y", V + V + X}, {"Z", V + W}})));  // 6
        out.push_back(st(dep_eq(V + X, V + W + V + X), RuleId::Suffix, {6},
                         detail::bmk({{"X", V + X}, {"Y", V + W}})));        // 7
        out.push_back(st(dep_eq(V + W + X, V + W + V + X), RuleId::Normalization, {},
                         detail::bmk({{"W", E}, {"X", V}, {"Y", W}, {"V", X}})));  // 8
        out.push_back(st(dep_od(V + X, V + W + X), RuleId::Transitivity, {7, 8},
                         detail::bmk({{"X", V + X}, {"Y", V + W + V + X}, {"Z", V + W + X}})));  // 9
        out.push_back(st(dep_od(V + W + X, V + X), RuleId::Transitivity, {8, 7},
                         detail::bmk({{"X", V + W + X}, {"Y", V + W + V + X}, {"Z", V + X}})));  // 10
        out.push_back(st(dep_od(W + X, V), RuleId::Augmentation, {1},
                         detail::bmk({{"X", W}, {"Y", V}, {"Z", X}})));      // 11
        out.push_back(st(dep_od(W + X, V + W + X), RuleId::Suffix, {11},
                         detail::bmk({{"X", W + X}, {"Y", V}})));            // 12
        out.push_back(st(dep_od(W + X, V + X), RuleId::Transitivity, {12, 10},
                         detail::bmk({{"X", W + X}, {"Y", V + W + X}, {"Z", V + X}})));  // 13
        out.push_back(st(dep_od(V + X, V + Y), RuleId::Prefix, {2},
                         detail::bmk({{"X", X}, {"Y", Y}, {"Z", V}})));      // 14
        out.push_back(st(dep_od(W + X, V + Y), RuleId::Transitivity, {13, 14},
                         detail::bmk({{"X", W + X}, {"Y", V + X}, {"Z", V + Y}})));  // 15
        return out;
    };
    add(shift);

    RuleDef dec{RuleId::Decomposition, false, {"X", "Z", "Y"},
        [=](const Binding& b) {
            return std::vector<Dependency>{dep_od(b.at("X"), b.at("Z") + b.at("Y"))};
        },
        [=](const Binding& b) { return dep_od(b.at("X"), b.at("Z")); },
        nullptr, nullptr};
    dec.derive = [=, prem = dec.premises](const Binding& b) {
        ML X = b.at("X"), Z = b.at("Z"), Y = b.at("Y");
        auto out = hyps(prem(b));
        out.push_back(st(dep_od(Z + Y, Z), RuleId::Reflexivity, {},
                         detail::bmk({{"X", Z}, {"Y", Y}})));
        out.push_back(st(dep_od(X, Z), RuleId::Transitivity, {1, 2},
                         detail::bmk({{"X", X}, {"Y", Z + Y}, {"Z", Z}})));
        return out;
    };
    add(dec);

    RuleDef rep{RuleId::Replace, false, {"M", "N", "X", "Z"},
        [=](const Binding& b) {
            return std::vector<Dependency>{dep_eq(b.at("M"), b.at("N"))};
        },
        [=](const Binding& b) {
            return dep_eq(b.at("X") + b.at("M") + b.at("Z"),
                          b.at("X") + b.at("N") + b.at("Z"));
        },
        nullptr, nullptr};
    rep.derive = [=, prem = rep.premises](const Binding& b) {
        ML M = b.at("M"), N = b.at("N"), X = b.at("X"), Z = b.at("Z");
        auto out = hyps(prem(b));
        out.push_back(st(dep_od(Z, Z), RuleId::Reflexivity, {},
                         detail::bmk({{"X", Z}, {"Y", E}})));                // 2
        out.push_back(st(dep_od(M + Z, N + Z), RuleId::Shift, {1, 2},
                         detail::bmk({{"W", M}, {"V", N}, {"X", Z}, {"Y", Z}})));  // 3
        out.push_back(st(dep_od(N + Z, M + Z), RuleId::Shift, {1, 2},
                         detail::bmk({{"W", N}, {"V", M}, {"X", Z}, {"Y", Z}})));  // 4
        out.push_back(st(dep_od(X + M + Z, X + N + Z), RuleId::Prefix, {3},
                         detail::bmk({{"X", M + Z}, {"Y", N + Z}, {"Z", X}})));  // 5
        out.push_back(st(dep_od(X + N + Z, X + M + Z), RuleId::Prefix, {4},
                         detail::bmk({{"X", N + Z}, {"Y", M + Z}, {"Z", X}})));  // 6
        out.push_back(st(dep_eq(X + M + Z, X + N + Z), RuleId::Definition, {5, 6}, {}));
        return out;
    };
    add(rep);

    RuleDef elim{RuleId::Eliminate, false, {"M", "X", "N", "Y", "W"},
        [=](const Binding& b) {
            return std::vector<Dependency>{dep_od(b.at("X"), b.at("Y"))};
        },
        [=](const Binding& b) {
            return dep_eq(b.at("M") + b.at("X") + b.at("N") + b.at("Y") + b.at("W"),
                          b.at("M") + b.at("X") + b.at("N") + b.at("W"));
        },
        nullptr, nullptr};
    elim.derive = [=, prem = elim.premises](const Binding& b) {
        ML M = b.at("M"), X = b.at("X"), N = b.at("N"), Y = b.at("Y"), W = b.at("W");
        auto out = hyps(prem(b));
        out.push_back(st(dep_eq(X, Y + X), RuleId::Suffix, {1},
                         detail::bmk({{"X", X}, {"Y", Y}})));                // 2
        out.push_back(st(dep_od(X + X, X + Y + X), RuleId::Prefix, {2},
                         detail::bmk({{"X", X}, {"Y", Y + X}, {"Z", X}})));  // 3
        out.push_back(st(dep_eq(X, X + X), RuleId::Normalization, {},
                         detail::bmk({{"W", E}, {"X", X}, {"Y", E}, {"V", E}})));  // 4
        out.push_back(st(dep_eq(X + Y, X + Y + X), RuleId::Normalization, {},
                         detail::bmk({{"W", E}, {"X", X}, {"Y", Y}, {"V", E}})));  // 5
        out.push_back(st(dep_od(X, X + Y + X), RuleId::Transitivity, {4, 3},
                         detail::bmk({{"X", X}, {"Y", X + X}, {"Z", X + Y + X}})));  // 6
        out.push_back(st(dep_od(X, X + Y), RuleId::Transitivity, {6, 5},
                         detail::bmk({{"X", X}, {"Y", X + Y + X}, {"Z", X + Y}})));  // 7
        out.push_back(st(dep_od(X + Y, X), RuleId::Reflexivity, {},
                         detail::bmk({{"X", X}, {"Y", Y}})));                // 8
        out.push_back(st(dep_eq(X, X + Y), RuleId::Definition, {7, 8}, {}));  // 9
        out.push_back(st(dep_eq(M + X + N + Y + W, M + X + Y + N + Y + W),
                         RuleId::Replace, {9},
                         detail::bmk({{"M", X}, {"N", X + Y}, {"X", M}, {"Z", N + Y + W}})));  // 10
        out.push_back(st(dep_eq(M + X + Y + N + Y + W, M + X + Y + N + W),
                         RuleId::Normalization, {},
                         detail::bmk({{"W", M + X}, {"X", Y}, {"Y", N}, {"V", W}})));  // 11
        out.push_back(st(dep_od(M + X + N + Y + W, M + X + Y + N + W),
                         RuleId::Transitivity, {10, 11},
                         detail::bmk({{"X", M + X + N + Y + W},
                                      {"Y", M + X + Y + N + Y + W},
                                      {"Z", M + X + Y + N + W}})));          // 12
        out.push_back(st(dep_od(M + X + Y + N + W, M + X + N + Y + W),
                         RuleId::Transitivity, {11, 10},
                         detail::bmk({{"X", M + X + Y + N + W},
                                      {"Y", M + X + Y + N + Y + W},
                                      {"Z", M + X + N + Y + W}})));          // 13
        out.push_back(st(dep_eq(M + X + Y + N + W, M + X + N + W),
                         RuleId::Replace, {9},
                         detail::bmk({{"M", X + Y}, {"N", X}, {"X", M}, {"Z", N + W}})));  // 14
        out.push_back(st(dep_od(M + X + N + Y + W, M + X + N + W),
                         RuleId::Transitivity, {12, 14},
                         detail::bmk({{"X", M + X + N + Y + W},
                                      {"Y", M + X + Y + N + W},
                                      {"Z", M + X + N + W}})));              // 15
        out.push_back(st(dep_od(M + X + N + W, M + X + N + Y + W),
                         RuleId::Transitivity, {14, 13},
                         detail::bmk({{"X", M + X + N + W},
                                      {"Y", M + X + Y + N + W},
                                      {"Z", M + X + N + Y + W}})));          // 16
        out.push_back(st(dep_eq(M + X + N + Y + W, M + X + N + W),
                         RuleId::Definition, {15, 16}, {}));                 // 17
        return out;
    };
    add(elim);

    RuleDef lelim{RuleId::LeftEliminate, false, {"V", "X", "Y", "Z"},
        [=](const Binding& b) {
            return std::vector<Dependency>{dep_od(b.at("X"), b.at("Y"))};
        },
        [=](const Binding& b) {
            return dep_eq(b.at("V") + b.at("Y") + b.at("X") + b.at("Z"),
                          b.at("V") + b.at("X") + b.at("Z"));
        },
        nullptr, nullptr};
    lelim.derive = [=, prem = lelim.premises](const Binding& b) {
        ML V = b.at("V"), X = b.at("X"), Y = b.at("Y"), Z = b.at("Z");
        auto out = hyps(prem(b));
        out.push_back(st(dep_eq(X, Y + X), RuleId::Suffix, {1},
                         detail::bmk({{"X", X}, {"Y", Y}})));
        out.push_back(st(dep_eq(V + Y + X + Z, V + X + Z), RuleId::Replace, {2},
                         detail::bmk({{"M", Y + X}, {"N", X}, {"X", V}, {"Z", Z}})));
        return out;
    };
    add(lelim);

    RuleDef drop{RuleId::Drop, false, {"X", "V", "Y", "Z", "W"},
        [=](const Binding& b) {
            return std::vector<Dependency>{
                dep_od(b.at("X"), b.at("V") + b.at("Y") + b.at("Z") + b.at("W")),
                dep_eq(b.at("X"), b.at("V"))};
        },
        [=](const Binding& b) { return dep_od(b.at("X"), b.at("V") + b.at("Z")); },
        nullptr, nullptr};
    drop.derive = [=, prem = drop.premises](const Binding& b) {
        ML X = b.at("X"), V = b.at("V"), Y = b.at("Y"), Z = b.at("Z"), W = b.at("W");
        auto out = hyps(prem(b));
        out.push_back(st(dep_od(V + Y + Z + W, X + Y + Z + W), RuleId::Replace, {2},
                         detail::bmk({{"M", V}, {"N", X}, {"X", E}, {"Z", Y + Z + W}})));  // 3
        out.push_back(st(dep_od(X, X + Y + Z + W), RuleId::Transitivity, {1, 3},
                         detail::bmk({{"X", X}, {"Y", V + Y + Z + W}, {"Z", X + Y + Z + W}})));  // 4
        out.push_back(st(dep_od(X, X + Y), RuleId::Decomposition, {4},
                         detail::bmk({{"X", X}, {"Z", X + Y}, {"Y", Z + W}})));  // 5
        out.push_back(st(dep_od(X + Z + W, X + Y), RuleId::Augmentation, {5},
                         detail::bmk({{"X", X}, {"Y", X + Y}, {"Z", Z + W}})));  // 6
        out.push_back(st(dep_eq(X + Z + W, X + Y + X + Z + W), RuleId::Suffix, {6},
                         detail::bmk({{"X", X + Z + W}, {"Y", X + Y}})));    // 7
        out.push_back(st(dep_eq(X + Y + X + Z + W, X + Y + Z + W),
                         RuleId::Normalization, {},
                         detail::bmk({{"W", E}, {"X", X}, {"Y", Y}, {"V", Z + W}})));  // 8
        out.push_back(st(dep_od(X + Z + W, X + Y + Z + W), RuleId::Transitivity, {7, 8},
                         detail::bmk({{"X", X + Z + W}, {"Y", X + Y + X + Z + W},
                                      {"Z", X + Y + Z + W}})));              // 9
        out.push_back(st(dep_od(X + Y + Z + W, X + Z + W), RuleId::Transitivity, {8, 7},
                         detail::bmk({{"X", X + Y + Z + W}, {"Y", X + Y + X + Z + W},
                                      {"Z", X + Z + W}})));                  // 10
        out.push_back(st(dep_od(X, X + Z + W), RuleId::Transitivity, {4, 10},
                         detail::bmk({{"X", X}, {"Y", X + Y + Z + W}, {"Z", X + Z + W}})));  // 11
        out.push_back(st(dep_od(X + Z + W, V + Z + W), RuleId::Replace, {2},
                         detail::bmk({{"M", X}, {"N", V}, {"X", E}, {"Z", Z + W}})));  // 12
        out.push_back(st(dep_od(X, V + Z + W), RuleId::Transitivity, {11, 12},
                         detail::bmk({{"X", X}, {"Y", X + Z + W}, {"Z", V + Z + W}})));  // 13
        out.push_back(st(dep_od(X, V + Z), RuleId::Decomposition, {13},
                         detail::bmk({{"X", X}, {"Z", V + Z}, {"Y", W}})));  // 14
        return out;
    };
    add(drop);

    RuleDef path{RuleId::Path, false, {"X", "Y", "W", "V", "M", "N"},
        [=](const Binding& b) {
            return std::vector<Dependency>{
                dep_od(b.at("X"), b.at("Y") + b.at("W")),
                dep_eq(b.at("Y"), b.at("V") + b.at("M") + b.at("N"))};
        },
        [=](const Binding& b) {
            return dep_od(b.at("X"), b.at("Y") + b.at("M") + b.at("W"));
        },
        nullptr, nullptr};
    path.derive = [=, prem = path.premises](const Binding& b) {
        ML X = b.at("X"), Y = b.at("Y"), W = b.at("W");
        ML V = b.at("V"), M = b.at("M"), N = b.at("N");
        auto out = hyps(prem(b));
        out.push_back(st(dep_od(X, Y), RuleId::Decomposition, {1},
                         detail::bmk({{"X", X}, {"Z", Y}, {"Y", W}})));      // 3
        out.push_back(st(dep_od(X, V + M + N), RuleId::Transitivity, {3, 2},
                         detail::bmk({{"X", X}, {"Y", Y}, {"Z", V + M + N}})));  // 4
        out.push_back(st(dep_od(X, Y + V + M + N), RuleId::Union, {3, 4},
                         detail::bmk({{"X", X}, {"Y", Y}, {"Z", V + M + N}})));  // 5
        out.push_back(st(dep_eq(Y + V + M + N, Y + V + M + N + M),
                         RuleId::Normalization, {},
                         detail::bmk({{"W", Y + V}, {"X", M}, {"Y", N}, {"V", E}})));  // 6
        out.push_back(st(dep_od(X, Y + V + M + N + M), RuleId::Transitivity, {5, 6},
                         detail::bmk({{"X", X}, {"Y", Y + V + M + N},
                                      {"Z", Y + V + M + N + M}})));          // 7
        out.push_back(st(dep_eq(Y + V + M + N + M, Y + M), RuleId::Eliminate, {2},
                         detail::bmk({{"M", E}, {"X", Y}, {"N", E},
                                      {"Y", V + M + N}, {"W", M}})));        // 8
        out.push_back(st(dep_od(X, Y + M), RuleId::Transitivity, {7, 8},
                         detail::bmk({{"X", X}, {"Y", Y + V + M + N + M}, {"Z", Y + M}})));  // 9
        out.push_back(st(dep_od(X, Y + M + Y + W), RuleId::Union, {9, 1},
                         detail::bmk({{"X", X}, {"Y", Y + M}, {"Z", Y + W}})));  // 10
        out.push_back(st(dep_eq(Y + M + Y + W, Y + M + W), RuleId::Normalization, {},
                         detail::bmk({{"W", E}, {"X", Y}, {"Y", M}, {"V", W}})));  // 11
        out.push_back(st(dep_od(X, Y + M + W), RuleId::Transitivity, {10, 11},
                         detail::bmk({{"X", X}, {"Y", Y + M + Y + W}, {"Z", Y + M + W}})));  // 12
        return out;
    };
    add(path);

    auto set_eq = [](const MarkedList& a, const MarkedList& c) {
        return a.to_set() == c.to_set();
    };

    RuleDef part{RuleId::Partition, false, {"X", "Y", "Z"},
        [=](const Binding& b) {
            return std::vector<Dependency>{dep_od(b.at("X"), b.at("Y")),
                                           dep_od(b.at("X"), b.at("Z"))};
        },
        [=](const Binding& b) { return dep_eq(b.at("Y"), b.at("Z")); },
        [=](const Binding& b) {
            if (!set_eq(b.at("Y"), b.at("Z")))
                throw RuleError("partition requires set(Y) = set(Z)");
        },
        nullptr};
    part.derive = [=, prem = part.premises](const Binding& b) {
        ML X = b.at("X"), Y = b.at("Y"), Z = b.at("Z");
        auto out = hyps(prem(b));
        out.push_back(st(dep_eq(X, Y + X), RuleId::Suffix, {1},
                         detail::bmk({{"X", X}, {"Y", Y}})));                // 3
        out.push_back(st(dep_od(X, X), RuleId::Reflexivity, {},
                         detail::bmk({{"X", X}, {"Y", E}})));                // 4
        out.push_back(st(dep_od(X, X + Y), RuleId::Union, {4, 1},
                         detail::bmk({{"X", X}, {"Y", X}, {"Z", Y}})));      // 5
        out.push_back(st(dep_eq(X, X + Y + X), RuleId::Suffix, {5},
                         detail::bmk({{"X", X}, {"Y", X + Y}})));            // 6
        out.push_back(st(dep_eq(X + Y + X, X + Y), RuleId::Normalization, {},
                         detail::bmk({{"W", E}, {"X", X}, {"Y", Y}, {"V", E}})));  // 7
        out.push_back(st(dep_od(X + Y, X), RuleId::Transitivity, {7, 6},
                         detail::bmk({{"X", X + Y}, {"Y", X + Y + X}, {"Z", X}})));  // 8
        out.push_back(st(dep_eq(X, X + Y), RuleId::Definition, {5, 8}, {}));  // 9
        out.push_back(st(dep_od(X + Y, Y + X), RuleId::Transitivity, {9, 3},
                         detail::bmk({{"X", X + Y}, {"Y", X}, {"Z", Y + X}})));  // 10
        out.push_back(st(dep_od(Y + X, X + Y), RuleId::Transitivity, {3, 9},
                         detail::bmk({{"X", Y + X}, {"Y", X}, {"Z", X + Y}})));  // 11
        out.push_back(st(dep_cp(X, Y), RuleId::Definition, {10, 11}, {}));   // 12
        out.push_back(st(dep_eq(X, Z + X), RuleId::Suffix, {2},
                         detail::bmk({{"X", X}, {"Y", Z}})));                // 13
        out.push_back(st(dep_od(X, X + Z), RuleId::Union, {4, 2},
                         detail::bmk({{"X", X}, {"Y", X}, {"Z", Z}})));      // 14
        out.push_back(st(dep_eq(X, X + Z + X), RuleId::Suffix, {14},
                         detail::bmk({{"X", X}, {"Y", X + Z}})));            // 15
        out.push_back(st(dep_eq(X + Z + X, X + Z), RuleId::Normalization, {},
                         detail::bmk({{"W", E}, {"X", X}, {"Y", Z}, {"V", E}})));  // 16
        out.push_back(st(dep_od(X + Z, X), RuleId::Transitivity, {16, 15},
                         detail::bmk({{"X", X + Z}, {"Y", X + Z + X}, {"Z", X}})));  // 17
        out.push_back(st(dep_eq(X, X + Z), RuleId::Definition, {14, 17}, {}));  // 18
        out.push_back(st(dep_od(X + Z, Z + X), RuleId::Transitivity, {18, 13},
                         detail::bmk({{"X", X + Z}, {"Y", X}, {"Z", Z + X}})));  // 19
        out.push_back(st(dep_od(Z + X, X + Z), RuleId::Transitivity, {13, 18},
                         detail::bmk({{"X", Z + X}, {"Y", X}, {"Z", X + Z}})));  // 20
        out.push_back(st(dep_cp(X, Z), RuleId::Definition, {19, 20}, {}));   // 21
        out.push_back(st(dep_eq(X + Y + Z, X + Y), RuleId::Eliminate, {2},
                         detail::bmk({{"M", E}, {"X", X}, {"N", Y}, {"Y", Z}, {"W", E}})));  // 22
        out.push_back(st(dep_eq(X + Y + Z, X + Z), RuleId::Eliminate, {1},
                         detail::bmk({{"M", E}, {"X", X}, {"N", E}, {"Y", Y}, {"W", Z}})));  // 23
        out.push_back(st(dep_od(X + Y, X + Z), RuleId::Transitivity, {22, 23},
                         detail::bmk({{"X", X + Y}, {"Y", X + Y + Z}, {"Z", X + Z}})));  // 24
        out.push_back(st(dep_od(X + Z, X + Y), RuleId::Transitivity, {23, 22},
                         detail::bmk({{"X", X + Z}, {"Y", X + Y + Z}, {"Z", X + Y}})));  // 25
        out.push_back(st(dep_eq(X + Y, X + Z), RuleId::Definition, {24, 25}, {}));  // 26
        out.push_back(st(dep_eq(X + Y, X + Z + X + Y), RuleId::Suffix, {24},
                         detail::bmk({{"X", X + Y}, {"Y", X + Z}})));        // 27
        out.push_back(st(dep_eq(X + Z, X + Y + X + Z), RuleId::Suffix, {25},
                         detail::bmk({{"X", X + Z}, {"Y", X + Y}})));        // 28
        out.push_back(st(dep_od(X + Y + X + Z, X + Y), RuleId::Reflexivity, {},
                         detail::bmk({{"X", X + Y}, {"Y", X + Z}})));        // 29
        out.push_back(st(dep_od(X + Y + X + Z, X + Z + X + Y), RuleId::Transitivity, {29, 27},
                         detail::bmk({{"X", X + Y + X + Z}, {"Y", X + Y},
                                      {"Z", X + Z + X + Y}})));              // 30
        out.push_back(st(dep_od(X + Z + X + Y, X + Z), RuleId::Reflexivity, {},
                         detail::bmk({{"X", X + Z}, {"Y", X + Y}})));        // 31
        out.push_back(st(dep_od(X + Z + X + Y, X + Y + X + Z), RuleId::Transitivity, {31, 28},
                         detail::bmk({{"X", X + Z + X + Y}, {"Y", X + Z},
                                      {"Z", X + Y + X + Z}})));              // 32
        out.push_back(st(dep_cp(X + Y, X + Z), RuleId::Definition, {30, 32}, {}));  // 33
        out.push_back(st(dep_cp(Y, Z), RuleId::Chain, {12, 21, 33},
                         Binding{{{"X", Y}, {"Z", Z}, {"Y1", X}}, 1}));      // 34
        out.push_back(st(dep_eq(Y, Z), RuleId::Definition, {34}, {}));       // 35
        return out;
    };
    add(part);

    RuleDef dcl{RuleId::DownwardClosure, false, {"X", "Y", "Z", "V"},
        [=](const Binding& b) {
            return std::vector<Dependency>{
                dep_cp(b.at("X") + b.at("Y"), b.at("Z") + b.at("V"))};
        },
        [=](const Binding& b) { return dep_cp(b.at("X"), b.at("Z")); },
        nullptr, nullptr};
    dcl.derive = [=, prem = dcl.premises](const Binding& b) {
        ML X = b.at("X"), Y = b.at("Y"), Z = b.at("Z"), V = b.at("V");
        auto out = hyps(prem(b));
        out.push_back(st(dep_od(Z + V + X + Y, Z), RuleId::Reflexivity, {},
                         detail::bmk({{"X", Z}, {"Y", V + X + Y}})));        // 2
        out.push_back(st(dep_od(X + Y + Z + V, Z), RuleId::Transitivity, {1, 2},
                         detail::bmk({{"X", X + Y + Z + V}, {"Y", Z + V + X + Y},
                                      {"Z", Z}})));                          // 3
        out.push_back(st(dep_od(X + Y + Z + V, X), RuleId::Reflexivity, {},
                         detail::bmk({{"X", X}, {"Y", Y + Z + V}})));        // 4
        out.push_back(st(dep_od(X + Y + Z + V, X + Z), RuleId::Union, {4, 3},
                         detail::bmk({{"X", X + Y + Z + V}, {"Y", X}, {"Z", Z}})));  // 5
        out.push_back(st(dep_od(X + Y + Z + V, Z + X), RuleId::Union, {3, 4},
                         detail::bmk({{"X", X + Y + Z + V}, {"Y", Z}, {"Z", X}})));  // 6
        out.push_back(st(dep_cp(X, Z), RuleId::Partition, {5, 6},
                         detail::bmk({{"X", X + Y + Z + V}, {"Y", X + Z},
                                      {"Z", Z + X}})));                      // 7
        return out;
    };
    add(dcl);

    auto is_perm = [](const MarkedList& a, const MarkedList& c) {
        auto u = a.items, v = c.items;
        std::sort(u.begin(), u.end());
        std::sort(v.begin(), v.end());
        return u == v;
    };

    RuleDef perm{RuleId::Permutation, false, {"X", "Y", "X'", "Y'"},
        [=](const Binding& b) {
            return std::vector<Dependency>{dep_od(b.at("X"), b.at("X") + b.at("Y"))};
        },
        [=](const Binding& b) {
            return dep_od(b.at("X'"), b.at("X'") + b.at("Y'"));
        },
        [=](const Binding& b) {
            if (!is_perm(b.at("X"), b.at("X'")))
                throw RuleError("X' must be a reordering of X");
            if (!is_perm(b.at("Y"), b.at("Y'")))
                throw RuleError("Y' must be a reordering of Y");
        },
        nullptr};
    perm.derive = [=, prem = perm.premises](const Binding& b) {
        ML X = b.at("X"), Y = b.at("Y"), Xp = b.at("X'"), Yp = b.at("Y'");
        auto out = hyps(prem(b));
        std::size_t n = Y.size();
        auto ysub = [&](std::size_t from, std::size_t to) {  // Y[from..to)
            ML r;
            for (std::size_t i = from; i < to; ++i) r.items.push_back(Y[i]);
            return r;
        };
        // X ↦ X Y1..Yk for every k, then re-prefixed with X'
        std::vector<std::size_t> full(n + 1, 1);  // full[k] = step for X' ↦ X' Y1..Yk
        for (std::size_t k = 0; k <= n; ++k) {
            std::size_t ak;
            if (k == n) {
                ak = 1;  // the full-length fact is the hypothesis itself
            } else {
                out.push_back(st(dep_od(X, X + ysub(0, k)), RuleId::Decomposition, {1},
                                 detail::bmk({{"X", X}, {"Z", X + ysub(0, k)},
                                              {"Y", ysub(k, n)}})));
                ak = out.size();
            }
            out.push_back(st(dep_od(Xp, Xp + ysub(0, k)), RuleId::Prefix, {ak},
                             detail::bmk({{"X", X}, {"Y", X + ysub(0, k)}, {"Z", Xp}})));
            full[k] = out.size();
        }
        out.push_back(st(dep_od(Xp, Xp), RuleId::Reflexivity, {},
                         detail::bmk({{"X", Xp}, {"Y", E}})));
        std::size_t refl = out.size();
        // single-attribute drops in the order of Y', then a union fold
        std::vector<bool> used(n, false);
        std::vector<std::size_t> single(n, 0);
        for (std::size_t j = 0; j < n; ++j) {
            std::size_t i = 0;
            while (i < n && (used[i] || !(Y[i] == Yp[j]))) ++i;
            if (i == n) throw RuleError("Y' must be a reordering of Y");
            used[i] = true;
            out.push_back(st(dep_od(Xp, Xp + ML{Y[i]}), RuleId::Drop, {full[n], refl},
                             detail::bmk({{"X", Xp}, {"V", Xp}, {"Y", ysub(0, i)},
                                          {"Z", ML{Y[i]}}, {"W", ysub(i + 1, n)}})));
            single[j] = out.size();
        }
        if (n == 0) {
            out.push_back(st(dep_od(Xp, Xp + Yp), RuleId::Definition, {refl}, {}));
            return out;
        }
        std::size_t acc = single[0];
        for (std::size_t j = 1; j < n; ++j) {
            ML sofar;
            for (std::size_t i = 0; i < j; ++i) sofar.items.push_back(Yp[i]);
            out.push_back(st(dep_od(Xp, Xp + sofar + ML{Yp[j]}), RuleId::Union,
                             {acc, single[j]},
                             detail::bmk({{"X", Xp}, {"Y", Xp + sofar},
                                          {"Z", Xp + ML{Yp[j]}}})));
            acc = out.size();
        }
        if (!(out.back().statement == dep_od(Xp, Xp + Yp)))
            out.push_back(st(dep_od(Xp, Xp + Yp), RuleId::Definition, {acc}, {}));
        return out;
    };
    add(perm);

    RuleDef osfd{RuleId::OdSplitFd, false, {"X", "Y"},
        [=](const Binding& b) {
            return std::vector<Dependency>{dep_od(b.at("X"), b.at("Y"))};
        },
        [=](const Binding& b) { return dep_od(b.at("X"), b.at("X") + b.at("Y")); },
        nullptr, nullptr};
    osfd.derive = [=, prem = osfd.premises](const Binding& b) {
        ML X = b.at("X"), Y = b.at("Y");
        auto out = hyps(prem(b));
        out.push_back(st(dep_od(X, X), RuleId::Reflexivity, {},
                         detail::bmk({{"X", X}, {"Y", E}})));
        out.push_back(st(dep_od(X, X + Y), RuleId::Union, {2, 1},
                         detail::bmk({{"X", X}, {"Y", X}, {"Z", Y}})));
        return out;
    };
    add(osfd);

    RuleDef oscp{RuleId::OdSplitCompat, false, {"X", "Y"},
        [=](const Binding& b) {
            return std::vector<Dependency>{dep_od(b.at("X"), b.at("Y"))};
        },
        [=](const Binding& b) { return dep_cp(b.at("X"), b.at("Y")); },
        nullptr, nullptr};
    oscp.derive = [=, prem = oscp.premises](const Binding& b) {
        ML X = b.at("X"), Y = b.at("Y");
        auto out = hyps(prem(b));
        out.push_back(st(dep_eq(X, Y + X), RuleId::Suffix, {1},
                         detail::bmk({{"X", X}, {"Y", Y}})));                // 2
        out.push_back(st(dep_eq(X + Y, Y + X + Y), RuleId::Replace, {2},
                         detail::bmk({{"M", X}, {"N", Y + X}, {"X", E}, {"Z", Y}})));  // 3
        out.push_back(st(dep_eq(Y + X + Y, Y + X), RuleId::Normalization, {},
                         detail::bmk({{"W", E}, {"X", Y}, {"Y", X}, {"V", E}})));  // 4
        out.push_back(st(dep_od(X + Y, Y + X), RuleId::Transitivity, {3, 4},
                         detail::bmk({{"X", X + Y}, {"Y", Y + X + Y}, {"Z", Y + X}})));  // 5
        out.push_back(st(dep_od(Y + X, X + Y), RuleId::Transitivity, {4, 3},
                         detail::bmk({{"X", Y + X}, {"Y", Y + X + Y}, {"Z", X + Y}})));  // 6
        out.push_back(st(dep_cp(X, Y), RuleId::Definition, {5, 6}, {}));     // 7
        return out;
    };
    add(oscp);

    RuleDef oscm{RuleId::OdSplitCompose, false, {"X", "Y"},
        [=](const Binding& b) {
            return std::vector<Dependency>{
                dep_od(b.at("X"), b.at("X") + b.at("Y")),
                dep_eq(b.at("X") + b.at("Y"), b.at("Y") + b.at("X"))};
        },
        [=](const Binding& b) { return dep_od(b.at("X"), b.at("Y")); },
        nullptr, nullptr};
    oscm.derive = [=, prem = oscm.premises](const Binding& b) {
        ML X = b.at("X"), Y = b.at("Y");
        auto out = hyps(prem(b));
        out.push_back(st(dep_od(X, Y + X), RuleId::Transitivity, {1, 2},
                         detail::bmk({{"X", X}, {"Y", X + Y}, {"Z", Y + X}})));
        out.push_back(st(dep_od(Y + X, Y), RuleId::Reflexivity, {},
                         detail::bmk({{"X", Y}, {"Y", X}})));
        out.push_back(st(dep_od(X, Y), RuleId::Transitivity, {3, 4},
                         detail::bmk({{"X", X}, {"Y", Y + X}, {"Z", Y}})));
        return out;
    };
    add(oscm);

    // Validate every derived rule against its registered derivation, in
    // registration order, before it becomes available.
    derived_ = {RuleId::Union, RuleId::Augmentation, RuleId::Shift,
                RuleId::Decomposition, RuleId::Replace, RuleId::Eliminate,
                RuleId::LeftEliminate, RuleId::Drop, RuleId::Path,
                RuleId::Partition, RuleId::DownwardClosure, RuleId::Permutation,
                RuleId::OdSplitFd, RuleId::OdSplitCompat, RuleId::OdSplitCompose};

    auto attr = [](const char* n) { return Attribute(n); };
    ML a{attr("a")}, bb{attr("b")}, c{attr("c")}, d{attr("d")}, e{attr("e")},
        f{attr("f")};
    std::map<RuleId, Binding> probe;
    probe[RuleId::Union] = detail::bmk({{"X", a}, {"Y", bb}, {"Z", c}});
    probe[RuleId::Augmentation] = detail::bmk({{"X", a}, {"Y", bb}, {"Z", c}});
    probe[RuleId::Shift] = detail::bmk({{"W", a}, {"V", bb}, {"X", c}, {"Y", d}});
    probe[RuleId::Decomposition] = detail::bmk({{"X", a}, {"Z", bb}, {"Y", c}});
    probe[RuleId::Replace] = detail::bmk({{"M", a}, {"N", bb}, {"X", c}, {"Z", d}});
    probe[RuleId::Eliminate] =
        detail::bmk({{"M", a}, {"X", bb}, {"N", c}, {"Y", d}, {"W", e}});
    probe[RuleId::LeftEliminate] =
        detail::bmk({{"V", a}, {"X", bb}, {"Y", c}, {"Z", d}});
    probe[RuleId::Drop] =
        detail::bmk({{"X", a}, {"V", bb}, {"Y", c}, {"Z", d}, {"W", e}});
    probe[RuleId::Path] = detail::bmk(
        {{"X", a}, {"Y", bb}, {"W", c}, {"V", d}, {"M", e}, {"N", f}});
    probe[RuleId::Partition] = detail::bmk({{"X", a}, {"Y", bb + c}, {"Z", c + bb}});
    probe[RuleId::DownwardClosure] =
        detail::bmk({{"X", a}, {"Y", bb}, {"Z", c}, {"V", d}});
    probe[RuleId::Permutation] =
        detail::bmk({{"X", a + bb}, {"Y", c + d}, {"X'", bb + a}, {"Y'", d + c}});
    probe[RuleId::OdSplitFd] = detail::bmk({{"X", a}, {"Y", bb}});
    probe[RuleId::OdSplitCompat] = detail::bmk({{"X", a}, {"Y", bb}});
    probe[RuleId::OdSplitCompose] = detail::bmk({{"X", a}, {"Y", bb}});

    std::set<RuleId> allowed{RuleId::Premise,       RuleId::Definition,
                             RuleId::Reflexivity,   RuleId::Prefix,
                             RuleId::Normalization, RuleId::Transitivity,
                             RuleId::Suffix,        RuleId::Chain};
    for (auto id : derived_) {
        const auto& def = defs_.at(id);
        const auto& binding = probe.at(id);
        ConstraintSet m(def.premises(binding));
        Proof p{def.conclude(binding), def.derive(binding)};
        auto res = detail::check_with(*this, allowed, m, p);
        if (!res.ok)
            throw EngineError(std::string("registered derivation of ") +
                              rule_name(id) + " failed at step " +
                              std::to_string(res.step) + ": " + res.reason);
        allowed.insert(id);
    }
}

// Validate a proof of p.goal from m. Each step must be a declared member, a
// definitional restatement of cited steps, or a rule application whose
// required premises all appear among the cited steps and whose schema
// conclusion covers the step's statement. Statements are compared up to
// canonicalization and shorthand unfolding throughout.
inline CheckResult check_proof(const ConstraintSet& m, const Proof& p) {
    const auto& reg = Registry::get();
    return detail::check_with(reg, reg.all_rules(), m, p);
}

namespace detail {

inline Dependency apply_rule(RuleId rule, const Binding& binding,
                             const std::vector<Dependency>& premises) {
    const auto& def = Registry::get().rule(rule);
    if (def.side) def.side(binding);
    auto have = exp_union(premises);
    auto required = def.premises(binding);
    for (std::size_t i = 0; i < required.size(); ++i)
        if (!expansion_subset(expansion(required[i]), have))
            throw RuleError(std::string("premise ") + std::to_string(i + 1) +
                            " of " + rule_name(rule) + " is missing");
    return def.conclude(binding);
}

}  // namespace detail

inline Dependency apply_axiom(RuleId rule, const Binding& binding,
                              const std::vector<Dependency>& premises = {}) {
    if (!Registry::get().known(rule) || !Registry::get().rule(rule).axiom)
        throw RuleError(std::string(rule_name(rule)) + " is not a primitive rule");
    return detail::apply_rule(rule, binding, premises);
}

inline Dependency apply_derived(RuleId rule, const Binding& binding,
                                const std::vector<Dependency>& premises = {}) {
    if (!Registry::get().known(rule) || Registry::get().rule(rule).axiom)
        throw RuleError(std::string(rule_name(rule)) + " is not a derived rule");
    return detail::apply_rule(rule, binding, premises);
}

// Replace every derived-rule step by its registered derivation (recursively)
// until only primitive rules, Premise, and Definition steps remain. The
// resulting proof has the same goal and passes the checker whenever the
// original does.
inline Proof expand_to_primitives(const Proof& p) {
    Proof out = p;
    const auto& reg = Registry::get();
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t k = 1; k <= out.steps.size(); ++k) {
            const auto st = out.steps[k - 1];
            if (st.rule == RuleId::Premise || st.rule == RuleId::Definition)
                continue;
            const auto& def = reg.rule(st.rule);
            if (def.axiom) continue;

            auto gen = def.derive(st.binding);
            std::size_t nh = def.premises(st.binding).size();
            std::vector<ProofStep> block(gen.begin() + nh, gen.end());
            for (auto& bs : block) {
                std::vector<std::size_t> remapped;
                for (auto r : bs.premises) {
                    if (r <= nh)
                        remapped.insert(remapped.end(), st.premises.begin(),
                                        st.premises.end());
                    else
                        remapped.push_back(k + (r - nh) - 1);
                }
                std::sort(remapped.begin(), remapped.end());
                remapped.erase(std::unique(remapped.begin(), remapped.end()),
                               remapped.end());
                bs.premises = std::move(remapped);
            }
            // keep the original statement visible for later citations
            block.push_back(ProofStep{st.statement, RuleId::Definition,
                                      {k + block.size() - 1}, {}});
            std::size_t grow = block.size() - 1;
            std::vector<ProofStep> next(out.steps.begin(), out.steps.begin() + (k - 1));
            next.insert(next.end(), block.begin(), block.end());
            for (std::size_t i = k; i < out.steps.size(); ++i) {
                auto s2 = out.steps[i];
                for (auto& r : s2.premises)
                    if (r >= k) r += grow;
                next.push_back(std::move(s2));
            }
            out.steps = std::move(next);
            changed = true;
            break;
        }
    }
    return out;
}

// ---- bounded forward-chaining proof search ----

struct SearchBudget {
    std::size_t max_depth = 4;     // chaining rounds
    std::size_t max_list_len = 3;  // canonical list length cap for new facts
};

struct SearchStats {
    std::size_t rounds = 0;
    std::size_t facts = 0;
    bool exhausted = false;  // budget ran out before the goal was reached
};

struct SearchResult {
    std::optional<Proof> proof;
    SearchStats stats;
};

namespace detail {

struct FactKey {
    MarkedList lhs, rhs;
    auto operator<=>(const FactKey&) const = default;
};

struct FactHow {
    RuleId rule = RuleId::Premise;
    Binding binding;
    std::vector<FactKey> from;          // facts this one was derived from
    std::optional<Dependency> member;   // for Premise facts
};

using FactMap = std::map<FactKey, FactHow>;

inline FactKey key_of(const OrderDep& od) {
    return {canonicalize(od.lhs), canonicalize(od.rhs)};
}

inline bool have_compat(const FactMap& facts, const MarkedList& u,
                        const MarkedList& v) {
    auto a = canonicalize(u + v), b = canonicalize(v + u);
    return facts.count({a, b}) && facts.count({b, a});
}

}  // namespace detail

// Forward chaining from m: seeds every declared statement plus all
// Reflexivity instances over bounded canonical lists, then closes under
// Suffix, single-attribute Prefix, Transitivity, and short single-attribute
// Chains, canonicalizing throughout. Sound always; complete only within the
// budget. Found proofs pass check_proof.
inline SearchResult search_proof(const ConstraintSet& m, const Dependency& goal,
                                 const SearchBudget& budget = {}) {
    for (const auto& a : goal.attributes())
        if (!m.universe.count(a))
            throw SchemaError("goal attribute " + a.name + " outside the universe");

    // a directly declared goal needs no search
    for (const auto& d : m.deps)
        if (same_statement(d, goal)) {
            Proof p{goal, {ProofStep{d, RuleId::Premise, {}, {}}}};
            return {p, {0, 0, false}};
        }

    std::size_t cap = budget.max_list_len;
    for (const auto& d : m.deps)
        for (const auto& od : expansion(d))
            cap = std::max({cap, od.lhs.size(), od.rhs.size()});
    for (const auto& od : expansion(goal))
        cap = std::max({cap, od.lhs.size(), od.rhs.size()});

    detail::FactMap facts;
    auto note = [&](const OrderDep& od, detail::FactHow how) {
        auto k = detail::key_of(od);
        if (k.lhs.size() > cap || k.rhs.size() > cap) return false;
        return facts.emplace(std::move(k), std::move(how)).second;
    };

    for (const auto& d : m.deps)
        for (const auto& od : expansion(d))
            note(od, {RuleId::Premise, {}, {}, d});

    std::vector<Attribute> attrs(m.universe.begin(), m.universe.end());
    for (const auto& l : canonical_lists(m.universe, cap)) {
        for (std::size_t cut = 0; cut <= l.size(); ++cut) {
            MarkedList x(std::vector<Attribute>(l.items.begin(),
                                                l.items.begin() + cut));
            MarkedList y(std::vector<Attribute>(l.items.begin() + cut,
                                                l.items.end()));
            note({l, x}, {RuleId::Reflexivity,
                          detail::bmk({{"X", x}, {"Y", y}}), {}, {}});
        }
    }

    auto needed = expansion(goal);
    auto done = [&] {
        for (const auto& od : needed)
            if (!facts.count(detail::key_of(od))) return false;
        return true;
    };

    SearchStats stats;
    bool reached = done();
    while (!reached && stats.rounds < budget.max_depth) {
        ++stats.rounds;
        std::vector<std::pair<detail::FactKey, detail::FactHow>> fresh;
        auto snapshot = facts;  // derive from the round's start state

        for (const auto& [k, how] : snapshot) {
            // Suffix: X ↦ Y gives X ↔ YX
            Binding sb = detail::bmk({{"X", k.lhs}, {"Y", k.rhs}});
            OrderDep s1{k.lhs, k.rhs + k.lhs}, s2{k.rhs + k.lhs, k.lhs};
            fresh.push_back({detail::key_of(s1),
                             {RuleId::Suffix, sb, {k}, {}}});
            fresh.push_back({detail::key_of(s2),
                             {RuleId::Suffix, sb, {k}, {}}});
            // single-attribute Prefix
            for (const auto& a : attrs) {
                MarkedList za{a};
                OrderDep pd{za + k.lhs, za + k.rhs};
                fresh.push_back({detail::key_of(pd),
                                 {RuleId::Prefix,
                                  detail::bmk({{"X", k.lhs}, {"Y", k.rhs},
                                               {"Z", za}}),
                                  {k}, {}}});
            }
        }
        // Transitivity joins
        for (const auto& [k1, h1] : snapshot) {
            auto lo = snapshot.lower_bound({k1.rhs, MarkedList{}});
            for (auto it = lo; it != snapshot.end() && it->first.lhs == k1.rhs; ++it) {
                OrderDep td{k1.lhs, it->first.rhs};
                fresh.push_back({detail::key_of(td),
                                 {RuleId::Transitivity,
                                  detail::bmk({{"X", k1.lhs}, {"Y", k1.rhs},
                                               {"Z", it->first.rhs}}),
                                  {k1, it->first}, {}}});
            }
        }
        // single-attribute compatibility chains with one middle
        for (const auto& a : attrs) {
            for (const auto& b : attrs) {
                if (!(a < b)) continue;
                MarkedList la{a}, lb{b};
                if (detail::have_compat(snapshot, la, lb)) continue;
                for (const auto& e1 : attrs) {
                    if (e1 == a || e1 == b) continue;
                    MarkedList le{e1};
                    auto side = [&](const MarkedList& mid) {
                        return detail::have_compat(snapshot, mid + la, mid + lb);
                    };
                    auto cite_compat = [&](const MarkedList& u, const MarkedList& v,
                                           std::vector<detail::FactKey>& out2) {
                        out2.push_back({canonicalize(u + v), canonicalize(v + u)});
                        out2.push_back({canonicalize(v + u), canonicalize(u + v)});
                    };
                    if (detail::have_compat(snapshot, la, le) &&
                        detail::have_compat(snapshot, le, lb) && side(le)) {
                        std::vector<detail::FactKey> from;
                        cite_compat(la, le, from);
                        cite_compat(le, lb, from);
                        cite_compat(le + la, le + lb, from);
                        Binding cb{{{"X", la}, {"Z", lb}, {"Y1", le}}, 1};
                        OrderDep c1{canonicalize(la + lb), canonicalize(lb + la)};
                        OrderDep c2{canonicalize(lb + la), canonicalize(la + lb)};
                        fresh.push_back({detail::key_of(c1), {RuleId::Chain, cb, from, {}}});
                        fresh.push_back({detail::key_of(c2), {RuleId::Chain, cb, from, {}}});
                    }
                }
            }
        }

        bool any = false;
        for (auto& [k, how] : fresh) {
            if (k.lhs.size() > cap || k.rhs.size() > cap) continue;
            if (facts.emplace(k, std::move(how)).second) any = true;
        }
        stats.facts = facts.size();
        reached = done();
        if (!any) break;
    }
    stats.facts = facts.size();

    if (!reached) {
        stats.exhausted = true;
        return {std::nullopt, stats};
    }

    // reconstruct: topologically emit the facts the goal depends on
    Proof proof{goal, {}};
    std::map<detail::FactKey, std::size_t> emitted;
    std::map<std::string, std::size_t> premise_steps;

    std::function<std::size_t(const detail::FactKey&)> emit =
        [&](const detail::FactKey& k) -> std::size_t {
        auto it = emitted.find(k);
        if (it != emitted.end()) return it->second;
        const auto& how = facts.at(k);
        if (how.rule == RuleId::Premise) {
            auto name = fingerprint(ConstraintSet({*how.member}));
            auto pit = premise_steps.find(name);
            if (pit != premise_steps.end()) {
                emitted[k] = pit->second;
                return pit->second;
            }
            proof.steps.push_back(ProofStep{*how.member, RuleId::Premise, {}, {}});
            premise_steps[name] = proof.steps.size();
            emitted[k] = proof.steps.size();
            return proof.steps.size();
        }
        std::vector<std::size_t> refs;
        for (const auto& f : how.from) refs.push_back(emit(f));
        std::sort(refs.begin(), refs.end());
        refs.erase(std::unique(refs.begin(), refs.end()), refs.end());
        proof.steps.push_back(ProofStep{Dependency(OrderDep{k.lhs, k.rhs}),
                                        how.rule, std::move(refs), how.binding});
        emitted[k] = proof.steps.size();
        return proof.steps.size();
    };

    std::vector<std::size_t> goal_refs;
    for (const auto& od : needed) goal_refs.push_back(emit(detail::key_of(od)));
    std::sort(goal_refs.begin(), goal_refs.end());
    goal_refs.erase(std::unique(goal_refs.begin(), goal_refs.end()),
                    goal_refs.end());

    if (proof.steps.empty() ||
        !same_statement(proof.steps.back().statement, goal))
        proof.steps.push_back(
            ProofStep{goal, RuleId::Definition, std::move(goal_refs), {}});
    return {proof, stats};
}

// ---- bridging functional dependencies ----

inline OrderDep fd_to_od(const FuncDep& fd,
                         std::optional<MarkedList> lhs_order = std::nullopt,
                         std::optional<MarkedList> rhs_order = std::nullopt) {
    MarkedList x = lhs_order ? *lhs_order : sorted_list(fd.lhs);
    MarkedList y = rhs_order ? *rhs_order : sorted_list(fd.rhs);
    if (x.to_set() != fd.lhs || x.size() != fd.lhs.size())
        throw SchemaError("lhs order must enumerate the lhs set exactly once");
    if (y.to_set() != fd.rhs || y.size() != fd.rhs.size())
        throw SchemaError("rhs order must enumerate the rhs set exactly once");
    return {x, canonicalize(x + y)};
}

inline FuncDep od_to_fd(const OrderDep& od) {
    MarkedList x = canonicalize(od.lhs), r = canonicalize(od.rhs);
    if (r.size() < x.size())
        throw SchemaError("rhs does not extend the lhs");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!(r[i] == x[i]))
            throw SchemaError("rhs must start with the lhs to express a "
                              "functional dependency");
    AttrSet ys;
    for (std::size_t i = x.size(); i < r.size(); ++i) ys.insert(r[i]);
    return {x.to_set(), ys};
}

}  // namespace odengine
