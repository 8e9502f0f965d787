#pragma once

// Optimizer-facing rewrites: dropping redundant order-by attributes, shrinking
// group-by sets, and checking when one sort order can stand in for another.
// Every committed change is certified through the decision procedure.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "decide.hpp"

namespace odengine {

// An order-by attribute list, ascending throughout; duplicates collapse to the
// leftmost occurrence.
struct OrderSpec {
    MarkedList attrs;

    OrderSpec() = default;
    explicit OrderSpec(MarkedList xs) : attrs(canonicalize(xs)) {}
    OrderSpec(std::initializer_list<Attribute> xs) : attrs(canonicalize(MarkedList(xs))) {}

    auto operator<=>(const OrderSpec&) const = default;
};

// A group-by attribute set.
struct GroupSpec {
    AttrSet attrs;

    GroupSpec() = default;
    explicit GroupSpec(AttrSet xs) : attrs(std::move(xs)) {}

    auto operator<=>(const GroupSpec&) const = default;
};

// One dropped attribute and the certified statement that licensed the drop.
struct Removal {
    Attribute attr;
    std::string rule;  // "Eliminate", "LeftEliminate" or "ClosureEquality"
    Dependency justification;
};

struct RewriteReport {
    MarkedList input;  // canonical input (sorted for the group case)
    MarkedList output;
    std::vector<Removal> removed;

    bool changed() const { return !(input == output); }
};

namespace detail {

inline void require_known(const AttrSet& xs, const ConstraintSet& store,
                          const char* what) {
    for (const auto& a : xs)
        if (!store.universe.count(a))
            throw SchemaError(std::string(what) + " attribute " + a.name +
                              " outside the universe");
}

// Right-to-left sweep over the list; with_od_step additionally drops a
// contiguous block when the block directly to its right orders it.  Each drop
// is certified as order-equivalence against the original list before being
// committed, and passes repeat until a full pass changes nothing.
inline RewriteReport reduce_sweep(const OrderSpec& o, const ConstraintSet& store,
                                  bool with_od_step, const DecideOptions& opt) {
    require_known(o.attrs.to_set(), store, "order-by");
    RewriteReport rep;
    rep.input = o.attrs;
    std::vector<Attribute> cur = o.attrs.items;

    auto certified = [&](const std::vector<Attribute>& next) {
        return decide(store, OrderEquiv{MarkedList(next), rep.input}, opt).implied();
    };

    bool changed = true;
    while (changed) {
        changed = false;
        std::size_t i = cur.size();
        while (i > 0) {
            --i;
            // the prefix determines the current attribute -> drop it
            FuncDep fd{AttrSet(cur.begin(), cur.begin() + i), AttrSet{cur[i]}};
            if (decide(store, fd, opt).implied()) {
                std::vector<Attribute> next = cur;
                next.erase(next.begin() + i);
                if (certified(next)) {
                    rep.removed.push_back({cur[i], "Eliminate", fd});
                    cur = std::move(next);
                    changed = true;
                    continue;
                }
            }
            if (!with_od_step) continue;
            // a block ending here (shortest first) is ordered by a block
            // directly to its right (longest first) -> drop the ordered block
            bool dropped = false;
            for (std::size_t len = 1; len <= i + 1 && !dropped; ++len) {
                std::size_t j = i + 1 - len;
                MarkedList y(std::vector<Attribute>(cur.begin() + j, cur.begin() + i + 1));
                for (std::size_t k = cur.size(); k > i + 1 && !dropped; --k) {
                    OrderDep od{MarkedList(std::vector<Attribute>(cur.begin() + i + 1,
                                                                  cur.begin() + k)),
                                y};
                    if (!decide(store, od, opt).implied()) continue;
                    std::vector<Attribute> next = cur;
                    next.erase(next.begin() + j, next.begin() + i + 1);
                    if (!certified(next)) continue;
                    for (const auto& a : y)
                        rep.removed.push_back({a, "LeftEliminate", od});
                    cur = std::move(next);
                    i = j;  // resume just left of the dropped block
                    dropped = true;
                    changed = true;
                }
            }
        }
    }

    rep.output = MarkedList(std::move(cur));
    if (!decide(store, OrderEquiv{rep.output, rep.input}, opt).implied())
        throw EngineError("rewrite produced a non-equivalent order-by list");
    return rep;
}

}  // namespace detail

// Drop order-by attributes that their prefixes functionally determine.
inline RewriteReport reduce_order(const OrderSpec& o, const ConstraintSet& store,
                                  const DecideOptions& opt = {}) {
    return detail::reduce_sweep(o, store, false, opt);
}

// reduce_order plus block drops licensed by order dependencies on the right.
inline RewriteReport reduce_order_star(const OrderSpec& o, const ConstraintSet& store,
                                       const DecideOptions& opt = {}) {
    return detail::reduce_sweep(o, store, true, opt);
}

// Shrink a group-by set without changing its partition: repeatedly remove the
// least-preferred attribute the remaining ones determine.  preference lists
// attributes to keep, most-preferred first; unlisted attributes rank after it
// in name order.
inline RewriteReport reduce_group_by(const GroupSpec& g, const ConstraintSet& store,
                                     const std::vector<Attribute>& preference = {},
                                     const DecideOptions& opt = {}) {
    detail::require_known(g.attrs, store, "group-by");
    RewriteReport rep;
    rep.input = sorted_list(g.attrs);

    auto rank = [&](const Attribute& a) {
        std::size_t p = preference.size();
        for (std::size_t i = 0; i < preference.size(); ++i)
            if (preference[i] == a) {
                p = i;
                break;
            }
        return std::pair<std::size_t, Attribute>(p, a);
    };

    AttrSet cur = g.attrs;
    bool changed = true;
    while (changed) {
        changed = false;
        std::optional<Attribute> victim;
        std::optional<FuncDep> why;
        for (const auto& a : cur) {
            AttrSet rest = cur;
            rest.erase(a);
            FuncDep fd{rest, AttrSet{a}};
            if (!decide(store, fd, opt).implied()) continue;
            if (!victim || rank(a) > rank(*victim)) {
                victim = a;
                why = fd;
            }
        }
        if (victim) {
            rep.removed.push_back({*victim, "ClosureEquality", *why});
            cur.erase(*victim);
            changed = true;
        }
    }

    rep.output = sorted_list(cur);
    AttrSet dropped;
    for (const auto& r : rep.removed) dropped.insert(r.attr);
    if (!dropped.empty() && !decide(store, FuncDep{cur, dropped}, opt).implied())
        throw EngineError("rewrite produced a non-equivalent group-by set");
    return rep;
}

// A stream sorted by plan also satisfies an order-by on query.
inline bool can_substitute_order(const OrderSpec& plan, const OrderSpec& query,
                                 const ConstraintSet& store,
                                 const DecideOptions& opt = {}) {
    detail::require_known(plan.attrs.to_set(), store, "plan");
    detail::require_known(query.attrs.to_set(), store, "query");
    return decide(store, OrderDep{plan.attrs, query.attrs}, opt).implied();
}

}  // namespace odengine
