#pragma once

// Exact implication testing. A dependency is a universally quantified
// property of row pairs, so implication over all instances reduces to
// implication over all abstract two-row instances: one relation out of
// {Lt, Eq, Gt} per attribute. Enumerating all 3^n patterns is therefore a
// sound and complete decision procedure.

#include <cstdlib>
#include <optional>

#include "instances.hpp"

namespace odengine {

enum class Rel { Eq, Lt, Gt };  // enumeration order; Eq varies slowest

// Abstract two-row instance: the relation of row 1 to row 2 per attribute.
// Attributes absent from the map are considered Eq.
struct PairPattern {
    std::map<Attribute, Rel> rel;

    Rel at(const Attribute& a) const {
        auto it = rel.find(a);
        return it == rel.end() ? Rel::Eq : it->second;
    }

    bool operator==(const PairPattern&) const = default;
};

inline Ordering pattern_order(const PairPattern& p, const MarkedList& x) {
    for (const auto& a : x) {
        switch (p.at(a)) {
            case Rel::Lt: return Ordering::Precedes;
            case Rel::Gt: return Ordering::Follows;
            case Rel::Eq: break;
        }
    }
    return Ordering::Equal;
}

namespace detail {

inline bool od_ok(Ordering x, Ordering y) {
    // forward pair: row1 ⪯ row2 on x forces row1 ⪯ row2 on y
    if (x != Ordering::Follows && y == Ordering::Follows) return false;
    // mirrored pair
    if (x != Ordering::Precedes && y == Ordering::Precedes) return false;
    return true;
}

}  // namespace detail

// Does the two-row instance described by p satisfy d?
inline bool pattern_satisfies(const PairPattern& p, const Dependency& d) {
    switch (d.kind()) {
        case DepKind::OrderDep: {
            const auto& o = d.get<OrderDep>();
            return detail::od_ok(pattern_order(p, o.lhs), pattern_order(p, o.rhs));
        }
        case DepKind::OrderEquiv: {
            const auto& o = d.get<OrderEquiv>();
            auto a = pattern_order(p, o.lhs), b = pattern_order(p, o.rhs);
            return detail::od_ok(a, b) && detail::od_ok(b, a);
        }
        case DepKind::OrderCompat: {
            const auto& o = d.get<OrderCompat>();
            auto a = pattern_order(p, o.lhs + o.rhs);
            auto b = pattern_order(p, o.rhs + o.lhs);
            return detail::od_ok(a, b) && detail::od_ok(b, a);
        }
        case DepKind::FuncDep: {
            const auto& f = d.get<FuncDep>();
            for (const auto& a : f.lhs)
                if (p.at(a) != Rel::Eq) return true;
            for (const auto& a : f.rhs)
                if (p.at(a) != Rel::Eq) return false;
            return true;
        }
        case DepKind::Constant:
            return p.at(d.get<Constant>().attr) == Rel::Eq;
    }
    return true;
}

// Turn a pattern into a concrete two-row table over the given columns,
// using 0/1 cells.
inline TableInstance materialize(const PairPattern& p,
                                 const std::vector<Attribute>& columns) {
    std::vector<Value> r1, r2;
    for (const auto& a : columns) {
        switch (p.at(a)) {
            case Rel::Eq: r1.push_back(0); r2.push_back(0); break;
            case Rel::Lt: r1.push_back(0); r2.push_back(1); break;
            case Rel::Gt: r1.push_back(1); r2.push_back(0); break;
        }
    }
    return TableInstance(columns, {r1, r2});
}

enum class Verdict { Implied, NotImplied };

struct DecideResult {
    Verdict verdict;
    // present iff NotImplied: the first falsifying two-row instance
    std::optional<PairPattern> pattern;
    std::optional<TableInstance> counterexample;

    bool implied() const { return verdict == Verdict::Implied; }
};

struct DecideOptions {
    std::size_t max_attrs = 16;
};

namespace detail {

// Dependency precompiled against a fixed attribute ordering, so the
// enumeration loop works on flat index vectors.
struct CompiledDep {
    enum class Shape { Od, TwoWay, Fd } shape;
    std::vector<std::size_t> a1, b1;  // lists (or sets) as digit positions
    std::vector<std::size_t> a2, b2;  // reverse concatenation for ∼ / ↔

    static std::vector<std::size_t> index(const MarkedList& x,
                                          const std::map<Attribute, std::size_t>& at) {
        std::vector<std::size_t> r;
        r.reserve(x.size());
        for (const auto& a : x) r.push_back(at.at(a));
        return r;
    }

    static CompiledDep compile(const Dependency& d,
                               const std::map<Attribute, std::size_t>& at) {
        CompiledDep c;
        switch (d.kind()) {
            case DepKind::OrderDep: {
                const auto& o = d.get<OrderDep>();
                c.shape = Shape::Od;
                c.a1 = index(o.lhs, at);
                c.b1 = index(o.rhs, at);
                break;
            }
            case DepKind::OrderEquiv: {
                const auto& o = d.get<OrderEquiv>();
                c.shape = Shape::TwoWay;
                c.a1 = index(o.lhs, at);
                c.b1 = index(o.rhs, at);
                c.a2 = c.b1;
                c.b2 = c.a1;
                break;
            }
            case DepKind::OrderCompat: {
                const auto& o = d.get<OrderCompat>();
                c.shape = Shape::TwoWay;
                c.a1 = index(o.lhs + o.rhs, at);
                c.b1 = index(o.rhs + o.lhs, at);
                c.a2 = c.b1;
                c.b2 = c.a1;
                break;
            }
            case DepKind::FuncDep: {
                const auto& f = d.get<FuncDep>();
                c.shape = Shape::Fd;
                c.a1 = index(sorted_list(f.lhs), at);
                c.b1 = index(sorted_list(f.rhs), at);
                break;
            }
            case DepKind::Constant: {
                c.shape = Shape::Fd;
                c.b1 = {at.at(d.get<Constant>().attr)};
                break;
            }
        }
        return c;
    }

    static Ordering order(const std::vector<std::size_t>& pos,
                          const std::vector<Rel>& digits) {
        for (auto i : pos) {
            if (digits[i] == Rel::Lt) return Ordering::Precedes;
            if (digits[i] == Rel::Gt) return Ordering::Follows;
        }
        return Ordering::Equal;
    }

    bool satisfied(const std::vector<Rel>& digits) const {
        switch (shape) {
            case Shape::Od:
                return od_ok(order(a1, digits), order(b1, digits));
            case Shape::TwoWay:
                return od_ok(order(a1, digits), order(b1, digits)) &&
                       od_ok(order(a2, digits), order(b2, digits));
            case Shape::Fd:
                for (auto i : a1)
                    if (digits[i] != Rel::Eq) return true;
                for (auto i : b1)
                    if (digits[i] != Rel::Eq) return false;
                return true;
        }
        return true;
    }
};

}  // namespace detail

// Is goal implied by m over every instance? Enumerates patterns over the
// attributes mentioned by m and goal (the rest of the universe cannot affect
// either side and is held Eq), in lexicographic order: attributes sorted by
// name, most significant first, relation order Eq < Lt < Gt. The first
// falsifying pattern is materialized over the full universe.
inline DecideResult decide(const ConstraintSet& m, const Dependency& goal,
                           const DecideOptions& opt = {}) {
    for (const auto& a : goal.attributes())
        if (!m.universe.count(a))
            throw SchemaError("goal attribute " + a.name + " outside the universe");

    AttrSet relevant = goal.attributes();
    for (const auto& d : m.deps) {
        auto as = d.attributes();
        relevant.insert(as.begin(), as.end());
    }
    if (relevant.size() > opt.max_attrs)
        throw ResourceError("pattern enumeration over " +
                            std::to_string(relevant.size()) +
                            " attributes exceeds the cap of " +
                            std::to_string(opt.max_attrs));

    std::vector<Attribute> attrs(relevant.begin(), relevant.end());
    std::map<Attribute, std::size_t> at;
    for (std::size_t i = 0; i < attrs.size(); ++i) at.emplace(attrs[i], i);

    std::vector<detail::CompiledDep> premises;
    premises.reserve(m.deps.size());
    for (const auto& d : m.deps)
        premises.push_back(detail::CompiledDep::compile(d, at));
    auto target = detail::CompiledDep::compile(goal, at);

    std::vector<Rel> digits(attrs.size(), Rel::Eq);
    const Rel order[3] = {Rel::Eq, Rel::Lt, Rel::Gt};
    std::vector<std::size_t> odo(attrs.size(), 0);

    while (true) {
        bool premises_ok = true;
        for (const auto& p : premises)
            if (!p.satisfied(digits)) {
                premises_ok = false;
                break;
            }
        if (premises_ok && !target.satisfied(digits)) {
            PairPattern pat;
            for (std::size_t i = 0; i < attrs.size(); ++i)
                pat.rel.emplace(attrs[i], digits[i]);
            std::vector<Attribute> cols(m.universe.begin(), m.universe.end());
            return {Verdict::NotImplied, pat, materialize(pat, cols)};
        }
        // advance odometer; last attribute varies fastest
        std::size_t i = attrs.size();
        while (i > 0) {
            --i;
            if (++odo[i] < 3) {
                digits[i] = order[odo[i]];
                break;
            }
            odo[i] = 0;
            digits[i] = order[0];
            if (i == 0) return {Verdict::Implied, std::nullopt, std::nullopt};
        }
        if (attrs.empty()) break;
    }
    return {Verdict::Implied, std::nullopt, std::nullopt};
}

// Every implied order dependency between canonical lists of bounded length.
inline std::vector<OrderDep> closure(const ConstraintSet& m, std::size_t max_len,
                                     const DecideOptions& opt = {}) {
    std::vector<OrderDep> out;
    auto lists = canonical_lists(m.universe, max_len);
    for (const auto& x : lists)
        for (const auto& y : lists)
            if (decide(m, OrderDep{x, y}, opt).implied())
                out.push_back({x, y});
    return out;
}

// Mutual implication of every member.
inline bool equivalent_sets(const ConstraintSet& m1, const ConstraintSet& m2,
                            const DecideOptions& opt = {}) {
    AttrSet all = m1.universe;
    all.insert(m2.universe.begin(), m2.universe.end());
    ConstraintSet a(m1.deps, all), b(m2.deps, all);
    for (const auto& d : m2.deps)
        if (!decide(a, d, opt).implied()) return false;
    for (const auto& d : m1.deps)
        if (!decide(b, d, opt).implied()) return false;
    return true;
}

inline bool is_constant(const ConstraintSet& m, const Attribute& a,
                        const DecideOptions& opt = {}) {
    return decide(m, Constant{a}, opt).implied();
}

}  // namespace odengine
