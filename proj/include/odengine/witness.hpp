#pragma once

// Constructive counterexample machinery: given a constraint set, build a
// table that satisfies every member yet falsifies every non-implied
// dependency (over canonical lists bounded by the universe size).  The
// table is assembled from split blocks (tie the closure, move the rest),
// swap blocks (tie a context, move a pair in opposite directions) and a
// value-shifting append that keeps blocks from interfering.

#include <bit>
#include <limits>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "decide.hpp"
#include "instances.hpp"

namespace odengine {

// Attributes a swap pair must tie on.
struct Context {
    AttrSet attrs;
    bool operator==(const Context&) const = default;
};

// Largest tie-set that still leaves room for a swap between the pair.
struct MaximalContext {
    std::pair<Attribute, Attribute> pair;
    Context context;
    bool operator==(const MaximalContext&) const = default;
};

// Provenance of one appended sub-construction; debug info only.
struct BlockNote {
    std::size_t first_row = 0;
    std::size_t row_count = 0;
    std::string note;
    bool operator==(const BlockNote&) const = default;
};

struct WitnessTable {
    TableInstance table;
    std::vector<BlockNote> blocks;
};

// Row union with t1 shifted so its global minimum is 0 and t2 shifted to
// sit strictly above t1's maximum.  Cross-part pairs are strictly
// ascending in every column, so appending never creates a swap and the
// only splits it can create are of the trivial []-premise form.
inline TableInstance append(const TableInstance& t1, const TableInstance& t2) {
    if (t1.columns() != t2.columns())
        throw SchemaError("append requires identical column lists");
    auto scan = [](const TableInstance& t, std::int64_t& lo, std::int64_t& hi) {
        for (std::size_t c = 0; c < t.column_count(); ++c)
            for (std::size_t r = 0; r < t.row_count(); ++r) {
                const Value& v = t.cell(r, c);
                if (!v.is_int())
                    throw TypeError("append requires integer cells");
                lo = std::min(lo, v.as_int());
                hi = std::max(hi, v.as_int());
            }
    };
    const bool any1 = t1.row_count() > 0 && t1.column_count() > 0;
    const bool any2 = t2.row_count() > 0 && t2.column_count() > 0;
    constexpr std::int64_t big = std::numeric_limits<std::int64_t>::max();
    std::int64_t lo1 = big, hi1 = -big, lo2 = big, hi2 = -big;
    scan(t1, lo1, hi1);
    scan(t2, lo2, hi2);
    if (!any1) lo1 = hi1 = 0;
    if (!any2) lo2 = hi2 = 0;
    const std::int64_t shift1 = -lo1;
    const std::int64_t shift2 = any1 ? (hi1 + shift1) + 1 - lo2 : -lo2;
    std::vector<std::vector<Value>> rows;
    auto emit = [&](const TableInstance& t, std::int64_t shift) {
        for (std::size_t r = 0; r < t.row_count(); ++r) {
            std::vector<Value> row;
            for (std::size_t c = 0; c < t.column_count(); ++c)
                row.emplace_back(t.cell(r, c).as_int() + shift);
            rows.push_back(std::move(row));
        }
    };
    emit(t1, shift1);
    emit(t2, shift2);
    return TableInstance(t1.columns(), rows);
}

namespace detail {

inline WitnessTable wt_append(const WitnessTable& a, const WitnessTable& b) {
    WitnessTable r;
    r.table = append(a.table, b.table);
    r.blocks = a.blocks;
    for (BlockNote n : b.blocks) {
        n.first_row += a.table.row_count();
        r.blocks.push_back(std::move(n));
    }
    return r;
}

inline std::vector<Attribute> sorted_universe(const ConstraintSet& m) {
    return {m.universe.begin(), m.universe.end()};
}

inline AttrSet constant_attrs(const ConstraintSet& m, const DecideOptions& opt) {
    AttrSet c;
    for (const auto& a : m.universe)
        if (is_constant(m, a, opt)) c.insert(a);
    return c;
}

inline MarkedList strip(const MarkedList& l, const AttrSet& drop) {
    MarkedList r;
    for (const auto& a : l)
        if (!drop.count(a)) r.items.push_back(a);
    return r;
}

inline AttrSet strip(const AttrSet& s, const AttrSet& drop) {
    AttrSet r;
    for (const auto& a : s)
        if (!drop.count(a)) r.insert(a);
    return r;
}

// Delete constant attributes from a dependency.  Constants tie in every
// satisfying table, so this preserves meaning over the shrunk universe.
inline std::optional<Dependency> project_dep(const Dependency& d,
                                             const AttrSet& drop) {
    switch (d.kind()) {
        case DepKind::OrderDep: {
            const auto& o = d.get<OrderDep>();
            OrderDep r{strip(o.lhs, drop), strip(o.rhs, drop)};
            if (r.lhs.empty() && r.rhs.empty()) return std::nullopt;
            return Dependency{r};
        }
        case DepKind::OrderEquiv: {
            const auto& o = d.get<OrderEquiv>();
            OrderEquiv r{strip(o.lhs, drop), strip(o.rhs, drop)};
            if (r.lhs.empty() && r.rhs.empty()) return std::nullopt;
            return Dependency{r};
        }
        case DepKind::OrderCompat: {
            const auto& o = d.get<OrderCompat>();
            OrderCompat r{strip(o.lhs, drop), strip(o.rhs, drop)};
            if (r.lhs.empty() && r.rhs.empty()) return std::nullopt;
            return Dependency{r};
        }
        case DepKind::FuncDep: {
            const auto& o = d.get<FuncDep>();
            FuncDep r{strip(o.lhs, drop), strip(o.rhs, drop)};
            if (r.rhs.empty()) return std::nullopt;
            return Dependency{r};
        }
        case DepKind::Constant: {
            const auto& o = d.get<Constant>();
            if (drop.count(o.attr)) return std::nullopt;
            return d;
        }
    }
    return std::nullopt;
}

inline ConstraintSet project_out(const ConstraintSet& m, const AttrSet& drop) {
    std::vector<Dependency> ds;
    for (const auto& d : m.deps)
        if (auto p = project_dep(d, drop)) ds.push_back(*p);
    return ConstraintSet(std::move(ds), strip(m.universe, drop));
}

// A swap between a and b tying ctx exists in some satisfying table iff
// [ctx..,a] ~ [ctx..,b] is not implied.  Monotone: shrinking ctx keeps
// the property, so maximal swappable sets are well defined.
inline bool swappable(const ConstraintSet& m, const AttrSet& ctx,
                      const Attribute& a, const Attribute& b,
                      const DecideOptions& opt) {
    MarkedList va, vb;
    for (const auto& w : ctx) {
        va.items.push_back(w);
        vb.items.push_back(w);
    }
    va.items.push_back(a);
    vb.items.push_back(b);
    return !decide(m, OrderCompat{va, vb}, opt).implied();
}

}  // namespace detail

// All maximal tie-sets over the non-constant attributes (excluding the
// pair itself) that still permit an (a,b) swap.  Subsets are scanned
// largest first; within a size, by ascending bitmask over sorted attrs.
inline std::vector<MaximalContext> maximal_contexts(
        const ConstraintSet& m, const Attribute& a, const Attribute& b,
        const DecideOptions& opt = {}) {
    std::vector<Attribute> pool;
    for (const auto& w : m.universe)
        if (w != a && w != b && !is_constant(m, w, opt)) pool.push_back(w);
    const std::size_t n = pool.size();
    std::vector<AttrSet> kept;
    for (std::size_t size = n + 1; size-- > 0;) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            if (std::popcount(mask) != static_cast<int>(size)) continue;
            AttrSet v;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (std::uint64_t{1} << i)) v.insert(pool[i]);
            bool covered = false;
            for (const auto& k : kept)
                if (std::includes(k.begin(), k.end(), v.begin(), v.end())) {
                    covered = true;
                    break;
                }
            if (covered) continue;
            if (detail::swappable(m, v, a, b, opt)) kept.push_back(v);
        }
    }
    std::vector<MaximalContext> out;
    for (auto& v : kept)
        out.push_back({{a, b}, Context{std::move(v)}});
    return out;
}

// Two rows per attribute subset: the second row moves exactly the
// attributes outside the subset's closure.  Ties within a block hit the
// closure, so no implied one-way dependency can be split; blocks are
// append-separated, so nothing else is introduced.
inline WitnessTable build_split_table(const ConstraintSet& m,
                                      const DecideOptions& opt = {}) {
    for (const auto& a : m.universe)
        if (is_constant(m, a, opt))
            throw ConstructionError("split table requires a constant-free set; " +
                                    a.name + " is constant");
    const auto attrs = detail::sorted_universe(m);
    const std::size_t n = attrs.size();
    WitnessTable out;
    out.table = TableInstance(attrs, {});
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        AttrSet xs;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::uint64_t{1} << i)) xs.insert(attrs[i]);
        AttrSet cl;
        for (const auto& a : attrs)
            if (decide(m, FuncDep{xs, AttrSet{a}}, opt).implied()) cl.insert(a);
        if (cl.size() == n) continue;
        std::vector<Value> r0, r1;
        for (const auto& a : attrs) {
            r0.emplace_back(0);
            r1.emplace_back(cl.count(a) ? 0 : 1);
        }
        WitnessTable block;
        block.table = TableInstance(attrs, {r0, r1});
        block.blocks = {{0, 2, "split " + to_text(xs) + " closure " + to_text(cl)}};
        out = detail::wt_append(out, block);
    }
    return out;
}

// Two rows swapping a and b when no attribute can be tied alongside them.
// Attributes ~-reachable from b move with b; everything else moves with a.
// (Tying the unreachable attrs instead can break members shaped like
// [w,a] ~ [w,b], whose swap only shows up under a tied w.)
inline TableInstance build_empty_context_swap(const ConstraintSet& m,
                                              const Attribute& a,
                                              const Attribute& b,
                                              const DecideOptions& opt = {}) {
    if (!m.universe.count(a) || !m.universe.count(b))
        throw SchemaError("swap attributes must belong to the universe");
    for (const auto& w : m.universe)
        if (is_constant(m, w, opt))
            throw ConstructionError("empty-context swap requires a constant-free set; " +
                                    w.name + " is constant");
    if (decide(m, OrderCompat{{a}, {b}}, opt).implied())
        throw ConstructionError("[" + a.name + "] ~ [" + b.name +
                                "] is implied; no swap exists");
    auto reach = [&](const Attribute& start) {
        AttrSet seen{start};
        std::vector<Attribute> queue{start};
        while (!queue.empty()) {
            Attribute x = queue.back();
            queue.pop_back();
            for (const auto& y : m.universe) {
                if (seen.count(y)) continue;
                if (decide(m, OrderCompat{{x}, {y}}, opt).implied()) {
                    seen.insert(y);
                    queue.push_back(y);
                }
            }
        }
        return seen;
    };
    const AttrSet group_a = reach(a), group_b = reach(b);
    if (group_a.count(b))
        throw ConstructionError("a ~-chain connects " + a.name + " and " +
                                b.name + "; no empty-context swap exists");
    const auto attrs = detail::sorted_universe(m);
    std::vector<Value> r0, r1;
    for (const auto& w : attrs) {
        const bool with_b = group_b.count(w) > 0;
        r0.emplace_back(with_b ? 1 : 0);
        r1.emplace_back(with_b ? 0 : 1);
    }
    TableInstance t(attrs, {r0, r1});
    for (const auto& d : m.deps)
        if (!holds(t, d))
            throw ConstructionError(
                "empty-context swap for (" + a.name + "," + b.name +
                ") violates a member; the pair needs a non-empty context");
    return t;
}

namespace detail {

struct BuildCtx {
    DecideOptions opt;
    std::size_t depth = 0;
    std::size_t depth_cap = 0;
    std::map<std::string, WitnessTable> memo;
};

WitnessTable armstrong_impl(const ConstraintSet& m, BuildCtx& ctx);

// Small-universe fallback: scan two-row then four-row tables over values
// {0..3} (rows kept sorted) for one that satisfies the members and
// falsifies every non-implied candidate.
inline WitnessTable swap_base_enumeration(const ConstraintSet& m,
                                          const DecideOptions& opt) {
    const auto attrs = sorted_universe(m);
    const std::size_t n = attrs.size();
    WitnessTable out;
    out.table = TableInstance(attrs, {});
    if (n == 0) return out;

    std::vector<OrderDep> need;
    const auto lists = canonical_lists(m.universe, n);
    for (const auto& x : lists)
        for (const auto& y : lists)
            if (!decide(m, OrderDep{x, y}, opt).implied())
                need.push_back({x, y});

    std::vector<std::vector<Value>> domain;
    {
        std::vector<std::int64_t> digits(n, 0);
        while (true) {
            std::vector<Value> row;
            for (auto d : digits) row.emplace_back(d);
            domain.push_back(std::move(row));
            std::size_t i = n;
            while (i-- > 0) {
                if (++digits[i] < 4) break;
                digits[i] = 0;
                if (i == 0) { digits.clear(); break; }
            }
            if (digits.empty()) break;
        }
    }
    auto ok = [&](const std::vector<std::vector<Value>>& rows)
            -> std::optional<TableInstance> {
        TableInstance t(attrs, rows);
        for (const auto& d : m.deps)
            if (!holds(t, d)) return std::nullopt;
        for (const auto& od : need)
            if (order_dep_holds(t, od.lhs, od.rhs)) return std::nullopt;
        return t;
    };
    for (std::size_t i = 0; i < domain.size(); ++i)
        for (std::size_t j = i; j < domain.size(); ++j)
            if (auto t = ok({domain[i], domain[j]})) {
                out.table = *t;
                out.blocks = {{0, 2, "swap base enumeration"}};
                return out;
            }
    for (std::size_t i = 0; i < domain.size(); ++i)
        for (std::size_t j = i; j < domain.size(); ++j)
            for (std::size_t k = j; k < domain.size(); ++k)
                for (std::size_t l = k; l < domain.size(); ++l)
                    if (auto t = ok({domain[i], domain[j], domain[k], domain[l]})) {
                        out.table = *t;
                        out.blocks = {{0, 4, "swap base enumeration"}};
                        return out;
                    }
    throw EngineError("swap base enumeration found no table; construction bug");
}

// One block per (pair, maximal context): non-empty contexts recurse with
// the context frozen as constants, the empty context gets a direct
// two-row swap.  Caller guarantees a constant-free m.
inline WitnessTable swap_impl(const ConstraintSet& m, BuildCtx& ctx) {
    const auto attrs = sorted_universe(m);
    WitnessTable out;
    out.table = TableInstance(attrs, {});
    if (attrs.size() <= 2) return swap_base_enumeration(m, ctx.opt);
    for (std::size_t i = 0; i < attrs.size(); ++i)
        for (std::size_t j = i + 1; j < attrs.size(); ++j) {
            const Attribute &a = attrs[i], &b = attrs[j];
            for (const auto& mc : maximal_contexts(m, a, b, ctx.opt)) {
                const std::string tag =
                    "swap (" + a.name + "," + b.name + ")";
                if (mc.context.attrs.empty()) {
                    WitnessTable block;
                    block.table = build_empty_context_swap(m, a, b, ctx.opt);
                    block.blocks = {{0, 2, tag + " empty context"}};
                    out = wt_append(out, block);
                    continue;
                }
                ConstraintSet frozen = m;
                for (const auto& v : mc.context.attrs)
                    frozen.add(Constant{v});
                WitnessTable sub = armstrong_impl(frozen, ctx);
                for (auto& note : sub.blocks)
                    note.note = tag + " ctx " + to_text(mc.context.attrs) +
                                " | " + note.note;
                out = wt_append(out, sub);
            }
        }
    return out;
}

inline WitnessTable armstrong_impl(const ConstraintSet& m, BuildCtx& ctx) {
    const std::string key = fingerprint(m);
    if (auto it = ctx.memo.find(key); it != ctx.memo.end()) return it->second;
    if (++ctx.depth > ctx.depth_cap)
        throw EngineError("witness recursion exceeded the universe size; "
                          "construction bug");

    const AttrSet constants = constant_attrs(m, ctx.opt);
    const ConstraintSet proj = project_out(m, constants);
    WitnessTable core = wt_append(build_split_table(proj, ctx.opt),
                                  swap_impl(proj, ctx));

    const auto attrs = sorted_universe(m);
    std::vector<std::vector<Value>> rows;
    if (core.table.row_count() == 0 && !attrs.empty()) {
        rows.emplace_back(attrs.size(), Value{0});
        core.blocks = {{0, 1, "all attributes constant"}};
    } else {
        for (std::size_t r = 0; r < core.table.row_count(); ++r) {
            std::vector<Value> row;
            for (const auto& a : attrs)
                row.push_back(constants.count(a) ? Value{0}
                                                 : core.table.at(r, a));
            rows.push_back(std::move(row));
        }
    }
    WitnessTable result;
    result.table = TableInstance(attrs, rows);
    result.blocks = std::move(core.blocks);

    --ctx.depth;
    ctx.memo.emplace(key, result);
    return result;
}

}  // namespace detail

inline WitnessTable build_swap_table(const ConstraintSet& m,
                                     const DecideOptions& opt = {}) {
    for (const auto& a : m.universe)
        if (is_constant(m, a, opt))
            throw ConstructionError("swap table requires a constant-free set; " +
                                    a.name + " is constant");
    detail::BuildCtx ctx{opt, 0, m.universe.size() + 2, {}};
    return detail::swap_impl(m, ctx);
}

// Split part append swap part, with constant attributes projected out
// first and re-attached as single-valued columns.  Satisfies every
// member; falsifies every non-implied dependency whose lists fit the
// universe.
inline WitnessTable build_armstrong_table(const ConstraintSet& m,
                                          const DecideOptions& opt = {}) {
    detail::BuildCtx ctx{opt, 0, m.universe.size() + 2, {}};
    return detail::armstrong_impl(m, ctx);
}

}  // namespace odengine
