#pragma once

// Core value types for reasoning about lexicographic orderings: attributes,
// marked lists, tuple rows, and the dependency statements built from them.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace odengine {

struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed schema usage: unknown attribute, empty name, ragged table, ...
struct SchemaError : EngineError {
    using EngineError::EngineError;
};

// Comparing an integer cell against a text cell.
struct TypeError : EngineError {
    using EngineError::EngineError;
};

// A rule application whose premises or side conditions do not fit the schema.
struct RuleError : EngineError {
    using EngineError::EngineError;
};

// Witness construction preconditions violated.
struct ConstructionError : EngineError {
    using EngineError::EngineError;
};

// Configured limits exceeded (attribute cap, search budget misuse, ...).
struct ResourceError : EngineError {
    using EngineError::EngineError;
};

struct Attribute {
    std::string name;

    explicit Attribute(std::string n) : name(std::move(n)) {
        if (name.empty()) throw SchemaError("attribute name must be non-empty");
    }

    auto operator<=>(const Attribute&) const = default;
};

using AttrSet = std::set<Attribute>;

// An attribute list; repeats are permitted (they are erased by canonicalize).
struct MarkedList {
    std::vector<Attribute> items;

    MarkedList() = default;
    MarkedList(std::initializer_list<Attribute> xs) : items(xs) {}
    explicit MarkedList(std::vector<Attribute> xs) : items(std::move(xs)) {}

    bool empty() const { return items.empty(); }
    std::size_t size() const { return items.size(); }
    const Attribute& operator[](std::size_t i) const { return items[i]; }
    auto begin() const { return items.begin(); }
    auto end() const { return items.end(); }

    AttrSet to_set() const { return AttrSet(items.begin(), items.end()); }

    bool contains(const Attribute& a) const {
        return std::find(items.begin(), items.end(), a) != items.end();
    }

    auto operator<=>(const MarkedList&) const = default;
};

inline MarkedList operator+(const MarkedList& a, const MarkedList& b) {
    MarkedList r = a;
    r.items.insert(r.items.end(), b.items.begin(), b.items.end());
    return r;
}

// Keep only the leftmost occurrence of each attribute.
inline MarkedList canonicalize(const MarkedList& x) {
    MarkedList r;
    AttrSet seen;
    for (const auto& a : x.items)
        if (seen.insert(a).second) r.items.push_back(a);
    return r;
}

inline MarkedList sorted_list(const AttrSet& s) {
    return MarkedList(std::vector<Attribute>(s.begin(), s.end()));
}

inline std::string to_text(const MarkedList& x) {
    std::string s = "[";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ",";
        s += x[i].name;
    }
    return s + "]";
}

inline std::string to_text(const AttrSet& s) {
    std::string r = "{";
    bool first = true;
    for (const auto& a : s) {
        if (!first) r += ",";
        r += a.name;
        first = false;
    }
    return r + "}";
}

// A table cell: 64-bit integer or text, never mixed within a column.
struct Value {
    std::variant<std::int64_t, std::string> v;

    Value() : v(std::int64_t{0}) {}
    Value(std::int64_t i) : v(i) {}
    Value(int i) : v(std::int64_t{i}) {}
    Value(std::string s) : v(std::move(s)) {}
    Value(const char* s) : v(std::string(s)) {}

    bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
    std::int64_t as_int() const { return std::get<std::int64_t>(v); }
    const std::string& as_text() const { return std::get<std::string>(v); }

    std::strong_ordering compare(const Value& o) const {
        if (v.index() != o.v.index())
            throw TypeError("cannot compare integer cell with text cell");
        if (is_int()) return as_int() <=> o.as_int();
        return as_text() <=> o.as_text();
    }

    bool operator==(const Value& o) const { return v == o.v; }
};

struct Row {
    std::map<Attribute, Value> cells;

    Row() = default;
    explicit Row(std::map<Attribute, Value> c) : cells(std::move(c)) {}

    const Value& at(const Attribute& a) const {
        auto it = cells.find(a);
        if (it == cells.end())
            throw SchemaError("row has no value for attribute " + a.name);
        return it->second;
    }

    bool operator==(const Row&) const = default;
};

enum class Ordering { Precedes, Equal, Follows };

inline const char* to_text(Ordering o) {
    switch (o) {
        case Ordering::Precedes: return "precedes";
        case Ordering::Equal: return "equal";
        case Ordering::Follows: return "follows";
    }
    return "?";
}

// Lexicographic three-way comparison of two rows along list x. The first
// attribute on which the rows differ decides; agreement everywhere (notably
// when x is empty) gives Equal. Repeats in x cannot change the outcome.
inline Ordering lex_compare(const MarkedList& x, const Row& s, const Row& t) {
    for (const auto& a : x) {
        auto c = s.at(a).compare(t.at(a));
        if (c < 0) return Ordering::Precedes;
        if (c > 0) return Ordering::Follows;
    }
    return Ordering::Equal;
}

// s precedes-or-equals t along x.
inline bool lex_leq(const MarkedList& x, const Row& s, const Row& t) {
    return lex_compare(x, s, t) != Ordering::Follows;
}

// Dependency statements.
//
//   OrderDep    lhs ↦ rhs    sorted by lhs implies sorted by rhs
//   OrderEquiv  lhs ↔ rhs    both directions
//   OrderCompat lhs ∼ rhs    lhs+rhs ↔ rhs+lhs by definition
//   FuncDep     lhs ⇒ rhs    equality on lhs forces equality on rhs
//   Constant    attr         single value across all rows

struct OrderDep {
    MarkedList lhs, rhs;
    auto operator<=>(const OrderDep&) const = default;
};

struct OrderEquiv {
    MarkedList lhs, rhs;
    auto operator<=>(const OrderEquiv&) const = default;
};

struct OrderCompat {
    MarkedList lhs, rhs;
    auto operator<=>(const OrderCompat&) const = default;
};

struct FuncDep {
    AttrSet lhs, rhs;
    auto operator<=>(const FuncDep&) const = default;
};

struct Constant {
    Attribute attr;
    auto operator<=>(const Constant&) const = default;
};

enum class DepKind { OrderDep, OrderEquiv, OrderCompat, FuncDep, Constant };

class Dependency {
public:
    using Node = std::variant<OrderDep, OrderEquiv, OrderCompat, FuncDep, Constant>;

    Dependency(OrderDep d) : node_(std::move(d)) {}
    Dependency(OrderEquiv d) : node_(std::move(d)) {}
    Dependency(OrderCompat d) : node_(std::move(d)) {}
    Dependency(FuncDep d) : node_(std::move(d)) {}
    Dependency(Constant d) : node_(std::move(d)) {}

    DepKind kind() const { return static_cast<DepKind>(node_.index()); }

    template <class T> const T* get_if() const { return std::get_if<T>(&node_); }
    template <class T> const T& get() const { return std::get<T>(node_); }

    template <class F> auto visit(F&& f) const {
        return std::visit(std::forward<F>(f), node_);
    }

    AttrSet attributes() const {
        AttrSet r;
        visit([&](const auto& d) { collect(d, r); });
        return r;
    }

    // Structural equality; see same_statement for equality up to meaning.
    bool operator==(const Dependency&) const = default;
    auto operator<=>(const Dependency&) const = default;

private:
    static void collect(const OrderDep& d, AttrSet& r) {
        r.insert(d.lhs.begin(), d.lhs.end());
        r.insert(d.rhs.begin(), d.rhs.end());
    }
    static void collect(const OrderEquiv& d, AttrSet& r) {
        r.insert(d.lhs.begin(), d.lhs.end());
        r.insert(d.rhs.begin(), d.rhs.end());
    }
    static void collect(const OrderCompat& d, AttrSet& r) {
        r.insert(d.lhs.begin(), d.lhs.end());
        r.insert(d.rhs.begin(), d.rhs.end());
    }
    static void collect(const FuncDep& d, AttrSet& r) {
        r.insert(d.lhs.begin(), d.lhs.end());
        r.insert(d.rhs.begin(), d.rhs.end());
    }
    static void collect(const Constant& d, AttrSet& r) { r.insert(d.attr); }

    Node node_;
};

// Every statement denotes a finite set of canonical one-directional order
// dependencies; all semantic comparisons in the proof checker go through this.
inline std::vector<OrderDep> expansion(const Dependency& d) {
    std::vector<OrderDep> r;
    switch (d.kind()) {
        case DepKind::OrderDep: {
            const auto& o = d.get<OrderDep>();
            r.push_back({canonicalize(o.lhs), canonicalize(o.rhs)});
            break;
        }
        case DepKind::OrderEquiv: {
            const auto& o = d.get<OrderEquiv>();
            r.push_back({canonicalize(o.lhs), canonicalize(o.rhs)});
            r.push_back({canonicalize(o.rhs), canonicalize(o.lhs)});
            break;
        }
        case DepKind::OrderCompat: {
            const auto& o = d.get<OrderCompat>();
            MarkedList xy = canonicalize(o.lhs + o.rhs);
            MarkedList yx = canonicalize(o.rhs + o.lhs);
            r.push_back({xy, yx});
            r.push_back({yx, xy});
            break;
        }
        case DepKind::FuncDep: {
            const auto& f = d.get<FuncDep>();
            MarkedList x = sorted_list(f.lhs);
            MarkedList xy = canonicalize(x + sorted_list(f.rhs));
            r.push_back({x, xy});
            break;
        }
        case DepKind::Constant: {
            const auto& c = d.get<Constant>();
            r.push_back({MarkedList{}, MarkedList{c.attr}});
            break;
        }
    }
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
}

// Equality up to canonicalization and unfolding of ↔/∼/⇒/constant shorthand.
inline bool same_statement(const Dependency& a, const Dependency& b) {
    return expansion(a) == expansion(b);
}

inline bool expansion_subset(const std::vector<OrderDep>& sub,
                             const std::vector<OrderDep>& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

// A finite set of declared dependencies over a fixed attribute universe.
struct ConstraintSet {
    std::vector<Dependency> deps;
    AttrSet universe;

    ConstraintSet() = default;

    explicit ConstraintSet(std::vector<Dependency> ds, AttrSet extra = {})
        : universe(std::move(extra)) {
        for (auto& d : ds) add(d);
    }

    void add(const Dependency& d) {
        AttrSet as = d.attributes();
        universe.insert(as.begin(), as.end());
        if (std::find(deps.begin(), deps.end(), d) == deps.end())
            deps.push_back(d);
    }

    void declare(const Attribute& a) { universe.insert(a); }

    bool member(const Dependency& d) const {
        for (const auto& e : deps)
            if (same_statement(d, e)) return true;
        return false;
    }

    bool operator==(const ConstraintSet&) const = default;
};

// Stable identity of a constraint set up to statement meaning; used as a
// memoization key by the witness builder.
inline std::string fingerprint(const ConstraintSet& m) {
    std::set<std::string> lines;
    for (const auto& d : m.deps)
        for (const auto& od : expansion(d))
            lines.insert(to_text(od.lhs) + ">" + to_text(od.rhs));
    std::string r;
    for (const auto& a : m.universe) r += a.name + ";";
    r += "|";
    for (const auto& l : lines) r += l + ";";
    return r;
}

namespace detail {

inline void gen_lists(const std::vector<Attribute>& attrs, std::size_t max_len,
                      MarkedList& cur, std::vector<bool>& used,
                      std::vector<MarkedList>& out) {
    out.push_back(cur);
    if (cur.size() == max_len) return;
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        cur.items.push_back(attrs[i]);
        gen_lists(attrs, max_len, cur, used, out);
        cur.items.pop_back();
        used[i] = false;
    }
}

}  // namespace detail

// All duplicate-free lists over the universe with length at most max_len,
// in lexicographic order (the empty list first).
inline std::vector<MarkedList> canonical_lists(const AttrSet& universe,
                                               std::size_t max_len) {
    std::vector<Attribute> attrs(universe.begin(), universe.end());
    std::vector<MarkedList> out;
    MarkedList cur;
    std::vector<bool> used(attrs.size(), false);
    detail::gen_lists(attrs, std::min(max_len, attrs.size()), cur, used, out);
    return out;
}

}  // namespace odengine
