#pragma once

// Finite table instances and dependency checking over them: exhaustive
// ordered-pair scans, split/swap witnesses, violation classification.

#include <optional>
#include <utility>

#include "core.hpp"

namespace odengine {

// Stored column-major; rows are materialized on demand. Column order is the
// declared header order and survives round-trips.
class TableInstance {
public:
    TableInstance() = default;

    TableInstance(std::vector<Attribute> columns,
                  const std::vector<std::vector<Value>>& rows)
        : columns_(std::move(columns)) {
        AttrSet seen;
        for (const auto& c : columns_)
            if (!seen.insert(c).second)
                throw SchemaError("duplicate column " + c.name);
        cols_.resize(columns_.size());
        for (const auto& r : rows) add_row(r);
    }

    const std::vector<Attribute>& columns() const { return columns_; }
    std::size_t column_count() const { return columns_.size(); }
    std::size_t row_count() const { return nrows_; }

    bool has_column(const Attribute& a) const {
        return index_of(a) != columns_.size();
    }

    std::size_t column_index(const Attribute& a) const {
        auto i = index_of(a);
        if (i == columns_.size())
            throw SchemaError("no column named " + a.name);
        return i;
    }

    const Value& cell(std::size_t row, std::size_t col) const {
        return cols_.at(col).at(row);
    }

    const Value& at(std::size_t row, const Attribute& a) const {
        return cols_[column_index(a)].at(row);
    }

    const std::vector<Value>& column(const Attribute& a) const {
        return cols_[column_index(a)];
    }

    Row row(std::size_t i) const {
        Row r;
        for (std::size_t c = 0; c < columns_.size(); ++c)
            r.cells.emplace(columns_[c], cols_[c].at(i));
        return r;
    }

    AttrSet schema() const {
        return AttrSet(columns_.begin(), columns_.end());
    }

    void add_row(const std::vector<Value>& vals) {
        if (vals.size() != columns_.size())
            throw SchemaError("row width does not match column count");
        for (std::size_t c = 0; c < vals.size(); ++c) {
            if (!cols_[c].empty() && cols_[c].front().is_int() != vals[c].is_int())
                throw TypeError("mixed integer and text cells in column " +
                                columns_[c].name);
            cols_[c].push_back(vals[c]);
        }
        ++nrows_;
    }

    // Three-way comparison of rows i, j along list x, without materializing.
    Ordering compare_along(const MarkedList& x, std::size_t i, std::size_t j) const {
        for (const auto& a : x) {
            const auto& col = cols_[column_index(a)];
            auto c = col.at(i).compare(col.at(j));
            if (c < 0) return Ordering::Precedes;
            if (c > 0) return Ordering::Follows;
        }
        return Ordering::Equal;
    }

    bool operator==(const TableInstance&) const = default;

private:
    std::size_t index_of(const Attribute& a) const {
        for (std::size_t i = 0; i < columns_.size(); ++i)
            if (columns_[i] == a) return i;
        return columns_.size();
    }

    std::vector<Attribute> columns_;
    std::vector<std::vector<Value>> cols_;
    std::size_t nrows_ = 0;
};

namespace detail {

// Resolve list attrs to column positions once, so pair loops stay cheap.
inline std::vector<std::size_t> positions(const TableInstance& t, const MarkedList& x) {
    std::vector<std::size_t> r;
    r.reserve(x.size());
    for (const auto& a : x) r.push_back(t.column_index(a));
    return r;
}

inline Ordering order_at(const TableInstance& t, const std::vector<std::size_t>& pos,
                         std::size_t i, std::size_t j) {
    for (auto c : pos) {
        auto r = t.cell(i, c).compare(t.cell(j, c));
        if (r < 0) return Ordering::Precedes;
        if (r > 0) return Ordering::Follows;
    }
    return Ordering::Equal;
}

}  // namespace detail

// Does x ↦ y hold on t? Scans every ordered row pair.
inline bool order_dep_holds(const TableInstance& t, const MarkedList& x,
                            const MarkedList& y) {
    auto px = detail::positions(t, x);
    auto py = detail::positions(t, y);
    std::size_t n = t.row_count();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            auto ox = detail::order_at(t, px, i, j);
            if (ox == Ordering::Follows) continue;
            if (detail::order_at(t, py, i, j) == Ordering::Follows) return false;
        }
    return true;
}

inline bool holds(const TableInstance& t, const Dependency& d) {
    switch (d.kind()) {
        case DepKind::OrderDep: {
            const auto& o = d.get<OrderDep>();
            return order_dep_holds(t, o.lhs, o.rhs);
        }
        case DepKind::OrderEquiv: {
            const auto& o = d.get<OrderEquiv>();
            return order_dep_holds(t, o.lhs, o.rhs) &&
                   order_dep_holds(t, o.rhs, o.lhs);
        }
        case DepKind::OrderCompat: {
            const auto& o = d.get<OrderCompat>();
            return order_dep_holds(t, o.lhs + o.rhs, o.rhs + o.lhs) &&
                   order_dep_holds(t, o.rhs + o.lhs, o.lhs + o.rhs);
        }
        case DepKind::FuncDep: {
            const auto& f = d.get<FuncDep>();
            auto px = detail::positions(t, sorted_list(f.lhs));
            auto py = detail::positions(t, sorted_list(f.rhs));
            std::size_t n = t.row_count();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (detail::order_at(t, px, i, j) == Ordering::Equal &&
                        detail::order_at(t, py, i, j) != Ordering::Equal)
                        return false;
            return true;
        }
        case DepKind::Constant: {
            const auto& c = d.get<Constant>();
            const auto& col = t.column(c.attr);
            for (std::size_t i = 1; i < col.size(); ++i)
                if (!(col[i] == col[0])) return false;
            return true;
        }
    }
    return true;
}

// A pair of rows equal along x but not along y. First hit in (i, j) scan
// order wins; such a pair falsifies the functional half of x ↦ y.
inline std::optional<std::pair<std::size_t, std::size_t>> find_split(
    const TableInstance& t, const MarkedList& x, const MarkedList& y) {
    auto px = detail::positions(t, x);
    auto py = detail::positions(t, y);
    std::size_t n = t.row_count();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (detail::order_at(t, px, i, j) == Ordering::Equal &&
                detail::order_at(t, py, i, j) != Ordering::Equal)
                return std::make_pair(i, j);
        }
    return std::nullopt;
}

// A pair of rows strictly ordered one way along x and the other way along y;
// such a pair falsifies the compatibility half of x ↦ y.
inline std::optional<std::pair<std::size_t, std::size_t>> find_swap(
    const TableInstance& t, const MarkedList& x, const MarkedList& y) {
    auto px = detail::positions(t, x);
    auto py = detail::positions(t, y);
    std::size_t n = t.row_count();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (detail::order_at(t, px, i, j) == Ordering::Precedes &&
                detail::order_at(t, py, i, j) == Ordering::Follows)
                return std::make_pair(i, j);
        }
    return std::nullopt;
}

struct ViolationWitness {
    enum class Kind { Split, Swap };
    Kind kind;
    std::size_t row1, row2;

    bool operator==(const ViolationWitness&) const = default;
};

// Every violated order dependency is falsified by a split or by a swap;
// splits are reported first.
inline std::optional<ViolationWitness> classify_violation(const TableInstance& t,
                                                          const OrderDep& od) {
    if (auto p = find_split(t, od.lhs, od.rhs))
        return ViolationWitness{ViolationWitness::Kind::Split, p->first, p->second};
    if (auto p = find_swap(t, od.lhs, od.rhs))
        return ViolationWitness{ViolationWitness::Kind::Swap, p->first, p->second};
    return std::nullopt;
}

}  // namespace odengine
