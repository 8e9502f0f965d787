#pragma once

// Text formats: constraint documents (.odc), integer/text tables (.csv), proof
// traces (.odp), plus rendering of witness tables and rewrite reports.  All
// parsers report exact 1-based line/column positions on bad input.

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "inference.hpp"
#include "instances.hpp"
#include "rewrite.hpp"
#include "witness.hpp"

namespace odengine {

struct ParseError : EngineError {
    std::size_t line, column;  // 1-based

    ParseError(std::size_t ln, std::size_t col, const std::string& what)
        : EngineError("line " + std::to_string(ln) + ", column " +
                      std::to_string(col) + ": " + what),
          line(ln),
          column(col) {}
};

// A parsed constraint file: declarations with their source lines, plus the
// optional `attrs` universe declaration.
struct ConstraintDoc {
    std::vector<std::pair<std::size_t, Dependency>> declarations;
    std::optional<AttrSet> universe;

    ConstraintSet to_constraints() const {
        std::vector<Dependency> ds;
        ds.reserve(declarations.size());
        for (const auto& [line, d] : declarations) ds.push_back(d);
        return ConstraintSet(std::move(ds), universe.value_or(AttrSet{}));
    }

    bool operator==(const ConstraintDoc&) const = default;
};

// Tables are parsed straight into instances; the instance type already owns
// the rectangularity and per-column tag invariants.
using TableDoc = TableInstance;

namespace detail {

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    for (auto& l : out)
        if (!l.empty() && l.back() == '\r') l.pop_back();
    return out;
}

// Single-line scanner; all errors carry the 1-based column at the cursor.
struct Scan {
    const std::string& s;
    std::size_t line;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(line, pos + 1, what);
    }

    bool eof() const { return pos >= s.size(); }
    char peek() const { return eof() ? '\0' : s[pos]; }

    void skip_ws() {
        while (!eof() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }

    bool eat(char c) {
        if (!eof() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!eat(c)) fail(std::string("expected ") + what);
    }

    std::string ident(const char* what = "expected attribute name") {
        if (eof() || !std::isalpha(static_cast<unsigned char>(peek()))) fail(what);
        std::size_t start = pos;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
            ++pos;
        return s.substr(start, pos - start);
    }

    std::size_t number(const char* what = "expected a number") {
        if (eof() || !std::isdigit(static_cast<unsigned char>(peek()))) fail(what);
        std::size_t v = 0;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
            v = v * 10 + static_cast<std::size_t>(peek() - '0');
            if (v > 1000000000) fail("number too large");
            ++pos;
        }
        return v;
    }

    // Declarations may end in whitespace and a # comment.
    void end_of_decl() {
        skip_ws();
        if (!eof() && peek() != '#') fail("unexpected trailing text");
    }
};

inline MarkedList parse_list(Scan& sc) {
    sc.skip_ws();
    sc.expect('[', "'['");
    MarkedList r;
    sc.skip_ws();
    if (sc.eat(']')) return r;
    while (true) {
        sc.skip_ws();
        r.items.push_back(Attribute{sc.ident()});
        sc.skip_ws();
        if (sc.eat(']')) return r;
        sc.expect(',', "',' or ']'");
    }
}

inline AttrSet parse_set(Scan& sc) {
    sc.skip_ws();
    sc.expect('{', "'{'");
    AttrSet r;
    sc.skip_ws();
    if (sc.eat('}')) return r;
    while (true) {
        sc.skip_ws();
        r.insert(Attribute{sc.ident()});
        sc.skip_ws();
        if (sc.eat('}')) return r;
        sc.expect(',', "',' or '}'");
    }
}

// Keyword-less dependency form used inside proof traces:
//   [A] -> [B]   [A] <-> [B]   [A] ~ [B]   {A} => {B}   const A
inline Dependency parse_statement(Scan& sc) {
    sc.skip_ws();
    if (sc.peek() == '[') {
        MarkedList l = parse_list(sc);
        sc.skip_ws();
        if (sc.eat('~')) return Dependency(OrderCompat{std::move(l), parse_list(sc)});
        if (sc.eat('<')) {
            sc.expect('-', "'<->'");
            sc.expect('>', "'<->'");
            return Dependency(OrderEquiv{std::move(l), parse_list(sc)});
        }
        if (sc.eat('-')) {
            sc.expect('>', "'->'");
            return Dependency(OrderDep{std::move(l), parse_list(sc)});
        }
        sc.fail("expected '->', '<->' or '~'");
    }
    if (sc.peek() == '{') {
        AttrSet l = parse_set(sc);
        sc.skip_ws();
        sc.expect('=', "'=>'");
        sc.expect('>', "'=>'");
        return Dependency(FuncDep{std::move(l), parse_set(sc)});
    }
    std::size_t at = sc.pos;
    if (sc.ident("expected a dependency") == "const") {
        sc.skip_ws();
        return Dependency(Constant{Attribute{sc.ident()}});
    }
    sc.pos = at;
    sc.fail("expected a dependency");
}

inline std::string format_statement(const Dependency& d) {
    return d.visit([](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, OrderDep>)
            return to_text(x.lhs) + " -> " + to_text(x.rhs);
        else if constexpr (std::is_same_v<T, OrderEquiv>)
            return to_text(x.lhs) + " <-> " + to_text(x.rhs);
        else if constexpr (std::is_same_v<T, OrderCompat>)
            return to_text(x.lhs) + " ~ " + to_text(x.rhs);
        else if constexpr (std::is_same_v<T, FuncDep>)
            return to_text(x.lhs) + " => " + to_text(x.rhs);
        else
            return "const " + x.attr.name;
    });
}

inline bool is_integer_token(const std::string& s) {
    std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
    if (i >= s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

inline std::string format_cell(const Value& v) {
    if (v.is_int()) return std::to_string(v.as_int());
    const std::string& s = v.as_text();
    if (is_integer_token(s) || s.find_first_of(",\r\n") != std::string::npos ||
        (!s.empty() && s[0] == '#'))
        throw TypeError("text cell cannot be written unambiguously: " + s);
    return s;
}

inline bool rule_from_name(const std::string& name, RuleId& out) {
    static const RuleId all[] = {
        RuleId::Premise,        RuleId::Definition,  RuleId::Reflexivity,
        RuleId::Prefix,         RuleId::Normalization, RuleId::Transitivity,
        RuleId::Suffix,         RuleId::Chain,       RuleId::Union,
        RuleId::Augmentation,   RuleId::Shift,       RuleId::Decomposition,
        RuleId::Replace,        RuleId::Eliminate,   RuleId::LeftEliminate,
        RuleId::Drop,           RuleId::Path,        RuleId::Partition,
        RuleId::DownwardClosure, RuleId::Permutation, RuleId::OdSplitFd,
        RuleId::OdSplitCompat,  RuleId::OdSplitCompose,
    };
    for (RuleId id : all)
        if (name == rule_name(id)) {
            out = id;
            return true;
        }
    return false;
}

}  // namespace detail

// One declaration per line, # comments allowed:
//   od [A,B] -> [C] | oeq [A] <-> [B] | oc [A] ~ [B]
//   fd {A,B} => {C} | const A | attrs A,B,C
inline ConstraintDoc parse_constraints(const std::string& text) {
    ConstraintDoc doc;
    auto lines = detail::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        detail::Scan sc{lines[i], i + 1};
        sc.skip_ws();
        if (sc.eof() || sc.peek() == '#') continue;
        std::size_t kw_at = sc.pos;
        std::string kw = sc.ident("expected a declaration keyword");
        if (kw == "od") {
            MarkedList l = detail::parse_list(sc);
            sc.skip_ws();
            sc.expect('-', "'->'");
            sc.expect('>', "'->'");
            MarkedList r = detail::parse_list(sc);
            sc.end_of_decl();
            doc.declarations.emplace_back(i + 1, Dependency(OrderDep{std::move(l), std::move(r)}));
        } else if (kw == "oeq") {
            MarkedList l = detail::parse_list(sc);
            sc.skip_ws();
            sc.expect('<', "'<->'");
            sc.expect('-', "'<->'");
            sc.expect('>', "'<->'");
            MarkedList r = detail::parse_list(sc);
            sc.end_of_decl();
            doc.declarations.emplace_back(i + 1, Dependency(OrderEquiv{std::move(l), std::move(r)}));
        } else if (kw == "oc") {
            MarkedList l = detail::parse_list(sc);
            sc.skip_ws();
            sc.expect('~', "'~'");
            MarkedList r = detail::parse_list(sc);
            sc.end_of_decl();
            doc.declarations.emplace_back(i + 1, Dependency(OrderCompat{std::move(l), std::move(r)}));
        } else if (kw == "fd") {
            AttrSet l = detail::parse_set(sc);
            sc.skip_ws();
            sc.expect('=', "'=>'");
            sc.expect('>', "'=>'");
            AttrSet r = detail::parse_set(sc);
            sc.end_of_decl();
            doc.declarations.emplace_back(i + 1, Dependency(FuncDep{std::move(l), std::move(r)}));
        } else if (kw == "const") {
            sc.skip_ws();
            Attribute a{sc.ident()};
            sc.end_of_decl();
            doc.declarations.emplace_back(i + 1, Dependency(Constant{std::move(a)}));
        } else if (kw == "attrs") {
            if (doc.universe) {
                sc.pos = kw_at;
                sc.fail("duplicate attrs declaration");
            }
            AttrSet u;
            do {
                sc.skip_ws();
                u.insert(Attribute{sc.ident()});
                sc.skip_ws();
            } while (sc.eat(','));
            sc.end_of_decl();
            doc.universe = std::move(u);
        } else {
            sc.pos = kw_at;
            sc.fail("unknown declaration keyword " + kw);
        }
    }
    return doc;
}

inline std::string format_dependency(const Dependency& d) {
    switch (d.kind()) {
        case DepKind::OrderDep: return "od " + detail::format_statement(d);
        case DepKind::OrderEquiv: return "oeq " + detail::format_statement(d);
        case DepKind::OrderCompat: return "oc " + detail::format_statement(d);
        case DepKind::FuncDep: return "fd " + detail::format_statement(d);
        case DepKind::Constant: return detail::format_statement(d);
    }
    throw EngineError("unreachable dependency kind");
}

inline std::string format_constraints(const ConstraintDoc& doc) {
    std::string out;
    if (doc.universe && !doc.universe->empty()) {
        out += "attrs ";
        bool first = true;
        for (const auto& a : *doc.universe) {
            if (!first) out += ",";
            out += a.name;
            first = false;
        }
        out += "\n";
    }
    for (const auto& [line, d] : doc.declarations) out += format_dependency(d) + "\n";
    return out;
}

// Comma-separated cells, first non-comment line is the header; a cell is an
// integer iff it is all digits (optional leading -), and a column must not mix
// integer and text cells.
inline TableInstance parse_table(const std::string& text) {
    auto lines = detail::split_lines(text);
    std::size_t i = 0;
    auto skippable = [&](const std::string& l) {
        detail::Scan sc{l, 0};
        sc.skip_ws();
        return sc.eof() || sc.peek() == '#';
    };
    while (i < lines.size() && skippable(lines[i])) ++i;
    if (i >= lines.size()) throw ParseError(lines.size() + 1, 1, "missing header line");

    std::vector<Attribute> cols;
    {
        detail::Scan sc{lines[i], i + 1};
        AttrSet seen;
        while (true) {
            sc.skip_ws();
            std::size_t at = sc.pos;
            Attribute a{sc.ident("expected column name")};
            if (!seen.insert(a).second) {
                sc.pos = at;
                sc.fail("duplicate column " + a.name);
            }
            cols.push_back(std::move(a));
            sc.skip_ws();
            if (sc.eof()) break;
            sc.expect(',', "','");
        }
    }

    std::vector<std::vector<Value>> rows;
    std::vector<int> tag(cols.size(), -1);  // -1 unknown, 0 text, 1 integer
    for (++i; i < lines.size(); ++i) {
        const std::string& ln = lines[i];
        if (skippable(ln)) continue;
        std::vector<std::pair<std::size_t, std::string>> cells;  // (offset, raw text)
        std::size_t start = 0;
        for (std::size_t p = 0; p <= ln.size(); ++p) {
            if (p == ln.size() || ln[p] == ',') {
                cells.emplace_back(start, ln.substr(start, p - start));
                start = p + 1;
            }
        }
        if (cells.size() > cols.size())
            throw ParseError(i + 1, cells[cols.size()].first + 1,
                             "row has more cells than the header");
        if (cells.size() < cols.size())
            throw ParseError(i + 1, ln.size() + 1, "row has fewer cells than the header");
        std::vector<Value> vals;
        vals.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const std::string& cell = cells[c].second;
            bool numeric = detail::is_integer_token(cell);
            int want = numeric ? 1 : 0;
            if (tag[c] == -1)
                tag[c] = want;
            else if (tag[c] != want)
                throw ParseError(i + 1, cells[c].first + 1,
                                 "mixed integer and text cells in column " + cols[c].name);
            if (numeric) {
                try {
                    vals.emplace_back(static_cast<std::int64_t>(std::stoll(cell)));
                } catch (const std::out_of_range&) {
                    throw ParseError(i + 1, cells[c].first + 1, "integer cell out of range");
                }
            } else {
                vals.emplace_back(cell);
            }
        }
        rows.push_back(std::move(vals));
    }
    return TableInstance(std::move(cols), rows);
}

inline std::string format_table(const TableInstance& t) {
    std::string out;
    for (std::size_t c = 0; c < t.column_count(); ++c) {
        if (c) out += ",";
        out += t.columns()[c].name;
    }
    out += "\n";
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        for (std::size_t c = 0; c < t.column_count(); ++c) {
            if (c) out += ",";
            out += detail::format_cell(t.cell(r, c));
        }
        out += "\n";
    }
    return out;
}

// The table format with one comment line per block; round-trips through
// parse_table (comments are skipped there).
inline std::string format_witness(const WitnessTable& w) {
    for (std::size_t r = 0; r < w.table.row_count(); ++r)
        for (std::size_t c = 0; c < w.table.column_count(); ++c)
            if (!w.table.cell(r, c).is_int())
                throw TypeError("witness tables are integer-only");
    std::string out;
    for (std::size_t c = 0; c < w.table.column_count(); ++c) {
        if (c) out += ",";
        out += w.table.columns()[c].name;
    }
    out += "\n";
    std::size_t b = 0;
    for (std::size_t r = 0; r <= w.table.row_count(); ++r) {
        while (b < w.blocks.size() && w.blocks[b].first_row == r) {
            const auto& blk = w.blocks[b];
            out += "# rows " + std::to_string(blk.first_row) + ".." +
                   std::to_string(blk.first_row + (blk.row_count ? blk.row_count - 1 : 0)) +
                   ": " + blk.note + "\n";
            ++b;
        }
        if (r == w.table.row_count()) break;
        for (std::size_t c = 0; c < w.table.column_count(); ++c) {
            if (c) out += ",";
            out += std::to_string(w.table.cell(r, c).as_int());
        }
        out += "\n";
    }
    return out;
}

inline std::string format_report(const RewriteReport& rep) {
    std::string out = "input: " + to_text(rep.input) + "\n";
    out += "output: " + to_text(rep.output) + "\n";
    for (const auto& r : rep.removed)
        out += "removed " + r.attr.name + " [" + r.rule + " " +
               detail::format_statement(r.justification) + "]\n";
    return out;
}

// One step per line: `k: <dependency> [<Rule>(<premise indices>) {bindings}]`.
inline std::string format_proof(const Proof& p) {
    if (p.steps.empty()) throw ConstructionError("a proof must contain at least one step");
    std::string out;
    for (std::size_t k = 0; k < p.steps.size(); ++k) {
        const ProofStep& st = p.steps[k];
        out += std::to_string(k + 1) + ": " + detail::format_statement(st.statement) + " [";
        out += rule_name(st.rule);
        out += "(";
        for (std::size_t i = 0; i < st.premises.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(st.premises[i]);
        }
        out += ")";
        if (!st.binding.lists.empty() || st.binding.chain_n != 0) {
            out += " {";
            bool first = true;
            for (const auto& [var, lst] : st.binding.lists) {
                if (!first) out += ", ";
                out += var + "=" + to_text(lst);
                first = false;
            }
            if (st.binding.chain_n != 0) {
                if (!first) out += ", ";
                out += "n=" + std::to_string(st.binding.chain_n);
            }
            out += "}";
        }
        out += "]\n";
    }
    return out;
}

// The proof goal is the statement of the last step.
inline Proof parse_proof(const std::string& text) {
    std::vector<ProofStep> steps;
    auto lines = detail::split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        detail::Scan sc{lines[i], i + 1};
        sc.skip_ws();
        if (sc.eof() || sc.peek() == '#') continue;
        std::size_t num_at = sc.pos;
        std::size_t num = sc.number("expected a step number");
        if (num != steps.size() + 1) {
            sc.pos = num_at;
            sc.fail("steps must be numbered consecutively from 1");
        }
        sc.skip_ws();
        sc.expect(':', "':'");
        Dependency stmt = detail::parse_statement(sc);
        sc.skip_ws();
        sc.expect('[', "'['");
        sc.skip_ws();
        std::size_t rn_at = sc.pos;
        std::string rn = sc.ident("expected a rule name");
        RuleId rule;
        if (!detail::rule_from_name(rn, rule)) {
            sc.pos = rn_at;
            sc.fail("unknown rule " + rn);
        }
        sc.skip_ws();
        sc.expect('(', "'('");
        std::vector<std::size_t> prem;
        sc.skip_ws();
        if (!sc.eat(')')) {
            while (true) {
                sc.skip_ws();
                std::size_t at = sc.pos;
                std::size_t idx = sc.number("expected a premise index");
                if (idx == 0 || idx > steps.size()) {
                    sc.pos = at;
                    sc.fail("premise index out of range");
                }
                prem.push_back(idx);
                sc.skip_ws();
                if (sc.eat(')')) break;
                sc.expect(',', "',' or ')'");
            }
        }
        Binding b;
        sc.skip_ws();
        if (sc.eat('{')) {
            sc.skip_ws();
            if (!sc.eat('}')) {
                while (true) {
                    sc.skip_ws();
                    std::size_t vat = sc.pos;
                    std::string var = sc.ident("expected a binding variable");
                    sc.skip_ws();
                    sc.expect('=', "'='");
                    if (var == "n") {
                        b.chain_n = static_cast<int>(sc.number());
                    } else {
                        if (b.lists.count(var)) {
                            sc.pos = vat;
                            sc.fail("duplicate binding for " + var);
                        }
                        b.lists.emplace(std::move(var), detail::parse_list(sc));
                    }
                    sc.skip_ws();
                    if (sc.eat('}')) break;
                    sc.expect(',', "',' or '}'");
                }
            }
            sc.skip_ws();
        }
        sc.expect(']', "']'");
        sc.end_of_decl();
        steps.push_back({std::move(stmt), rule, std::move(prem), std::move(b)});
    }
    if (steps.empty()) throw ParseError(lines.size() + 1, 1, "a proof must contain at least one step");
    Dependency goal = steps.back().statement;
    return Proof{std::move(goal), std::move(steps)};
}

// Single-declaration helpers for command-line arguments.

inline Dependency parse_dependency(const std::string& text) {
    ConstraintDoc doc = parse_constraints(text);
    if (doc.universe || doc.declarations.size() != 1)
        throw ParseError(1, 1, "expected exactly one dependency declaration");
    return doc.declarations[0].second;
}

inline MarkedList parse_list_text(const std::string& text) {
    std::string line = text;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r' ||
                             line.back() == ' ' || line.back() == '\t'))
        line.pop_back();
    detail::Scan sc{line, 1};
    MarkedList r = detail::parse_list(sc);
    sc.end_of_decl();
    return r;
}

}  // namespace odengine
