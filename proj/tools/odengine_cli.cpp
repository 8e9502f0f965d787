// Command-line front end: dependency checks on tables, implication, closure,
// proof search and verification, order/group rewrites, witness generation.
//
// Exit codes: 0 positive answer, 1 negative answer, 2 usage or input error.

#include <CLI11.hpp>

#include <odengine/dsl.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using namespace odengine;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EngineError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// An argument is either a file path or an inline `{...}` literal whose
// declarations are separated by ';'.
std::string text_arg(const std::string& arg) {
    std::size_t b = arg.find_first_not_of(" \t");
    std::size_t e = arg.find_last_not_of(" \t\r\n");
    if (b != std::string::npos && arg[b] == '{' && arg[e] == '}') {
        std::string body = arg.substr(b + 1, e - b - 1);
        for (auto& ch : body)
            if (ch == ';') ch = '\n';
        return body;
    }
    return slurp(arg);
}

ConstraintSet load_constraints(const std::string& arg) {
    return parse_constraints(text_arg(arg)).to_constraints();
}

// Bare comma-separated attribute names; bracketed form also accepted.
MarkedList attr_list(const std::string& arg) {
    std::size_t b = arg.find_first_not_of(" \t");
    if (b != std::string::npos && arg[b] == '[') return parse_list_text(arg);
    return parse_list_text("[" + arg + "]");
}

DecideOptions decide_options() {
    DecideOptions opt;
    if (const char* s = std::getenv("ODENGINE_MAX_ATTRS")) {
        char* end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (end == s || *end != '\0' || v < 1)
            throw EngineError("ODENGINE_MAX_ATTRS must be a positive integer");
        opt.max_attrs = static_cast<std::size_t>(v);
    }
    return opt;
}

struct Printer {
    bool records = false;

    void kv(const std::string& key, const std::string& value) const {
        if (records) std::cout << key << "=" << value << "\n";
    }
    void line(const std::string& text) const {
        if (!records) std::cout << text << "\n";
    }
    // multi-line payload: raw in text mode, key-prefixed per line in records mode
    void block(const std::string& key, const std::string& text) const {
        if (!records) {
            std::cout << text;
            return;
        }
        for (const auto& l : detail::split_lines(text)) std::cout << key << "=" << l << "\n";
    }
};

int run_holds(const std::string& table_arg, const std::string& dep_arg, Printer out) {
    TableInstance t = parse_table(text_arg(table_arg));
    Dependency d = parse_dependency(dep_arg);
    if (holds(t, d)) {
        out.line("SATISFIED");
        out.kv("result", "satisfied");
        return 0;
    }
    for (const auto& o : expansion(d)) {
        if (order_dep_holds(t, o.lhs, o.rhs)) continue;
        auto v = classify_violation(t, o);
        if (!v) continue;
        std::string kind = v->kind == ViolationWitness::Kind::Split ? "split" : "swap";
        std::string rows = std::to_string(v->row1) + "," + std::to_string(v->row2);
        out.line("VIOLATED(kind=" + kind + ", rows=" + rows + ")");
        out.kv("result", "violated");
        out.kv("kind", kind);
        out.kv("rows", rows);
        return 1;
    }
    throw EngineError("violated dependency produced no classifiable witness");
}

int run_imply(const std::string& m_arg, const std::string& dep_arg, Printer out) {
    ConstraintSet m = load_constraints(m_arg);
    Dependency d = parse_dependency(dep_arg);
    for (const auto& a : d.attributes()) m.declare(a);
    auto r = decide(m, d, decide_options());
    if (r.implied()) {
        out.line("IMPLIED");
        out.kv("result", "implied");
        return 0;
    }
    out.line("NOT-IMPLIED");
    out.kv("result", "not-implied");
    out.block("table", format_table(*r.counterexample));
    return 1;
}

int run_closure(const std::string& m_arg, std::size_t len, Printer out) {
    ConstraintSet m = load_constraints(m_arg);
    for (const auto& o : closure(m, len, decide_options())) {
        std::string text = format_dependency(Dependency(o));
        out.line(text);
        out.kv("dep", text);
    }
    return 0;
}

int run_prove(const std::string& m_arg, const std::string& dep_arg,
              const SearchBudget& budget, Printer out) {
    ConstraintSet m = load_constraints(m_arg);
    Dependency d = parse_dependency(dep_arg);
    for (const auto& a : d.attributes()) m.declare(a);
    auto r = search_proof(m, d, budget);
    if (r.proof) {
        out.kv("result", "found");
        out.block("proof", format_proof(*r.proof));
        return 0;
    }
    out.line("NOT-FOUND (rounds=" + std::to_string(r.stats.rounds) +
             ", facts=" + std::to_string(r.stats.facts) +
             ", exhausted=" + (r.stats.exhausted ? "yes" : "no") + ")");
    out.kv("result", "not-found");
    out.kv("rounds", std::to_string(r.stats.rounds));
    out.kv("facts", std::to_string(r.stats.facts));
    out.kv("exhausted", r.stats.exhausted ? "yes" : "no");
    return 1;
}

int run_verify(const std::string& m_arg, const std::string& proof_arg, Printer out) {
    ConstraintSet m = load_constraints(m_arg);
    Proof p = parse_proof(text_arg(proof_arg));
    for (const auto& st : p.steps)
        for (const auto& a : st.statement.attributes()) m.declare(a);
    auto r = check_proof(m, p);
    if (r.ok) {
        out.line("VALID");
        out.kv("result", "valid");
        return 0;
    }
    out.line("INVALID(step " + std::to_string(r.step) + ", " + r.reason + ")");
    out.kv("result", "invalid");
    out.kv("step", std::to_string(r.step));
    out.kv("reason", r.reason);
    return 1;
}

void print_report(const RewriteReport& rep, Printer out) {
    if (!out.records) {
        std::cout << format_report(rep);
        return;
    }
    out.kv("input", to_text(rep.input));
    out.kv("output", to_text(rep.output));
    for (const auto& r : rep.removed)
        out.kv("removed", r.attr.name + " [" + r.rule + " " +
                              detail::format_statement(r.justification) + "]");
}

int run_reduce(const std::string& m_arg, const std::string& list_arg, bool plain,
               Printer out) {
    ConstraintSet m = load_constraints(m_arg);
    OrderSpec o{attr_list(list_arg)};
    for (const auto& a : o.attrs) m.declare(a);
    auto opt = decide_options();
    auto rep = plain ? reduce_order(o, m, opt) : reduce_order_star(o, m, opt);
    print_report(rep, out);
    return 0;
}

int run_reduce_group(const std::string& m_arg, const std::string& set_arg,
                     const std::string& prefer_arg, Printer out) {
    ConstraintSet m = load_constraints(m_arg);
    GroupSpec g{attr_list(set_arg).to_set()};
    for (const auto& a : g.attrs) m.declare(a);
    std::vector<Attribute> prefer;
    if (!prefer_arg.empty())
        for (const auto& a : attr_list(prefer_arg)) prefer.push_back(a);
    auto rep = reduce_group_by(g, m, prefer, decide_options());
    print_report(rep, out);
    return 0;
}

int run_substitute(const std::string& m_arg, const std::string& plan_arg,
                   const std::string& query_arg, Printer out) {
    ConstraintSet m = load_constraints(m_arg);
    OrderSpec plan{attr_list(plan_arg)}, query{attr_list(query_arg)};
    for (const auto& a : plan.attrs) m.declare(a);
    for (const auto& a : query.attrs) m.declare(a);
    if (can_substitute_order(plan, query, m, decide_options())) {
        out.line("SUBSTITUTABLE");
        out.kv("result", "substitutable");
        return 0;
    }
    out.line("NOT-SUBSTITUTABLE");
    out.kv("result", "not-substitutable");
    return 1;
}

int run_witness(const std::string& m_arg, Printer out) {
    ConstraintSet m = load_constraints(m_arg);
    auto w = build_armstrong_table(m, decide_options());
    std::string text = format_witness(w);
    if (!out.records) {
        std::cout << text;
        return 0;
    }
    for (const auto& b : w.blocks)
        out.kv("block", std::to_string(b.first_row) + "," +
                            std::to_string(b.row_count) + "," + b.note);
    out.block("table", format_table(w.table));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reasoner for lexicographic order dependencies"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "text";
    app.add_option("--format", format, "output format: text or records")
        ->check(CLI::IsMember({"text", "records"}));

    std::string m_arg, d_arg, t_arg, p_arg, o_arg, g_arg, prefer_arg, plan_arg, query_arg;
    std::size_t len = 2;
    SearchBudget budget;
    bool plain = false;

    auto* holds_cmd = app.add_subcommand("holds", "check a dependency on a table");
    holds_cmd->add_option("-t,--table", t_arg, "table file or {literal}")->required();
    holds_cmd->add_option("-d,--dependency", d_arg, "dependency declaration")->required();

    auto* imply_cmd = app.add_subcommand("imply", "decide semantic implication");
    imply_cmd->add_option("-m,--constraints", m_arg, "constraint file or {literal}")->required();
    imply_cmd->add_option("-d,--dependency", d_arg, "goal dependency")->required();

    auto* closure_cmd = app.add_subcommand("closure", "list implied order dependencies");
    closure_cmd->add_option("-m,--constraints", m_arg, "constraint file or {literal}")->required();
    closure_cmd->add_option("--len", len, "maximum list length (default 2)");

    auto* prove_cmd = app.add_subcommand("prove", "search for a proof");
    prove_cmd->add_option("-m,--constraints", m_arg, "constraint file or {literal}")->required();
    prove_cmd->add_option("-d,--dependency", d_arg, "goal dependency")->required();
    prove_cmd->add_option("--depth", budget.max_depth, "chaining rounds (default 4)");
    prove_cmd->add_option("--len", budget.max_list_len, "fact list length cap (default 3)");

    auto* verify_cmd = app.add_subcommand("verify", "check a proof trace");
    verify_cmd->add_option("-m,--constraints", m_arg, "constraint file or {literal}")->required();
    verify_cmd->add_option("-p,--proof", p_arg, "proof file or {literal}")->required();

    auto* reduce_cmd = app.add_subcommand("reduce", "reduce an order-by list");
    reduce_cmd->add_option("-m,--constraints", m_arg, "constraint file or {literal}")->required();
    reduce_cmd->add_option("-o,--order", o_arg, "comma-separated order-by list")->required();
    reduce_cmd->add_flag("--plain", plain, "functional-dependency sweep only");

    auto* group_cmd = app.add_subcommand("reduce-group", "reduce a group-by set");
    group_cmd->add_option("-m,--constraints", m_arg, "constraint file or {literal}")->required();
    group_cmd->add_option("-g,--group", g_arg, "comma-separated group-by set")->required();
    group_cmd->add_option("--prefer", prefer_arg, "attributes to keep, most preferred first");

    auto* subst_cmd = app.add_subcommand("substitute", "can a sorted stream serve a query order-by");
    subst_cmd->add_option("-m,--constraints", m_arg, "constraint file or {literal}")->required();
    subst_cmd->add_option("--plan", plan_arg, "producing sort order")->required();
    subst_cmd->add_option("--query", query_arg, "requested order-by")->required();

    auto* witness_cmd = app.add_subcommand("witness", "build a split-swap witness table");
    witness_cmd->add_option("-m,--constraints", m_arg, "constraint file or {literal}")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int ret = app.exit(e);
        return ret == 0 ? 0 : 2;
    }

    Printer out{format == "records"};
    try {
        if (holds_cmd->parsed()) return run_holds(t_arg, d_arg, out);
        if (imply_cmd->parsed()) return run_imply(m_arg, d_arg, out);
        if (closure_cmd->parsed()) return run_closure(m_arg, len, out);
        if (prove_cmd->parsed()) return run_prove(m_arg, d_arg, budget, out);
        if (verify_cmd->parsed()) return run_verify(m_arg, p_arg, out);
        if (reduce_cmd->parsed()) return run_reduce(m_arg, o_arg, plain, out);
        if (group_cmd->parsed()) return run_reduce_group(m_arg, g_arg, prefer_arg, out);
        if (subst_cmd->parsed()) return run_substitute(m_arg, plan_arg, query_arg, out);
        if (witness_cmd->parsed()) return run_witness(m_arg, out);
    } catch (const EngineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no command selected\n";
    return 2;
}
