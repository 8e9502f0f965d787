#include <catch2/catch_amalgamated.hpp>

#include <odengine/witness.hpp>

#include <random>

using namespace odengine;

namespace {

Attribute A{"A"}, B{"B"}, C{"C"}, D{"D"};

MarkedList L(std::initializer_list<const char*> names) {
    MarkedList r;
    for (auto n : names) r.items.push_back(Attribute{n});
    return r;
}

Dependency od(MarkedList l, MarkedList r) {
    return Dependency(OrderDep{std::move(l), std::move(r)});
}

TableInstance ints(std::vector<Attribute> cols,
                   std::vector<std::vector<int>> rows) {
    std::vector<std::vector<Value>> vs;
    for (auto& r : rows) {
        std::vector<Value> row;
        for (int x : r) row.emplace_back(x);
        vs.push_back(std::move(row));
    }
    return TableInstance(std::move(cols), vs);
}

std::vector<std::vector<int>> dump(const TableInstance& t) {
    std::vector<std::vector<int>> out;
    for (std::size_t r = 0; r < t.row_count(); ++r) {
        std::vector<int> row;
        for (std::size_t c = 0; c < t.column_count(); ++c)
            row.push_back(static_cast<int>(t.cell(r, c).as_int()));
        out.push_back(std::move(row));
    }
    return out;
}

// Every implied statement holds and every non-implied one is falsified,
// over all canonical list pairs up to the universe size.
void check_armstrong_exact(const ConstraintSet& m) {
    WitnessTable w = build_armstrong_table(m);
    for (const auto& d : m.deps) {
        INFO("member must hold, fingerprint " << fingerprint(m));
        CHECK(holds(w.table, d));
    }
    auto lists = canonical_lists(m.universe, m.universe.size());
    for (const auto& x : lists)
        for (const auto& y : lists) {
            Dependency g = od(x, y);
            bool implied = decide(m, g).implied();
            bool held = holds(w.table, g);
            INFO(to_text(x) << " -> " << to_text(y) << " implied=" << implied
                            << " fingerprint " << fingerprint(m));
            CHECK(held == implied);
        }
}

}  // namespace

TEST_CASE("append shifts the second part above the first") {
    auto t1 = ints({A, B, C, D}, {{0, 0, 0, 0}, {0, 0, 1, 1}});
    auto t2 = ints({A, B, C, D}, {{0, 1, 0, 0}, {1, 0, 0, 0}});
    auto r = append(t1, t2);
    CHECK(dump(r) == std::vector<std::vector<int>>{
                         {0, 0, 0, 0}, {0, 0, 1, 1}, {2, 3, 2, 2}, {3, 2, 2, 2}});
}

TEST_CASE("append normalizes a lone table to minimum zero") {
    auto t = ints({A, B}, {{5, 7}, {6, 9}});
    auto none = TableInstance(std::vector<Attribute>{A, B}, {});
    CHECK(dump(append(t, none)) == std::vector<std::vector<int>>{{0, 2}, {1, 4}});
    CHECK(dump(append(none, t)) == std::vector<std::vector<int>>{{0, 2}, {1, 4}});
    CHECK(append(none, none).row_count() == 0);
}

TEST_CASE("append rejects mismatched schemas and text cells") {
    auto t1 = ints({A, B}, {{0, 0}});
    auto t2 = ints({A, C}, {{0, 0}});
    CHECK_THROWS_AS(append(t1, t2), SchemaError);
    TableInstance words({A, B}, {{Value{"x"}, Value{"y"}}});
    CHECK_THROWS_AS(append(t1, words), TypeError);
}

TEST_CASE("append introduces no cross-part swap and only trivial splits") {
    std::mt19937 rng(20250823);
    std::uniform_int_distribution<int> val(-5, 9), nrows(1, 4);
    auto rnd = [&](int n) {
        std::vector<std::vector<int>> rows;
        for (int i = 0; i < n; ++i)
            rows.push_back({val(rng), val(rng), val(rng)});
        return ints({A, B, C}, rows);
    };
    auto lists = canonical_lists(AttrSet{A, B, C}, 3);
    for (int trial = 0; trial < 20; ++trial) {
        auto t1 = rnd(nrows(rng)), t2 = rnd(nrows(rng));
        auto r = append(t1, t2);
        for (std::size_t i = 0; i < t1.row_count(); ++i)
            for (std::size_t j = t1.row_count(); j < r.row_count(); ++j) {
                std::vector<std::vector<Value>> pr;
                for (std::size_t idx : {i, j}) {
                    std::vector<Value> row;
                    for (std::size_t c = 0; c < r.column_count(); ++c)
                        row.push_back(r.cell(idx, c));
                    pr.push_back(std::move(row));
                }
                TableInstance pair(std::vector<Attribute>{A, B, C}, pr);
                for (const auto& x : lists)
                    for (const auto& y : lists) {
                        CHECK(find_swap(pair, x, y) == std::nullopt);
                        if (!x.empty())
                            CHECK(find_split(pair, x, canonicalize(x + y)) ==
                                  std::nullopt);
                    }
            }
    }
}

TEST_CASE("split table ties each closure and moves the rest") {
    ConstraintSet m({}, AttrSet{A, B});
    WitnessTable w = build_split_table(m);
    CHECK(dump(w.table) == std::vector<std::vector<int>>{
                               {0, 0}, {1, 1}, {2, 2}, {2, 3}, {4, 4}, {5, 4}});
    REQUIRE(w.blocks.size() == 3);
    CHECK(w.blocks[1].first_row == 2);
    CHECK(w.blocks[1].note == "split {A} closure {A}");
    CHECK(!holds(w.table, od(L({"A"}), L({"A", "B"}))));
    CHECK(!holds(w.table, Dependency(Constant{A})));
    // splits only, never swaps
    auto lists = canonical_lists(m.universe, 2);
    for (const auto& x : lists)
        for (const auto& y : lists)
            CHECK(find_swap(w.table, x, y) == std::nullopt);
}

TEST_CASE("split table preserves implied one-way dependencies") {
    ConstraintSet m({Dependency(FuncDep{{A}, {B}})});
    WitnessTable w = build_split_table(m);
    CHECK(holds(w.table, od(L({"A"}), L({"A", "B"}))));
    CHECK(holds(w.table, Dependency(FuncDep{{A}, {B}})));
    CHECK(!holds(w.table, od(L({"B"}), L({"B", "A"}))));
}

TEST_CASE("split table edge cases") {
    CHECK(build_split_table(ConstraintSet{}).table.row_count() == 0);
    ConstraintSet c({Dependency(Constant{A})}, AttrSet{A, B});
    CHECK_THROWS_AS(build_split_table(c), ConstructionError);
}

TEST_CASE("empty-context swap over two free attributes") {
    ConstraintSet m({}, AttrSet{A, B});
    auto t = build_empty_context_swap(m, A, B);
    CHECK(dump(t) == std::vector<std::vector<int>>{{0, 1}, {1, 0}});
    CHECK(!holds(t, Dependency(OrderCompat{L({"A"}), L({"B"})})));
}

TEST_CASE("empty-context swap carries compatible attributes along") {
    ConstraintSet m({Dependency(OrderCompat{L({"A"}), L({"C"})})}, AttrSet{A, B, C});
    auto t = build_empty_context_swap(m, A, B);
    CHECK(dump(t) == std::vector<std::vector<int>>{{0, 1, 0}, {1, 0, 1}});
    for (const auto& d : m.deps) CHECK(holds(t, d));
}

TEST_CASE("unconstrained attributes move with the first group") {
    // [C,A] ~ [C,B] only swaps under a tied C, so C must not stay constant
    ConstraintSet m({Dependency(OrderCompat{L({"C", "A"}), L({"C", "B"})})});
    auto t = build_empty_context_swap(m, A, B);
    CHECK(dump(t) == std::vector<std::vector<int>>{{0, 1, 0}, {1, 0, 1}});
    for (const auto& d : m.deps) CHECK(holds(t, d));
    CHECK(!holds(t, Dependency(OrderCompat{L({"A"}), L({"B"})})));
}

TEST_CASE("empty-context swap rejects impossible pairs") {
    ConstraintSet implied({od(L({"A"}), L({"B"}))});
    CHECK_THROWS_AS(build_empty_context_swap(implied, A, B), ConstructionError);
    ConstraintSet chained({Dependency(OrderCompat{L({"A"}), L({"C"})}),
                           Dependency(OrderCompat{L({"C"}), L({"B"})})});
    CHECK_THROWS_AS(build_empty_context_swap(chained, A, B), ConstructionError);
    ConstraintSet free2({}, AttrSet{A, B});
    CHECK_THROWS_AS(build_empty_context_swap(free2, A, C), SchemaError);
}

TEST_CASE("maximal contexts") {
    ConstraintSet free4({}, AttrSet{A, B, C, D});
    auto mc = maximal_contexts(free4, A, B);
    REQUIRE(mc.size() == 1);
    CHECK(mc[0].context.attrs == AttrSet{C, D});

    ConstraintSet guarded({Dependency(OrderCompat{L({"C", "A"}), L({"C", "B"})})});
    auto mc2 = maximal_contexts(guarded, A, B);
    REQUIRE(mc2.size() == 1);
    CHECK(mc2[0].context.attrs.empty());

    ConstraintSet linked({Dependency(OrderCompat{L({"A"}), L({"C"})})},
                         AttrSet{A, B, C});
    auto mc3 = maximal_contexts(linked, A, B);
    REQUIRE(mc3.size() == 1);
    CHECK(mc3[0].context.attrs == AttrSet{C});
}

TEST_CASE("emitted contexts permit a swap and are maximal") {
    std::vector<ConstraintSet> sets = {
        ConstraintSet({}, AttrSet{A, B, C, D}),
        ConstraintSet({od(L({"A"}), L({"B"}))}, AttrSet{A, B, C}),
        ConstraintSet({Dependency(OrderCompat{L({"A"}), L({"C"})})}, AttrSet{A, B, C}),
        ConstraintSet({Dependency(OrderCompat{L({"C", "A"}), L({"C", "B"})}),
                       od(L({"D"}), L({"C"}))}),
    };
    for (const auto& m : sets) {
        std::vector<Attribute> attrs(m.universe.begin(), m.universe.end());
        for (std::size_t i = 0; i < attrs.size(); ++i)
            for (std::size_t j = i + 1; j < attrs.size(); ++j) {
                for (const auto& mc : maximal_contexts(m, attrs[i], attrs[j])) {
                    MarkedList va, vb;
                    for (const auto& w : mc.context.attrs) {
                        va.items.push_back(w);
                        vb.items.push_back(w);
                    }
                    va.items.push_back(attrs[i]);
                    vb.items.push_back(attrs[j]);
                    CHECK(!decide(m, Dependency(OrderCompat{va, vb})).implied());
                    for (const auto& w : m.universe) {
                        if (w == attrs[i] || w == attrs[j]) continue;
                        if (mc.context.attrs.count(w)) continue;
                        AttrSet wider = mc.context.attrs;
                        wider.insert(w);
                        CHECK(!detail::swappable(m, wider, attrs[i], attrs[j], {}));
                    }
                }
            }
    }
}

TEST_CASE("swap table over two attributes") {
    ConstraintSet free2({}, AttrSet{A, B});
    WitnessTable w = build_swap_table(free2);
    CHECK(!holds(w.table, Dependency(OrderCompat{L({"A"}), L({"B"})})));
    REQUIRE(w.blocks.size() == 1);
    CHECK(w.blocks[0].note == "swap base enumeration");

    ConstraintSet mono({od(L({"A"}), L({"B"}))});
    WitnessTable w2 = build_swap_table(mono);
    for (const auto& d : mono.deps) CHECK(holds(w2.table, d));
    CHECK(holds(w2.table, Dependency(OrderCompat{L({"A"}), L({"B"})})));
}

TEST_CASE("swap table recursion freezes each context") {
    ConstraintSet free3({}, AttrSet{A, B, C});
    WitnessTable w = build_swap_table(free3);
    for (const auto& g :
         {od(L({"A", "B"}), L({"B", "A"})), od(L({"C", "A", "B"}), L({"C", "B", "A"})),
          od(L({"B", "C"}), L({"C", "B"}))})
        CHECK(!holds(w.table, g));
    ConstraintSet c({Dependency(Constant{A})}, AttrSet{A, B});
    CHECK_THROWS_AS(build_swap_table(c), ConstructionError);
}

TEST_CASE("armstrong table fixes constant columns") {
    ConstraintSet m({Dependency(Constant{A}), od(L({"B"}), L({"C"}))});
    WitnessTable w = build_armstrong_table(m);
    REQUIRE(w.table.row_count() > 0);
    const auto& col = w.table.column(A);
    for (const auto& v : col) CHECK(v == col.front());
    for (const auto& d : m.deps) CHECK(holds(w.table, d));
    ConstraintSet all({Dependency(Constant{A}), Dependency(Constant{B})});
    WitnessTable wa = build_armstrong_table(all);
    CHECK(wa.table.row_count() == 1);
}

TEST_CASE("armstrong table falsifies the free-pair classics") {
    ConstraintSet m({}, AttrSet{A, B});
    WitnessTable w = build_armstrong_table(m);
    CHECK(!holds(w.table, od(L({"A"}), L({"B"}))));
    CHECK(!holds(w.table, od(L({"B"}), L({"A"}))));
    CHECK(!holds(w.table, od(L({"A"}), L({"A", "B"}))));
    CHECK(!holds(w.table, Dependency(OrderCompat{L({"A"}), L({"B"})})));
}

TEST_CASE("armstrong blocks partition the rows") {
    ConstraintSet m({od(L({"A"}), L({"B"}))}, AttrSet{A, B, C});
    WitnessTable w = build_armstrong_table(m);
    std::size_t at = 0;
    for (const auto& b : w.blocks) {
        CHECK(b.first_row == at);
        at += b.row_count;
    }
    CHECK(at == w.table.row_count());
}

TEST_CASE("armstrong output is deterministic") {
    ConstraintSet m({od(L({"A"}), L({"B"})),
                     Dependency(OrderCompat{L({"B"}), L({"C"})})});
    WitnessTable w1 = build_armstrong_table(m);
    WitnessTable w2 = build_armstrong_table(m);
    CHECK(dump(w1.table) == dump(w2.table));
}

TEST_CASE("armstrong table matches the decision procedure exactly") {
    std::vector<ConstraintSet> sets = {
        ConstraintSet({}, AttrSet{A, B, C}),
        ConstraintSet({Dependency(OrderCompat{L({"C", "A"}), L({"C", "B"})})}),
        ConstraintSet({od(L({"A"}), L({"B"})),
                       Dependency(OrderCompat{L({"B"}), L({"C"})})}),
        ConstraintSet({Dependency(Constant{B}),
                       Dependency(OrderCompat{L({"A"}), L({"C"})})}),
        ConstraintSet({Dependency(FuncDep{{A}, {B, C}})}),
        ConstraintSet({Dependency(OrderEquiv{L({"A"}), L({"B"})})}, AttrSet{A, B, C}),
        ConstraintSet({Dependency(OrderCompat{L({"A"}), L({"B"})}),
                       Dependency(OrderCompat{L({"B"}), L({"C"})})}),
        ConstraintSet({Dependency(OrderCompat{L({"B", "A"}), L({"B", "C"})})}),
    };
    for (const auto& m : sets) check_armstrong_exact(m);
}

TEST_CASE("armstrong table survives randomized constraint sets") {
    std::mt19937 rng(20240817);
    std::vector<Attribute> pool{A, B, C};
    auto rand_list = [&](std::size_t max_len) {
        std::uniform_int_distribution<std::size_t> len(0, max_len);
        std::vector<Attribute> p = pool;
        std::shuffle(p.begin(), p.end(), rng);
        MarkedList l;
        std::size_t n = len(rng);
        for (std::size_t i = 0; i < n; ++i) l.items.push_back(p[i]);
        return l;
    };
    std::uniform_int_distribution<int> kind(0, 4), which(0, 2);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Dependency> ds;
        std::uniform_int_distribution<int> nd(1, 3);
        int n = nd(rng);
        for (int i = 0; i < n; ++i) {
            switch (kind(rng)) {
                case 0: ds.push_back(od(rand_list(2), rand_list(2))); break;
                case 1: ds.push_back(Dependency(OrderEquiv{rand_list(2), rand_list(2)})); break;
                case 2: ds.push_back(Dependency(OrderCompat{rand_list(2), rand_list(2)})); break;
                case 3: {
                    AttrSet l = rand_list(2).to_set(), r = rand_list(2).to_set();
                    if (r.empty()) r.insert(pool[which(rng)]);
                    ds.push_back(Dependency(FuncDep{l, r}));
                    break;
                }
                default: ds.push_back(Dependency(Constant{pool[which(rng)]})); break;
            }
        }
        check_armstrong_exact(ConstraintSet(std::move(ds), AttrSet{A, B, C}));
    }
}

TEST_CASE("armstrong table over four free attributes") {
    ConstraintSet m({}, AttrSet{A, B, C, D});
    WitnessTable w = build_armstrong_table(m);
    auto lists = canonical_lists(m.universe, 3);
    for (const auto& x : lists)
        for (const auto& y : lists) {
            Dependency g = od(x, y);
            CHECK(holds(w.table, g) == decide(m, g).implied());
        }
}
