#include <qhm/closure.hpp>
#include <qhm/engine.hpp>
#include <qhm/gen.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace qhm;

TEST_CASE("fig1 behavioural distance equals eps") {
    for (const rat eps : {rat(1, 10), rat(1, 4)}) {
        coalgebra fig = make_fig1(eps);
        auto lam = default_liftings(fig);
        auto dm = bd_fixpoint(fig, lam, {});
        CHECK(dm.converged);
        CHECK(dm.residual == rat(0));
        CHECK(dm.m.a[fig.base.state_index("rootL")][fig.base.state_index("rootR")] ==
              value(eps));
        CHECK(validate_vcat(dm.m).valid());
        CHECK(validate_vcat(dm.m).symmetric);
    }
}

TEST_CASE("one-state self-loop system has unit diagonal") {
    coalgebra c;
    c.kind = fkind::dist_maybe;
    c.labels = {"a"};
    c.base = vcat::discrete(quantale::luk01(), {"only"});
    c.alpha.push_back(dist_val{{distribution{{{0, rat(1)}}, rat(0)}}});
    auto dm = bd_fixpoint(c, default_liftings(c), {});
    CHECK(dm.m.a[0][0] == c.base.q.top());
    CHECK(dm.converged);
}

TEST_CASE("bd on bool2 lts equals partition refinement") {
    rng r(101);
    for (int t = 0; t < 25; ++t) {
        coalgebra c = gen_coalgebra(fkind::lts, 3 + r.below(18), 2, r.next());
        auto dm = bd_fixpoint(c, default_liftings(c), {});
        CHECK(dm.converged);
        auto from_bd = equivalence_classes(dm.m);
        auto from_pr = partition_refinement(c);
        const std::size_t n = c.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                CHECK((from_bd[i] == from_bd[j]) == (from_pr[i] == from_pr[j]));
    }
}

TEST_CASE("partition refinement basics") {
    // two deadlock states are equivalent; deadlock vs step are not
    coalgebra c = gen_coalgebra(fkind::lts, 3, 1, 0);
    std::get<lts_val>(c.alpha[0]).succ[0] = {};
    std::get<lts_val>(c.alpha[1]).succ[0] = {};
    std::get<lts_val>(c.alpha[2]).succ[0] = {0};
    auto cls = partition_refinement(c);
    CHECK(cls[0] == cls[1]);
    CHECK(cls[0] != cls[2]);
}

TEST_CASE("bd iterates descend in the quantale order and land on a fixpoint") {
    for (auto kind : {fkind::lts, fkind::para_powerset, fkind::metric_ts}) {
        coalgebra c = gen_coalgebra(kind, 4, 2, 31);
        auto lam = default_liftings(c);
        auto dm = bd_fixpoint(c, lam, {});
        REQUIRE(dm.converged);
        // one more exact step changes nothing
        std::vector<predicate> family;
        const std::vector<predicate>* fam = nullptr;
        if (c.base.q.finite() && kind != fkind::lts) {
            family = all_nonexpansive(dm.m);
            fam = &family;
        }
        for (std::size_t x = 0; x < c.size(); ++x)
            for (std::size_t y = 0; y < c.size(); ++y)
                CHECK(exact_step_distance(c, lam, dm.m, c.alpha[x], c.alpha[y], fam) ==
                      dm.m.a[x][y]);
        // iterates descend: first step from indiscrete dominates the fixpoint
        vcat ind = vcat::indiscrete(c.base.q, c.base.states);
        std::vector<predicate> fam0;
        const std::vector<predicate>* fam0p = nullptr;
        if (c.base.q.finite() && kind != fkind::lts) {
            fam0 = all_nonexpansive(ind);
            fam0p = &fam0;
        }
        for (std::size_t x = 0; x < c.size(); ++x)
            for (std::size_t y = 0; y < c.size(); ++y) {
                value b1 = exact_step_distance(c, lam, ind, c.alpha[x], c.alpha[y], fam0p);
                CHECK(c.base.q.leq(dm.m.a[x][y], b1));
            }
    }
}

TEST_CASE("luk01 fixpoint metadata reports a residual") {
    coalgebra c = gen_coalgebra(fkind::dist_maybe, 4, 1, 7);
    engine_options opt;
    opt.eps = rat(1, 1000000);
    auto dm = bd_fixpoint(c, default_liftings(c), opt);
    CHECK(dm.converged);
    CHECK(dm.residual <= opt.eps);
    CHECK(validate_vcat(dm.m).valid());
    // max_iter cutoff returns a flagged result instead of throwing
    engine_options tight;
    tight.max_iter = 1;
    auto partial = bd_fixpoint(c, default_liftings(c), tight);
    CHECK(partial.steps == 1);
}

TEST_CASE("logical distance on fig1 reaches eps at depth 2") {
    coalgebra fig = make_fig1(rat(1, 10));
    auto lam = default_liftings(fig);
    ld_options opt;
    opt.depth = 2;
    opt.width = 600;
    auto res = logical_distance(fig, lam, opt);
    std::size_t i = fig.base.state_index("rootL"), j = fig.base.state_index("rootR");
    CHECK(res.dm.m.a[i][j] == value(rat(1, 10)));
    // depth snapshots are antitone in the quantale order
    REQUIRE(res.per_depth.size() >= 3);
    for (std::size_t d = 1; d < res.per_depth.size(); ++d)
        for (std::size_t x = 0; x < fig.size(); ++x)
            for (std::size_t y = 0; y < fig.size(); ++y)
                CHECK(fig.base.q.leq(res.per_depth[d].a[x][y], res.per_depth[d - 1].a[x][y]));
    // depth 0 separates nothing (constants only)
    CHECK(res.per_depth[0].a[i][j] == fig.base.q.top());
}

TEST_CASE("ld at depth |X| equals bisimilarity on bool2 systems") {
    rng r(211);
    for (int t = 0; t < 10; ++t) {
        coalgebra c = gen_coalgebra(fkind::lts, 4 + r.below(8), 2, r.next());
        ld_options opt;
        opt.depth = c.size();
        auto res = logical_distance(c, default_liftings(c), opt);
        auto pr = partition_refinement(c);
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < c.size(); ++j) {
                bool equiv = pr[i] == pr[j];
                CHECK((res.dm.m.a[i][j] == c.base.q.top()) == equiv);
            }
        CHECK(res.saturated);
    }
}

TEST_CASE("generic and partition ld paths agree on bool2 lts") {
    rng r(307);
    for (int t = 0; t < 8; ++t) {
        coalgebra c = gen_coalgebra(fkind::lts, 2 + r.below(3), 1, r.next());
        ld_options fast;
        fast.depth = c.size() + 1;
        ld_options slow = fast;
        slow.force_generic = true;
        auto a = logical_distance(c, default_liftings(c), fast);
        auto b = logical_distance(c, default_liftings(c), slow);
        CHECK(a.dm.m.a == b.dm.m.a);
    }
}

TEST_CASE("distinguishing formula search") {
    coalgebra fig = make_fig1(rat(1, 10));
    auto lam = default_liftings(fig);
    auto res = distinguishing_formula(fig, lam, fig.base.state_index("rootL"),
                                      fig.base.state_index("rootR"), 2000);
    CHECK(res.gap == value(rat(1, 10)));
    CHECK(modal_depth(res.phi) == 2);

    // bisimilar bool2 states admit no separating formula
    coalgebra c = gen_coalgebra(fkind::lts, 2, 1, 0);
    std::get<lts_val>(c.alpha[0]).succ[0] = {0};
    std::get<lts_val>(c.alpha[1]).succ[0] = {1};
    auto none = distinguishing_formula(c, default_liftings(c), 0, 1, 500);
    CHECK(none.gap == c.base.q.top());

    // paraconsistent example distinguished at depth 1
    coalgebra p = make_para_example();
    auto sep = distinguishing_formula(p, default_liftings(p), 0, 1, 500);
    CHECK_FALSE(sep.gap == p.base.q.top());
    CHECK(modal_depth(sep.phi) == 1);

    // budget 0 returns top
    auto lazy = distinguishing_formula(fig, lam, 0, 3, 0);
    CHECK(formula_str(lazy.phi, fig.base.q, fig.labels) == "(top)");

    CHECK_THROWS(distinguishing_formula(fig, lam, 1, 1, 10));
}

TEST_CASE("distinguishing gap never exceeds bd numerically") {
    rng r(401);
    for (int t = 0; t < 6; ++t) {
        coalgebra c = gen_coalgebra(fkind::dist_maybe, 3, 1, r.next());
        auto lam = default_liftings(c);
        auto dm = bd_fixpoint(c, lam, {});
        auto res = distinguishing_formula(c, lam, 0, 1, 400);
        CHECK(res.gap.num() <= dm.m.a[0][1].num() + dm.residual);
    }
}

TEST_CASE("adequacy holds on random instances of every functor") {
    rng r(501);
    for (auto kind : {fkind::lts, fkind::metric_ts, fkind::para_powerset, fkind::dist_maybe,
                      fkind::signed_weighted}) {
        for (int t = 0; t < 4; ++t) {
            coalgebra c = gen_coalgebra(kind, 3 + r.below(2), 2, r.next());
            ld_options lopt;
            lopt.width = 400;
            auto rep = check_adequacy(c, default_liftings(c), 3, {}, lopt);
            INFO(fkind_name(kind) << " trial " << t);
            CHECK(rep.pass);
            CHECK(rep.formulas > 0);
        }
    }
}

TEST_CASE("expressivity: exact at saturation for finite quantales") {
    rng r(601);
    for (auto kind : {fkind::lts, fkind::para_powerset}) {
        for (int t = 0; t < 5; ++t) {
            coalgebra c = gen_coalgebra(kind, 2 + r.below(3), 2, r.next());
            std::vector<std::size_t> schedule;
            for (std::size_t d = 0; d <= c.size() + 2; ++d) schedule.push_back(d);
            auto rep = check_expressivity(c, default_liftings(c), schedule, {}, {});
            INFO(fkind_name(kind) << " trial " << t);
            CHECK(rep.monotone);
            CHECK(rep.saturated);
            CHECK(rep.exact_at_end);
        }
    }
}

TEST_CASE("expressivity: luk01 gap is non-increasing in depth") {
    rng r(701);
    for (int t = 0; t < 3; ++t) {
        coalgebra c = gen_coalgebra(fkind::dist_maybe, 3, 1, r.next());
        ld_options lopt;
        lopt.width = 500;
        auto rep = check_expressivity(c, default_liftings(c), {0, 1, 2, 3}, {}, lopt);
        CHECK(rep.monotone);
        REQUIRE_FALSE(rep.gaps.empty());
        CHECK(rep.gaps.front().second >= rep.gaps.back().second);
    }
}

TEST_CASE("morphism invariance under bisimilarity quotients") {
    rng r(801);
    for (int t = 0; t < 8; ++t) {
        coalgebra c = gen_coalgebra(fkind::lts, 4 + r.below(6), 2, r.next());
        auto qt = quotient_by_bisimilarity(c);
        ld_options lopt;
        lopt.depth = 3;
        auto rep = check_morphism_invariance(c, qt.q, qt.map, default_liftings(c), {}, lopt);
        CHECK(rep.pass());
    }
    // a broken map is rejected with a witness
    coalgebra c = gen_coalgebra(fkind::lts, 4, 1, 3);
    auto qt = quotient_by_bisimilarity(c);
    if (qt.q.size() >= 2) {
        auto bad = qt.map;
        bad[0] = (bad[0] + 1) % qt.q.size();
        auto rep = check_morphism_invariance(c, qt.q, bad, default_liftings(c), {}, {});
        CHECK_FALSE(rep.pass());
    }
}
