// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with its runtime.

#include <qhm/closure.hpp>
#include <qhm/engine.hpp>
#include <qhm/gen.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdio>
#include <string>

using namespace qhm;

namespace {

struct stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double secs() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int n, const std::string& name, bool ok, double secs) {
    std::printf("[%s] criterion %2d: %s (%.2fs)\n", ok ? "PASS" : "FAIL", n, name.c_str(), secs);
    std::fflush(stdout);
}

std::string run_cli_capture(const std::string& args, int& status) {
    std::string cmd = std::string(QHM_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t k;
    while ((k = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, k);
    status = WEXITSTATUS(pclose(p));
    return out;
}

quantale random_downset_quantale(std::uint64_t seed) {
    rng r(seed);
    const std::size_t n = 3;
    std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) le[i][i] = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (r.chance(1, 2)) le[i][j] = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (le[i][j] && le[j][k]) le[i][k] = true;
    std::vector<std::uint8_t> downsets;
    for (std::uint8_t m = 0; m < (1 << n); ++m) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (((m >> j) & 1) && le[i][j] && !((m >> i) & 1)) ok = false;
        if (ok) downsets.push_back(m);
    }
    const std::size_t sz = downsets.size();
    auto idx = [&](std::uint8_t m) {
        for (std::size_t i = 0; i < sz; ++i)
            if (downsets[i] == m) return static_cast<std::uint8_t>(i);
        throw error("not a downset");
    };
    std::vector<std::string> names;
    for (auto m : downsets) names.push_back("d" + std::to_string(m));
    std::vector<std::vector<std::uint8_t>> jt(sz, std::vector<std::uint8_t>(sz));
    std::vector<std::vector<std::uint8_t>> tt(sz, std::vector<std::uint8_t>(sz));
    for (std::size_t i = 0; i < sz; ++i)
        for (std::size_t j = 0; j < sz; ++j) {
            jt[i][j] = idx(downsets[i] | downsets[j]);
            tt[i][j] = idx(downsets[i] & downsets[j]);
        }
    return quantale::table(names, jt, tt, idx((1 << n) - 1), "downsets_" + std::to_string(seed));
}

}  // namespace

TEST_CASE("criterion 1: quantale law suite") {
    stopwatch sw;
    bool ok = true;

    ok &= quantale::bool2().validate().all_pass();
    ok &= quantale::diamond4().validate().all_pass();
    ok &= quantale::max01().validate(rat(1, 50)).all_pass();
    ok &= quantale::luk01().validate(rat(1, 50)).all_pass();
    ok &= quantale::product(quantale::luk01(), quantale::luk01()).validate(rat(1, 4)).all_pass();
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
        ok &= random_downset_quantale(seed).validate().all_pass();

    // injected faults must fail and name the violated law with a witness
    {
        // corrupted tensor on a 3-chain: join preservation/adjunction break
        quantale corrupt = quantale::table({"k", "half", "one"},
                                           {{0, 0, 0}, {0, 1, 1}, {0, 1, 2}},
                                           {{0, 1, 2}, {1, 1, 2}, {2, 2, 1}}, 0);
        auto rep = corrupt.validate();
        bool lattice_ok = true, tensor_law_broken = false, has_witness = false;
        for (const auto& c : rep.checks) {
            if (c.law == "lattice") lattice_ok = c.pass;
            if (!c.pass && (c.law == "tensor-join-preservation" || c.law == "adjunction" ||
                            c.law == "monoid")) {
                tensor_law_broken = true;
                if (!c.witness.empty()) has_witness = true;
            }
        }
        ok &= lattice_ok && tensor_law_broken && has_witness;
    }
    {
        // corrupted join table: the lattice law itself must fail
        quantale corrupt = quantale::table({"bot", "top"}, {{0, 1}, {1, 0}}, {{0, 0}, {0, 1}}, 1);
        auto rep = corrupt.validate();
        bool lattice_broken = false;
        for (const auto& c : rep.checks)
            if (c.law == "lattice" && !c.pass && !c.witness.empty()) lattice_broken = true;
        ok &= lattice_broken;
    }

    double t = sw.secs();
    report(1, "quantale law suite (bool2, diamond4, max01, luk01@1/50, luk01^2, 5 random tables, faults)",
           ok && t < 5.0, t);
    CHECK(ok);
    CHECK(t < 5.0);
}

TEST_CASE("criterion 2: fig1 reproduction") {
    stopwatch sw;
    bool ok = true;
    const rat tol(1, 1000000);
    for (const rat eps : {rat(1, 10), rat(1, 4)}) {
        coalgebra fig = make_fig1(eps);
        auto lam = default_liftings(fig);
        engine_options eopt;  // lp backend, eps 1e-9
        auto dm = bd_fixpoint(fig, lam, eopt);
        std::size_t i = fig.base.state_index("rootL"), j = fig.base.state_index("rootR");
        ok &= dm.converged && dm.residual <= rat(1, 1000000000);
        ok &= abs(dm.m.a[i][j].num() - eps) <= tol;
        auto sep = distinguishing_formula(fig, lam, i, j, 3000);
        ok &= modal_depth(sep.phi) <= 2;
        ok &= sep.gap.num() >= eps - tol;
    }
    double t = sw.secs();
    report(2, "fig1: bd(rootL,rootR) = eps, depth-2 formula achieves the gap", ok && t < 2.0, t);
    CHECK(ok);
    CHECK(t < 2.0);
}

TEST_CASE("criterion 3: V=2 equivalence (200 instances up to 30 states)") {
    stopwatch sw;
    bool ok = true;
    rng seeds(20260810);
    for (int t = 0; t < 200 && ok; ++t) {
        const std::size_t n = 2 + seeds.below(29);  // 2..30
        coalgebra c = gen_coalgebra(fkind::lts, n, 2, seeds.next());
        auto dm = bd_fixpoint(c, default_liftings(c), {});
        ok &= dm.converged;
        auto from_bd = equivalence_classes(dm.m);
        auto from_pr = partition_refinement(c);
        for (std::size_t i = 0; i < n && ok; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if ((from_bd[i] == from_bd[j]) != (from_pr[i] == from_pr[j])) {
                    ok = false;
                    break;
                }
        ld_options lopt;
        lopt.depth = n;
        lopt.keep_basis = false;
        auto ld = logical_distance(c, default_liftings(c), lopt);
        ok &= ld.dm.m.a == dm.m.a;
    }
    double t = sw.secs();
    report(3, "bd == partition refinement and ld@|X| == bd on 200 random bool2 lts", ok && t < 60.0,
           t);
    CHECK(ok);
    CHECK(t < 60.0);
}

TEST_CASE("criterion 4: adequacy across all five functors") {
    stopwatch sw;
    bool ok = true;
    std::size_t checked = 0;
    rng seeds(40);
    for (auto kind : {fkind::lts, fkind::metric_ts, fkind::para_powerset, fkind::dist_maybe,
                      fkind::signed_weighted}) {
        std::size_t max_n = kind == fkind::para_powerset ? 4u
                            : kind == fkind::signed_weighted ? 3u
                            : kind == fkind::dist_maybe ? 4u
                                                        : 6u;
        for (int t = 0; t < 100; ++t) {
            const std::size_t n = 2 + seeds.below(max_n - 1);
            coalgebra c = gen_coalgebra(kind, n, 2, seeds.next());
            ld_options lopt;
            lopt.width = 220;
            auto rep = check_adequacy(c, default_liftings(c), 2, {}, lopt);
            if (!rep.pass) {
                ok = false;
                std::printf("  adequacy violation: %s seed-case %d: %s\n",
                            fkind_name(kind).c_str(), t, rep.witness.c_str());
                break;
            }
            ++checked;
        }
    }
    double t = sw.secs();
    report(4, "adequacy: formula gaps below bd on 100 instances x 5 functors", ok, t);
    CHECK(ok);
    CHECK(checked == 500);
}

TEST_CASE("criterion 5: expressivity convergence") {
    stopwatch sw;
    bool ok = true;

    // finite quantales: exact equality at saturation depth
    rng seeds(50);
    for (int t = 0; t < 100 && ok; ++t) {
        fkind kind = t % 2 ? fkind::para_powerset : fkind::lts;
        const std::size_t n = 2 + seeds.below(kind == fkind::para_powerset ? 4 : 5);  // <= 6
        coalgebra c = gen_coalgebra(kind, n, 2, seeds.next());
        std::vector<std::size_t> schedule;
        for (std::size_t d = 0; d <= std::min<std::size_t>(4 * n + 4, 16); ++d)
            schedule.push_back(d);
        auto rep = check_expressivity(c, default_liftings(c), schedule, {}, {});
        ok &= rep.monotone && rep.saturated && rep.exact_at_end;
        if (!ok) std::printf("  finite expressivity failed: %s n=%zu case %d\n",
                             fkind_name(kind).c_str(), n, t);
    }

    // luk01 dist_maybe: gap non-increasing, <= 0.05 at depth 4
    for (int t = 0; t < 50 && ok; ++t) {
        const std::size_t n = 2 + seeds.below(4);  // <= 5
        coalgebra c = gen_coalgebra(fkind::dist_maybe, n, 1, seeds.next());
        ld_options lopt;
        lopt.width = 600;
        auto rep = check_expressivity(c, default_liftings(c), {0, 1, 2, 3, 4}, {}, lopt);
        ok &= rep.monotone;
        ok &= !rep.gaps.empty() && rep.gaps.back().second <= rat(1, 20);
        if (!ok)
            std::printf("  luk01 expressivity: case %d n=%zu final gap %s\n", t, n,
                        rep.gaps.back().second.str().c_str());
    }
    double t = sw.secs();
    report(5, "expressivity: exact at saturation (finite), gap <= 0.05 at depth 4 (luk01)",
           ok && t < 600.0, t);
    CHECK(ok);
    CHECK(t < 600.0);
}

TEST_CASE("criterion 6: lp vs grid enumeration") {
    stopwatch sw;
    bool ok = true;
    rng seeds(60);
    const rat step(1, 16);
    int pairs = 0;
    while (pairs < 100 && ok) {
        coalgebra c = gen_coalgebra(fkind::dist_maybe, 4, 1, seeds.next());
        auto lam = default_liftings(c);
        for (auto [x, y] : {std::pair<std::size_t, std::size_t>{0, 1}, {2, 3}}) {
            value lp = dist_maybe_lp(c.base, std::get<dist_val>(c.alpha[x]),
                                     std::get<dist_val>(c.alpha[y]));
            value en = lifted_distance(lam, c.base, c.alpha[x], c.alpha[y],
                                       {backend::enumeration, step});
            ok &= en.num() <= lp.num();
            ok &= lp.num() - en.num() <= rat(4) * step;
            // exact rationals: the lp value reproduces itself exactly
            value lp2 = dist_maybe_lp(c.base, std::get<dist_val>(c.alpha[x]),
                                      std::get<dist_val>(c.alpha[y]));
            ok &= lp == lp2;
            ++pairs;
        }
    }
    double t = sw.secs();
    report(6, "lp >= grid enumeration, gap <= |carrier| * 1/16, exact rationals (100 pairs)", ok, t);
    CHECK(ok);
}

TEST_CASE("criterion 7: Stone-Weierstrass suite") {
    stopwatch sw;
    bool ok = true;

    auto run = [&](closure_op op, const quantale& q, const char* name) {
        auto rep = check_characterizes_initiality(op, q, 3, 50, 7777);
        if (!rep.pass()) {
            ok = false;
            std::printf("  sw failure on %s: %zu/%zu\n", name, rep.failures, rep.trials);
        }
    };
    run(closure_op::id, quantale::bool2(), "(Id, bool2)");
    run(closure_op::id, quantale::diamond4(), "(Id, diamond4)");
    run(closure_op::c_inf_sup, quantale::diamond4(), "(cInfSup, diamond4)");
    run(closure_op::inf, quantale::godel_chain(2), "(Inf, distributive chain)");

    // decomposition identity, 100 checks across bool2 and diamond4
    rng seeds(70);
    int decomp = 0;
    while (decomp < 100 && ok) {
        quantale q = decomp % 2 ? quantale::diamond4() : quantale::bool2();
        const std::size_t n = 2 + seeds.below(2);
        auto carrier = q.carrier();
        std::vector<predicate> gens;
        for (std::size_t k = 0; k < 1 + seeds.below(2); ++k) {
            predicate g(n);
            for (auto& v : g) v = carrier[seeds.below(carrier.size())];
            gens.push_back(std::move(g));
        }
        vcat x = initial_structure_from_predicates(q, default_state_names(n), gens);
        auto algebra = prop_algebra_closure(x, gens, carrier);
        auto funs = all_nonexpansive(x);
        const predicate& f = funs[seeds.below(funs.size())];
        if (!check_decomposition(x, algebra.preds, f)) {
            ok = false;
            std::printf("  decomposition failed at check %d\n", decomp);
        }
        ++decomp;
    }
    double t = sw.secs();
    report(7, "characterizes-initiality 50/50 x 4 configs; decomposition 100/100", ok, t);
    CHECK(ok);
}

TEST_CASE("criterion 8: closure laws and Fun dominance") {
    stopwatch sw;
    bool ok = true;
    rng seeds(80);
    int dominance = 0;
    for (int t = 0; t < 100 && ok; ++t) {
        quantale q = t % 2 ? quantale::diamond4() : quantale::bool2();
        vcat x = gen_vcat(q, 1 + seeds.below(3), seeds.next());
        auto funs = all_nonexpansive(x);
        predicate_set a;
        for (std::size_t k = 0; k < 1 + seeds.below(3); ++k)
            a.push_back(funs[seeds.below(funs.size())]);
        a = dedup(std::move(a));
        auto fun_a = close(closure_op::fun, x, a);
        for (auto op : {closure_op::id, closure_op::l, closure_op::c_inf_sup, closure_op::inf}) {
            auto ca = close(op, x, a);
            ok &= subset_of(a, ca);
            ok &= close(op, x, ca) == ca;
            predicate_set b = a;
            b.push_back(funs[seeds.below(funs.size())]);
            b = dedup(std::move(b));
            ok &= subset_of(ca, close(op, x, b));
            ok &= subset_of(ca, fun_a);
        }
        ++dominance;
    }
    double t = sw.secs();
    report(8, "closure extensive/monotone/idempotent; C(A) within Fun(A) on 100 samples",
           ok && dominance == 100, t);
    CHECK(ok);
    CHECK(dominance == 100);
}

TEST_CASE("criterion 9: morphism invariance on bisimilarity quotients") {
    stopwatch sw;
    bool ok = true;
    rng seeds(90);
    for (int t = 0; t < 50 && ok; ++t) {
        coalgebra c = gen_coalgebra(fkind::lts, 2 + seeds.below(11), 2, seeds.next());
        auto qt = quotient_by_bisimilarity(c);
        ld_options lopt;
        lopt.depth = 3;
        auto rep = check_morphism_invariance(c, qt.q, qt.map, default_liftings(c), {}, lopt);
        if (!rep.pass()) {
            ok = false;
            std::printf("  invariance failed at case %d: %s\n", t, rep.witness.c_str());
        }
    }
    double t = sw.secs();
    report(9, "bisimilarity quotients preserve bd and formula semantics (50 instances)", ok, t);
    CHECK(ok);
}

TEST_CASE("criterion 10: byte-identical reruns") {
    stopwatch sw;
    bool ok = true;
    const std::string data = QHM_DATA_DIR;
    for (const std::string cmd :
         {std::string("gen --functor signed_weighted --states 5 --seed 99"),
          std::string("gen --functor dist_maybe --states 6 --seed 123"),
          std::string("bd --in ") + data + "/fig1_eps_1_10.json",
          std::string("ld --in ") + data + "/para_example.json --depth 3",
          std::string("check sw --quantale diamond4 --op id --trials 10 --seed 3"),
          std::string("distinguish --in ") + data + "/signed_example.json --x x --y y --budget 300"}) {
        int s1 = 0, s2 = 0;
        std::string a = run_cli_capture(cmd, s1);
        std::string b = run_cli_capture(cmd, s2);
        if (a != b || s1 != s2) {
            ok = false;
            std::printf("  nondeterministic output for: %s\n", cmd.c_str());
        }
    }
    double t = sw.secs();
    report(10, "identical seed and config give byte-identical reports", ok, t);
    CHECK(ok);
}
