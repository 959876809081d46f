#include <qhm/lp.hpp>
#include <qhm/rng.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace qhm;

TEST_CASE("simplex solves small equality-form programs") {
    // min -x - y  s.t. x + y + s = 1  -> optimum -1
    auto res = simplex::solve({{rat(1), rat(1), rat(1)}}, {rat(1)}, {rat(-1), rat(-1), rat(0)});
    REQUIRE(res.feasible);
    CHECK(res.objective == rat(-1));

    // infeasible: x + y = -1 handled by sign flip, x - x = 1 impossible
    auto inf = simplex::solve({{rat(1), rat(-1)}}, {rat(1)},
                              {rat(0), rat(0)});
    CHECK(inf.feasible);  // x=1,y=0 works

    auto really_inf = simplex::solve({{rat(1), rat(1)}, {rat(1), rat(1)}}, {rat(1), rat(2)},
                                     {rat(0), rat(0)});
    CHECK_FALSE(really_inf.feasible);
}

TEST_CASE("transport basics") {
    // equal distributions cost 0
    std::vector<std::vector<rat>> c{{rat(0), rat(1)}, {rat(1), rat(0)}};
    CHECK(transport(c, {rat(1, 2), rat(1, 2)}, {rat(1, 2), rat(1, 2)}) == rat(0));
    // point masses: cost = distance
    CHECK(transport(c, {rat(1), rat(0)}, {rat(0), rat(1)}) == rat(1));
    // mass mismatch
    CHECK_THROWS(transport(c, {rat(1), rat(0)}, {rat(1, 2), rat(0)}));
}

TEST_CASE("transport moves epsilon across distance 1") {
    // mu = (1/2, 1/2, 0-class merged), nu = (1/2+e, 1/2-e) with d(B,C)=1
    rat e(1, 10);
    std::vector<std::vector<rat>> c{{rat(0), rat(1)}, {rat(1), rat(0)}};
    CHECK(transport(c, {rat(1, 2), rat(1, 2)}, {rat(1, 2) + e, rat(1, 2) - e}) == e);
}

TEST_CASE("transport against brute-force couplings on a grid") {
    // 2x2 couplings have one degree of freedom; check exact optimum
    rng r(17);
    for (int t = 0; t < 50; ++t) {
        rat d01(static_cast<long>(r.below(9)), 8);
        std::vector<std::vector<rat>> c{{rat(0), d01}, {d01, rat(0)}};
        rat m0(static_cast<long>(r.below(5)), 4);
        rat n0(static_cast<long>(r.below(5)), 4);
        std::vector<rat> mu{m0, rat(1) - m0}, nu{n0, rat(1) - n0};
        // optimal cost = d01 * |m0 - n0|
        CHECK(transport(c, mu, nu) == d01 * abs(m0 - n0));
    }
}

TEST_CASE("transport on random 3-point instances matches exhaustive search") {
    rng r(29);
    for (int t = 0; t < 20; ++t) {
        // random metric-ish costs (not necessarily triangle; LP doesn't care)
        std::vector<std::vector<rat>> c(3, std::vector<rat>(3, rat(0)));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) c[i][j] = rat(static_cast<long>(1 + r.below(8)), 8);
        // masses on a fixed denominator so couplings enumerate exactly
        const long D = 60;
        auto rnd_dist = [&]() {
            long a = static_cast<long>(r.below(D + 1));
            long b = static_cast<long>(r.below(D + 1 - a));
            return std::vector<long>{a, b, D - a - b};
        };
        auto mu_n = rnd_dist(), nu_n = rnd_dist();
        std::vector<rat> mu, nu;
        for (long v : mu_n) mu.push_back(rat(v, D));
        for (long v : nu_n) nu.push_back(rat(v, D));
        rat lp = transport(c, mu, nu);
        rat best(10);
        long m0 = mu_n[0], m1 = mu_n[1], n0 = nu_n[0], n1 = nu_n[1];
        long m2 = mu_n[2], n2 = nu_n[2];
        for (long g00 = 0; g00 <= std::min(m0, n0); ++g00)
            for (long g01 = 0; g01 <= std::min(m0 - g00, n1); ++g01) {
                long g02 = m0 - g00 - g01;
                if (g02 > n2) continue;
                for (long g10 = 0; g10 <= std::min(m1, n0 - g00); ++g10)
                    for (long g11 = 0; g11 <= std::min(m1 - g10, n1 - g01); ++g11) {
                        long g12 = m1 - g10 - g11;
                        if (g12 > n2 - g02) continue;
                        long g20 = n0 - g00 - g10;
                        long g21 = n1 - g01 - g11;
                        long g22 = n2 - g02 - g12;
                        if (g20 < 0 || g21 < 0 || g22 < 0 || g20 + g21 + g22 != m2) continue;
                        rat cost = (c[0][1] * rat(g01) + c[0][2] * rat(g02) + c[1][0] * rat(g10) +
                                    c[1][2] * rat(g12) + c[2][0] * rat(g20) + c[2][1] * rat(g21)) /
                                   rat(D);
                        best = min(best, cost);
                    }
            }
        CHECK(lp == best);
    }
}

TEST_CASE("lipschitz_max solves the dual potential problem") {
    // single point: max h*f with f in [0,1]
    CHECK(lipschitz_max({rat(1, 2)}, {{rat(0)}}) == rat(1, 2));
    CHECK(lipschitz_max({rat(-1, 2)}, {{rat(0)}}) == rat(0));

    // two points at distance 1/4 with opposite signs: f can differ by 1/4
    std::vector<std::vector<rat>> d{{rat(0), rat(1, 4)}, {rat(1, 4), rat(0)}};
    CHECK(lipschitz_max({rat(1), rat(-1)}, d) == rat(1, 4));

    // distance 0 forces equal values: sum h = 1/2 - 1/4 > 0, best f = 1
    std::vector<std::vector<rat>> z{{rat(0), rat(0)}, {rat(0), rat(0)}};
    CHECK(lipschitz_max({rat(1, 2), rat(-1, 4)}, z) == rat(1, 4));
}

TEST_CASE("lipschitz_max against grid enumeration") {
    rng r(41);
    for (int t = 0; t < 25; ++t) {
        const std::size_t n = 3;
        // random pseudometric via shortest-path repair of random entries
        std::vector<std::vector<rat>> d(n, std::vector<rat>(n, rat(0)));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                rat v(static_cast<long>(r.below(9)), 8);
                d[i][j] = v;
                d[j][i] = v;
            }
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) d[i][j] = min(d[i][j], d[i][k] + d[k][j]);
        std::vector<rat> h(n);
        for (auto& e : h) e = rat(static_cast<long>(r.below(9)) - 4, 4);
        rat lp = lipschitz_max(h, d);
        rat best(0);
        const long G = 8;
        for (long f0 = 0; f0 <= G; ++f0)
            for (long f1 = 0; f1 <= G; ++f1)
                for (long f2 = 0; f2 <= G; ++f2) {
                    std::vector<rat> f{rat(f0, G), rat(f1, G), rat(f2, G)};
                    bool ok = true;
                    for (std::size_t i = 0; i < n && ok; ++i)
                        for (std::size_t j = 0; j < n; ++j)
                            if (abs(f[i] - f[j]) > d[i][j]) ok = false;
                    if (!ok) continue;
                    rat sum(0);
                    for (std::size_t i = 0; i < n; ++i) sum += h[i] * f[i];
                    best = max(best, sum);
                }
        CHECK(lp >= best);
        // grid granularity bound
        CHECK(lp - best <= rat(3, 8));
    }
}
