#pragma once

#include <qhm/coalgebra.hpp>
#include <qhm/rng.hpp>

#include <string>
#include <vector>

namespace qhm {

inline std::vector<std::string> default_state_names(std::size_t n) {
    std::vector<std::string> s;
    for (std::size_t i = 0; i < n; ++i) s.push_back("s" + std::to_string(i));
    return s;
}

inline std::vector<std::string> default_labels(std::size_t k) {
    static const char* pool = "abcdefgh";
    std::vector<std::string> l;
    for (std::size_t i = 0; i < k && i < 8; ++i) l.push_back(std::string(1, pool[i]));
    return l;
}

/// Seeded random coalgebra over the canonical quantale of the functor, with
/// a discrete base.
inline coalgebra gen_coalgebra(fkind kind, std::size_t n, std::size_t nlabels, std::uint64_t seed) {
    if (n == 0) throw error("gen: need at least one state");
    if (n > max_states_cap())
        throw error("gen exceeds QHM_MAX_STATES cap of " + std::to_string(max_states_cap()));
    rng r(seed);
    coalgebra c;
    c.kind = kind;
    c.base = vcat::discrete(functor_quantale(kind), default_state_names(n));
    const bool labelled =
        kind == fkind::lts || kind == fkind::dist_maybe || kind == fkind::signed_weighted;
    c.labels = labelled ? default_labels(nlabels == 0 ? 2 : nlabels) : std::vector<std::string>{};
    for (std::size_t x = 0; x < n; ++x) {
        switch (kind) {
            case fkind::lts: {
                lts_val v;
                v.succ.resize(c.labels.size());
                for (std::size_t a = 0; a < c.labels.size(); ++a)
                    for (std::size_t y = 0; y < n; ++y)
                        if (r.chance(1, 3)) v.succ[a].insert(y);
                c.alpha.push_back(std::move(v));
                break;
            }
            case fkind::metric_ts: {
                metric_val v;
                v.r = rat(static_cast<long>(r.below(9)), 8);
                for (std::size_t y = 0; y < n; ++y)
                    if (r.chance(1, 3)) v.succ.insert(y);
                c.alpha.push_back(std::move(v));
                break;
            }
            case fkind::para_powerset: {
                para_val v;
                v.grade.resize(n);
                for (std::size_t y = 0; y < n; ++y) {
                    std::uint64_t roll = r.below(6);
                    v.grade[y] = roll < 3 ? 0 : static_cast<std::uint8_t>(roll - 2);  // bot,N,B,top
                }
                c.alpha.push_back(std::move(v));
                break;
            }
            case fkind::dist_maybe: {
                dist_val v;
                for (std::size_t a = 0; a < c.labels.size(); ++a) {
                    distribution d;
                    d.dead = rat(0);
                    const std::size_t support = 1 + r.below(std::min<std::size_t>(3, n));
                    std::vector<rat> raw;
                    std::vector<std::size_t> tgt;
                    rat total(0);
                    for (std::size_t k2 = 0; k2 < support; ++k2) {
                        std::size_t y = r.below(n + 1);  // n = deadlock slot
                        rat w(static_cast<long>(1 + r.below(4)));
                        tgt.push_back(y);
                        raw.push_back(w);
                        total += w;
                    }
                    for (std::size_t k2 = 0; k2 < support; ++k2) {
                        rat p = raw[k2] / total;
                        if (tgt[k2] == n)
                            d.dead += p;
                        else {
                            auto it = d.w.find(tgt[k2]);
                            if (it == d.w.end())
                                d.w.emplace(tgt[k2], p);
                            else
                                it->second += p;
                        }
                    }
                    v.per_label.push_back(std::move(d));
                }
                c.alpha.push_back(std::move(v));
                break;
            }
            case fkind::signed_weighted: {
                weight_val v;
                for (std::size_t a = 0; a < c.labels.size(); ++a) {
                    std::map<std::size_t, rat> w;
                    const std::size_t support = 1 + r.below(std::min<std::size_t>(3, n));
                    for (std::size_t k2 = 0; k2 < support; ++k2) {
                        std::size_t y = r.below(n);
                        rat p(static_cast<long>(1 + r.below(4)), 8);
                        if (r.chance(1, 2)) p = -p;
                        w[y] += p;
                    }
                    rat pos(0), neg(0);
                    for (auto it = w.begin(); it != w.end();)
                        it = it->second == rat(0) ? w.erase(it) : std::next(it);
                    for (const auto& [_, p] : w) (p > rat(0) ? pos : neg) += p;
                    while (pos > rat(1) || neg < rat(-1)) {
                        pos = rat(0);
                        neg = rat(0);
                        for (auto& [_, p] : w) {
                            p = p / rat(2);
                            (p > rat(0) ? pos : neg) += p;
                        }
                    }
                    v.per_label.push_back(std::move(w));
                }
                c.alpha.push_back(std::move(v));
                break;
            }
        }
    }
    return c;
}

/// Layered probabilistic system: transitions only move to higher-index
/// states or deadlock, so the distance fixpoint stabilizes within n steps.
/// The convergence-rate harness samples from this family.
inline coalgebra gen_layered_dist(std::size_t n, std::size_t nlabels, std::uint64_t seed) {
    if (n == 0) throw error("gen: need at least one state");
    rng r(seed);
    coalgebra c;
    c.kind = fkind::dist_maybe;
    c.base = vcat::discrete(quantale::luk01(), default_state_names(n));
    c.labels = default_labels(nlabels == 0 ? 1 : nlabels);
    for (std::size_t x = 0; x < n; ++x) {
        dist_val v;
        for (std::size_t a = 0; a < c.labels.size(); ++a) {
            distribution d;
            d.dead = rat(0);
            const std::size_t pool = n - 1 - x;  // states x+1..n-1
            const std::size_t support = 1 + r.below(3);
            std::vector<std::size_t> tgt;
            std::vector<rat> raw;
            rat total(0);
            for (std::size_t k = 0; k < support; ++k) {
                std::size_t pick = r.below(pool + 1);
                std::size_t y = pick == pool ? n : x + 1 + pick;  // n = deadlock
                rat w(static_cast<long>(1 + r.below(4)));
                tgt.push_back(y);
                raw.push_back(w);
                total += w;
            }
            for (std::size_t k = 0; k < support; ++k) {
                rat p = raw[k] / total;
                if (tgt[k] == n)
                    d.dead += p;
                else {
                    auto it = d.w.find(tgt[k]);
                    if (it == d.w.end())
                        d.w.emplace(tgt[k], p);
                    else
                        it->second += p;
                }
            }
            v.per_label.push_back(std::move(d));
        }
        c.alpha.push_back(std::move(v));
    }
    return c;
}

/// Random valid symmetric V-category: sample a symmetric matrix, force the
/// diagonal to top, then repair transitivity by the tensor-transitive
/// closure a(x,z) |= a(x,y) (x) a(y,z).
inline vcat gen_vcat(const quantale& q, std::size_t n, std::uint64_t seed) {
    if (!q.finite()) throw error("gen_vcat: finite quantales only");
    rng r(seed);
    auto carrier = q.carrier();
    vcat x = vcat::indiscrete(q, default_state_names(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            value v = carrier[r.below(carrier.size())];
            x.a[i][j] = v;
            x.a[j][i] = v;
        }
    bool grew = true;
    while (grew) {
        grew = false;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) {
                    value v = q.join2(x.a[i][k], q.tensor(x.a[i][j], x.a[j][k]));
                    if (!(v == x.a[i][k])) {
                        x.a[i][k] = v;
                        grew = true;
                    }
                }
    }
    return x;
}

// ---- bundled fixtures ----

/// The two probabilistic systems with nearly-agreeing root states: roots
/// branch 1/2 - 1/2 (left) vs 1/2+eps - 1/2-eps (right) into a deadlock
/// state and a looping state.
inline coalgebra make_fig1(const rat& eps) {
    if (eps < rat(0) || eps > rat(1, 2)) throw error("fig1: eps must lie in [0, 1/2]");
    coalgebra c;
    c.kind = fkind::dist_maybe;
    c.labels = {"a"};
    c.base = vcat::discrete(quantale::luk01(),
                            {"rootL", "deadL", "loopL", "rootR", "deadR", "loopR"});
    auto dist_to = [&](std::initializer_list<std::pair<std::size_t, rat>> ws, rat dead = rat(0)) {
        distribution d;
        d.dead = dead;
        for (const auto& [y, p] : ws) d.w[y] = p;
        dist_val v;
        v.per_label.push_back(std::move(d));
        return v;
    };
    c.alpha.push_back(dist_to({{1, rat(1, 2)}, {2, rat(1, 2)}}));
    c.alpha.push_back(dist_to({}, rat(1)));
    c.alpha.push_back(dist_to({{2, rat(1)}}));
    c.alpha.push_back(dist_to({{4, rat(1, 2) + eps}, {5, rat(1, 2) - eps}}));
    c.alpha.push_back(dist_to({}, rat(1)));
    c.alpha.push_back(dist_to({{5, rat(1)}}));
    return c;
}

/// Small ultrametric transition system: states labelled in [0,1] with one
/// unlabelled transition relation.
inline coalgebra make_metric_example() {
    coalgebra c;
    c.kind = fkind::metric_ts;
    c.base = vcat::discrete(quantale::max01(), {"u", "v", "w", "z"});
    auto mk = [&](const rat& r, std::initializer_list<std::size_t> succ) {
        metric_val v;
        v.r = r;
        for (auto y : succ) v.succ.insert(y);
        return v;
    };
    c.alpha.push_back(mk(rat(1, 4), {1, 2}));
    c.alpha.push_back(mk(rat(1, 2), {3}));
    c.alpha.push_back(mk(rat(1, 2), {}));
    c.alpha.push_back(mk(rat(3, 4), {3}));
    return c;
}

/// Two-state paraconsistent system distinguished at modal depth 1: p has a
/// fully-present successor, q has none.
inline coalgebra make_para_example() {
    coalgebra c;
    c.kind = fkind::para_powerset;
    c.base = vcat::discrete(quantale::diamond4(), {"p", "q"});
    const quantale d4 = quantale::diamond4();
    para_val v1, v2;
    v1.grade = {d4.value_parse("top").idx(), d4.value_parse("N").idx()};
    v2.grade = {d4.idx_bottom(), d4.idx_bottom()};
    c.alpha.push_back(std::move(v1));
    c.alpha.push_back(std::move(v2));
    return c;
}

/// Weighted system with negative weights.
inline coalgebra make_signed_example() {
    coalgebra c;
    c.kind = fkind::signed_weighted;
    c.labels = {"a"};
    c.base = vcat::discrete(quantale::luk01(), {"x", "y", "z"});
    auto mk = [&](std::initializer_list<std::pair<std::size_t, rat>> ws) {
        weight_val v;
        std::map<std::size_t, rat> m;
        for (const auto& [y, p] : ws) m[y] = p;
        v.per_label.push_back(std::move(m));
        return v;
    };
    c.alpha.push_back(mk({{1, rat(1, 2)}, {2, rat(-1, 4)}}));
    c.alpha.push_back(mk({{1, rat(1, 2)}}));
    c.alpha.push_back(mk({}));
    return c;
}

}  // namespace qhm
