#pragma once

#include <qhm/liftings.hpp>
#include <qhm/lp.hpp>

#include <algorithm>
#include <vector>

namespace qhm {

enum class backend { enumeration, lp };

inline backend backend_parse(const std::string& s) {
    if (s == "enum") return backend::enumeration;
    if (s == "lp") return backend::lp;
    throw error("unknown backend '" + s + "' (want lp|enum)");
}

/// Candidate nonexpansive maps ground -> V_s: the full set for finite
/// quantales, a grid-valued subset for unit-interval quantales.
inline std::vector<predicate> enumerate_nonexpansive(const vcat& ground, const rat& grid_step) {
    if (ground.q.finite()) return all_nonexpansive(ground);
    std::vector<value> vals = ground.q.value_grid(grid_step);
    const std::size_t n = ground.size();
    std::vector<predicate> out;
    predicate cur(n);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        for (const auto& v : vals) {
            cur[i] = v;
            bool ok = true;
            for (std::size_t j = 0; j < i; ++j)
                if (!ground.q.leq(ground.a[i][j], ground.q.hom_s(cur[i], cur[j]))) {
                    ok = false;
                    break;
                }
            if (ok) self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

/// Kantorovich distance on functor values as a meet over a given function
/// family: /\ hom_s(lam(f)(t1), lam(f)(t2)).
inline value lifted_distance_family(const std::vector<lifting>& lam, const vcat& ground,
                                    const functor_val& t1, const functor_val& t2,
                                    const std::vector<predicate>& family) {
    value acc = ground.q.top();
    for (const auto& l : lam)
        for (const auto& f : family) {
            value v1 = apply_lifting(ground.q, l, f, t1);
            value v2 = apply_lifting(ground.q, l, f, t2);
            acc = ground.q.meet2(acc, ground.q.hom_s(v1, v2));
        }
    return acc;
}

// ---- exact backends ----

/// dist_maybe over luk01: per-label optimal transport over the ground
/// distance extended with a deadlock point at distance 1 from every live
/// state; meet (numeric max) across labels. Exact rational.
inline value dist_maybe_lp(const vcat& ground, const dist_val& t1, const dist_val& t2) {
    const std::size_t n = ground.size();
    std::vector<std::vector<rat>> cost(n + 1, std::vector<rat>(n + 1, rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) cost[i][j] = ground.a[i][j].num();
    for (std::size_t i = 0; i < n; ++i) {
        cost[i][n] = rat(1);
        cost[n][i] = rat(1);
    }
    if (t1.per_label.size() != t2.per_label.size()) throw error("dist_maybe: label mismatch");
    rat worst(0);
    for (std::size_t a = 0; a < t1.per_label.size(); ++a) {
        std::vector<rat> mu(n + 1, rat(0)), nu(n + 1, rat(0));
        for (const auto& [x, p] : t1.per_label[a].w) mu[x] = p;
        mu[n] = t1.per_label[a].dead;
        for (const auto& [x, p] : t2.per_label[a].w) nu[x] = p;
        nu[n] = t2.per_label[a].dead;
        worst = max(worst, transport(cost, mu, nu));
    }
    return value(worst);
}

/// Kantorovich transport distance between two explicit distributions over
/// the ground carrier + deadlock (the cmd-level entry point).
inline rat kantorovich_lp(const vcat& ground, const distribution& mu, const distribution& nu) {
    if (mu.total() != nu.total()) throw error("kantorovich_lp: mass mismatch");
    dist_val a{{mu}}, b{{nu}};
    return dist_maybe_lp(ground, a, b).num();
}

/// signed_weighted over luk01: d(s,t) = 1/2 sup_f |sum f(x)(s-t)(x)| with f
/// nonexpansive into [0,1]; solved exactly as two LPs per label.
inline value signed_weighted_lp(const vcat& ground, const weight_val& t1, const weight_val& t2) {
    const std::size_t n = ground.size();
    std::vector<std::vector<rat>> d(n, std::vector<rat>(n, rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = ground.a[i][j].num();
    if (t1.per_label.size() != t2.per_label.size()) throw error("signed_weighted: label mismatch");
    rat worst(0);
    for (std::size_t a = 0; a < t1.per_label.size(); ++a) {
        std::vector<rat> h(n, rat(0));
        for (const auto& [x, p] : t1.per_label[a]) h[x] += p;
        for (const auto& [x, p] : t2.per_label[a]) h[x] -= p;
        std::vector<rat> hneg(n);
        for (std::size_t i = 0; i < n; ++i) hneg[i] = -h[i];
        rat best = max(lipschitz_max(h, d), lipschitz_max(hneg, d));
        worst = max(worst, rat(1, 2) * best);
    }
    return value(worst);
}

/// lts over bool2 with the diamond modalities: functor values are
/// indistinguishable iff they hit the same equivalence classes of the
/// ground relation, per label.
inline value lts_bool2_distance(const vcat& ground, const lts_val& t1, const lts_val& t2) {
    const std::size_t n = ground.size();
    const value top = ground.q.top();
    std::vector<std::size_t> cls(n);
    std::vector<std::size_t> reps;
    for (std::size_t i = 0; i < n; ++i) {
        cls[i] = SIZE_MAX;
        for (std::size_t r : reps)
            if (ground.a[i][r] == top && ground.a[r][i] == top) {
                cls[i] = r;
                break;
            }
        if (cls[i] == SIZE_MAX) {
            cls[i] = i;
            reps.push_back(i);
        }
    }
    if (t1.succ.size() != t2.succ.size()) throw error("lts: label mismatch");
    for (std::size_t a = 0; a < t1.succ.size(); ++a) {
        std::set<std::size_t> c1, c2;
        for (std::size_t x : t1.succ[a]) c1.insert(cls[x]);
        for (std::size_t x : t2.succ[a]) c2.insert(cls[x]);
        if (c1 != c2) return ground.q.bottom();
    }
    return top;
}

/// metric_ts over max01: the lifted distance is the numeric max of the state
/// labels' hom_s and the symmetric Hausdorff distance of the successor sets
/// (exact because valid max01 structures satisfy the strong triangle law).
inline value metric_hausdorff_distance(const vcat& ground, const metric_val& t1,
                                       const metric_val& t2) {
    const quantale& q = ground.q;
    rat label_part = q.hom_s(value(t1.r), value(t2.r)).num();
    auto one_sided = [&](const std::set<std::size_t>& s1, const std::set<std::size_t>& s2) {
        rat worst(0);
        for (std::size_t x : s1) {
            rat best(1);
            for (std::size_t y : s2) best = min(best, ground.a[x][y].num());
            worst = max(worst, best);
        }
        return worst;
    };
    rat haus;
    if (t1.succ.empty() && t2.succ.empty())
        haus = rat(0);
    else if (t1.succ.empty() || t2.succ.empty())
        haus = rat(1);
    else
        haus = max(one_sided(t1.succ, t2.succ), one_sided(t2.succ, t1.succ));
    return value(max(label_part, haus));
}

/// Whether an exact structural evaluator exists for this functor/quantale.
inline bool has_exact_backend(const coalgebra& c) {
    switch (c.kind) {
        case fkind::lts: return c.base.q.kind() == qkind::bool2;
        case fkind::metric_ts: return c.base.q.kind() == qkind::max01;
        case fkind::para_powerset: return c.base.q.finite();
        case fkind::dist_maybe:
        case fkind::signed_weighted: return c.base.q.kind() == qkind::luk01;
    }
    return false;
}

struct lift_options {
    backend be = backend::lp;
    rat grid_step = rat(1, 16);
};

/// Lifted (Kantorovich) distance between two functor values over a ground
/// V-category. The enumeration backend is exact for finite quantales and a
/// grid-restricted bound (numerically from below) for interval quantales;
/// the lp backend is exact for dist_maybe and signed_weighted.
inline value lifted_distance(const std::vector<lifting>& lam, const vcat& ground,
                             const functor_val& t1, const functor_val& t2,
                             const lift_options& opt = {}) {
    if (opt.be == backend::lp) {
        if (std::holds_alternative<dist_val>(t1))
            return dist_maybe_lp(ground, std::get<dist_val>(t1), std::get<dist_val>(t2));
        if (std::holds_alternative<weight_val>(t1))
            return signed_weighted_lp(ground, std::get<weight_val>(t1), std::get<weight_val>(t2));
        throw error("lp backend unsupported for this functor (expectation-style liftings only)");
    }
    auto family = enumerate_nonexpansive(ground, opt.grid_step);
    return lifted_distance_family(lam, ground, t1, t2, family);
}

/// Exact one-step distance used by the fixpoint engine, per functor.
inline value exact_step_distance(const coalgebra& c, const std::vector<lifting>& lam,
                                 const vcat& ground, const functor_val& t1, const functor_val& t2,
                                 const std::vector<predicate>* family) {
    switch (c.kind) {
        case fkind::lts:
            if (ground.q.kind() == qkind::bool2)
                return lts_bool2_distance(ground, std::get<lts_val>(t1), std::get<lts_val>(t2));
            break;
        case fkind::metric_ts:
            if (ground.q.kind() == qkind::max01)
                return metric_hausdorff_distance(ground, std::get<metric_val>(t1),
                                                 std::get<metric_val>(t2));
            break;
        case fkind::dist_maybe:
            if (ground.q.kind() == qkind::luk01)
                return dist_maybe_lp(ground, std::get<dist_val>(t1), std::get<dist_val>(t2));
            break;
        case fkind::signed_weighted:
            if (ground.q.kind() == qkind::luk01)
                return signed_weighted_lp(ground, std::get<weight_val>(t1),
                                          std::get<weight_val>(t2));
            break;
        case fkind::para_powerset: break;
    }
    if (!ground.q.finite()) throw error("no exact backend for this functor/quantale pair");
    if (family) return lifted_distance_family(lam, ground, t1, t2, *family);
    auto fs = all_nonexpansive(ground);
    return lifted_distance_family(lam, ground, t1, t2, fs);
}

/// Full coalgebra validator: functor-value invariants plus nonexpansiveness
/// of the structure map from the base into the lifted structure over it.
inline coalgebra_report validate_coalgebra(const coalgebra& c) {
    coalgebra_report rep;
    validate_structure(c, rep);
    if (!rep.structure_ok) return rep;
    // over an integral quantale a discrete base makes the structure map
    // trivially nonexpansive
    if (c.base.q.unit() == c.base.q.top() && base_is_discrete(c.base)) return rep;
    auto lam = default_liftings(c);
    const std::size_t n = c.size();
    std::vector<predicate> family;
    const std::vector<predicate>* fam_ptr = nullptr;
    if (c.base.q.finite() && c.kind == fkind::para_powerset) {
        family = all_nonexpansive(c.base);
        fam_ptr = &family;
    }
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
            value d = exact_step_distance(c, lam, c.base, c.alpha[x], c.alpha[y], fam_ptr);
            if (!c.base.q.leq(c.base.a[x][y], d)) {
                rep.nonexpansive = false;
                rep.violations.push_back("structure map expands pair (" + c.base.states[x] + "," +
                                         c.base.states[y] + "): base " +
                                         c.base.q.value_str(c.base.a[x][y]) + " vs lifted " +
                                         c.base.q.value_str(d));
            }
        }
    return rep;
}

}  // namespace qhm
