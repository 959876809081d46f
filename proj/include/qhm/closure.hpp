#pragma once

#include <qhm/engine.hpp>
#include <qhm/rng.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace qhm {

enum class closure_op { id, l, c_inf_sup, inf, fun };

inline std::string closure_op_name(closure_op op) {
    switch (op) {
        case closure_op::id: return "id";
        case closure_op::l: return "l";
        case closure_op::c_inf_sup: return "cinfsup";
        case closure_op::inf: return "inf";
        case closure_op::fun: return "fun";
    }
    return "?";
}

inline closure_op closure_op_parse(const std::string& s) {
    if (s == "id") return closure_op::id;
    if (s == "l") return closure_op::l;
    if (s == "cinfsup" || s == "cinf") return closure_op::c_inf_sup;
    if (s == "inf") return closure_op::inf;
    if (s == "fun") return closure_op::fun;
    throw error("unknown closure operator '" + s + "'");
}

using predicate_set = std::vector<predicate>;

inline predicate_set dedup(predicate_set a) {
    std::sort(a.begin(), a.end(), vec_less{});
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

inline bool contains_pred(const predicate_set& a, const predicate& p) {
    return std::binary_search(a.begin(), a.end(), p, vec_less{});
}

inline bool subset_of(const predicate_set& a, const predicate_set& b) {
    return std::all_of(a.begin(), a.end(), [&](const predicate& p) { return contains_pred(b, p); });
}

struct prop_closure_result {
    predicate_set preds;
    bool saturated = true;
};

/// Least superset of G containing constant-top and closed under /\, \/,
/// u (x) - and hom_s(u,-) for u in the constant pool; fixpoint with semantic
/// deduplication, width-capped.
inline prop_closure_result prop_algebra_closure(const vcat& x, const predicate_set& g,
                                                const std::vector<value>& consts,
                                                std::size_t width = 65536) {
    const quantale& q = x.q;
    const std::size_t n = x.size();
    prop_closure_result res;
    std::map<predicate, std::size_t, vec_less> index;
    std::vector<predicate> basis;
    auto push = [&](predicate p) {
        if (index.count(p)) return;
        if (basis.size() >= width) {
            res.saturated = false;
            return;
        }
        index.emplace(p, basis.size());
        basis.push_back(std::move(p));
    };
    push(predicate(n, q.top()));
    for (const auto& p : g) push(p);
    std::size_t head = 0;
    while (head < basis.size() && res.saturated) {
        const std::size_t i = head++;
        for (const auto& u : consts) {
            predicate t(n), h(n);
            for (std::size_t s = 0; s < n; ++s) {
                t[s] = q.tensor(u, basis[i][s]);
                h[s] = q.hom_s(u, basis[i][s]);
            }
            push(std::move(t));
            push(std::move(h));
        }
        for (std::size_t j = 0; j <= i; ++j) {
            predicate a(n), o(n);
            for (std::size_t s = 0; s < n; ++s) {
                a[s] = q.meet2(basis[i][s], basis[j][s]);
                o[s] = q.join2(basis[i][s], basis[j][s]);
            }
            push(std::move(a));
            push(std::move(o));
        }
    }
    res.preds = dedup(std::move(basis));
    return res;
}

/// All maps carrier -> V for a finite quantale (the carrier of the power
/// V-category V_s^X).
inline predicate_set all_maps(const quantale& q, std::size_t n, std::size_t cap = 1u << 18) {
    if (!q.finite()) throw error("all_maps: finite quantales only");
    double total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= double(q.size());
    if (total > double(cap)) throw error("all_maps: space too large");
    std::vector<value> carrier = q.carrier();
    predicate_set out;
    predicate cur(n, carrier[0]);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        for (const auto& v : carrier) {
            cur[i] = v;
            self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

/// L-closure membership in the power V-category: k <= \/_{g in A} [h,g]_s (x) [h,g]_s.
inline bool l_closure_member(const quantale& q, const predicate& h, const predicate_set& a) {
    value acc = q.bottom();
    for (const auto& g : a) {
        value d = power_hom(q, h, g, true);
        acc = q.join2(acc, q.tensor(d, d));
    }
    return q.leq(q.unit(), acc);
}

/// V_s-closure operators on predicate sets. Exact for finite quantales; for
/// luk01 only Id and L (which is the identity on finite subsets of the
/// separated power space) are available.
inline predicate_set close(closure_op op, const vcat& x, const predicate_set& a_in) {
    const quantale& q = x.q;
    const std::size_t n = x.size();
    predicate_set a = dedup(a_in);
    switch (op) {
        case closure_op::id: return a;
        case closure_op::l: {
            if (!q.finite()) return a;  // finite subsets of a separated space are closed
            predicate_set out;
            for (const auto& h : all_maps(q, n))
                if (l_closure_member(q, h, a)) out.push_back(h);
            return dedup(std::move(out));
        }
        case closure_op::c_inf_sup: {
            if (!q.finite()) throw error("cinfsup closure: finite quantales only");
            // In a finite lattice every down-directed family contains its
            // infimum, so closing under codirected infima adds nothing;
            // closure under finite suprema = binary joins + empty join.
            predicate_set out = a;
            out.push_back(predicate(n, q.bottom()));
            out = dedup(std::move(out));
            bool grew = true;
            while (grew) {
                grew = false;
                predicate_set fresh;
                for (std::size_t i = 0; i < out.size(); ++i)
                    for (std::size_t j = i + 1; j < out.size(); ++j) {
                        predicate s(n);
                        for (std::size_t k = 0; k < n; ++k) s[k] = q.join2(out[i][k], out[j][k]);
                        if (!contains_pred(out, s)) fresh.push_back(std::move(s));
                    }
                if (!fresh.empty()) {
                    grew = true;
                    for (auto& p : fresh) out.push_back(std::move(p));
                    out = dedup(std::move(out));
                }
            }
            return out;
        }
        case closure_op::inf: {
            if (!q.finite()) throw error("inf closure: finite quantales only");
            predicate_set out = a;
            out.push_back(predicate(n, q.top()));  // empty infimum
            out = dedup(std::move(out));
            bool grew = true;
            while (grew) {
                grew = false;
                predicate_set fresh;
                for (std::size_t i = 0; i < out.size(); ++i)
                    for (std::size_t j = i + 1; j < out.size(); ++j) {
                        predicate s(n);
                        for (std::size_t k = 0; k < n; ++k) s[k] = q.meet2(out[i][k], out[j][k]);
                        if (!contains_pred(out, s)) fresh.push_back(std::move(s));
                    }
                if (!fresh.empty()) {
                    grew = true;
                    for (auto& p : fresh) out.push_back(std::move(p));
                    out = dedup(std::move(out));
                }
            }
            return out;
        }
        case closure_op::fun: {
            if (!q.finite())
                throw error("fun closure: infinite codomain; use the L operator for luk01");
            vcat xa = initial_structure_from_predicates(q, x.states, a);
            return dedup(all_nonexpansive(xa));
        }
    }
    throw error("close: bad operator");
}

/// A is C-dense over (X,a) iff C(A) contains every V-functor X -> V_s.
inline bool is_dense(closure_op op, const vcat& x, const predicate_set& a) {
    predicate_set closed = close(op, x, a);
    for (const auto& f : all_nonexpansive(x))
        if (!contains_pred(closed, f)) return false;
    return true;
}

/// A is initial iff the structure it induces equals the ambient structure.
inline bool is_initial(const vcat& x, const predicate_set& a) {
    vcat xa = initial_structure_from_predicates(x.q, x.states, a);
    return xa.a == x.a;
}

// ---- harnesses ----

struct sw_report {
    std::size_t trials = 0;
    std::size_t failures = 0;
    std::vector<json> witnesses;
    bool pass() const { return failures == 0; }
    json to_json() const {
        json j;
        j["trials"] = trials;
        j["failures"] = failures;
        j["pass"] = pass();
        j["witnesses"] = witnesses;
        return j;
    }
};

/// Stone-Weierstrass harness: per trial, sample generating predicates, take
/// the V-category they induce (so the generated propositional algebra is
/// initial), and test the biconditional C-dense <-> Fun-dense. A second
/// sub-trial perturbs the ambient structure to exercise the negative
/// direction.
inline sw_report check_characterizes_initiality(closure_op op, const quantale& q,
                                                std::size_t size_bound, std::size_t trials,
                                                std::uint64_t seed) {
    if (!q.finite()) throw error("check_characterizes_initiality: finite quantales only");
    sw_report rep;
    std::vector<value> carrier = q.carrier();
    for (std::size_t t = 0; t < trials; ++t) {
        rng r(seed + t);
        const std::size_t n = 1 + r.below(size_bound);
        std::vector<std::string> states;
        for (std::size_t i = 0; i < n; ++i) states.push_back("s" + std::to_string(i));
        const std::size_t ngens = 1 + r.below(3);
        predicate_set gens;
        for (std::size_t g = 0; g < ngens; ++g) {
            predicate p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = carrier[r.below(carrier.size())];
            gens.push_back(std::move(p));
        }
        vcat x = initial_structure_from_predicates(q, states, gens);
        auto closure = prop_algebra_closure(x, gens, carrier);
        ++rep.trials;
        bool fun_dense = is_initial(x, closure.preds);  // true by construction
        bool c_dense = is_dense(op, x, closure.preds);
        if (fun_dense != c_dense) {
            ++rep.failures;
            json w;
            w["trial"] = t;
            w["seed"] = seed + t;
            w["direction"] = "initial algebra not C-dense";
            w["vcat"] = x.to_json();
            json gj = json::array();
            for (const auto& g : gens) {
                json row = json::array();
                for (const auto& v : g) row.push_back(q.value_to_json(v));
                gj.push_back(row);
            }
            w["generators"] = gj;
            rep.witnesses.push_back(w);
        }
        // negative direction: coarsen the ambient structure; the nonexpansive
        // part of the algebra is again a propositional algebra over the new
        // structure and the biconditional must still hold for it
        vcat y = x;
        bool changed = false;
        for (std::size_t i = 0; i < n && !changed; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                value coarser = q.join2(y.a[i][j], q.unit());
                if (!(coarser == y.a[i][j])) {
                    y.a[i][j] = coarser;
                    y.a[j][i] = coarser;
                    changed = true;
                    break;
                }
            }
        if (changed && validate_vcat(y).valid()) {
            predicate_set restricted;
            for (const auto& p : closure.preds)
                if (nonexpansive(y, p)) restricted.push_back(p);
            ++rep.trials;
            bool fd = is_initial(y, restricted);
            bool cd = is_dense(op, y, restricted);
            if (fd != cd) {
                ++rep.failures;
                json w;
                w["trial"] = t;
                w["seed"] = seed + t;
                w["direction"] = "coarsened structure";
                w["fun_dense"] = fd;
                w["c_dense"] = cd;
                w["vcat"] = y.to_json();
                rep.witnesses.push_back(w);
            }
        }
    }
    return rep;
}

/// Decomposition identity f = \/_x /\_psi f(x) (x) hom_s(psi(x), psi(-)) for
/// nonexpansive f and an initial predicate set A (quantales where u (x) -
/// preserves codirected infima; every finite quantale qualifies).
inline bool check_decomposition(const vcat& x, const predicate_set& a, const predicate& f) {
    const quantale& q = x.q;
    const std::size_t n = x.size();
    for (std::size_t y = 0; y < n; ++y) {
        value outer = q.bottom();
        for (std::size_t xi = 0; xi < n; ++xi) {
            value inner = q.top();
            for (const auto& psi : a)
                inner = q.meet2(inner, q.tensor(f[xi], q.hom_s(psi[xi], psi[y])));
            outer = q.join2(outer, inner);
        }
        if (!(outer == f[y])) return false;
    }
    return true;
}

struct continuity_report {
    bool pass = true;
    std::size_t samples = 0;
    std::string witness;
    json to_json() const {
        json j;
        j["pass"] = pass;
        j["samples"] = samples;
        if (!witness.empty()) j["witness"] = witness;
        return j;
    }
};

/// C-continuity of a predicate lifting, tested through the order-theoretic
/// characterizations: Id always passes, cinfsup needs preservation of
/// codirected infima and finite suprema, inf needs preservation of all
/// infima, L (luk01) is tested as a sup-norm Lipschitz bound on samples.
inline continuity_report check_c_continuity(const coalgebra& c, const lifting& l, closure_op op,
                                            std::size_t samples, std::uint64_t seed) {
    continuity_report rep;
    const quantale& q = c.base.q;
    const std::size_t n = c.size();
    rng r(seed);
    auto random_pred = [&](rng& rr) {
        predicate p(n);
        if (q.finite()) {
            auto cs = q.carrier();
            for (std::size_t i = 0; i < n; ++i) p[i] = cs[rr.below(cs.size())];
        } else {
            for (std::size_t i = 0; i < n; ++i) p[i] = value(rat(static_cast<long>(rr.below(9)), 8));
        }
        return p;
    };
    for (std::size_t s = 0; s < samples; ++s) {
        const functor_val& t = c.alpha[r.below(n)];
        predicate f = random_pred(r), g = random_pred(r);
        ++rep.samples;
        switch (op) {
            case closure_op::id: {
                (void)apply_lifting(q, l, f, t);
                break;
            }
            case closure_op::c_inf_sup: {
                // meet-closure of {f,g} is a down-directed family
                predicate m(n);
                for (std::size_t i = 0; i < n; ++i) m[i] = q.meet2(f[i], g[i]);
                value lhs = apply_lifting(q, l, m, t);
                value rhs = q.meet2(q.meet2(apply_lifting(q, l, f, t), apply_lifting(q, l, g, t)),
                                    apply_lifting(q, l, m, t));
                if (!(lhs == rhs)) {
                    rep.pass = false;
                    rep.witness = "codirected infimum not preserved (sample " + std::to_string(s) + ")";
                    return rep;
                }
                predicate j(n);
                for (std::size_t i = 0; i < n; ++i) j[i] = q.join2(f[i], g[i]);
                value ljoin = apply_lifting(q, l, j, t);
                value rjoin = q.join2(apply_lifting(q, l, f, t), apply_lifting(q, l, g, t));
                if (!(ljoin == rjoin)) {
                    rep.pass = false;
                    rep.witness = "finite supremum not preserved (sample " + std::to_string(s) + ")";
                    return rep;
                }
                break;
            }
            case closure_op::inf: {
                predicate m(n);
                for (std::size_t i = 0; i < n; ++i) m[i] = q.meet2(f[i], g[i]);
                value lhs = apply_lifting(q, l, m, t);
                value rhs = q.meet2(apply_lifting(q, l, f, t), apply_lifting(q, l, g, t));
                if (!(lhs == rhs)) {
                    rep.pass = false;
                    rep.witness = "infimum not preserved (sample " + std::to_string(s) + ")";
                    return rep;
                }
                value ltop = apply_lifting(q, l, predicate(n, q.top()), t);
                if (!(ltop == q.top())) {
                    rep.pass = false;
                    rep.witness = "empty infimum not preserved";
                    return rep;
                }
                break;
            }
            case closure_op::l: {
                if (!q.is_interval()) break;
                rat sup(0);
                for (std::size_t i = 0; i < n; ++i) sup = max(sup, abs(f[i].num() - g[i].num()));
                rat diff = abs(apply_lifting(q, l, f, t).num() - apply_lifting(q, l, g, t).num());
                if (diff > sup) {
                    rep.pass = false;
                    rep.witness = "lifting expands the sup norm (sample " + std::to_string(s) + ")";
                    return rep;
                }
                break;
            }
            case closure_op::fun: break;
        }
    }
    return rep;
}

}  // namespace qhm
