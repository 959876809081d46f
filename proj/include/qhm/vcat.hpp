#pragma once

#include <qhm/quantale.hpp>

#include <set>
#include <string>
#include <vector>

namespace qhm {

/// A predicate is a V-valued map on a carrier, stored positionally.
using predicate = std::vector<value>;

/// Finite V-category: carrier plus structure matrix a(x,y).
struct vcat {
    quantale q;
    std::vector<std::string> states;
    std::vector<std::vector<value>> a;

    std::size_t size() const { return states.size(); }

    static vcat discrete(const quantale& q, std::vector<std::string> states) {
        vcat x;
        x.q = q;
        const std::size_t n = states.size();
        x.states = std::move(states);
        x.a.assign(n, std::vector<value>(n, q.bottom()));
        for (std::size_t i = 0; i < n; ++i) x.a[i][i] = q.top();
        return x;
    }

    static vcat indiscrete(const quantale& q, std::vector<std::string> states) {
        vcat x;
        x.q = q;
        const std::size_t n = states.size();
        x.states = std::move(states);
        x.a.assign(n, std::vector<value>(n, q.top()));
        return x;
    }

    std::size_t state_index(const std::string& name) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == name) return i;
        throw error("unknown state '" + name + "'");
    }

    json to_json() const {
        json j;
        j["quantale"] = q.to_json();
        j["states"] = states;
        json m = json::array();
        for (const auto& row : a) {
            json r = json::array();
            for (const auto& v : row) r.push_back(q.value_to_json(v));
            m.push_back(r);
        }
        j["matrix"] = m;
        return j;
    }

    static vcat from_json(const json& j) {
        vcat x;
        x.q = quantale::from_json(j.at("quantale"));
        x.states = j.at("states").get<std::vector<std::string>>();
        const auto& m = j.at("matrix");
        if (m.size() != x.states.size()) throw error("vcat: matrix shape mismatch");
        for (const auto& row : m) {
            if (row.size() != x.states.size()) throw error("vcat: matrix shape mismatch");
            std::vector<value> r;
            for (const auto& e : row) r.push_back(x.q.value_from_json(e));
            x.a.push_back(std::move(r));
        }
        return x;
    }
};

struct vcat_report {
    bool reflexive = true, transitive = true, symmetric = true;
    std::string witness;
    bool valid() const { return reflexive && transitive; }
    json to_json() const {
        json j;
        j["reflexive"] = reflexive;
        j["transitive"] = transitive;
        j["symmetric"] = symmetric;
        if (!witness.empty()) j["witness"] = witness;
        return j;
    }
};

/// Checks k <= a(x,x) and a(x,y) * a(y,z) <= a(x,z); also records symmetry.
inline vcat_report validate_vcat(const vcat& x) {
    vcat_report rep;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (x.a[i].size() != n || x.a.size() != n) throw error("vcat: matrix shape mismatch");
        if (!x.q.leq(x.q.unit(), x.a[i][i])) {
            rep.reflexive = false;
            rep.witness = "reflexivity fails at " + x.states[i];
            return rep;
        }
    }
    for (std::size_t i = 0; i < n && rep.symmetric; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!(x.a[i][j] == x.a[j][i])) {
                rep.symmetric = false;
                break;
            }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (!x.q.leq(x.q.tensor(x.a[i][j], x.a[j][k]), x.a[i][k])) {
                    rep.transitive = false;
                    rep.witness = "triangle fails at (" + x.states[i] + "," + x.states[j] + "," +
                                  x.states[k] + ")";
                    return rep;
                }
    return rep;
}

/// Pointwise meet with the transpose; idempotent on symmetric structures.
inline vcat symmetrize(const vcat& x) {
    vcat out = x;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.a[i][j] = x.q.meet2(x.a[i][j], x.a[j][i]);
    return out;
}

/// Natural preorder: x <= y iff k <= a(x,y).
inline std::vector<std::vector<bool>> natural_order(const vcat& x) {
    const std::size_t n = x.size();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r[i][j] = x.q.leq(x.q.unit(), x.a[i][j]);
    return r;
}

struct quotient_result {
    vcat quotient;
    std::vector<std::size_t> projection;  // state index -> class index
};

/// Merges points identified by the natural preorder of a symmetric V-category.
inline quotient_result separated_quotient(const vcat& x) {
    auto ord = natural_order(x);
    const std::size_t n = x.size();
    std::vector<std::size_t> cls(n, SIZE_MAX);
    std::size_t nclasses = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cls[i] != SIZE_MAX) continue;
        cls[i] = nclasses;
        for (std::size_t j = i + 1; j < n; ++j)
            if (ord[i][j] && ord[j][i]) cls[j] = nclasses;
        ++nclasses;
    }
    quotient_result res;
    res.projection = cls;
    res.quotient.q = x.q;
    res.quotient.states.resize(nclasses);
    std::vector<std::size_t> rep(nclasses);
    for (std::size_t i = n; i-- > 0;) {
        rep[cls[i]] = i;
        res.quotient.states[cls[i]] = x.states[i];
    }
    res.quotient.a.assign(nclasses, std::vector<value>(nclasses, x.q.bottom()));
    for (std::size_t c = 0; c < nclasses; ++c)
        for (std::size_t d = 0; d < nclasses; ++d) res.quotient.a[c][d] = x.a[rep[c]][rep[d]];
    return res;
}

/// One leg of a structured cone: a map into a V-category over the same quantale.
struct cone_leg {
    std::vector<std::size_t> map;  // domain index -> target index
    const vcat* target = nullptr;
};

/// Initial structure w.r.t. a cone: pointwise meet of pulled-back structures.
/// The empty cone yields the indiscrete structure.
inline vcat initial_structure(const quantale& q, std::vector<std::string> states,
                              const std::vector<cone_leg>& cone) {
    if (states.empty()) throw error("initial_structure: empty carrier");
    for (const auto& leg : cone)
        if (!leg.target->q.same_as(q)) throw error("initial_structure: quantale mismatch among legs");
    vcat out = vcat::indiscrete(q, std::move(states));
    const std::size_t n = out.size();
    for (const auto& leg : cone) {
        if (leg.map.size() != n) throw error("initial_structure: leg arity mismatch");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out.a[i][j] = q.meet2(out.a[i][j], leg.target->a[leg.map[i]][leg.map[j]]);
    }
    return out;
}

/// Initial structure induced by a family of predicates, with hom_s as the
/// target structure (the cone into V_s).
inline vcat initial_structure_from_predicates(const quantale& q, std::vector<std::string> states,
                                              const std::vector<predicate>& preds) {
    vcat out = vcat::indiscrete(q, std::move(states));
    const std::size_t n = out.size();
    for (const auto& f : preds) {
        if (f.size() != n) throw error("initial_structure: predicate arity mismatch");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out.a[i][j] = q.meet2(out.a[i][j], q.hom_s(f[i], f[j]));
    }
    return out;
}

/// The S-power structure [h,l] = /\_s hom(h(s), l(s)); hom_s variant for V_s.
inline value power_hom(const quantale& q, const std::vector<value>& h, const std::vector<value>& l,
                       bool symmetric = false) {
    if (h.size() != l.size()) throw error("power_hom: arity mismatch");
    value acc = q.top();
    for (std::size_t i = 0; i < h.size(); ++i)
        acc = q.meet2(acc, symmetric ? q.hom_s(h[i], l[i]) : q.hom(h[i], l[i]));
    return acc;
}

/// L-closure of a subset: { x | k <= \/_{y in A} a(x,y) * a(y,x) }.
inline std::set<std::size_t> l_closure(const vcat& x, const std::set<std::size_t>& a_set) {
    std::set<std::size_t> out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        value acc = x.q.bottom();
        for (std::size_t y : a_set) acc = x.q.join2(acc, x.q.tensor(x.a[i][y], x.a[y][i]));
        if (x.q.leq(x.q.unit(), acc)) out.insert(i);
    }
    return out;
}

inline bool base_is_discrete(const vcat& b) {
    for (std::size_t i = 0; i < b.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            const value expect = i == j ? b.q.top() : b.q.bottom();
            if (!(b.a[i][j] == expect)) return false;
        }
    return true;
}

/// Whether f is a V-functor (X,a) -> V_s, i.e. a(x,y) <= hom_s(f x, f y).
inline bool nonexpansive(const vcat& x, const predicate& f) {
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!x.q.leq(x.a[i][j], x.q.hom_s(f[i], f[j]))) return false;
    return true;
}

/// All V-functors (X,a) -> V_s for a finite quantale, by enumeration with
/// prefix pruning.
inline std::vector<predicate> all_nonexpansive(const vcat& x) {
    if (!x.q.finite()) throw error("all_nonexpansive: finite quantales only");
    std::vector<value> carrier = x.q.carrier();
    const std::size_t n = x.size();
    std::vector<predicate> out;
    predicate cur(n);
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == n) {
            out.push_back(cur);
            return;
        }
        for (const auto& v : carrier) {
            cur[i] = v;
            bool ok = true;
            for (std::size_t j = 0; j < i; ++j) {
                if (!x.q.leq(x.a[i][j], x.q.hom_s(cur[i], cur[j])) ||
                    !x.q.leq(x.a[j][i], x.q.hom_s(cur[j], cur[i]))) {
                    ok = false;
                    break;
                }
            }
            if (ok) self(self, i + 1);
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace qhm
