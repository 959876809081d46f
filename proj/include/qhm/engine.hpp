#pragma once

#include <qhm/formula.hpp>

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

namespace qhm {

/// A computed distance with provenance and iteration metadata. For luk01 the
/// matrix is a quantale-order over-approximation of the limit (numerically
/// from below) whenever converged is false or residual is nonzero.
struct distance_matrix {
    vcat m;
    std::string provenance;
    std::size_t steps = 0;
    rat residual;
    bool converged = true;

    json to_json() const {
        json j;
        j["provenance"] = provenance;
        j["steps"] = steps;
        j["residual"] = residual.str();
        j["converged"] = converged;
        j["states"] = m.states;
        j["order_note"] = m.q.is_interval()
                              ? "entries rendered numerically; quantale order is reversed numeric"
                              : "entries rendered by element name";
        json rows = json::array();
        for (const auto& row : m.a) {
            json r = json::array();
            for (const auto& v : row) r.push_back(m.q.value_to_json(v));
            rows.push_back(r);
        }
        j["matrix"] = rows;
        return j;
    }

    std::string to_csv() const {
        std::string out = "state";
        for (const auto& s : m.states) out += "," + s;
        out += "\n";
        for (std::size_t i = 0; i < m.size(); ++i) {
            out += m.states[i];
            for (std::size_t j = 0; j < m.size(); ++j) out += "," + m.q.value_str(m.a[i][j]);
            out += "\n";
        }
        return out;
    }
};

struct engine_options {
    backend be = backend::lp;
    rat eps = rat(1, 1000000000);
    std::size_t max_iter = 4096;
    std::size_t min_iter = 0;
    rat grid = rat(1, 16);  // grid for the enumeration backend
};

/// Renders a bool2 distance matrix as an equivalence relation (class ids).
inline std::vector<std::size_t> equivalence_classes(const vcat& m) {
    const value top = m.q.top();
    const std::size_t n = m.size();
    std::vector<std::size_t> cls(n, SIZE_MAX);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (cls[i] != SIZE_MAX) continue;
        cls[i] = next;
        for (std::size_t j = i + 1; j < n; ++j)
            if (m.a[i][j] == top) cls[j] = next;
        ++next;
    }
    return cls;
}

/// Greatest-fixpoint behavioural distance by Kleene iteration from the fiber
/// top (the indiscrete structure). Exact stabilization for finite quantales
/// and metric_ts; eps residual stop for luk01 functors.
inline distance_matrix bd_fixpoint(const coalgebra& c, const std::vector<lifting>& lam,
                                   const engine_options& opt = {}) {
    const quantale& q = c.base.q;
    const std::size_t n = c.size();
    vcat b = vcat::indiscrete(q, c.base.states);
    distance_matrix res;
    res.provenance = "bd";
    res.residual = rat(0);
    res.converged = false;

    const bool enum_requested =
        opt.be == backend::enumeration &&
        (c.kind == fkind::dist_maybe || c.kind == fkind::signed_weighted);
    const bool fast_lts = c.kind == fkind::lts && q.kind() == qkind::bool2;
    const bool fast_metric = c.kind == fkind::metric_ts && q.kind() == qkind::max01;

    while (res.steps < opt.max_iter) {
        vcat nb = b;
        std::vector<predicate> family;
        const std::vector<predicate>* fam = nullptr;
        std::vector<std::size_t> sig;
        if (fast_lts && !enum_requested) {
            // one-step distance is signature equality; compute signatures of
            // the current iterate once instead of per pair
            auto cls = equivalence_classes(b);
            std::map<std::vector<std::set<std::size_t>>, std::size_t> ids;
            sig.resize(n);
            for (std::size_t x = 0; x < n; ++x) {
                std::vector<std::set<std::size_t>> key;
                for (const auto& succ : std::get<lts_val>(c.alpha[x]).succ) {
                    std::set<std::size_t> hit;
                    for (std::size_t y : succ) hit.insert(cls[y]);
                    key.push_back(std::move(hit));
                }
                auto it = ids.find(key);
                if (it == ids.end()) it = ids.emplace(std::move(key), ids.size()).first;
                sig[x] = it->second;
            }
        } else if (enum_requested) {
            family = enumerate_nonexpansive(b, opt.grid);
            fam = &family;
        } else if (q.finite()) {
            family = all_nonexpansive(b);
            fam = &family;
        }
        rat delta(0);
        bool changed = false;
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = x; y < n; ++y) {
                value d;
                if (!sig.empty())
                    d = sig[x] == sig[y] ? q.top() : q.bottom();
                else if (enum_requested)
                    d = lifted_distance_family(lam, b, c.alpha[x], c.alpha[y], family);
                else
                    d = exact_step_distance(c, lam, b, c.alpha[x], c.alpha[y], fam);
                if (!(d == b.a[x][y])) {
                    changed = true;
                    if (q.is_interval()) delta = max(delta, abs(d.num() - b.a[x][y].num()));
                }
                nb.a[x][y] = d;
                nb.a[y][x] = d;
            }
        ++res.steps;
        b = std::move(nb);
        res.residual = delta;
        if (!changed) {
            res.converged = true;
            res.residual = rat(0);
            break;
        }
        if (q.is_interval() && !fast_metric && delta <= opt.eps && res.steps >= opt.min_iter) {
            res.converged = true;
            break;
        }
    }
    res.m = std::move(b);
    return res;
}

/// Coarsest bisimulation of a bool2 labelled transition system by splitter
/// refinement; returns class ids.
inline std::vector<std::size_t> partition_refinement(const coalgebra& c) {
    if (c.kind != fkind::lts || c.base.q.kind() != qkind::bool2)
        throw error("partition_refinement: bool2 lts only");
    const std::size_t n = c.size();
    std::vector<std::size_t> cls(n, 0);
    std::size_t count = 1;
    while (true) {
        std::map<std::pair<std::size_t, std::vector<std::set<std::size_t>>>, std::size_t> sig;
        std::vector<std::size_t> next(n);
        for (std::size_t x = 0; x < n; ++x) {
            std::vector<std::set<std::size_t>> s;
            const auto& v = std::get<lts_val>(c.alpha[x]);
            for (const auto& succ : v.succ) {
                std::set<std::size_t> hit;
                for (std::size_t y : succ) hit.insert(cls[y]);
                s.push_back(std::move(hit));
            }
            auto key = std::make_pair(cls[x], std::move(s));
            auto it = sig.find(key);
            if (it == sig.end()) it = sig.emplace(std::move(key), sig.size()).first;
            next[x] = it->second;
        }
        if (sig.size() == count) return next;
        count = sig.size();
        cls = std::move(next);
    }
}

struct quotient_coalgebra {
    coalgebra q;
    std::vector<std::size_t> map;  // state -> class representative index
};

/// Quotient of a bool2 lts by bisimilarity; the projection is a coalgebra
/// morphism (used by the invariance harness).
inline quotient_coalgebra quotient_by_bisimilarity(const coalgebra& c) {
    auto cls = partition_refinement(c);
    const std::size_t n = c.size();
    std::size_t m = 0;
    for (std::size_t x = 0; x < n; ++x) m = std::max(m, cls[x] + 1);
    quotient_coalgebra out;
    out.map = cls;
    std::vector<std::string> names(m);
    std::vector<std::size_t> rep(m, SIZE_MAX);
    for (std::size_t x = n; x-- > 0;) {
        rep[cls[x]] = x;
        names[cls[x]] = "q" + std::to_string(cls[x]);
    }
    out.q.kind = fkind::lts;
    out.q.labels = c.labels;
    out.q.base = vcat::discrete(c.base.q, names);
    for (std::size_t k = 0; k < m; ++k) {
        const auto& v = std::get<lts_val>(c.alpha[rep[k]]);
        lts_val nv;
        nv.succ.resize(v.succ.size());
        for (std::size_t a = 0; a < v.succ.size(); ++a)
            for (std::size_t y : v.succ[a]) nv.succ[a].insert(cls[y]);
        out.q.alpha.push_back(std::move(nv));
    }
    return out;
}

// ---- logical distance ----

struct ld_options {
    std::size_t depth = 4;
    std::size_t width = 0;  // per-layer basis growth cap; 0 = auto
    rat grid = rat(1, 8);   // constants grid for interval quantales
    bool force_generic = false;
    bool keep_basis = true;  // matrices only when false (skips formula building)
};

struct ld_result {
    distance_matrix dm;
    std::vector<vcat> per_depth;  // matrix after depths 0..depth
    std::vector<std::pair<formula_ptr, predicate>> basis;
    bool saturated = false;
    bool width_capped = false;
};

namespace detail {

struct ld_state {
    const coalgebra* c;
    std::vector<std::pair<formula_ptr, predicate>> basis;
    std::map<predicate, std::size_t, vec_less> index;
    vcat ld;
    bool width_capped = false;    // some layer exhausted its budget
    std::size_t layer_budget = 0;
    bool layer_cut = false;
    std::size_t unary_head = 0;   // worklist positions, persist across layers
    std::size_t pair_head = 0;

    explicit ld_state(const coalgebra& co)
        : c(&co), ld(vcat::indiscrete(co.base.q, co.base.states)) {}

    // Layer discipline: the worklists restart at this layer's first member,
    // so fresh modal outputs get their unary atoms and pairings before any
    // older backlog; dedup keeps regeneration harmless.
    void start_layer(std::size_t width) {
        layer_budget = width;
        layer_cut = false;
        unary_head = basis.size();
        pair_head = basis.size();
    }

    bool push(formula_ptr f, predicate p) {
        if (index.count(p)) return false;
        if (layer_budget == 0) {
            width_capped = true;
            layer_cut = true;
            return false;
        }
        --layer_budget;
        index.emplace(p, basis.size());
        const quantale& q = c->base.q;
        for (std::size_t i = 0; i < ld.size(); ++i)
            for (std::size_t j = 0; j < ld.size(); ++j)
                ld.a[i][j] = q.meet2(ld.a[i][j], q.hom_s(p[i], p[j]));
        basis.emplace_back(std::move(f), std::move(p));
        return true;
    }

    // Saturate under u*-, hom_s(u,-) (u drawn from the member's own values
    // first, then the grid), and binary /\, \/ across all members; stops at
    // the layer budget. The own-value constants make the atoms
    // hom_s(psi(x), psi) available exactly.
    bool prop_close(const std::vector<value>& grid_consts) {
        const quantale& q = c->base.q;
        const std::size_t n = c->size();
        bool added = false;
        bool progress = true;
        while (progress && layer_budget > 0) {
            progress = false;
            while (unary_head < basis.size() && layer_budget > 0) {
                const std::size_t i = unary_head++;
                std::vector<value> consts = basis[i].second;
                consts.insert(consts.end(), grid_consts.begin(), grid_consts.end());
                for (const auto& u : consts) {
                    predicate t(n), h(n);
                    for (std::size_t s = 0; s < n; ++s) {
                        t[s] = q.tensor(u, basis[i].second[s]);
                        h[s] = q.hom_s(u, basis[i].second[s]);
                    }
                    bool p1 = push(f_tensor(u, basis[i].first), std::move(t));
                    bool p2 = push(f_homs(u, basis[i].first), std::move(h));
                    progress |= p1 | p2;
                    added |= p1 | p2;
                }
            }
            while (pair_head < basis.size() && layer_budget > 0) {
                const std::size_t i = pair_head++;
                for (std::size_t j = 0; j < i; ++j) {
                    predicate a(n), o(n);
                    for (std::size_t s = 0; s < n; ++s) {
                        a[s] = q.meet2(basis[i].second[s], basis[j].second[s]);
                        o[s] = q.join2(basis[i].second[s], basis[j].second[s]);
                    }
                    bool p1 = push(f_and(basis[i].first, basis[j].first), std::move(a));
                    bool p2 = push(f_or(basis[i].first, basis[j].first), std::move(o));
                    progress |= p1 | p2;
                    added |= p1 | p2;
                }
                if (unary_head < basis.size()) break;  // give new members their atoms first
            }
        }
        return added;
    }
};

inline std::vector<value> ld_constants(const quantale& q, const rat& grid) {
    return q.value_grid(grid);
}

inline ld_result logical_distance_generic(const coalgebra& c, const std::vector<lifting>& lam,
                                          const ld_options& opt) {
    const quantale& q = c.base.q;
    std::size_t width = opt.width;
    if (width == 0) {
        if (q.finite()) {
            double full = 1;
            for (std::size_t i = 0; i < c.size() && full < 70000; ++i) full *= double(q.size());
            width = full < 65536 ? static_cast<std::size_t>(full) : 65536;
        } else {
            width = 800;
        }
    }
    ld_state st(c);
    auto consts = ld_constants(q, opt.grid);
    st.start_layer(width);
    st.push(f_top(), predicate(c.size(), q.top()));
    st.prop_close(consts);

    ld_result res;
    res.per_depth.push_back(st.ld);
    bool last_layer_added = true;
    for (std::size_t d = 1; d <= opt.depth; ++d) {
        st.start_layer(width);
        bool added = false;
        const std::size_t snapshot = st.basis.size();
        for (std::size_t i = 0; i < snapshot; ++i) {
            for (const auto& l : lam) {
                predicate p(c.size());
                for (std::size_t x = 0; x < c.size(); ++x)
                    p[x] = apply_lifting(q, l, st.basis[i].second, c.alpha[x]);
                added |= st.push(f_modal(l, st.basis[i].first), std::move(p));
            }
        }
        // the entries of the current distance matrix feed the constant pool:
        // optimal dual potentials are min-plus combinations of them
        std::vector<value> layer_consts = consts;
        if (q.is_interval()) {
            std::set<rat> extra;
            for (const auto& row : st.ld.a)
                for (const auto& v : row) extra.insert(v.num());
            for (const auto& e : extra) layer_consts.push_back(value(e));
        }
        added |= st.prop_close(layer_consts);
        res.per_depth.push_back(st.ld);
        last_layer_added = added;
        if (!added && !st.layer_cut) {
            // saturated; deeper layers cannot change the matrix
            for (std::size_t d2 = d + 1; d2 <= opt.depth; ++d2) res.per_depth.push_back(st.ld);
            break;
        }
    }
    res.dm.m = st.ld;
    res.dm.provenance = "ld(" + std::to_string(opt.depth) + ")";
    res.dm.steps = opt.depth;
    res.dm.residual = rat(0);
    res.dm.converged = true;
    res.basis = std::move(st.basis);
    res.saturated = !last_layer_added && !st.width_capped;
    res.width_capped = st.width_capped;
    return res;
}

// bool2 lts path: diamonds preserve joins, so modal arguments can be
// restricted to partition blocks; this is partition refinement with formula
// bookkeeping and stays polynomial for systems up to the state cap.
inline ld_result logical_distance_bool2_lts(const coalgebra& c, const ld_options& opt) {
    const quantale& q = c.base.q;
    const std::size_t n = c.size();
    using mask = std::uint64_t;
    if (n > 64) throw error("logical_distance: state cap exceeded");

    std::vector<std::pair<formula_ptr, mask>> gens;  // generator formulas
    std::set<mask> seen;
    auto partition_of = [&]() {
        std::map<std::vector<bool>, std::size_t> pat;
        std::vector<std::size_t> cls(n);
        for (std::size_t x = 0; x < n; ++x) {
            std::vector<bool> key(gens.size());
            for (std::size_t g = 0; g < gens.size(); ++g) key[g] = (gens[g].second >> x) & 1;
            auto it = pat.find(key);
            if (it == pat.end()) it = pat.emplace(std::move(key), pat.size()).first;
            cls[x] = it->second;
        }
        return cls;
    };
    auto matrix_of = [&](const std::vector<std::size_t>& cls) {
        vcat m = vcat::indiscrete(q, c.base.states);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (cls[i] != cls[j]) m.a[i][j] = q.bottom();
        return m;
    };
    auto block_formula = [&](std::size_t b, const std::vector<std::size_t>& cls) {
        mask bm = 0;
        for (std::size_t x = 0; x < n; ++x)
            if (cls[x] == b) bm |= mask(1) << x;
        formula_ptr phi = f_top();
        for (const auto& [gf, gm] : gens) {
            if ((bm & gm) == bm)
                phi = f_and(phi, gf);
            else if ((bm & gm) == 0)
                phi = f_and(phi, f_homs(q.bottom(), gf));  // negation over bool2
            // generators splitting the block cannot exist once cls refines them
        }
        return phi;
    };

    ld_result res;
    std::vector<std::size_t> cls(n, 0);
    res.per_depth.push_back(matrix_of(cls));
    bool changed_last = true;
    for (std::size_t d = 1; d <= opt.depth; ++d) {
        std::size_t blocks = 1 + *std::max_element(cls.begin(), cls.end());
        bool added = false;
        std::vector<std::pair<formula_ptr, mask>> new_gens;
        for (std::size_t a = 0; a < c.labels.size(); ++a)
            for (std::size_t b = 0; b < blocks; ++b) {
                formula_ptr phi = opt.keep_basis ? block_formula(b, cls) : f_top();
                mask pre = 0;
                for (std::size_t x = 0; x < n; ++x) {
                    const auto& succ = std::get<lts_val>(c.alpha[x]).succ[a];
                    for (std::size_t y : succ)
                        if (cls[y] == b) {
                            pre |= mask(1) << x;
                            break;
                        }
                }
                lifting l{"dia", fkind::lts, a, rat(0), continuity::c_inf_sup};
                if (seen.insert(pre).second) {
                    new_gens.emplace_back(f_modal(l, phi), pre);
                    added = true;
                }
            }
        for (auto& g : new_gens) gens.push_back(std::move(g));
        cls = partition_of();
        res.per_depth.push_back(matrix_of(cls));
        changed_last = added;
        if (!added) {
            for (std::size_t d2 = d + 1; d2 <= opt.depth; ++d2) res.per_depth.push_back(res.per_depth.back());
            break;
        }
    }
    res.dm.m = res.per_depth.back();
    res.dm.provenance = "ld(" + std::to_string(opt.depth) + ")";
    res.dm.steps = opt.depth;
    res.dm.residual = rat(0);
    res.dm.converged = true;
    res.saturated = !changed_last;
    if (opt.keep_basis) {
        res.basis.emplace_back(f_top(), predicate(n, q.top()));
        for (const auto& [gf, gm] : gens) {
            predicate p(n);
            for (std::size_t x = 0; x < n; ++x) p[x] = ((gm >> x) & 1) ? q.top() : q.bottom();
            res.basis.emplace_back(gf, std::move(p));
        }
    }
    return res;
}

}  // namespace detail

/// Logical distance by depth-stratified formula enumeration with semantic
/// deduplication; the meet over the enumerated basis. Exact for finite
/// quantales once saturated; an over-approximation in quantale order
/// otherwise.
inline ld_result logical_distance(const coalgebra& c, const std::vector<lifting>& lam,
                                  const ld_options& opt = {}) {
    if (!opt.force_generic && c.kind == fkind::lts && c.base.q.kind() == qkind::bool2)
        return detail::logical_distance_bool2_lts(c, opt);
    return detail::logical_distance_generic(c, lam, opt);
}

// ---- distinguishing formula search ----

struct distinguish_result {
    formula_ptr phi;
    value gap;  // hom_s of the two interpretations
    std::size_t evaluated = 0;
};

/// Best-first search for a formula separating x and y: candidates are
/// expanded in order of their current hom_s gap (via a fixed linear extension
/// of the quantale order, most separating first).
inline distinguish_result distinguishing_formula(const coalgebra& c, const std::vector<lifting>& lam,
                                                 std::size_t x, std::size_t y, std::size_t budget,
                                                 const rat& grid = rat(1, 8)) {
    if (x == y) throw error("distinguishing_formula: states must differ");
    const quantale& q = c.base.q;
    const std::size_t n = c.size();

    // rank compatible with the quantale order: size of the down-set (finite
    // kinds) or the reversed numeric value; smaller rank = more separating
    std::vector<value> chain;
    if (q.finite()) chain = q.carrier();
    auto rank = [&](const value& v) -> rat {
        if (q.is_interval()) return rat(1) - v.num();
        long below = 0;
        for (const auto& w : chain)
            if (q.leq(w, v)) ++below;
        return rat(below);
    };

    std::vector<std::pair<formula_ptr, predicate>> basis;
    std::map<predicate, std::size_t, vec_less> index;
    distinguish_result best;
    best.phi = f_top();
    best.gap = q.top();
    std::size_t evaluated = 0;

    using entry = std::pair<rat, std::size_t>;  // (rank of gap, basis index)
    auto cmp = [](const entry& a, const entry& b) {
        if (a.first != b.first) return a.first > b.first;  // min-rank first
        return a.second > b.second;
    };
    std::priority_queue<entry, std::vector<entry>, decltype(cmp)> frontier(cmp);

    auto push = [&](formula_ptr f, predicate p) {
        if (evaluated >= budget + 1) return false;
        if (index.count(p)) return false;
        ++evaluated;
        value g = q.hom_s(p[x], p[y]);
        if (q.leq(g, best.gap) && !(g == best.gap)) {
            best.phi = f;
            best.gap = g;
        }
        index.emplace(p, basis.size());
        frontier.emplace(rank(g), basis.size());
        basis.emplace_back(std::move(f), std::move(p));
        return true;
    };

    push(f_top(), predicate(n, q.top()));
    auto consts = q.value_grid(grid);
    while (!frontier.empty() && evaluated <= budget && !(best.gap == q.bottom())) {
        auto [r, i] = frontier.top();
        frontier.pop();
        formula_ptr fi = basis[i].first;
        predicate pi = basis[i].second;
        for (const auto& l : lam) {
            predicate p(n);
            for (std::size_t s = 0; s < n; ++s) p[s] = apply_lifting(q, l, pi, c.alpha[s]);
            push(f_modal(l, fi), std::move(p));
        }
        for (const auto& u : consts) {
            predicate t(n), h(n);
            for (std::size_t s = 0; s < n; ++s) {
                t[s] = q.tensor(u, pi[s]);
                h[s] = q.hom_s(u, pi[s]);
            }
            push(f_tensor(u, fi), std::move(t));
            push(f_homs(u, fi), std::move(h));
        }
        const std::size_t sz = basis.size();
        for (std::size_t j = 0; j < sz && evaluated <= budget; ++j) {
            if (j == i) continue;
            predicate a(n), o(n);
            for (std::size_t s = 0; s < n; ++s) {
                a[s] = q.meet2(pi[s], basis[j].second[s]);
                o[s] = q.join2(pi[s], basis[j].second[s]);
            }
            push(f_and(fi, basis[j].first), std::move(a));
            push(f_or(fi, basis[j].first), std::move(o));
        }
    }
    best.evaluated = evaluated;
    return best;
}

// ---- theorem harnesses ----

struct adequacy_report {
    bool pass = true;
    std::size_t formulas = 0;
    std::size_t violations = 0;
    std::string witness;
    json to_json() const {
        json j;
        j["pass"] = pass;
        j["formulas"] = formulas;
        j["violations"] = violations;
        if (!witness.empty()) j["witness"] = witness;
        return j;
    }
};

/// Adequacy (bd <= ld in quantale order): every enumerated formula gap stays
/// below bd plus the iteration residual.
inline adequacy_report check_adequacy(const coalgebra& c, const std::vector<lifting>& lam,
                                      std::size_t depth, engine_options eopt = {},
                                      ld_options lopt = {}) {
    const quantale& q = c.base.q;
    eopt.min_iter = std::max(eopt.min_iter, depth + 1);
    auto bd = bd_fixpoint(c, lam, eopt);
    lopt.depth = depth;
    auto ld = logical_distance(c, lam, lopt);
    adequacy_report rep;
    rep.formulas = ld.basis.size();
    for (const auto& [f, p] : ld.basis)
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = 0; j < c.size(); ++j) {
                value g = q.hom_s(p[i], p[j]);
                bool ok;
                if (q.is_interval())
                    ok = g.num() <= bd.m.a[i][j].num() + bd.residual;
                else
                    ok = q.leq(bd.m.a[i][j], g);
                if (!ok) {
                    rep.pass = false;
                    ++rep.violations;
                    if (rep.witness.empty())
                        rep.witness = formula_str(f, q, c.labels) + " on (" + c.base.states[i] +
                                      "," + c.base.states[j] + "): gap " + q.value_str(g) +
                                      " vs bd " + q.value_str(bd.m.a[i][j]);
                }
            }
    return rep;
}

struct expressivity_report {
    std::vector<std::pair<std::size_t, rat>> gaps;  // depth -> max numeric gap
    std::vector<std::pair<std::size_t, std::size_t>> mismatches;  // finite: depth -> #pairs off
    bool monotone = true;
    bool exact_at_end = false;
    bool saturated = false;
    json to_json() const {
        json j;
        json g = json::array();
        for (auto& [d, v] : gaps) g.push_back(json{{"depth", d}, {"gap", v.str()}});
        j["gaps"] = g;
        json mm = json::array();
        for (auto& [d, k] : mismatches) mm.push_back(json{{"depth", d}, {"pairs_off", k}});
        j["mismatches"] = mm;
        j["monotone"] = monotone;
        j["exact_at_end"] = exact_at_end;
        j["saturated"] = saturated;
        return j;
    }
};

/// Expressivity convergence: the numeric gap bd - ld_depth per schedule
/// entry, asserting monotone non-increase; exact equality is reported for
/// finite quantales at saturation depth.
inline expressivity_report check_expressivity(const coalgebra& c, const std::vector<lifting>& lam,
                                              const std::vector<std::size_t>& schedule,
                                              engine_options eopt = {}, ld_options lopt = {}) {
    const quantale& q = c.base.q;
    auto bd = bd_fixpoint(c, lam, eopt);
    std::size_t max_depth = 0;
    for (std::size_t d : schedule) max_depth = std::max(max_depth, d);
    lopt.depth = max_depth;
    auto ld = logical_distance(c, lam, lopt);
    expressivity_report rep;
    rep.saturated = ld.saturated;
    rat prev(-1);
    for (std::size_t d : schedule) {
        const vcat& at = ld.per_depth[std::min(d, ld.per_depth.size() - 1)];
        if (q.is_interval()) {
            rat gap(0);
            for (std::size_t i = 0; i < c.size(); ++i)
                for (std::size_t j = 0; j < c.size(); ++j)
                    gap = max(gap, bd.m.a[i][j].num() - at.a[i][j].num());
            rep.gaps.emplace_back(d, gap);
            if (prev >= rat(0) && gap > prev) rep.monotone = false;
            prev = gap;
        } else {
            std::size_t off = 0;
            for (std::size_t i = 0; i < c.size(); ++i)
                for (std::size_t j = 0; j < c.size(); ++j)
                    if (!(bd.m.a[i][j] == at.a[i][j])) ++off;
            rep.mismatches.emplace_back(d, off);
            if (prev >= rat(0) && rat(static_cast<long>(off)) > prev) rep.monotone = false;
            prev = rat(static_cast<long>(off));
        }
    }
    if (q.is_interval())
        rep.exact_at_end = !rep.gaps.empty() && rep.gaps.back().second == rat(0);
    else
        rep.exact_at_end = !rep.mismatches.empty() && rep.mismatches.back().second == 0;
    return rep;
}

struct invariance_report {
    bool morphism_valid = true;
    bool bd_preserved = true;
    bool formulas_preserved = true;
    std::string witness;
    bool pass() const { return morphism_valid && bd_preserved && formulas_preserved; }
    json to_json() const {
        json j;
        j["morphism_valid"] = morphism_valid;
        j["bd_preserved"] = bd_preserved;
        j["formulas_preserved"] = formulas_preserved;
        if (!witness.empty()) j["witness"] = witness;
        j["pass"] = pass();
        return j;
    }
};

/// Invariance of bd and of formula semantics under a coalgebra morphism
/// given as a state map.
inline invariance_report check_morphism_invariance(const coalgebra& c, const coalgebra& d,
                                                   const std::vector<std::size_t>& map,
                                                   const std::vector<lifting>& lam,
                                                   engine_options eopt = {}, ld_options lopt = {}) {
    invariance_report rep;
    const quantale& q = c.base.q;
    if (map.size() != c.size()) throw error("invariance: map arity mismatch");
    for (std::size_t x = 0; x < c.size(); ++x)
        for (std::size_t y = 0; y < c.size(); ++y)
            if (!q.leq(c.base.a[x][y], d.base.a[map[x]][map[y]])) {
                rep.morphism_valid = false;
                rep.witness = "map expands (" + c.base.states[x] + "," + c.base.states[y] + ")";
                return rep;
            }
    for (std::size_t x = 0; x < c.size(); ++x) {
        functor_val lhs = functor_map(c.kind, c.alpha[x], map, d.size());
        if (!(lhs == d.alpha[map[x]])) {
            rep.morphism_valid = false;
            rep.witness = "alpha does not commute at " + c.base.states[x];
            return rep;
        }
    }
    auto bd_c = bd_fixpoint(c, lam, eopt);
    auto bd_d = bd_fixpoint(d, lam, eopt);
    rat tol = q.is_interval() ? bd_c.residual + bd_d.residual + eopt.eps : rat(0);
    for (std::size_t x = 0; x < c.size(); ++x)
        for (std::size_t y = 0; y < c.size(); ++y) {
            bool ok = q.is_interval()
                          ? abs(bd_c.m.a[x][y].num() - bd_d.m.a[map[x]][map[y]].num()) <= tol
                          : bd_c.m.a[x][y] == bd_d.m.a[map[x]][map[y]];
            if (!ok) {
                rep.bd_preserved = false;
                rep.witness = "bd differs at (" + c.base.states[x] + "," + c.base.states[y] + ")";
            }
        }
    auto ld = logical_distance(d, lam, lopt);
    for (const auto& [f, p] : ld.basis) {
        predicate pc = eval_formula(f, c);
        for (std::size_t x = 0; x < c.size(); ++x)
            if (!(pc[x] == p[map[x]])) {
                rep.formulas_preserved = false;
                rep.witness = "semantics of " + formula_str(f, q, c.labels) + " differs at " +
                              c.base.states[x];
                return rep;
            }
    }
    return rep;
}

}  // namespace qhm
