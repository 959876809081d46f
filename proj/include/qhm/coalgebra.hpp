#pragma once

#include <qhm/vcat.hpp>

#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace qhm {

enum class fkind { lts, metric_ts, para_powerset, dist_maybe, signed_weighted };

inline std::string fkind_name(fkind f) {
    switch (f) {
        case fkind::lts: return "lts";
        case fkind::metric_ts: return "metric_ts";
        case fkind::para_powerset: return "para_powerset";
        case fkind::dist_maybe: return "dist_maybe";
        case fkind::signed_weighted: return "signed_weighted";
    }
    return "?";
}

inline fkind fkind_parse(const std::string& s) {
    if (s == "lts") return fkind::lts;
    if (s == "metric_ts") return fkind::metric_ts;
    if (s == "para_powerset") return fkind::para_powerset;
    if (s == "dist_maybe") return fkind::dist_maybe;
    if (s == "signed_weighted") return fkind::signed_weighted;
    throw error("unknown functor '" + s + "'");
}

/// P(A x -): per label, a set of successors.
struct lts_val {
    std::vector<std::set<std::size_t>> succ;
    bool operator==(const lts_val&) const = default;
};

/// [0,1] x P_w: a state label and one unlabelled successor set.
struct metric_val {
    rat r;
    std::set<std::size_t> succ;
    bool operator==(const metric_val&) const = default;
};

/// Diamond-valued powerset: a grade in diamond4 for every state.
struct para_val {
    std::vector<std::uint8_t> grade;
    bool operator==(const para_val&) const = default;
};

/// Finitely supported distribution over states plus a deadlock point.
struct distribution {
    std::map<std::size_t, rat> w;
    rat dead;
    bool operator==(const distribution&) const = default;

    rat total() const {
        rat s = dead;
        for (const auto& [_, p] : w) s += p;
        return s;
    }
};

/// D(1 + -)^A: per label, a distribution over states + deadlock.
struct dist_val {
    std::vector<distribution> per_label;
    bool operator==(const dist_val&) const = default;
};

/// (W -)^A: per label, a finite [-1,1]-weighted set of states.
struct weight_val {
    std::vector<std::map<std::size_t, rat>> per_label;
    bool operator==(const weight_val&) const = default;
};

using functor_val = std::variant<lts_val, metric_val, para_val, dist_val, weight_val>;

/// A coalgebra: symmetric base V-category, functor tag, and one functor
/// value per state.
struct coalgebra {
    vcat base;
    fkind kind = fkind::lts;
    std::vector<std::string> labels;
    std::vector<functor_val> alpha;

    std::size_t size() const { return base.size(); }
    std::size_t label_index(const std::string& l) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == l) return i;
        throw error("unknown label '" + l + "'");
    }
};

inline std::size_t max_states_cap() {
    if (const char* env = std::getenv("QHM_MAX_STATES")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return 64;
}

/// Expected quantale for each functor's canonical modalities.
inline quantale functor_quantale(fkind k) {
    switch (k) {
        case fkind::lts: return quantale::bool2();
        case fkind::metric_ts: return quantale::max01();
        case fkind::para_powerset: return quantale::diamond4();
        default: return quantale::luk01();
    }
}

// ---- functor action on maps (renaming states along g : X -> Y) ----

inline functor_val functor_map(fkind kind, const functor_val& t, const std::vector<std::size_t>& g,
                               std::size_t m, const quantale& diamond = quantale::diamond4()) {
    switch (kind) {
        case fkind::lts: {
            const auto& v = std::get<lts_val>(t);
            lts_val out;
            out.succ.resize(v.succ.size());
            for (std::size_t a = 0; a < v.succ.size(); ++a)
                for (std::size_t x : v.succ[a]) out.succ[a].insert(g[x]);
            return out;
        }
        case fkind::metric_ts: {
            const auto& v = std::get<metric_val>(t);
            metric_val out;
            out.r = v.r;
            for (std::size_t x : v.succ) out.succ.insert(g[x]);
            return out;
        }
        case fkind::para_powerset: {
            const auto& v = std::get<para_val>(t);
            para_val out;
            out.grade.assign(m, diamond.idx_bottom());
            for (std::size_t x = 0; x < v.grade.size(); ++x)
                out.grade[g[x]] = diamond.idx_join(out.grade[g[x]], v.grade[x]);
            return out;
        }
        case fkind::dist_maybe: {
            const auto& v = std::get<dist_val>(t);
            dist_val out;
            for (const auto& d : v.per_label) {
                distribution nd;
                nd.dead = d.dead;
                for (const auto& [x, p] : d.w) {
                    auto it = nd.w.find(g[x]);
                    if (it == nd.w.end())
                        nd.w.emplace(g[x], p);
                    else
                        it->second += p;
                }
                out.per_label.push_back(std::move(nd));
            }
            return out;
        }
        case fkind::signed_weighted: {
            const auto& v = std::get<weight_val>(t);
            weight_val out;
            for (const auto& wmap : v.per_label) {
                std::map<std::size_t, rat> nw;
                for (const auto& [x, p] : wmap) {
                    auto it = nw.find(g[x]);
                    if (it == nw.end())
                        nw.emplace(g[x], p);
                    else
                        it->second += p;
                }
                // drop exact zeros created by cancellation
                for (auto it = nw.begin(); it != nw.end();)
                    it = it->second == rat(0) ? nw.erase(it) : std::next(it);
                out.per_label.push_back(std::move(nw));
            }
            return out;
        }
    }
    throw error("functor_map: bad kind");
}

// ---- structural validation (functor-value invariants) ----

struct coalgebra_report {
    bool structure_ok = true;
    bool nonexpansive = true;  // filled by the full validator in lifted.hpp
    std::vector<std::string> violations;
    bool ok() const { return structure_ok && nonexpansive; }
    json to_json() const {
        json j;
        j["structure_ok"] = structure_ok;
        j["nonexpansive"] = nonexpansive;
        j["violations"] = violations;
        return j;
    }
};

inline void validate_structure(const coalgebra& c, coalgebra_report& rep) {
    const std::size_t n = c.size();
    if (c.alpha.size() != n) {
        rep.structure_ok = false;
        rep.violations.push_back("transition count != state count");
        return;
    }
    auto bad = [&](std::size_t x, const std::string& msg) {
        rep.structure_ok = false;
        rep.violations.push_back("state " + c.base.states[x] + ": " + msg);
    };
    for (std::size_t x = 0; x < n; ++x) {
        switch (c.kind) {
            case fkind::lts: {
                const auto& v = std::get<lts_val>(c.alpha[x]);
                if (v.succ.size() != c.labels.size()) bad(x, "label arity mismatch");
                for (const auto& s : v.succ)
                    for (std::size_t y : s)
                        if (y >= n) bad(x, "successor out of range");
                break;
            }
            case fkind::metric_ts: {
                const auto& v = std::get<metric_val>(c.alpha[x]);
                if (v.r < rat(0) || v.r > rat(1)) bad(x, "state value outside [0,1]");
                for (std::size_t y : v.succ)
                    if (y >= n) bad(x, "successor out of range");
                break;
            }
            case fkind::para_powerset: {
                const auto& v = std::get<para_val>(c.alpha[x]);
                if (v.grade.size() != n) bad(x, "grade vector arity mismatch");
                break;
            }
            case fkind::dist_maybe: {
                const auto& v = std::get<dist_val>(c.alpha[x]);
                if (v.per_label.size() != c.labels.size()) bad(x, "label arity mismatch");
                for (std::size_t a = 0; a < v.per_label.size(); ++a) {
                    const auto& d = v.per_label[a];
                    if (d.dead < rat(0)) bad(x, "negative deadlock mass");
                    for (const auto& [y, p] : d.w) {
                        if (y >= n) bad(x, "target out of range");
                        if (p < rat(0)) bad(x, "negative weight on " + c.base.states[y]);
                    }
                    if (d.total() != rat(1))
                        bad(x, "label " + c.labels[a] + ": weights sum to " + d.total().str() +
                                   ", expected 1");
                }
                break;
            }
            case fkind::signed_weighted: {
                const auto& v = std::get<weight_val>(c.alpha[x]);
                if (v.per_label.size() != c.labels.size()) bad(x, "label arity mismatch");
                for (std::size_t a = 0; a < v.per_label.size(); ++a) {
                    rat pos(0), neg(0);
                    for (const auto& [y, p] : v.per_label[a]) {
                        if (y >= n) bad(x, "target out of range");
                        if (p > rat(1) || p < rat(-1)) bad(x, "weight outside [-1,1]");
                        if (p > rat(0)) pos += p;
                        if (p < rat(0)) neg += p;
                    }
                    // the extreme subset sums; all others lie between them
                    if (pos > rat(1))
                        bad(x, "label " + c.labels[a] + ": positive mass " + pos.str() + " > 1");
                    if (neg < rat(-1))
                        bad(x, "label " + c.labels[a] + ": negative mass " + neg.str() + " < -1");
                }
                break;
            }
        }
    }
}

// ---- serialization ----

inline json coalgebra_to_json(const coalgebra& c) {
    json j;
    j["quantale"] = c.base.q.to_json();
    j["functor"] = fkind_name(c.kind);
    j["states"] = c.base.states;
    if (!c.labels.empty()) j["labels"] = c.labels;
    bool discrete = true;
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n && discrete; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const value expect = i == k ? c.base.q.top() : c.base.q.bottom();
            if (!(c.base.a[i][k] == expect)) {
                discrete = false;
                break;
            }
        }
    if (!discrete) {
        json m = json::array();
        for (const auto& row : c.base.a) {
            json r = json::array();
            for (const auto& v : row) r.push_back(c.base.q.value_to_json(v));
            m.push_back(r);
        }
        j["base_matrix"] = m;
    }
    json tr;
    for (std::size_t x = 0; x < n; ++x) {
        json e;
        switch (c.kind) {
            case fkind::lts: {
                const auto& v = std::get<lts_val>(c.alpha[x]);
                for (std::size_t a = 0; a < c.labels.size(); ++a) {
                    json arr = json::array();
                    for (std::size_t y : v.succ[a]) arr.push_back(c.base.states[y]);
                    e[c.labels[a]] = arr;
                }
                break;
            }
            case fkind::metric_ts: {
                const auto& v = std::get<metric_val>(c.alpha[x]);
                e["value"] = v.r.str();
                json arr = json::array();
                for (std::size_t y : v.succ) arr.push_back(c.base.states[y]);
                e["succ"] = arr;
                break;
            }
            case fkind::para_powerset: {
                const auto& v = std::get<para_val>(c.alpha[x]);
                const quantale d4 = quantale::diamond4();
                json g;
                for (std::size_t y = 0; y < n; ++y)
                    if (v.grade[y] != d4.idx_bottom())
                        g[c.base.states[y]] = d4.value_str(value(v.grade[y]));
                e["grades"] = g;
                break;
            }
            case fkind::dist_maybe: {
                const auto& v = std::get<dist_val>(c.alpha[x]);
                for (std::size_t a = 0; a < c.labels.size(); ++a) {
                    json d;
                    for (const auto& [y, p] : v.per_label[a].w) d[c.base.states[y]] = p.str();
                    if (v.per_label[a].dead != rat(0)) d["deadlock"] = v.per_label[a].dead.str();
                    e[c.labels[a]] = d;
                }
                break;
            }
            case fkind::signed_weighted: {
                const auto& v = std::get<weight_val>(c.alpha[x]);
                for (std::size_t a = 0; a < c.labels.size(); ++a) {
                    json d;
                    for (const auto& [y, p] : v.per_label[a]) d[c.base.states[y]] = p.str();
                    e[c.labels[a]] = d;
                }
                break;
            }
        }
        tr[c.base.states[x]] = e;
    }
    j["transitions"] = tr;
    return j;
}

inline coalgebra coalgebra_from_json(const json& j) {
    coalgebra c;
    c.base.q = quantale::from_json(j.at("quantale"));
    c.kind = fkind_parse(j.at("functor").get<std::string>());
    c.base.states = j.at("states").get<std::vector<std::string>>();
    const std::size_t n = c.base.states.size();
    if (n == 0) throw error("coalgebra: empty state set");
    if (n > max_states_cap())
        throw error("coalgebra exceeds QHM_MAX_STATES cap of " + std::to_string(max_states_cap()));
    if (j.contains("labels")) c.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("base_matrix")) {
        const auto& m = j.at("base_matrix");
        if (m.size() != n) throw error("coalgebra: base matrix shape mismatch");
        for (const auto& row : m) {
            if (row.size() != n) throw error("coalgebra: base matrix shape mismatch");
            std::vector<value> r;
            for (const auto& e : row) r.push_back(c.base.q.value_from_json(e));
            c.base.a.push_back(std::move(r));
        }
    } else {
        c.base = vcat::discrete(c.base.q, c.base.states);
    }
    // default labels when the payloads are labelled and none were given
    if (c.labels.empty() &&
        (c.kind == fkind::lts || c.kind == fkind::dist_maybe || c.kind == fkind::signed_weighted)) {
        std::set<std::string> seen;
        for (const auto& [_, e] : j.at("transitions").items())
            for (const auto& [lbl, __] : e.items()) seen.insert(lbl);
        c.labels.assign(seen.begin(), seen.end());
        if (c.labels.empty()) c.labels.push_back("a");
    }
    const json& tr = j.at("transitions");
    for (std::size_t x = 0; x < n; ++x) {
        const std::string& name = c.base.states[x];
        if (!tr.contains(name)) throw error("coalgebra: missing transitions for state " + name);
        const json& e = tr.at(name);
        switch (c.kind) {
            case fkind::lts: {
                lts_val v;
                v.succ.resize(c.labels.size());
                for (std::size_t a = 0; a < c.labels.size(); ++a)
                    if (e.contains(c.labels[a]))
                        for (const auto& s : e.at(c.labels[a]))
                            v.succ[a].insert(c.base.state_index(s.get<std::string>()));
                c.alpha.push_back(std::move(v));
                break;
            }
            case fkind::metric_ts: {
                metric_val v;
                v.r = rat::parse(e.at("value").get<std::string>());
                if (e.contains("succ"))
                    for (const auto& s : e.at("succ"))
                        v.succ.insert(c.base.state_index(s.get<std::string>()));
                c.alpha.push_back(std::move(v));
                break;
            }
            case fkind::para_powerset: {
                para_val v;
                const quantale d4 = quantale::diamond4();
                v.grade.assign(n, d4.idx_bottom());
                if (e.contains("grades"))
                    for (const auto& [s, g] : e.at("grades").items())
                        v.grade[c.base.state_index(s)] = d4.value_parse(g.get<std::string>()).idx();
                c.alpha.push_back(std::move(v));
                break;
            }
            case fkind::dist_maybe: {
                dist_val v;
                for (std::size_t a = 0; a < c.labels.size(); ++a) {
                    distribution d;
                    d.dead = rat(0);
                    if (e.contains(c.labels[a]))
                        for (const auto& [s, p] : e.at(c.labels[a]).items()) {
                            rat pr = rat::parse(p.get<std::string>());
                            if (s == "deadlock")
                                d.dead = pr;
                            else
                                d.w[c.base.state_index(s)] = pr;
                        }
                    v.per_label.push_back(std::move(d));
                }
                c.alpha.push_back(std::move(v));
                break;
            }
            case fkind::signed_weighted: {
                weight_val v;
                for (std::size_t a = 0; a < c.labels.size(); ++a) {
                    std::map<std::size_t, rat> wmap;
                    if (e.contains(c.labels[a]))
                        for (const auto& [s, p] : e.at(c.labels[a]).items())
                            wmap[c.base.state_index(s)] = rat::parse(p.get<std::string>());
                    v.per_label.push_back(std::move(wmap));
                }
                c.alpha.push_back(std::move(v));
                break;
            }
        }
    }
    auto rep = validate_vcat(c.base);
    if (!rep.valid()) throw error("coalgebra base is not a V-category: " + rep.witness);
    if (!rep.symmetric) throw error("coalgebra base must be symmetric");
    return c;
}

}  // namespace qhm
