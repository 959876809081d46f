#pragma once

#include <qhm/coalgebra.hpp>

#include <string>
#include <vector>

namespace qhm {

/// Continuity classes of the built-in liftings (see the closure module).
enum class continuity { id_only, l_cont, c_inf_sup, inf_all };

/// A modality: named evaluation rule on functor values. Liftings are kept in
/// transposed form, i.e. as the map (predicate, functor value) -> value.
struct lifting {
    std::string name;       // dia | o | box_sup | box_arrow | exp | wgt
    fkind functor = fkind::lts;
    std::size_t label = 0;  // label index, for labelled modalities
    rat offset;             // wgt only
    continuity cont = continuity::id_only;

    std::string display(const std::vector<std::string>& labels) const {
        std::string s = name;
        bool labelled = name == "dia" ? functor == fkind::lts : (name == "exp" || name == "wgt");
        if (labelled && label < labels.size()) s += "_" + labels[label];
        if (name == "wgt") s += "^" + offset.str();
        return s;
    }
};

inline value apply_lifting(const quantale& q, const lifting& l, const predicate& f,
                           const functor_val& t) {
    switch (l.functor) {
        case fkind::lts: {
            if (l.name != "dia") throw error("lifting " + l.name + " undefined for lts");
            const auto& v = std::get<lts_val>(t);
            if (l.label >= v.succ.size()) throw error("lifting label out of range");
            value acc = q.bottom();
            for (std::size_t y : v.succ[l.label]) acc = q.join2(acc, f[y]);
            return acc;
        }
        case fkind::metric_ts: {
            const auto& v = std::get<metric_val>(t);
            if (l.name == "o") return value(v.r);
            if (l.name != "dia") throw error("lifting " + l.name + " undefined for metric_ts");
            value acc = q.bottom();
            for (std::size_t y : v.succ) acc = q.join2(acc, f[y]);
            return acc;
        }
        case fkind::para_powerset: {
            const auto& v = std::get<para_val>(t);
            if (l.name != "box_sup" && l.name != "box_arrow")
                throw error("lifting " + l.name + " undefined for para_powerset");
            value acc = q.top();
            for (std::size_t y = 0; y < v.grade.size(); ++y) {
                value g(v.grade[y]);
                value h = q.hom(g, f[y]);
                if (l.name == "box_arrow")
                    h = q.meet2(h, q.hom(q.neg_diamond(f[y]), q.neg_diamond(g)));
                acc = q.meet2(acc, h);
            }
            return acc;
        }
        case fkind::dist_maybe: {
            if (l.name != "exp") throw error("lifting " + l.name + " undefined for dist_maybe");
            const auto& v = std::get<dist_val>(t);
            if (l.label >= v.per_label.size()) throw error("lifting label out of range");
            const distribution& d = v.per_label[l.label];
            rat e = d.dead;  // deadlock evaluates to 1 under f^{+1}
            for (const auto& [y, p] : d.w) e += f[y].num() * p;
            return value(e);
        }
        case fkind::signed_weighted: {
            if (l.name != "wgt") throw error("lifting " + l.name + " undefined for signed_weighted");
            const auto& v = std::get<weight_val>(t);
            if (l.label >= v.per_label.size()) throw error("lifting label out of range");
            rat s(0);
            for (const auto& [y, p] : v.per_label[l.label]) s += f[y].num() * p;
            return value(clamp01(l.offset + rat(1, 2) * s));
        }
    }
    throw error("apply_lifting: bad functor");
}

/// The canonical modality set of each functor. For signed_weighted one wgt
/// modality per label and offset is produced; offsets default to {0, 1/2, 1}.
inline std::vector<lifting> default_liftings(const coalgebra& c, std::vector<rat> wgt_offsets = {}) {
    std::vector<lifting> out;
    switch (c.kind) {
        case fkind::lts:
            for (std::size_t a = 0; a < c.labels.size(); ++a)
                out.push_back({"dia", c.kind, a, rat(0), continuity::c_inf_sup});
            break;
        case fkind::metric_ts:
            out.push_back({"o", c.kind, 0, rat(0), continuity::inf_all});
            out.push_back({"dia", c.kind, 0, rat(0), continuity::c_inf_sup});
            break;
        case fkind::para_powerset:
            out.push_back({"box_sup", c.kind, 0, rat(0), continuity::inf_all});
            out.push_back({"box_arrow", c.kind, 0, rat(0), continuity::id_only});
            break;
        case fkind::dist_maybe:
            for (std::size_t a = 0; a < c.labels.size(); ++a)
                out.push_back({"exp", c.kind, a, rat(0), continuity::l_cont});
            break;
        case fkind::signed_weighted: {
            if (wgt_offsets.empty()) wgt_offsets = {rat(0), rat(1, 2), rat(1)};
            for (std::size_t a = 0; a < c.labels.size(); ++a)
                for (const auto& r : wgt_offsets)
                    out.push_back({"wgt", c.kind, a, r, continuity::l_cont});
            break;
        }
    }
    return out;
}

}  // namespace qhm
