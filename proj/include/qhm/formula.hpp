#pragma once

#include <qhm/lifted.hpp>

#include <memory>
#include <string>
#include <vector>

namespace qhm {

/// Formula of the quantitative modal logic:
/// top | and | or | tensor(u,-) | homs(u,-) | modal lifting.
struct formula {
    enum class kind { top, f_and, f_or, f_tensor, f_homs, modal };
    kind k = kind::top;
    value u;     // constant for tensor/homs
    lifting lam; // modal only
    std::shared_ptr<const formula> left, right;
};

using formula_ptr = std::shared_ptr<const formula>;

inline formula_ptr f_top() {
    static formula_ptr t = std::make_shared<formula>();
    return t;
}
inline formula_ptr f_and(formula_ptr a, formula_ptr b) {
    auto f = std::make_shared<formula>();
    f->k = formula::kind::f_and;
    f->left = std::move(a);
    f->right = std::move(b);
    return f;
}
inline formula_ptr f_or(formula_ptr a, formula_ptr b) {
    auto f = std::make_shared<formula>();
    f->k = formula::kind::f_or;
    f->left = std::move(a);
    f->right = std::move(b);
    return f;
}
inline formula_ptr f_tensor(value u, formula_ptr a) {
    auto f = std::make_shared<formula>();
    f->k = formula::kind::f_tensor;
    f->u = std::move(u);
    f->left = std::move(a);
    return f;
}
inline formula_ptr f_homs(value u, formula_ptr a) {
    auto f = std::make_shared<formula>();
    f->k = formula::kind::f_homs;
    f->u = std::move(u);
    f->left = std::move(a);
    return f;
}
inline formula_ptr f_modal(lifting lam, formula_ptr a) {
    auto f = std::make_shared<formula>();
    f->k = formula::kind::modal;
    f->lam = std::move(lam);
    f->left = std::move(a);
    return f;
}

inline std::size_t modal_depth(const formula_ptr& f) {
    switch (f->k) {
        case formula::kind::top: return 0;
        case formula::kind::f_tensor:
        case formula::kind::f_homs: return modal_depth(f->left);
        case formula::kind::modal: return 1 + modal_depth(f->left);
        default: return std::max(modal_depth(f->left), modal_depth(f->right));
    }
}

inline std::string formula_str(const formula_ptr& f, const quantale& q,
                               const std::vector<std::string>& labels) {
    switch (f->k) {
        case formula::kind::top: return "(top)";
        case formula::kind::f_and:
            return "(and " + formula_str(f->left, q, labels) + " " + formula_str(f->right, q, labels) + ")";
        case formula::kind::f_or:
            return "(or " + formula_str(f->left, q, labels) + " " + formula_str(f->right, q, labels) + ")";
        case formula::kind::f_tensor:
            return "(tensor \"" + q.value_str(f->u) + "\" " + formula_str(f->left, q, labels) + ")";
        case formula::kind::f_homs:
            return "(homs \"" + q.value_str(f->u) + "\" " + formula_str(f->left, q, labels) + ")";
        case formula::kind::modal: {
            std::string s = "(m " + f->lam.name;
            bool labelled = (f->lam.name == "dia" && f->lam.functor == fkind::lts) ||
                            f->lam.name == "exp" || f->lam.name == "wgt";
            if (labelled && f->lam.label < labels.size()) s += " " + labels[f->lam.label];
            if (f->lam.name == "wgt") s += " \"" + f->lam.offset.str() + "\"";
            return s + " " + formula_str(f->left, q, labels) + ")";
        }
    }
    return "?";
}

// ---- s-expression parser ----

namespace detail {

struct sexpr {
    std::string atom;  // empty for lists
    std::vector<sexpr> items;
    bool is_atom() const { return items.empty() && !atom.empty(); }
};

inline sexpr parse_sexpr(const std::string& s, std::size_t& i) {
    auto skip = [&] {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
    };
    skip();
    if (i >= s.size()) throw error("formula: unexpected end of input");
    if (s[i] == '(') {
        ++i;
        sexpr e;
        e.atom.clear();
        while (true) {
            skip();
            if (i >= s.size()) throw error("formula: missing ')'");
            if (s[i] == ')') {
                ++i;
                return e;
            }
            e.items.push_back(parse_sexpr(s, i));
        }
    }
    if (s[i] == '"') {
        ++i;
        std::string a;
        while (i < s.size() && s[i] != '"') a.push_back(s[i++]);
        if (i >= s.size()) throw error("formula: unterminated string");
        ++i;
        sexpr e;
        e.atom = a;
        return e;
    }
    std::string a;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\n' && s[i] != '\r' &&
           s[i] != '(' && s[i] != ')')
        a.push_back(s[i++]);
    if (a.empty()) throw error("formula: empty atom");
    sexpr e;
    e.atom = a;
    return e;
}

inline formula_ptr build_formula(const sexpr& e, const quantale& q, fkind functor,
                                 const std::vector<std::string>& labels) {
    if (e.is_atom()) throw error("formula: bare atom '" + e.atom + "'");
    if (e.items.empty() || !e.items[0].is_atom()) throw error("formula: expected operator");
    const std::string& op = e.items[0].atom;
    auto child = [&](std::size_t k) { return build_formula(e.items[k], q, functor, labels); };
    if (op == "top") {
        if (e.items.size() != 1) throw error("formula: (top) takes no arguments");
        return f_top();
    }
    if (op == "and" || op == "or") {
        if (e.items.size() != 3) throw error("formula: (" + op + " phi psi)");
        return op == "and" ? f_and(child(1), child(2)) : f_or(child(1), child(2));
    }
    if (op == "tensor" || op == "homs") {
        if (e.items.size() != 3 || !e.items[1].is_atom()) throw error("formula: (" + op + " u phi)");
        value u = q.value_parse(e.items[1].atom);
        return op == "tensor" ? f_tensor(u, child(2)) : f_homs(u, child(2));
    }
    if (op == "m") {
        if (e.items.size() < 3 || !e.items[1].is_atom()) throw error("formula: (m name ... phi)");
        lifting l;
        l.name = e.items[1].atom;
        l.functor = functor;
        std::size_t arg = 2;
        bool labelled = (l.name == "dia" && functor == fkind::lts) || l.name == "exp" || l.name == "wgt";
        if (labelled) {
            // label is optional when the system has exactly one
            if (e.items.size() >= 4 && e.items[arg].is_atom()) {
                l.label = 0;
                bool found = false;
                for (std::size_t i = 0; i < labels.size(); ++i)
                    if (labels[i] == e.items[arg].atom) {
                        l.label = i;
                        found = true;
                        break;
                    }
                if (!found) throw error("formula: unknown label '" + e.items[arg].atom + "'");
                ++arg;
            } else if (labels.size() == 1) {
                l.label = 0;
            } else {
                throw error("formula: modality " + l.name + " needs a label");
            }
        }
        if (l.name == "wgt") {
            if (arg >= e.items.size() || !e.items[arg].is_atom())
                throw error("formula: (m wgt label r phi)");
            l.offset = rat::parse(e.items[arg].atom);
            ++arg;
        }
        if (arg + 1 != e.items.size()) throw error("formula: malformed modality");
        const char* valid = nullptr;
        switch (functor) {
            case fkind::lts: valid = "dia"; break;
            case fkind::metric_ts: valid = "dia|o"; break;
            case fkind::para_powerset: valid = "box_sup|box_arrow"; break;
            case fkind::dist_maybe: valid = "exp"; break;
            case fkind::signed_weighted: valid = "wgt"; break;
        }
        if (std::string(valid).find(l.name) == std::string::npos)
            throw error("formula: modality '" + l.name + "' does not match functor " +
                        fkind_name(functor));
        return f_modal(l, build_formula(e.items[arg], q, functor, labels));
    }
    throw error("formula: unknown operator '" + op + "'");
}

}  // namespace detail

inline formula_ptr parse_formula(const std::string& s, const quantale& q, fkind functor,
                                 const std::vector<std::string>& labels) {
    std::size_t i = 0;
    auto e = detail::parse_sexpr(s, i);
    while (i < s.size() && (s[i] == ' ' || s[i] == '\n' || s[i] == '\t' || s[i] == '\r')) ++i;
    if (i != s.size()) throw error("formula: trailing input");
    return detail::build_formula(e, q, functor, labels);
}

/// Interpretation of a formula over a coalgebra, one value per state.
inline predicate eval_formula(const formula_ptr& f, const coalgebra& c) {
    const quantale& q = c.base.q;
    const std::size_t n = c.size();
    switch (f->k) {
        case formula::kind::top: return predicate(n, q.top());
        case formula::kind::f_and: {
            predicate a = eval_formula(f->left, c), b = eval_formula(f->right, c);
            for (std::size_t i = 0; i < n; ++i) a[i] = q.meet2(a[i], b[i]);
            return a;
        }
        case formula::kind::f_or: {
            predicate a = eval_formula(f->left, c), b = eval_formula(f->right, c);
            for (std::size_t i = 0; i < n; ++i) a[i] = q.join2(a[i], b[i]);
            return a;
        }
        case formula::kind::f_tensor: {
            predicate a = eval_formula(f->left, c);
            for (std::size_t i = 0; i < n; ++i) a[i] = q.tensor(f->u, a[i]);
            return a;
        }
        case formula::kind::f_homs: {
            predicate a = eval_formula(f->left, c);
            for (std::size_t i = 0; i < n; ++i) a[i] = q.hom_s(f->u, a[i]);
            return a;
        }
        case formula::kind::modal: {
            predicate a = eval_formula(f->left, c);
            predicate out(n);
            for (std::size_t i = 0; i < n; ++i) out[i] = apply_lifting(q, f->lam, a, c.alpha[i]);
            return out;
        }
    }
    throw error("eval_formula: bad node");
}

}  // namespace qhm
