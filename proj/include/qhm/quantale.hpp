#pragma once

#include <qhm/rational.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace qhm {

using json = nlohmann::ordered_json;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class qkind { bool2, luk01, max01, diamond4, table, product };

inline std::string qkind_name(qkind k) {
    switch (k) {
        case qkind::bool2: return "bool2";
        case qkind::luk01: return "luk01";
        case qkind::max01: return "max01";
        case qkind::diamond4: return "diamond4";
        case qkind::table: return "table";
        case qkind::product: return "product";
    }
    return "?";
}

/// One element of a quantale: an index into a finite carrier, an exact
/// rational in [0,1] (unit-interval kinds), or a tuple (product kinds).
struct value {
    std::variant<std::uint8_t, rat, std::vector<value>> v;

    value() : v(std::uint8_t{0}) {}
    explicit value(std::uint8_t i) : v(i) {}
    explicit value(rat r) : v(std::move(r)) {}
    explicit value(std::vector<value> t) : v(std::move(t)) {}

    bool is_index() const { return std::holds_alternative<std::uint8_t>(v); }
    bool is_num() const { return std::holds_alternative<rat>(v); }
    bool is_tuple() const { return std::holds_alternative<std::vector<value>>(v); }

    std::uint8_t idx() const { return std::get<std::uint8_t>(v); }
    const rat& num() const { return std::get<rat>(v); }
    const std::vector<value>& tuple() const { return std::get<std::vector<value>>(v); }

    friend bool operator==(const value& a, const value& b) { return a.v == b.v; }
    friend bool operator!=(const value& a, const value& b) { return !(a.v == b.v); }
};

/// Total order on values of a common quantale, for use as map keys.
/// Unrelated to the quantale order.
inline int value_cmp(const value& a, const value& b) {
    if (a.v.index() != b.v.index()) return a.v.index() < b.v.index() ? -1 : 1;
    if (a.is_index()) return a.idx() < b.idx() ? -1 : (a.idx() == b.idx() ? 0 : 1);
    if (a.is_num()) return a.num() < b.num() ? -1 : (a.num() == b.num() ? 0 : 1);
    const auto& ta = a.tuple();
    const auto& tb = b.tuple();
    for (std::size_t i = 0; i < std::min(ta.size(), tb.size()); ++i) {
        int c = value_cmp(ta[i], tb[i]);
        if (c != 0) return c;
    }
    if (ta.size() != tb.size()) return ta.size() < tb.size() ? -1 : 1;
    return 0;
}

struct value_less {
    bool operator()(const value& a, const value& b) const { return value_cmp(a, b) < 0; }
};

struct vec_less {
    bool operator()(const std::vector<value>& a, const std::vector<value>& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        for (std::size_t i = 0; i < a.size(); ++i) {
            int c = value_cmp(a[i], b[i]);
            if (c != 0) return c < 0;
        }
        return false;
    }
};

struct law_check {
    std::string law;
    bool pass = true;
    std::string witness;  // empty when pass
};

struct validation_report {
    std::vector<law_check> checks;
    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const law_check& c) { return c.pass; });
    }
    json to_json() const {
        json arr = json::array();
        for (const auto& c : checks) {
            json e;
            e["law"] = c.law;
            e["pass"] = c.pass;
            if (!c.pass) e["witness"] = c.witness;
            arr.push_back(e);
        }
        return arr;
    }
};

struct kdecomp_result {
    bool holds = false;
    std::vector<value> witnesses;  // elements u with hom(u,v) way above v for all v
    value join_of_squares;
};

/// A commutative unital quantale: complete lattice + tensor + residuation.
///
/// For the unit-interval kinds luk01 and max01 the quantale order is the
/// REVERSED numeric order: leq/join/meet/top/bottom all speak the quantale
/// order, so join is numeric min and top is numeric 0. Methods that render
/// values (value_str) use the numeric convention.
class quantale {
public:
    quantale() : quantale(bool2()) {}

    static quantale bool2() {
        static quantale q = make_table_checked(
            qkind::bool2, {"bot", "top"}, {{0, 1}, {1, 1}}, {{0, 0}, {0, 1}}, 1);
        return q;
    }

    /// [0,1] with truncated addition, ordered by >= (numeric).
    static quantale luk01() {
        auto im = std::make_shared<impl>();
        im->kind = qkind::luk01;
        return quantale(std::move(im));
    }

    /// [0,1] with max tensor, ordered by >= (numeric); the ultrametric quantale.
    static quantale max01() {
        auto im = std::make_shared<impl>();
        im->kind = qkind::max01;
        return quantale(std::move(im));
    }

    /// Four-valued diamond frame {bot, N, B, top}, N and B incomparable,
    /// tensor = meet, unit = top.
    static quantale diamond4() {
        static quantale q = make_table_checked(
            qkind::diamond4, {"bot", "N", "B", "top"},
            {{0, 1, 2, 3}, {1, 1, 3, 3}, {2, 3, 2, 3}, {3, 3, 3, 3}},
            {{0, 0, 0, 0}, {0, 1, 0, 1}, {0, 0, 2, 2}, {0, 1, 2, 3}}, 3);
        return q;
    }

    /// Arbitrary finite quantale from explicit tables. Does not validate the
    /// laws (q_validate does); throws only on malformed shapes.
    static quantale table(std::vector<std::string> elements,
                          std::vector<std::vector<std::uint8_t>> join_tbl,
                          std::vector<std::vector<std::uint8_t>> tensor_tbl,
                          std::uint8_t unit_idx, std::string name = "table") {
        const std::size_t n = elements.size();
        if (n == 0 || n > 255) throw error("quantale table: carrier size out of range");
        auto shape_ok = [&](const auto& t) {
            if (t.size() != n) return false;
            for (const auto& row : t) {
                if (row.size() != n) return false;
                for (auto e : row)
                    if (e >= n) return false;
            }
            return true;
        };
        if (!shape_ok(join_tbl) || !shape_ok(tensor_tbl) || unit_idx >= n)
            throw error("quantale table: malformed table");
        auto im = std::make_shared<impl>();
        im->kind = qkind::table;
        im->name = std::move(name);
        im->elems = std::move(elements);
        im->join_t = std::move(join_tbl);
        im->tens_t = std::move(tensor_tbl);
        im->unit_i = unit_idx;
        im->derive_tables();
        return quantale(std::move(im));
    }

    /// Chain 0..m with tensor min(m, i+j); element i stands for distance i/m.
    /// The quantale order is reversed: index 0 is the top and the unit.
    static quantale luk_chain(int m, std::string name = "") {
        std::vector<std::string> elems;
        const std::size_t n = static_cast<std::size_t>(m) + 1;
        for (std::size_t i = 0; i < n; ++i) elems.push_back(std::to_string(i) + "/" + std::to_string(m));
        std::vector<std::vector<std::uint8_t>> jt(n, std::vector<std::uint8_t>(n));
        std::vector<std::vector<std::uint8_t>> tt(n, std::vector<std::uint8_t>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                jt[i][j] = static_cast<std::uint8_t>(std::min(i, j));
                tt[i][j] = static_cast<std::uint8_t>(std::min<std::size_t>(n - 1, i + j));
            }
        return table(std::move(elems), std::move(jt), std::move(tt), 0,
                     name.empty() ? "luk_chain_" + std::to_string(m) : name);
    }

    /// Chain bottom=0 < ... < top=m with tensor = meet (a frame).
    static quantale godel_chain(int m, std::string name = "") {
        std::vector<std::string> elems;
        const std::size_t n = static_cast<std::size_t>(m) + 1;
        for (std::size_t i = 0; i < n; ++i) elems.push_back("c" + std::to_string(i));
        std::vector<std::vector<std::uint8_t>> jt(n, std::vector<std::uint8_t>(n));
        std::vector<std::vector<std::uint8_t>> tt(n, std::vector<std::uint8_t>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                jt[i][j] = static_cast<std::uint8_t>(std::max(i, j));
                tt[i][j] = static_cast<std::uint8_t>(std::min(i, j));
            }
        return table(std::move(elems), std::move(jt), std::move(tt),
                     static_cast<std::uint8_t>(m), name.empty() ? "godel_chain_" + std::to_string(m) : name);
    }

    static quantale product(std::vector<quantale> factors) {
        if (factors.size() < 2) throw error("product quantale needs >= 2 factors");
        auto im = std::make_shared<impl>();
        im->kind = qkind::product;
        im->factors = std::move(factors);
        return quantale(std::move(im));
    }
    static quantale product(const quantale& a, const quantale& b) { return product(std::vector<quantale>{a, b}); }

    qkind kind() const { return impl_->kind; }
    const std::string& table_name() const { return impl_->name; }
    const std::vector<quantale>& factors() const { return impl_->factors; }

    bool finite() const {
        switch (impl_->kind) {
            case qkind::luk01:
            case qkind::max01: return false;
            case qkind::product:
                return std::all_of(impl_->factors.begin(), impl_->factors.end(),
                                   [](const quantale& f) { return f.finite(); });
            default: return true;
        }
    }

    bool is_interval() const { return impl_->kind == qkind::luk01 || impl_->kind == qkind::max01; }

    /// Carrier size; finite kinds only.
    std::size_t size() const {
        if (impl_->kind == qkind::product) {
            std::size_t s = 1;
            for (const auto& f : impl_->factors) s *= f.size();
            return s;
        }
        if (!finite()) throw error("size(): infinite carrier");
        return impl_->elems.size();
    }

    /// Full carrier of a finite quantale, in a fixed enumeration order.
    std::vector<value> carrier() const {
        if (!finite()) throw error("carrier(): infinite carrier");
        std::vector<value> out;
        if (impl_->kind == qkind::product) {
            out.push_back(value(std::vector<value>{}));
            for (const auto& f : impl_->factors) {
                std::vector<value> next;
                for (const auto& prefix : out)
                    for (const auto& fv : f.carrier()) {
                        auto t = prefix.tuple();
                        t.push_back(fv);
                        next.push_back(value(std::move(t)));
                    }
                out = std::move(next);
            }
            return out;
        }
        for (std::size_t i = 0; i < impl_->elems.size(); ++i)
            out.push_back(value(static_cast<std::uint8_t>(i)));
        return out;
    }

    /// Finite sample of the carrier: the carrier itself when finite, else the
    /// rational grid {0, step, 2 step, ..., 1} (componentwise for products).
    std::vector<value> value_grid(const rat& step) const {
        if (finite()) return carrier();
        if (impl_->kind == qkind::product) {
            std::vector<value> out{value(std::vector<value>{})};
            for (const auto& f : impl_->factors) {
                std::vector<value> next;
                for (const auto& prefix : out)
                    for (const auto& fv : f.value_grid(step)) {
                        auto t = prefix.tuple();
                        t.push_back(fv);
                        next.push_back(value(std::move(t)));
                    }
                out = std::move(next);
            }
            return out;
        }
        if (step <= rat(0)) throw error("value_grid: step must be positive");
        std::vector<value> out;
        rat x(0);
        while (x < rat(1)) {
            out.push_back(value(x));
            x += step;
        }
        out.push_back(value(rat(1)));
        return out;
    }

    value top() const {
        switch (impl_->kind) {
            case qkind::luk01:
            case qkind::max01: return value(rat(0));
            case qkind::product: {
                std::vector<value> t;
                for (const auto& f : impl_->factors) t.push_back(f.top());
                return value(std::move(t));
            }
            default: return value(impl_->top_i);
        }
    }

    value bottom() const {
        switch (impl_->kind) {
            case qkind::luk01:
            case qkind::max01: return value(rat(1));
            case qkind::product: {
                std::vector<value> t;
                for (const auto& f : impl_->factors) t.push_back(f.bottom());
                return value(std::move(t));
            }
            default: return value(impl_->bot_i);
        }
    }

    value unit() const {
        switch (impl_->kind) {
            case qkind::luk01:
            case qkind::max01: return value(rat(0));
            case qkind::product: {
                std::vector<value> t;
                for (const auto& f : impl_->factors) t.push_back(f.unit());
                return value(std::move(t));
            }
            default: return value(impl_->unit_i);
        }
    }

    /// Quantale order (for luk01/max01 this is the reversed numeric order).
    bool leq(const value& a, const value& b) const {
        switch (impl_->kind) {
            case qkind::luk01:
            case qkind::max01: return a.num() >= b.num();
            case qkind::product: {
                for (std::size_t i = 0; i < impl_->factors.size(); ++i)
                    if (!impl_->factors[i].leq(a.tuple()[i], b.tuple()[i])) return false;
                return true;
            }
            default: return impl_->join_t[a.idx()][b.idx()] == b.idx();
        }
    }

    value join2(const value& a, const value& b) const {
        switch (impl_->kind) {
            case qkind::luk01:
            case qkind::max01: return value(min(a.num(), b.num()));
            case qkind::product: return zip(a, b, [](const quantale& f, const value& x, const value& y) {
                return f.join2(x, y);
            });
            default: return value(impl_->join_t[a.idx()][b.idx()]);
        }
    }

    value meet2(const value& a, const value& b) const {
        switch (impl_->kind) {
            case qkind::luk01:
            case qkind::max01: return value(max(a.num(), b.num()));
            case qkind::product: return zip(a, b, [](const quantale& f, const value& x, const value& y) {
                return f.meet2(x, y);
            });
            default: {
                auto m = impl_->meet_t[a.idx()][b.idx()];
                if (m == impl::no_elem) throw error("meet undefined (corrupt lattice table)");
                return value(static_cast<std::uint8_t>(m));
            }
        }
    }

    /// Supremum in the quantale order; empty input yields bottom.
    value join(std::span<const value> xs) const {
        value acc = bottom();
        for (const auto& x : xs) acc = join2(acc, x);
        return acc;
    }

    /// Infimum in the quantale order; empty input yields top.
    value meet(std::span<const value> xs) const {
        value acc = top();
        for (const auto& x : xs) acc = meet2(acc, x);
        return acc;
    }

    value tensor(const value& a, const value& b) const {
        switch (impl_->kind) {
            case qkind::luk01: return value(min(rat(1), a.num() + b.num()));
            case qkind::max01: return value(max(a.num(), b.num()));
            case qkind::product: return zip(a, b, [](const quantale& f, const value& x, const value& y) {
                return f.tensor(x, y);
            });
            default: return value(impl_->tens_t[a.idx()][b.idx()]);
        }
    }

    /// Residual: the largest v (quantale order) with tensor(a, v) <= w.
    value hom(const value& a, const value& w) const {
        switch (impl_->kind) {
            case qkind::luk01: return value(max(rat(0), w.num() - a.num()));
            case qkind::max01: return a.num() >= w.num() ? value(rat(0)) : w;
            case qkind::product: return zip(a, w, [](const quantale& f, const value& x, const value& y) {
                return f.hom(x, y);
            });
            default: return value(impl_->hom_t[a.idx()][w.idx()]);
        }
    }

    /// Symmetrized residual hom(a,b) /\ hom(b,a); the structure of V_s.
    value hom_s(const value& a, const value& b) const {
        if (impl_->kind == qkind::luk01) return value(abs(a.num() - b.num()));
        if (impl_->kind == qkind::table || impl_->kind == qkind::bool2 || impl_->kind == qkind::diamond4)
            return value(impl_->homs_t[a.idx()][b.idx()]);
        return meet2(hom(a, b), hom(b, a));
    }

    // ---- uint8 index fast path (finite non-product kinds) ----

    bool has_index_ops() const { return impl_->kind != qkind::luk01 && impl_->kind != qkind::max01 && impl_->kind != qkind::product; }
    std::uint8_t idx_join(std::uint8_t i, std::uint8_t j) const { return impl_->join_t[i][j]; }
    std::uint8_t idx_meet(std::uint8_t i, std::uint8_t j) const { return static_cast<std::uint8_t>(impl_->meet_t[i][j]); }
    std::uint8_t idx_tensor(std::uint8_t i, std::uint8_t j) const { return impl_->tens_t[i][j]; }
    std::uint8_t idx_hom(std::uint8_t i, std::uint8_t j) const { return impl_->hom_t[i][j]; }
    std::uint8_t idx_homs(std::uint8_t i, std::uint8_t j) const { return impl_->homs_t[i][j]; }
    bool idx_leq(std::uint8_t i, std::uint8_t j) const { return impl_->join_t[i][j] == j; }
    std::uint8_t idx_top() const { return impl_->top_i; }
    std::uint8_t idx_bottom() const { return impl_->bot_i; }
    std::uint8_t idx_unit() const { return impl_->unit_i; }

    /// Paraconsistent negation on diamond4: swaps bot and top, fixes N and B.
    value neg_diamond(const value& a) const {
        if (impl_->kind != qkind::diamond4) throw error("neg_diamond: diamond4 only");
        static const std::uint8_t tbl[4] = {3, 1, 2, 0};
        return value(tbl[a.idx()]);
    }

    // ---- rendering & parsing ----

    /// Numeric rendering for luk01/max01, element names for finite kinds,
    /// "(a,b)" for products.
    std::string value_str(const value& a) const {
        switch (impl_->kind) {
            case qkind::luk01:
            case qkind::max01: return a.num().str();
            case qkind::product: {
                std::string s = "(";
                for (std::size_t i = 0; i < impl_->factors.size(); ++i) {
                    if (i) s += ",";
                    s += impl_->factors[i].value_str(a.tuple()[i]);
                }
                return s + ")";
            }
            default: return impl_->elems[a.idx()];
        }
    }

    json value_to_json(const value& a) const {
        if (impl_->kind == qkind::product) {
            json arr = json::array();
            for (std::size_t i = 0; i < impl_->factors.size(); ++i)
                arr.push_back(impl_->factors[i].value_to_json(a.tuple()[i]));
            return arr;
        }
        return value_str(a);
    }

    value value_from_json(const json& j) const {
        if (impl_->kind == qkind::product) {
            if (!j.is_array() || j.size() != impl_->factors.size())
                throw error("value: expected tuple of arity " + std::to_string(impl_->factors.size()));
            std::vector<value> t;
            for (std::size_t i = 0; i < impl_->factors.size(); ++i)
                t.push_back(impl_->factors[i].value_from_json(j[i]));
            return value(std::move(t));
        }
        if (!j.is_string()) throw error("value: expected string");
        return value_parse(j.get<std::string>());
    }

    value value_parse(const std::string& s) const {
        switch (impl_->kind) {
            case qkind::luk01:
            case qkind::max01: {
                rat r = rat::parse(s);
                if (r < rat(0) || r > rat(1)) throw error("value out of [0,1]: " + s);
                return value(r);
            }
            case qkind::product: throw error("value_parse: product values are arrays");
            default: {
                for (std::size_t i = 0; i < impl_->elems.size(); ++i)
                    if (impl_->elems[i] == s) return value(static_cast<std::uint8_t>(i));
                throw error("unknown element '" + s + "'");
            }
        }
    }

    bool same_as(const quantale& other) const {
        if (impl_ == other.impl_) return true;
        if (impl_->kind != other.impl_->kind) return false;
        switch (impl_->kind) {
            case qkind::luk01:
            case qkind::max01: return true;
            case qkind::product: {
                if (impl_->factors.size() != other.impl_->factors.size()) return false;
                for (std::size_t i = 0; i < impl_->factors.size(); ++i)
                    if (!impl_->factors[i].same_as(other.impl_->factors[i])) return false;
                return true;
            }
            default:
                return impl_->elems == other.impl_->elems && impl_->join_t == other.impl_->join_t &&
                       impl_->tens_t == other.impl_->tens_t && impl_->unit_i == other.impl_->unit_i;
        }
    }

    // ---- law validation ----

    /// Checks the quantale laws: exhaustive on finite kinds, on the value
    /// grid of the given step otherwise.
    validation_report validate(const rat& grid_step = rat(1, 10)) const {
        validation_report rep;
        std::vector<value> vs = value_grid(grid_step);
        auto str2 = [&](const value& a, const value& b) {
            return "(" + value_str(a) + "," + value_str(b) + ")";
        };
        auto str3 = [&](const value& a, const value& b, const value& c) {
            return "(" + value_str(a) + "," + value_str(b) + "," + value_str(c) + ")";
        };

        law_check lattice{"lattice", true, ""};
        if (impl_->kind == qkind::table || impl_->kind == qkind::bool2 || impl_->kind == qkind::diamond4) {
            if (impl_->meet_bad_i != impl::no_elem && impl_->meet_bad_j != impl::no_elem) {
                lattice.pass = false;
                lattice.witness = "meet undefined at " +
                                  str2(value(static_cast<std::uint8_t>(impl_->meet_bad_i)),
                                       value(static_cast<std::uint8_t>(impl_->meet_bad_j)));
            }
        }
        if (lattice.pass) {
            for (const auto& a : vs) {
                if (!lattice.pass) break;
                for (const auto& b : vs) {
                    if (!(join2(a, b) == join2(b, a))) {
                        lattice = {"lattice", false, "join not commutative at " + str2(a, b)};
                        break;
                    }
                    if (!(join2(a, a) == a)) {
                        lattice = {"lattice", false, "join not idempotent at " + value_str(a)};
                        break;
                    }
                    if (!(meet2(a, join2(a, b)) == a) || !(join2(a, meet2(a, b)) == a)) {
                        lattice = {"lattice", false, "absorption fails at " + str2(a, b)};
                        break;
                    }
                    if (!leq(bottom(), a) || !leq(a, top())) {
                        lattice = {"lattice", false, "bounds fail at " + value_str(a)};
                        break;
                    }
                }
            }
        }
        if (lattice.pass) {
            for (const auto& a : vs) {
                if (!lattice.pass) break;
                for (const auto& b : vs) {
                    if (!lattice.pass) break;
                    for (const auto& c : vs) {
                        if (!(join2(join2(a, b), c) == join2(a, join2(b, c)))) {
                            lattice = {"lattice", false, "join not associative at " + str3(a, b, c)};
                            break;
                        }
                        if (!(meet2(meet2(a, b), c) == meet2(a, meet2(b, c)))) {
                            lattice = {"lattice", false, "meet not associative at " + str3(a, b, c)};
                            break;
                        }
                    }
                }
            }
        }
        rep.checks.push_back(lattice);

        law_check monoid{"monoid", true, ""};
        for (const auto& a : vs) {
            if (!monoid.pass) break;
            if (!(tensor(unit(), a) == a)) {
                monoid = {"monoid", false, "unit law fails at " + value_str(a)};
                break;
            }
            for (const auto& b : vs) {
                if (!monoid.pass) break;
                if (!(tensor(a, b) == tensor(b, a))) {
                    monoid = {"monoid", false, "tensor not commutative at " + str2(a, b)};
                    break;
                }
                for (const auto& c : vs)
                    if (!(tensor(tensor(a, b), c) == tensor(a, tensor(b, c)))) {
                        monoid = {"monoid", false, "tensor not associative at " + str3(a, b, c)};
                        break;
                    }
            }
        }
        rep.checks.push_back(monoid);

        law_check jp{"tensor-join-preservation", true, ""};
        for (const auto& a : vs) {
            if (!jp.pass) break;
            if (!(tensor(a, bottom()) == bottom())) {
                jp = {"tensor-join-preservation", false, "u*bot != bot at " + value_str(a)};
                break;
            }
            for (const auto& b : vs) {
                if (!jp.pass) break;
                for (const auto& c : vs)
                    if (!(tensor(a, join2(b, c)) == join2(tensor(a, b), tensor(a, c)))) {
                        jp = {"tensor-join-preservation", false, "fails at " + str3(a, b, c)};
                        break;
                    }
            }
        }
        rep.checks.push_back(jp);

        law_check adj{"adjunction", true, ""};
        for (const auto& a : vs) {
            if (!adj.pass) break;
            for (const auto& w : vs) {
                if (!adj.pass) break;
                for (const auto& v : vs) {
                    bool lhs = leq(tensor(a, v), w);
                    bool rhs = leq(v, hom(a, w));
                    if (lhs != rhs) {
                        adj = {"adjunction", false, "fails at (u,v,w)=" + str3(a, v, w)};
                        break;
                    }
                }
            }
        }
        rep.checks.push_back(adj);
        return rep;
    }

    // ---- way-above relation and the unit decomposition check ----

    /// x is way above y iff every down-directed set with infimum below y
    /// contains an element below x. Computed literally over all down-directed
    /// subsets of a finite carrier.
    std::vector<std::vector<bool>> way_above_matrix() const {
        if (!finite()) throw error("way_above: finite quantales only");
        std::vector<value> vs = carrier();
        const std::size_t n = vs.size();
        if (n > 12) throw error("way_above: carrier too large for subset enumeration");
        std::vector<std::vector<bool>> leq_m(n, std::vector<bool>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) leq_m[i][j] = leq(vs[i], vs[j]);
        // collect (inf, subset) for all nonempty down-directed subsets
        std::vector<std::pair<std::uint32_t, std::size_t>> directed;  // (mask, inf index)
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            std::vector<std::size_t> mem;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) mem.push_back(i);
            bool dir = true;
            for (std::size_t a : mem) {
                for (std::size_t b : mem) {
                    bool found = false;
                    for (std::size_t c : mem)
                        if (leq_m[c][a] && leq_m[c][b]) {
                            found = true;
                            break;
                        }
                    if (!found) {
                        dir = false;
                        break;
                    }
                }
                if (!dir) break;
            }
            if (!dir) continue;
            value inf = top();
            for (std::size_t i : mem) inf = meet2(inf, vs[i]);
            std::size_t inf_i = index_of(vs, inf);
            directed.emplace_back(mask, inf_i);
        }
        std::vector<std::vector<bool>> wa(n, std::vector<bool>(n, true));
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y) {
                for (const auto& [mask, inf_i] : directed) {
                    if (!leq_m[inf_i][y]) continue;
                    bool some_below = false;
                    for (std::size_t a = 0; a < n; ++a)
                        if ((mask & (1u << a)) && leq_m[a][x]) {
                            some_below = true;
                            break;
                        }
                    if (!some_below) {
                        wa[x][y] = false;
                        break;
                    }
                }
            }
        return wa;
    }

    /// Whether the unit decomposes as the join of u*u over all u such that
    /// hom(u,v) is way above v for every v; finite kinds only.
    kdecomp_result check_k_decomp() const {
        if (!finite()) throw error("check_k_decomp: finite quantales only");
        std::vector<value> vs = carrier();
        auto wa = way_above_matrix();
        kdecomp_result res;
        std::vector<value> squares;
        for (const auto& u : vs) {
            bool ok = true;
            for (const auto& v : vs) {
                std::size_t hi = index_of(vs, hom(u, v));
                std::size_t vi = index_of(vs, v);
                if (!wa[hi][vi]) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                res.witnesses.push_back(u);
                squares.push_back(tensor(u, u));
            }
        }
        res.join_of_squares = join(squares);
        res.holds = res.join_of_squares == unit();
        return res;
    }

    // ---- serialization ----

    json to_json() const {
        json j;
        j["kind"] = qkind_name(impl_->kind);
        if (impl_->kind == qkind::table) {
            json t;
            t["name"] = impl_->name;
            t["elements"] = impl_->elems;
            json jt = json::array(), tt = json::array();
            for (std::size_t i = 0; i < impl_->elems.size(); ++i) {
                json jr = json::array(), tr = json::array();
                for (std::size_t k = 0; k < impl_->elems.size(); ++k) {
                    jr.push_back(impl_->elems[impl_->join_t[i][k]]);
                    tr.push_back(impl_->elems[impl_->tens_t[i][k]]);
                }
                jt.push_back(jr);
                tt.push_back(tr);
            }
            t["join"] = jt;
            t["tensor"] = tt;
            t["unit"] = impl_->elems[impl_->unit_i];
            j["table"] = t;
        } else if (impl_->kind == qkind::product) {
            json fs = json::array();
            for (const auto& f : impl_->factors) fs.push_back(f.to_json());
            j["factors"] = fs;
        }
        return j;
    }

    /// Loads a quantale descriptor; finite tables are re-validated and a
    /// violated law raises an error naming it.
    static quantale from_json(const json& j) {
        std::string k = j.at("kind").get<std::string>();
        if (k == "bool2") return bool2();
        if (k == "luk01") return luk01();
        if (k == "max01") return max01();
        if (k == "diamond4") return diamond4();
        if (k == "product") {
            std::vector<quantale> fs;
            for (const auto& f : j.at("factors")) fs.push_back(from_json(f));
            return product(std::move(fs));
        }
        if (k != "table") throw error("unknown quantale kind '" + k + "'");
        const json& t = j.at("table");
        std::vector<std::string> elems = t.at("elements").get<std::vector<std::string>>();
        auto idx = [&](const std::string& name) -> std::uint8_t {
            auto it = std::find(elems.begin(), elems.end(), name);
            if (it == elems.end()) throw error("table: unknown element '" + name + "'");
            return static_cast<std::uint8_t>(it - elems.begin());
        };
        auto read_tbl = [&](const json& arr) {
            std::vector<std::vector<std::uint8_t>> out;
            for (const auto& row : arr) {
                std::vector<std::uint8_t> r;
                for (const auto& e : row) r.push_back(idx(e.get<std::string>()));
                out.push_back(std::move(r));
            }
            return out;
        };
        quantale q = table(elems, read_tbl(t.at("join")), read_tbl(t.at("tensor")),
                           idx(t.at("unit").get<std::string>()),
                           t.contains("name") ? t.at("name").get<std::string>() : "table");
        validation_report rep = q.validate();
        if (!rep.all_pass()) {
            for (const auto& c : rep.checks)
                if (!c.pass) throw error("quantale table violates " + c.law + ": " + c.witness);
        }
        return q;
    }

private:
    struct impl {
        static constexpr int no_elem = -1;
        qkind kind = qkind::bool2;
        std::string name;
        std::vector<std::string> elems;
        std::vector<std::vector<std::uint8_t>> join_t, tens_t;
        std::vector<std::vector<int>> meet_t;  // no_elem when undefined
        std::vector<std::vector<std::uint8_t>> hom_t, homs_t;
        std::uint8_t unit_i = 0, top_i = 0, bot_i = 0;
        int meet_bad_i = no_elem, meet_bad_j = no_elem;
        std::vector<quantale> factors;

        // Derives order, meet, hom and hom_s tables from join/tensor. Works
        // defensively on corrupt tables so the validator can still run.
        void derive_tables() {
            const std::size_t n = elems.size();
            auto leq_i = [&](std::size_t a, std::size_t b) { return join_t[a][b] == b; };
            // top and bottom as fold of joins/meet candidates
            std::uint8_t t = 0, b = 0;
            for (std::size_t i = 1; i < n; ++i) t = join_t[t][i];
            top_i = t;
            for (std::size_t i = 1; i < n; ++i)
                if (leq_i(i, b)) b = static_cast<std::uint8_t>(i);
            bot_i = b;
            meet_t.assign(n, std::vector<int>(n, no_elem));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    int best = no_elem;
                    for (std::size_t w = 0; w < n; ++w) {
                        if (!leq_i(w, i) || !leq_i(w, j)) continue;
                        if (best == no_elem || leq_i(static_cast<std::size_t>(best), w)) best = static_cast<int>(w);
                    }
                    // verify greatest
                    if (best != no_elem) {
                        for (std::size_t w = 0; w < n; ++w)
                            if (leq_i(w, i) && leq_i(w, j) && !leq_i(w, static_cast<std::size_t>(best))) {
                                best = no_elem;
                                break;
                            }
                    }
                    meet_t[i][j] = best;
                    if (best == no_elem && meet_bad_i == no_elem) {
                        meet_bad_i = static_cast<int>(i);
                        meet_bad_j = static_cast<int>(j);
                    }
                }
            hom_t.assign(n, std::vector<std::uint8_t>(n, 0));
            for (std::size_t u = 0; u < n; ++u)
                for (std::size_t w = 0; w < n; ++w) {
                    std::uint8_t acc = bot_i;
                    for (std::size_t v = 0; v < n; ++v)
                        if (leq_i(tens_t[u][v], w)) acc = join_t[acc][v];
                    hom_t[u][w] = acc;
                }
            homs_t.assign(n, std::vector<std::uint8_t>(n, 0));
            for (std::size_t u = 0; u < n; ++u)
                for (std::size_t v = 0; v < n; ++v) {
                    int m = meet_t[hom_t[u][v]][hom_t[v][u]];
                    homs_t[u][v] = m == no_elem ? bot_i : static_cast<std::uint8_t>(m);
                }
        }
    };

    static quantale make_table_checked(qkind kind, std::vector<std::string> elems,
                                       std::vector<std::vector<std::uint8_t>> jt,
                                       std::vector<std::vector<std::uint8_t>> tt, std::uint8_t unit) {
        auto im = std::make_shared<impl>();
        im->kind = kind;
        im->name = qkind_name(kind);
        im->elems = std::move(elems);
        im->join_t = std::move(jt);
        im->tens_t = std::move(tt);
        im->unit_i = unit;
        im->derive_tables();
        return quantale(std::move(im));
    }

    explicit quantale(std::shared_ptr<const impl> im) : impl_(std::move(im)) {}

    template <typename F>
    value zip(const value& a, const value& b, F&& f) const {
        const auto& ta = a.tuple();
        const auto& tb = b.tuple();
        if (ta.size() != impl_->factors.size() || tb.size() != impl_->factors.size())
            throw error("product value arity mismatch");
        std::vector<value> out;
        out.reserve(ta.size());
        for (std::size_t i = 0; i < ta.size(); ++i) out.push_back(f(impl_->factors[i], ta[i], tb[i]));
        return value(std::move(out));
    }

    static std::size_t index_of(const std::vector<value>& vs, const value& x) {
        for (std::size_t i = 0; i < vs.size(); ++i)
            if (vs[i] == x) return i;
        throw error("value not in carrier");
    }

    std::shared_ptr<const impl> impl_;
};

}  // namespace qhm
