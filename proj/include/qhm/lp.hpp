#pragma once

#include <qhm/rational.hpp>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qhm {

/// Exact-rational primal simplex for min c'x s.t. Ax = b, x >= 0.
/// Two-phase, Bland's pivoting rule (terminates on degenerate instances).
/// Problem sizes here are tiny, so a dense tableau is plenty.
class simplex {
public:
    struct result {
        bool feasible = false;
        bool bounded = true;
        rat objective;
        std::vector<rat> x;
    };

    static result solve(std::vector<std::vector<rat>> a, std::vector<rat> b, std::vector<rat> c) {
        const std::size_t m = a.size();
        const std::size_t n = m == 0 ? 0 : a[0].size();
        for (auto& row : a)
            if (row.size() != n) throw std::invalid_argument("simplex: ragged matrix");
        if (b.size() != m || c.size() != n) throw std::invalid_argument("simplex: shape mismatch");
        for (std::size_t i = 0; i < m; ++i)
            if (b[i] < rat(0)) {
                for (auto& e : a[i]) e = -e;
                b[i] = -b[i];
            }

        // phase 1: artificial basis
        const std::size_t total = n + m;
        std::vector<std::vector<rat>> t(m, std::vector<rat>(total + 1, rat(0)));
        std::vector<std::size_t> basis(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
            t[i][n + i] = rat(1);
            t[i][total] = b[i];
            basis[i] = n + i;
        }
        std::vector<rat> phase1_cost(total, rat(0));
        for (std::size_t j = n; j < total; ++j) phase1_cost[j] = rat(1);
        result res;
        if (!run(t, basis, phase1_cost, total)) {
            res.bounded = false;  // phase 1 is never unbounded; defensive
            return res;
        }
        rat art(0);
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] >= n) art += t[i][total];
        if (art != rat(0)) return res;  // infeasible

        // drive remaining artificials out of the basis where possible
        for (std::size_t i = 0; i < m; ++i) {
            if (basis[i] < n) continue;
            std::size_t enter = SIZE_MAX;
            for (std::size_t j = 0; j < n; ++j)
                if (t[i][j] != rat(0)) {
                    enter = j;
                    break;
                }
            if (enter != SIZE_MAX) pivot(t, basis, i, enter, total);
            // else: redundant row; the artificial stays basic at zero
        }

        std::vector<rat> cost(total, rat(0));
        for (std::size_t j = 0; j < n; ++j) cost[j] = c[j];
        if (!run(t, basis, cost, total, n)) {
            res.feasible = true;
            res.bounded = false;
            return res;
        }
        res.feasible = true;
        res.x.assign(n, rat(0));
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] < n) res.x[basis[i]] = t[i][total];
        res.objective = rat(0);
        for (std::size_t j = 0; j < n; ++j) res.objective += c[j] * res.x[j];
        return res;
    }

private:
    static void pivot(std::vector<std::vector<rat>>& t, std::vector<std::size_t>& basis,
                      std::size_t row, std::size_t col, std::size_t total) {
        const rat p = t[row][col];
        for (std::size_t j = 0; j <= total; ++j) t[row][j] = t[row][j] / p;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (i == row || t[i][col] == rat(0)) continue;
            const rat f = t[i][col];
            for (std::size_t j = 0; j <= total; ++j) t[i][j] -= f * t[row][j];
        }
        basis[row] = col;
    }

    // Bland's rule iteration; restrict = first-N columns only (phase 2 bars
    // artificial columns). Returns false on unboundedness.
    static bool run(std::vector<std::vector<rat>>& t, std::vector<std::size_t>& basis,
                    const std::vector<rat>& cost, std::size_t total, std::size_t restrict_to = SIZE_MAX) {
        const std::size_t m = t.size();
        const std::size_t ncols = restrict_to == SIZE_MAX ? total : restrict_to;
        while (true) {
            // reduced costs: r_j = c_j - c_B' B^-1 A_j
            std::size_t enter = SIZE_MAX;
            for (std::size_t j = 0; j < ncols; ++j) {
                rat r = cost[j];
                for (std::size_t i = 0; i < m; ++i) {
                    if (cost[basis[i]] != rat(0)) r -= cost[basis[i]] * t[i][j];
                }
                if (r < rat(0)) {
                    enter = j;
                    break;
                }
            }
            if (enter == SIZE_MAX) return true;
            std::size_t leave = SIZE_MAX;
            rat best(0);
            for (std::size_t i = 0; i < m; ++i) {
                if (t[i][enter] <= rat(0)) continue;
                rat ratio = t[i][total] / t[i][enter];
                if (leave == SIZE_MAX || ratio < best ||
                    (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == SIZE_MAX) return false;
            pivot(t, basis, leave, enter, total);
        }
    }
};

/// Exact optimal transport: min sum c[i][j] g[i][j] over couplings of mu, nu.
/// Masses must agree; costs must be nonnegative.
inline rat transport(const std::vector<std::vector<rat>>& cost, const std::vector<rat>& mu,
                     const std::vector<rat>& nu) {
    const std::size_t n = mu.size();
    const std::size_t m = nu.size();
    if (cost.size() != n) throw std::invalid_argument("transport: cost shape");
    rat total_mu(0), total_nu(0);
    for (const auto& p : mu) total_mu += p;
    for (const auto& p : nu) total_nu += p;
    if (total_mu != total_nu) throw std::invalid_argument("transport: mass mismatch");
    if (n == 0 || m == 0) return rat(0);

    std::vector<std::vector<rat>> a(n + m, std::vector<rat>(n * m, rat(0)));
    std::vector<rat> b(n + m);
    std::vector<rat> c(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            a[i][i * m + j] = rat(1);
            a[n + j][i * m + j] = rat(1);
            c[i * m + j] = cost[i][j];
        }
    for (std::size_t i = 0; i < n; ++i) b[i] = mu[i];
    for (std::size_t j = 0; j < m; ++j) b[n + j] = nu[j];
    auto res = simplex::solve(std::move(a), std::move(b), std::move(c));
    if (!res.feasible) throw std::runtime_error("transport: infeasible (mass mismatch?)");
    return res.objective;
}

/// max sum h[x] f[x] over f in [0,1]^n with f[x] - f[y] <= d[x][y]: the dual
/// potential problem for Lipschitz maps. d must be nonnegative.
inline rat lipschitz_max(const std::vector<rat>& h, const std::vector<std::vector<rat>>& d) {
    const std::size_t n = h.size();
    if (n == 0) return rat(0);
    // variables: f_0..f_{n-1}, upper slacks s_x (f_x + s_x = 1),
    // pair slacks t_{xy} (f_x - f_y + t_xy = d_xy) for x != y
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            if (x != y) pairs.emplace_back(x, y);
    const std::size_t nv = n + n + pairs.size();
    std::vector<std::vector<rat>> a;
    std::vector<rat> b;
    for (std::size_t x = 0; x < n; ++x) {
        std::vector<rat> row(nv, rat(0));
        row[x] = rat(1);
        row[n + x] = rat(1);
        a.push_back(std::move(row));
        b.push_back(rat(1));
    }
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        auto [x, y] = pairs[p];
        std::vector<rat> row(nv, rat(0));
        row[x] = rat(1);
        row[y] = rat(-1);
        row[2 * n + p] = rat(1);
        a.push_back(std::move(row));
        b.push_back(d[x][y]);
    }
    std::vector<rat> c(nv, rat(0));
    for (std::size_t x = 0; x < n; ++x) c[x] = -h[x];
    auto res = simplex::solve(std::move(a), std::move(b), std::move(c));
    if (!res.feasible) throw std::runtime_error("lipschitz_max: infeasible (negative distance?)");
    return -res.objective;
}

}  // namespace qhm
