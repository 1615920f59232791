#include "adopt/transportation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

#include "adopt/errors.hpp"

namespace adopt {

namespace {

struct Cell {
    int i = -1, j = -1;
    bool operator<(const Cell& o) const { return i != o.i ? i < o.i : j < o.j; }
    bool operator==(const Cell& o) const { return i == o.i && j == o.j; }
};

}  // namespace

LpSolution solve_transportation(const TransportationInstance& t, const SolverSettings& settings) {
    const int m = static_cast<int>(t.supplies.size());
    const int n = static_cast<int>(t.demands.size());
    for (double v : t.supplies)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("transportation: supplies must be finite and >= 0");
    for (double v : t.demands)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("transportation: demands must be finite and >= 0");
    if (!t.balanced())
        throw std::invalid_argument("transportation: instance is not balanced (call balance first)");

    LpSolution out;
    out.status = LpStatus::Optimal;
    if (m == 0 || n == 0) return out;
    if (static_cast<int>(t.values.size()) != m)
        throw std::invalid_argument("transportation: value matrix shape mismatch");
    for (const auto& row : t.values)
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("transportation: value matrix shape mismatch");

    // Minimization costs; a profit matrix is negated.
    std::vector<std::vector<double>> cost(m, std::vector<double>(n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) cost[i][j] = t.maximize ? -t.values[i][j] : t.values[i][j];

    // Perturbed totals keep the northwest-corner start and every basic flow
    // strictly positive, which sidesteps degenerate ties while pivoting.
    double total = 0.0;
    for (double v : t.supplies) total += v;
    const double eps = std::max(1.0, total) * 1e-9 / (m + n);
    std::vector<double> supply(t.supplies), demand(t.demands);
    for (int i = 0; i < m; ++i) supply[i] += eps;
    demand[n - 1] += m * eps;

    std::vector<std::vector<double>> flow(m, std::vector<double>(n, 0.0));
    std::vector<std::vector<bool>> basic(m, std::vector<bool>(n, false));
    std::vector<Cell> basis;

    {  // northwest corner
        int i = 0, j = 0;
        std::vector<double> s = supply, d = demand;
        while (i < m && j < n) {
            double f = std::min(s[i], d[j]);
            flow[i][j] = f;
            basic[i][j] = true;
            basis.push_back({i, j});
            s[i] -= f;
            d[j] -= f;
            if (i == m - 1 && j == n - 1) break;
            if (s[i] <= d[j] && i < m - 1) ++i;
            else if (j < n - 1) ++j;
            else ++i;
        }
    }

    const int max_iterations =
        settings.max_iterations > 0 ? settings.max_iterations : std::max(50 * (m + n), 200) * 4;
    int iterations = 0;

    auto compute_potentials = [&](std::vector<double>& u, std::vector<double>& v) {
        u.assign(m, 0.0);
        v.assign(n, 0.0);
        std::vector<bool> u_set(m, false), v_set(n, false);
        u[0] = 0.0;
        u_set[0] = true;
        std::deque<int> queue{0};  // nodes: 0..m-1 rows, m..m+n-1 cols
        while (!queue.empty()) {
            int node = queue.front();
            queue.pop_front();
            for (const Cell& c : basis) {
                if (node < m && c.i == node && !v_set[c.j]) {
                    v[c.j] = cost[c.i][c.j] - u[c.i];
                    v_set[c.j] = true;
                    queue.push_back(m + c.j);
                } else if (node >= m && c.j == node - m && !u_set[c.i]) {
                    u[c.i] = cost[c.i][c.j] - v[c.j];
                    u_set[c.i] = true;
                    queue.push_back(c.i);
                }
            }
        }
    };

    while (true) {
        std::vector<double> u, v;
        compute_potentials(u, v);

        Cell enter;
        double best = -settings.opt_tol;
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) {
                if (basic[i][j]) continue;
                double delta = cost[i][j] - u[i] - v[j];
                if (delta < best) {
                    best = delta;
                    enter = {i, j};
                }
            }
        }
        if (enter.i < 0) break;  // no improving cell

        // Unique path from row enter.i to column enter.j through the basis
        // tree; the entering cell closes it into the stepping-stone cycle.
        std::vector<int> parent_edge(m + n, -1), parent_node(m + n, -1);
        std::vector<bool> seen(m + n, false);
        std::deque<int> queue{enter.i};
        seen[enter.i] = true;
        while (!queue.empty()) {
            int node = queue.front();
            queue.pop_front();
            if (node == m + enter.j) break;
            for (int e = 0; e < static_cast<int>(basis.size()); ++e) {
                const Cell& c = basis[e];
                int next = -1;
                if (node < m && c.i == node) next = m + c.j;
                else if (node >= m && c.j == node - m) next = c.i;
                else continue;
                if (seen[next]) continue;
                seen[next] = true;
                parent_edge[next] = e;
                parent_node[next] = node;
                queue.push_back(next);
            }
        }
        if (!seen[m + enter.j]) throw InternalError("transportation: basis is not connected");

        std::vector<Cell> path;  // from the entering column back to the entering row
        for (int node = m + enter.j; node != enter.i; node = parent_node[node])
            path.push_back(basis[parent_edge[node]]);

        // Signs alternate around the cycle starting with + on the entering
        // cell; path cells adjacent to the entering column come first.
        std::vector<Cell> minus, plus;
        for (std::size_t k = 0; k < path.size(); ++k)
            (k % 2 == 0 ? minus : plus).push_back(path[k]);

        double theta = -1.0;
        Cell leave;
        for (const Cell& c : minus) {
            double f = flow[c.i][c.j];
            if (theta < 0.0 || f < theta - 1e-15 ||
                (std::fabs(f - theta) <= 1e-15 && c < leave)) {
                theta = f;
                leave = c;
            }
        }

        flow[enter.i][enter.j] += theta;
        for (const Cell& c : plus) flow[c.i][c.j] += theta;
        for (const Cell& c : minus) flow[c.i][c.j] -= theta;
        basic[enter.i][enter.j] = true;
        basic[leave.i][leave.j] = false;
        flow[leave.i][leave.j] = 0.0;
        basis.erase(std::find(basis.begin(), basis.end(), leave));
        basis.push_back(enter);

        if (++iterations >= max_iterations)
            throw IterationLimitError("transportation: iteration limit reached", std::nullopt);
    }

    // Re-derive the flows of the optimal basis tree from the unperturbed
    // totals by peeling leaves.
    for (auto& row : flow) std::fill(row.begin(), row.end(), 0.0);
    {
        std::vector<double> s = t.supplies, d = t.demands;
        std::vector<std::vector<Cell>> incident(m + n);
        for (const Cell& c : basis) {
            incident[c.i].push_back(c);
            incident[m + c.j].push_back(c);
        }
        std::vector<int> degree(m + n);
        std::vector<bool> removed_edge(basis.size(), false);
        std::vector<bool> removed_node(m + n, false);
        auto edge_index = [&](const Cell& c) {
            return static_cast<int>(std::find(basis.begin(), basis.end(), c) - basis.begin());
        };
        for (int node = 0; node < m + n; ++node) degree[node] = static_cast<int>(incident[node].size());
        std::deque<int> leaves;
        for (int node = 0; node < m + n; ++node)
            if (degree[node] == 1) leaves.push_back(node);
        while (!leaves.empty()) {
            int node = leaves.front();
            leaves.pop_front();
            if (removed_node[node]) continue;
            removed_node[node] = true;
            for (const Cell& c : incident[node]) {
                int e = edge_index(c);
                if (removed_edge[e]) continue;
                removed_edge[e] = true;
                double f = node < m ? s[c.i] : d[c.j];
                flow[c.i][c.j] = std::max(f, 0.0);
                s[c.i] -= f;
                d[c.j] -= f;
                int other = node < m ? m + c.j : c.i;
                if (--degree[other] == 1) leaves.push_back(other);
                --degree[node];
            }
        }
    }

    out.values.assign(m * n, 0.0);
    double objective = 0.0;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            out.values[i * n + j] = flow[i][j];
            objective += t.values[i][j] * flow[i][j];
        }
    }
    out.objective = objective;
    out.iterations = iterations;
    return out;
}

}  // namespace adopt
