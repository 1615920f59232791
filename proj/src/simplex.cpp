#include "adopt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "adopt/errors.hpp"

namespace adopt {

namespace {

constexpr double kPivotEps = 1e-11;

class Tableau {
public:
    Tableau(const LpProblem& p, const SolverSettings& s) : problem_(p), settings_(s) {
        n_ = p.num_vars;
        m_ = static_cast<int>(p.rows.size());
        if (static_cast<int>(p.objective.size()) != n_)
            throw std::invalid_argument("simplex: objective size does not match variable count");

        // Dense rows, scaled by their max-magnitude coefficient, RHS >= 0.
        a_.assign(m_, std::vector<double>(n_, 0.0));
        rhs_.assign(m_, 0.0);
        rel_.assign(m_, Relation::LessEq);
        for (int i = 0; i < m_; ++i) {
            const LpRow& row = p.rows[i];
            double scale = 0.0;
            for (const auto& [j, v] : row.coeffs) {
                if (j < 0 || j >= n_) throw std::invalid_argument("simplex: bad variable index");
                a_[i][j] += v;
            }
            for (double v : a_[i]) scale = std::max(scale, std::fabs(v));
            if (scale > 0.0) {
                for (double& v : a_[i]) v /= scale;
                rhs_[i] = row.rhs / scale;
            } else {
                rhs_[i] = row.rhs;
            }
            rel_[i] = row.rel;
            if (rhs_[i] < 0.0) {
                for (double& v : a_[i]) v = -v;
                rhs_[i] = -rhs_[i];
                if (rel_[i] == Relation::LessEq) rel_[i] = Relation::GreaterEq;
                else if (rel_[i] == Relation::GreaterEq) rel_[i] = Relation::LessEq;
            }
        }

        // Column layout: structural | slack/surplus | artificial.
        int extra = 0;
        slack_col_.assign(m_, -1);
        for (int i = 0; i < m_; ++i)
            if (rel_[i] != Relation::Equal) slack_col_[i] = n_ + extra++;
        art_begin_ = n_ + extra;
        art_col_.assign(m_, -1);
        for (int i = 0; i < m_; ++i)
            if (rel_[i] != Relation::LessEq) art_col_[i] = art_begin_ + n_art_++;
        cols_ = art_begin_ + n_art_;

        t_.assign(m_, std::vector<double>(cols_, 0.0));
        basis_.assign(m_, -1);
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) t_[i][j] = a_[i][j];
            if (slack_col_[i] >= 0)
                t_[i][slack_col_[i]] = (rel_[i] == Relation::GreaterEq) ? -1.0 : 1.0;
            if (art_col_[i] >= 0) t_[i][art_col_[i]] = 1.0;
            basis_[i] = (rel_[i] == Relation::LessEq) ? slack_col_[i] : art_col_[i];
        }

        max_iterations_ = s.max_iterations > 0 ? s.max_iterations : std::max(50 * (n_ + m_), 50);
        bland_after_ = 2 * (n_ + m_);
    }

    // Returns false when phase 1 ends with a positive artificial sum.
    bool run_phase1() {
        if (n_art_ == 0) return true;
        obj_.assign(cols_, 0.0);
        obj_rhs_ = 0.0;
        for (int i = 0; i < m_; ++i) {
            if (art_col_[i] < 0) continue;
            for (int j = 0; j < cols_; ++j) obj_[j] -= t_[i][j];
            obj_rhs_ -= rhs_[i];
            obj_[art_col_[i]] += 1.0;  // keep the artificial's own cost at 0 once priced out
        }
        in_phase1_ = true;
        iterate();
        in_phase1_ = false;
        double artificial_sum = -obj_rhs_;
        if (artificial_sum > settings_.feas_tol) return false;
        expel_artificials();
        return true;
    }

    void run_phase2(const std::vector<double>& cost) {
        obj_.assign(cols_, 0.0);
        for (int j = 0; j < n_; ++j) obj_[j] = cost[j];
        obj_rhs_ = 0.0;
        for (int i = 0; i < m_; ++i) {
            double cb = basis_[i] < n_ ? cost[basis_[i]] : 0.0;
            if (cb == 0.0) continue;
            for (int j = 0; j < cols_; ++j) obj_[j] -= cb * t_[i][j];
            obj_rhs_ -= cb * rhs_[i];
        }
        iterate();
    }

    std::vector<double> extract() const {
        std::vector<double> x(n_, 0.0);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= 0 && basis_[i] < n_) x[basis_[i]] = rhs_[i];
        return x;
    }

    int iterations() const { return iterations_; }
    const std::vector<int>& basis() const { return basis_; }
    bool unbounded() const { return unbounded_; }

private:
    bool column_blocked(int j) const {
        // Artificials never re-enter once phase 1 is done; in phase 1 they
        // may not re-enter either (their reduced cost is kept at >= 0).
        return j >= art_begin_ && !in_phase1_;
    }

    int choose_entering() const {
        bool bland = use_bland_ || settings_.pivot_rule == "bland";
        int best = -1;
        double best_rc = -settings_.opt_tol;
        for (int j = 0; j < cols_; ++j) {
            if (column_blocked(j)) continue;
            double rc = obj_[j];
            if (rc < best_rc) {
                best = j;
                if (bland) return j;
                best_rc = rc;
            }
        }
        return best;
    }

    int choose_leaving(int enter) const {
        int row = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m_; ++i) {
            double d = t_[i][enter];
            if (d <= kPivotEps) continue;
            double ratio = rhs_[i] / d;
            if (row < 0 || ratio < best_ratio - 1e-12 ||
                (std::fabs(ratio - best_ratio) <= 1e-12 && basis_[i] < basis_[row])) {
                row = i;
                best_ratio = ratio;
            }
        }
        return row;
    }

    void pivot(int row, int col) {
        double d = t_[row][col];
        for (int j = 0; j < cols_; ++j) t_[row][j] /= d;
        rhs_[row] /= d;
        t_[row][col] = 1.0;
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            double f = t_[i][col];
            if (f == 0.0) continue;
            for (int j = 0; j < cols_; ++j) t_[i][j] -= f * t_[row][j];
            t_[i][col] = 0.0;
            rhs_[i] -= f * rhs_[row];
            if (rhs_[i] < 0.0 && rhs_[i] > -1e-12) rhs_[i] = 0.0;
        }
        double f = obj_[col];
        if (f != 0.0) {
            for (int j = 0; j < cols_; ++j) obj_[j] -= f * t_[row][j];
            obj_[col] = 0.0;
            obj_rhs_ -= f * rhs_[row];
        }
        basis_[row] = col;
    }

    void iterate() {
        while (true) {
            int enter = choose_entering();
            if (enter < 0) return;  // optimal for the current objective
            int leave = choose_leaving(enter);
            if (leave < 0) {
                if (in_phase1_)
                    throw InternalError("simplex: unbounded phase-1 objective");
                unbounded_ = true;
                return;
            }
            bool degenerate = rhs_[leave] <= kPivotEps;
            pivot(leave, enter);
            ++iterations_;
            if (degenerate) {
                if (++consecutive_degenerate_ >= bland_after_) use_bland_ = true;
            } else {
                consecutive_degenerate_ = 0;
            }
            if (iterations_ >= max_iterations_) {
                std::optional<LpSolution> best;
                if (!in_phase1_) {
                    LpSolution s;
                    s.status = LpStatus::Optimal;
                    s.values = extract();
                    s.iterations = iterations_;
                    best = std::move(s);
                }
                throw IterationLimitError("simplex: iteration limit reached", std::move(best));
            }
        }
    }

    // After phase 1, swap basic artificials for structural/slack columns.
    // A row whose non-artificial entries are all (numerically) zero is
    // redundant: it is wiped so later pivots can never select or disturb it.
    void expel_artificials() {
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < art_begin_) continue;
            int col = -1;
            for (int j = 0; j < art_begin_; ++j) {
                if (std::fabs(t_[i][j]) > 1e-7) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                pivot(i, col);
            } else {
                for (int j = 0; j < art_begin_; ++j) t_[i][j] = 0.0;
                rhs_[i] = 0.0;
            }
        }
    }

    const LpProblem& problem_;
    const SolverSettings& settings_;
    int n_ = 0, m_ = 0, cols_ = 0, art_begin_ = 0, n_art_ = 0;
    std::vector<std::vector<double>> a_, t_;
    std::vector<double> rhs_, obj_;
    std::vector<Relation> rel_;
    std::vector<int> slack_col_, art_col_, basis_;
    double obj_rhs_ = 0.0;
    int iterations_ = 0, consecutive_degenerate_ = 0, max_iterations_ = 0, bland_after_ = 0;
    bool use_bland_ = false, in_phase1_ = false, unbounded_ = false;
};

double dot(const std::vector<double>& c, const std::vector<double>& x) {
    double v = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) v += c[j] * x[j];
    return v;
}

}  // namespace

LpSolution solve_simplex(const LpProblem& problem, const SolverSettings& settings) {
    Tableau t(problem, settings);
    LpSolution out;
    if (!t.run_phase1()) {
        out.status = LpStatus::Infeasible;
        out.iterations = t.iterations();
        return out;
    }
    std::vector<double> cost = problem.objective;
    if (problem.sense == Sense::Maximize)
        for (double& c : cost) c = -c;
    t.run_phase2(cost);
    out.iterations = t.iterations();
    if (t.unbounded()) {
        out.status = LpStatus::Unbounded;
        return out;
    }
    out.status = LpStatus::Optimal;
    out.values = t.extract();
    out.objective = dot(problem.objective, out.values);
    out.basis = t.basis();
    return out;
}

LpSolution solve_phase1(const LpProblem& problem, const SolverSettings& settings) {
    Tableau t(problem, settings);
    LpSolution out;
    out.iterations = t.iterations();
    if (!t.run_phase1()) {
        out.status = LpStatus::Infeasible;
        out.iterations = t.iterations();
        return out;
    }
    out.status = LpStatus::Optimal;
    out.iterations = t.iterations();
    out.values = t.extract();
    out.objective = dot(problem.objective, out.values);
    out.basis = t.basis();
    return out;
}

}  // namespace adopt
