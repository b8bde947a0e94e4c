#include "cracksynth/ip_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "cracksynth/io_detail.hpp"

namespace cracksynth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFeasTol = 1e-7;   // primal feasibility / phase-1 acceptance
constexpr double kOptTol = 1e-9;    // reduced-cost optimality
constexpr double kPivotTol = 1e-9;  // smallest usable ratio-test denominator
constexpr double kIntTol = 1e-7;    // integrality detection
constexpr double kDropTol = 1e-13;  // LU fill drop threshold
constexpr int kRefactorInterval = 64;
constexpr long kStallLimit = 4000;  // degenerate pivots before Bland kicks in

// ----------------------------------------------------------------------------
// Sparse LU factorization of a basis matrix with Markowitz pivoting and
// threshold partial pivoting. Columns are "basis positions"; rows keep their
// original indices. Numerically singular tails are reported for repair.
// ----------------------------------------------------------------------------
class BasisLU {
  public:
    // Each column: sparse (row, value) list. Returns the positions that could
    // not be pivoted (numerically singular); the caller must replace those
    // basis columns and refactor.
    std::vector<int> factor(int m, const std::vector<std::vector<std::pair<int, double>>>& cols) {
        m_ = m;
        lcols_.assign(m, {});
        urows_.assign(m, {});
        diag_.assign(m, 0.0);
        pivot_row_.assign(m, -1);
        pivot_col_.assign(m, -1);

        rows_.assign(m, {});
        colrows_.assign(m, {});
        row_active_.assign(m, 1);
        col_active_.assign(m, 1);
        rowcnt_.assign(m, 0);
        colcnt_.assign(m, 0);

        for (int c = 0; c < m; ++c) {
            for (auto [r, v] : cols[c]) {
                if (v == 0.0) continue;
                rows_[r].emplace_back(c, v);
                colrows_[c].push_back(r);
            }
        }
        for (int r = 0; r < m; ++r) rowcnt_[r] = static_cast<int>(rows_[r].size());
        for (int c = 0; c < m; ++c) colcnt_[c] = static_cast<int>(colrows_[c].size());

        col_bucket_.assign(static_cast<std::size_t>(m) + 1, {});
        for (int c = 0; c < m; ++c) push_col_bucket(c);

        int done = 0;
        for (; done < m; ++done) {
            auto [pr, pc] = select_pivot();
            if (pr < 0) break;
            eliminate(done, pr, pc);
        }

        std::vector<int> deficient;
        if (done < m) {
            // Pair leftover active positions with leftover active rows in
            // ascending order; the caller substitutes unit columns there.
            std::vector<int> rows_left, cols_left;
            for (int r = 0; r < m; ++r)
                if (row_active_[r]) rows_left.push_back(r);
            for (int c = 0; c < m; ++c)
                if (col_active_[c]) cols_left.push_back(c);
            for (std::size_t i = 0; i < cols_left.size(); ++i, ++done) {
                pivot_row_[done] = rows_left[i];
                pivot_col_[done] = cols_left[i];
                diag_[done] = 1.0;  // placeholder; caller refactors after repair
                deficient.push_back(cols_left[i]);
            }
        }

        nnz_ = 0;
        for (const auto& l : lcols_) nnz_ += static_cast<long>(l.size());
        for (const auto& u : urows_) nnz_ += static_cast<long>(u.size());
        nnz_ += m_;
        pos_to_k_.assign(m_, -1);
        for (int k = 0; k < m_; ++k) pos_to_k_[pivot_col_[k]] = k;
        rows_.clear();
        colrows_.clear();
        return deficient;
    }

    int pivot_row_of_position(int pos) const { return pivot_row_[pos_to_k_[pos]]; }

    // Solves B x = b. Input indexed by row, output by basis position.
    void ftran(std::vector<double>& work) const {
        for (int k = 0; k < m_; ++k) {
            double t = work[pivot_row_[k]];
            if (t != 0.0)
                for (auto [r, l] : lcols_[k]) work[r] -= l * t;
        }
        // Back substitution into position-indexed result (in place via aux).
        aux_.assign(m_, 0.0);
        for (int k = m_ - 1; k >= 0; --k) {
            double t = work[pivot_row_[k]];
            for (auto [c, u] : urows_[k]) t -= u * aux_[c];
            aux_[pivot_col_[k]] = t / diag_[k];
        }
        work = aux_;
    }

    // Solves B' y = c. Input indexed by basis position, output by row.
    void btran(std::vector<double>& work) const {
        aux_.assign(m_, 0.0);
        out_.assign(m_, 0.0);
        for (int k = 0; k < m_; ++k) {
            double z = (work[pivot_col_[k]] - aux_[pivot_col_[k]]) / diag_[k];
            for (auto [c, u] : urows_[k]) aux_[c] += u * z;
            out_[pivot_row_[k]] = z;
        }
        for (int k = m_ - 1; k >= 0; --k) {
            double s = 0.0;
            for (auto [r, l] : lcols_[k]) s += l * out_[r];
            out_[pivot_row_[k]] -= s;
        }
        work = out_;
    }

    long nnz() const { return nnz_; }

  private:
    void push_col_bucket(int c) {
        int cnt = std::min(colcnt_[c], m_);
        col_bucket_[cnt].push_back(c);
    }

    double entry(int r, int c) const {
        for (auto [cc, v] : rows_[r])
            if (cc == c) return v;
        return 0.0;
    }

    // Markowitz search over column buckets; within a column only entries
    // passing the relative stability threshold are eligible.
    std::pair<int, int> select_pivot() {
        const double rel = 0.05, abs_tol = 1e-11;
        long best_cost = -1;
        int best_r = -1, best_c = -1;
        int scanned = 0;
        for (int cnt = 1; cnt <= m_; ++cnt) {
            if (best_cost >= 0 &&
                best_cost <= static_cast<long>(cnt - 1) * static_cast<long>(cnt - 1))
                break;
            auto& bucket = col_bucket_[cnt];
            for (std::size_t bi = 0; bi < bucket.size();) {
                int c = bucket[bi];
                if (!col_active_[c] || colcnt_[c] != cnt) {
                    bucket[bi] = bucket.back();
                    bucket.pop_back();
                    continue;
                }
                ++bi;
                double colmax = 0.0;
                for (int r : colrows_[c]) colmax = std::max(colmax, std::abs(entry(r, c)));
                if (colmax < abs_tol) continue;
                for (int r : colrows_[c]) {
                    double v = std::abs(entry(r, c));
                    if (v < rel * colmax || v < abs_tol) continue;
                    long cost =
                        static_cast<long>(rowcnt_[r] - 1) * static_cast<long>(colcnt_[c] - 1);
                    if (best_cost < 0 || cost < best_cost ||
                        (cost == best_cost && (r < best_r || (r == best_r && c < best_c)))) {
                        best_cost = cost;
                        best_r = r;
                        best_c = c;
                    }
                }
                if (best_cost == 0 && cnt == 1) return {best_r, best_c};
                if (++scanned >= 24 && best_cost >= 0) return {best_r, best_c};
            }
        }
        return {best_r, best_c};
    }

    void erase_col_entry(int c, int r) {
        auto& v = colrows_[c];
        for (std::size_t i = 0; i < v.size(); ++i)
            if (v[i] == r) {
                v[i] = v.back();
                v.pop_back();
                --colcnt_[c];
                return;
            }
    }

    void eliminate(int k, int pr, int pc) {
        double pivot = entry(pr, pc);
        pivot_row_[k] = pr;
        pivot_col_[k] = pc;
        diag_[k] = pivot;

        // Gather pivot row (minus pivot entry) into U.
        for (auto [c, v] : rows_[pr]) {
            if (c == pc) continue;
            urows_[k].emplace_back(c, v);
            erase_col_entry(c, pr);
        }
        row_active_[pr] = 0;

        // Eliminate pivot column from the remaining rows.
        std::vector<int> col_rows = colrows_[pc];
        colrows_[pc].clear();
        colcnt_[pc] = 0;
        col_active_[pc] = 0;
        for (int r : col_rows) {
            if (r == pr || !row_active_[r]) continue;
            double vr = 0.0;
            auto& row = rows_[r];
            for (std::size_t i = 0; i < row.size(); ++i)
                if (row[i].first == pc) {
                    vr = row[i].second;
                    row[i] = row.back();
                    row.pop_back();
                    --rowcnt_[r];
                    break;
                }
            if (vr == 0.0) continue;
            double mult = vr / pivot;
            lcols_[k].emplace_back(r, mult);
            for (auto [c, vc] : urows_[k]) {
                double delta = -mult * vc;
                bool found = false;
                for (auto& e : row)
                    if (e.first == c) {
                        e.second += delta;
                        found = true;
                        if (std::abs(e.second) <= kDropTol) {
                            e = row.back();
                            row.pop_back();
                            --rowcnt_[r];
                            erase_col_entry(c, r);
                        }
                        break;
                    }
                if (!found && std::abs(delta) > kDropTol) {
                    row.emplace_back(c, delta);
                    ++rowcnt_[r];
                    colrows_[c].push_back(r);
                    ++colcnt_[c];
                    push_col_bucket(c);
                }
            }
        }
        // Bucket entries for touched columns were refreshed on insert; counts
        // shrink lazily via the validity check in select_pivot.
        for (auto [c, v] : urows_[k]) {
            (void)v;
            if (col_active_[c]) push_col_bucket(c);
        }
    }

    int m_ = 0;
    std::vector<std::vector<std::pair<int, double>>> lcols_;
    std::vector<std::vector<std::pair<int, double>>> urows_;
    std::vector<double> diag_;
    std::vector<int> pivot_row_, pivot_col_, pos_to_k_;
    long nnz_ = 0;

    // Active submatrix during factorization.
    std::vector<std::vector<std::pair<int, double>>> rows_;
    std::vector<std::vector<int>> colrows_;
    std::vector<char> row_active_, col_active_;
    std::vector<int> rowcnt_, colcnt_;
    std::vector<std::vector<int>> col_bucket_;

    mutable std::vector<double> aux_, out_;
};

// ----------------------------------------------------------------------------
// Bounded-variable two-phase primal simplex over [A | artificials].
// ----------------------------------------------------------------------------
class Simplex {
  public:
    enum class Status : std::uint8_t { AtLower, AtUpper, Basic };

    Simplex(const BinaryProgram& prog, const std::vector<double>& lower,
            const std::vector<double>& upper) {
        n_ = prog.num_vars;
        // Rows: drop empty ones with zero rhs; an empty row with nonzero rhs
        // makes the program infeasible outright.
        std::vector<const BinaryProgram::Constraint*> active;
        for (const auto& c : prog.constraints) {
            if (c.terms.empty()) {
                if (c.rhs != 0) trivially_infeasible_ = true;
                continue;
            }
            active.push_back(&c);
        }
        m_ = static_cast<int>(active.size());

        col_ptr_.assign(n_ + 1, 0);
        std::vector<std::vector<std::pair<int, double>>> cols(n_);
        rhs_.resize(m_);
        for (int r = 0; r < m_; ++r) {
            rhs_[r] = active[r]->rhs;
            for (const auto& t : active[r]->terms)
                cols[t.var].emplace_back(r, static_cast<double>(t.coef));
        }
        for (int j = 0; j < n_; ++j) {
            col_ptr_[j + 1] = col_ptr_[j] + static_cast<int>(cols[j].size());
            for (auto [r, v] : cols[j]) {
                col_row_.push_back(r);
                col_val_.push_back(v);
            }
        }

        cost2_ = prog.costs;
        lb_.resize(total());
        ub_.resize(total());
        for (int j = 0; j < n_; ++j) {
            lb_[j] = lower[j];
            ub_[j] = upper[j];
        }
        for (int r = 0; r < m_; ++r) {
            lb_[n_ + r] = 0.0;
            ub_[n_ + r] = kInf;  // tightened to 0 for phase 2
        }
        art_sign_.resize(m_);
        for (int r = 0; r < m_; ++r) art_sign_[r] = rhs_[r] < 0.0 ? -1.0 : 1.0;
    }

    LpSolution run() {
        LpSolution sol;
        if (trivially_infeasible_) {
            sol.status = SolveStatus::Infeasible;
            return sol;
        }
        for (int j = 0; j < n_; ++j)
            if (lb_[j] > ub_[j] + kFeasTol) {
                sol.status = SolveStatus::Infeasible;
                return sol;
            }

        reset_to_artificial_basis();
        for (int attempt = 0;; ++attempt) {
            if (attempt > 3) throw InternalError("simplex: repeated numerical breakdown");

            phase_ = 1;
            iterate();
            if (phase1_objective() > kFeasTol) {
                sol.status = SolveStatus::Infeasible;
                sol.iterations = iters_;
                return sol;
            }
            // Fix artificials at zero and clean any residual.
            for (int r = 0; r < m_; ++r) {
                ub_[n_ + r] = 0.0;
                if (stat_[n_ + r] != Status::Basic) xval_[n_ + r] = 0.0;
            }
            phase_ = 2;
            refactorize();
            if (!basics_feasible()) {
                // Numerical drift pushed a basic variable out of bounds;
                // restart from scratch.
                for (int r = 0; r < m_; ++r) ub_[n_ + r] = kInf;
                reset_to_artificial_basis();
                continue;
            }
            iterate();
            refactorize();
            if (basics_feasible()) break;
            for (int r = 0; r < m_; ++r) ub_[n_ + r] = kInf;
            reset_to_artificial_basis();
        }

        sol.status = SolveStatus::Optimal;
        sol.x.assign(xval_.begin(), xval_.begin() + n_);
        double obj = 0.0;
        for (int j = 0; j < n_; ++j) obj += cost2_[j] * sol.x[j];
        sol.objective = obj;
        sol.iterations = iters_;
        return sol;
    }

  private:
    int total() const { return n_ + m_; }

    bool is_artificial(int j) const { return j >= n_; }

    double cost(int j) const {
        if (phase_ == 1) return is_artificial(j) ? 1.0 : 0.0;
        return is_artificial(j) ? 0.0 : cost2_[j];
    }

    double phase1_objective() const {
        double s = 0.0;
        for (int r = 0; r < m_; ++r) s += xval_[n_ + r];
        return s;
    }

    // Applies fn(row, value) over column j including artificials.
    template <typename Fn>
    void column(int j, Fn&& fn) const {
        if (is_artificial(j)) {
            fn(j - n_, art_sign_[j - n_]);
            return;
        }
        for (int p = col_ptr_[j]; p < col_ptr_[j + 1]; ++p) fn(col_row_[p], col_val_[p]);
    }

    void reset_to_artificial_basis() {
        stat_.assign(total(), Status::AtLower);
        xval_.assign(total(), 0.0);
        for (int j = 0; j < n_; ++j) {
            // Start at the bound of smaller magnitude (both are finite).
            if (std::abs(lb_[j]) <= std::abs(ub_[j])) {
                stat_[j] = Status::AtLower;
                xval_[j] = lb_[j];
            } else {
                stat_[j] = Status::AtUpper;
                xval_[j] = ub_[j];
            }
        }
        basis_.resize(m_);
        for (int r = 0; r < m_; ++r) {
            basis_[r] = n_ + r;
            stat_[n_ + r] = Status::Basic;
        }
        refactorize();
    }

    // Rebuilds the LU of the current basis and recomputes basic values.
    // A numerically singular basis is repaired by kicking the unusable
    // columns out (to their nearest bound) and seating the artificials of
    // the unpivoted rows instead; factor() reports that pairing.
    void refactorize() {
        for (int round = 0; round < 2; ++round) {
            std::vector<std::vector<std::pair<int, double>>> cols(m_);
            for (int p = 0; p < m_; ++p)
                column(basis_[p], [&](int r, double v) { cols[p].emplace_back(r, v); });
            auto deficient = lu_.factor(m_, cols);
            if (deficient.empty()) {
                etas_.clear();
                compute_basic_values();
                return;
            }
            for (int pos : deficient) {
                int old = basis_[pos];
                int row = lu_.pivot_row_of_position(pos);
                double to_lb = std::abs(xval_[old] - lb_[old]);
                double to_ub = ub_[old] == kInf ? kInf : std::abs(xval_[old] - ub_[old]);
                if (to_ub < to_lb) {
                    xval_[old] = ub_[old];
                    stat_[old] = Status::AtUpper;
                } else {
                    xval_[old] = lb_[old];
                    stat_[old] = Status::AtLower;
                }
                basis_[pos] = n_ + row;
                stat_[n_ + row] = Status::Basic;
            }
        }
        throw InternalError("simplex: basis repair failed twice");
    }

    void compute_basic_values() {
        work_.assign(m_, 0.0);
        for (int r = 0; r < m_; ++r) work_[r] = rhs_[r];
        for (int j = 0; j < total(); ++j) {
            if (stat_[j] == Status::Basic || xval_[j] == 0.0) continue;
            double v = xval_[j];
            column(j, [&](int r, double a) { work_[r] -= a * v; });
        }
        ftran(work_);
        for (int p = 0; p < m_; ++p) xval_[basis_[p]] = work_[p];
    }

    void ftran(std::vector<double>& v) const {
        lu_.ftran(v);
        for (const auto& eta : etas_) {
            double t = v[eta.pos] / eta.pivot;
            if (t != 0.0)
                for (auto [i, d] : eta.entries) v[i] -= d * t;
            v[eta.pos] = t;
        }
    }

    void btran(std::vector<double>& v) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = v[it->pos];
            for (auto [i, d] : it->entries) s -= d * v[i];
            v[it->pos] = s / it->pivot;
        }
        lu_.btran(v);
    }

    bool basics_feasible() const {
        for (int p = 0; p < m_; ++p) {
            int j = basis_[p];
            if (xval_[j] < lb_[j] - kFeasTol || xval_[j] > ub_[j] + kFeasTol) return false;
        }
        return true;
    }

    // Reduced cost of column j given duals y.
    double reduced_cost(int j, const std::vector<double>& y) const {
        double d = cost(j);
        column(j, [&](int r, double v) { d -= y[r] * v; });
        return d;
    }

    void iterate() {
        long stall = 0;
        bool bland = false;
        long limit = 20000L + 400L * static_cast<long>(m_ + 16);
        for (long it = 0; it < limit; ++it, ++iters_) {
            // Duals for the current phase costs.
            y_.assign(m_, 0.0);
            for (int p = 0; p < m_; ++p) y_[p] = cost(basis_[p]);
            btran(y_);

            // Pricing: Dantzig rule, or Bland's rule while stalling.
            int enter = -1;
            double best = 0.0;
            for (int j = 0; j < total(); ++j) {
                if (stat_[j] == Status::Basic || lb_[j] == ub_[j]) continue;
                if (phase_ == 2 && is_artificial(j)) continue;
                double d = reduced_cost(j, y_);
                double viol = stat_[j] == Status::AtLower ? -d : d;
                if (viol <= kOptTol) continue;
                if (bland) {
                    enter = j;
                    break;
                }
                if (viol > best + 1e-15) {
                    best = viol;
                    enter = j;
                }
            }
            if (enter < 0) return;  // phase optimal

            double sigma = stat_[enter] == Status::AtLower ? 1.0 : -1.0;
            dir_.assign(m_, 0.0);
            column(enter, [&](int r, double v) { dir_[r] = v; });
            ftran(dir_);

            // Bounded-variable ratio test: basics move by -sigma*t*dir.
            // Among blockers within tolerance of the minimum step, prefer the
            // largest pivot magnitude, then the lowest position.
            double t_basic = kInf;
            int leave_pos = -1;
            bool leave_to_upper = false;
            double best_piv = 0.0;
            for (int p = 0; p < m_; ++p) {
                double step = sigma * dir_[p];
                if (std::abs(step) <= kPivotTol) continue;
                int bj = basis_[p];
                double t;
                bool to_upper;
                if (step > 0.0) {
                    t = (xval_[bj] - lb_[bj]) / step;
                    to_upper = false;
                } else {
                    if (ub_[bj] == kInf) continue;
                    t = (xval_[bj] - ub_[bj]) / step;
                    to_upper = true;
                }
                if (t < 0.0) t = 0.0;
                bool take = false;
                if (t < t_basic - 1e-12)
                    take = true;
                else if (t <= t_basic + 1e-12 && std::abs(step) > best_piv)
                    take = true;
                if (take) {
                    t_basic = std::min(t_basic, t);
                    leave_pos = p;
                    leave_to_upper = to_upper;
                    best_piv = std::abs(step);
                }
            }

            double t_flip = ub_[enter] == kInf ? kInf : ub_[enter] - lb_[enter];
            if (leave_pos < 0 && t_flip == kInf)
                throw InternalError("simplex: unbounded direction in a box LP");

            if (leave_pos < 0 || t_flip < t_basic - 1e-12) {
                // Bound flip: entering variable crosses to its other bound.
                for (int p = 0; p < m_; ++p) xval_[basis_[p]] -= sigma * t_flip * dir_[p];
                stat_[enter] =
                    stat_[enter] == Status::AtLower ? Status::AtUpper : Status::AtLower;
                xval_[enter] = stat_[enter] == Status::AtLower ? lb_[enter] : ub_[enter];
                if (t_flip > 1e-12) stall = 0;
                continue;
            }

            double t = t_basic;
            for (int p = 0; p < m_; ++p) xval_[basis_[p]] -= sigma * t * dir_[p];
            int leave = basis_[leave_pos];
            xval_[leave] = leave_to_upper ? ub_[leave] : lb_[leave];
            stat_[leave] = leave_to_upper ? Status::AtUpper : Status::AtLower;
            xval_[enter] = (stat_[enter] == Status::AtLower ? lb_[enter] : ub_[enter]) + sigma * t;
            stat_[enter] = Status::Basic;
            basis_[leave_pos] = enter;

            if (std::abs(dir_[leave_pos]) < 1e4 * kPivotTol ||
                static_cast<int>(etas_.size()) >= kRefactorInterval) {
                refactorize();
            } else {
                Eta eta;
                eta.pos = leave_pos;
                eta.pivot = dir_[leave_pos];
                for (int p = 0; p < m_; ++p)
                    if (p != leave_pos && dir_[p] != 0.0) eta.entries.emplace_back(p, dir_[p]);
                etas_.push_back(std::move(eta));
            }

            if (t <= 1e-12) {
                if (++stall > kStallLimit) bland = true;
            } else {
                stall = 0;
                bland = false;
            }
        }
        throw InternalError("simplex: iteration limit exceeded");
    }

    int n_ = 0, m_ = 0;
    bool trivially_infeasible_ = false;
    std::vector<int> col_ptr_, col_row_;
    std::vector<double> col_val_;
    std::vector<double> rhs_;
    std::vector<double> cost2_;
    std::vector<double> lb_, ub_;
    std::vector<double> art_sign_;

    std::vector<Status> stat_;
    std::vector<double> xval_;
    std::vector<int> basis_;
    BasisLU lu_;
    struct Eta {
        int pos;
        double pivot;
        std::vector<std::pair<int, double>> entries;
    };
    std::vector<Eta> etas_;
    std::vector<double> work_, y_, dir_;
    int phase_ = 1;
    long iters_ = 0;
};

}  // namespace

void BinaryProgram::validate() const {
    if (num_vars < 0) throw InvalidProgramError("negative variable count");
    if (static_cast<int>(costs.size()) != num_vars)
        throw InvalidProgramError("cost vector size mismatch");
    for (double c : costs)
        if (!(c > 0.0)) throw InvalidProgramError("costs must be strictly positive");
    if (!var_names.empty() && static_cast<int>(var_names.size()) != num_vars)
        throw InvalidProgramError("variable name vector size mismatch");
    for (std::size_t r = 0; r < constraints.size(); ++r) {
        const auto& row = constraints[r];
        if (row.rhs < -1 || row.rhs > 1)
            throw InvalidProgramError("rhs outside {-1,0,1} in row " + std::to_string(r));
        std::unordered_set<int> seen;
        for (const auto& t : row.terms) {
            if (t.var < 0 || t.var >= num_vars)
                throw InvalidProgramError("variable index out of range in row " +
                                          std::to_string(r));
            if (t.coef != 1 && t.coef != -1)
                throw InvalidProgramError("coefficient outside {-1,+1} in row " +
                                          std::to_string(r));
            if (!seen.insert(t.var).second)
                throw InvalidProgramError("duplicate variable in row " + std::to_string(r));
        }
    }
}

LpSolution solve_lp(const BinaryProgram& prog, const std::vector<double>& lower,
                    const std::vector<double>& upper) {
    prog.validate();
    if (static_cast<int>(lower.size()) != prog.num_vars ||
        static_cast<int>(upper.size()) != prog.num_vars)
        throw InvalidProgramError("bound vector size mismatch");
    Simplex s(prog, lower, upper);
    return s.run();
}

LpSolution solve_lp(const BinaryProgram& prog) {
    std::vector<double> lower(prog.num_vars, 0.0), upper(prog.num_vars, 1.0);
    return solve_lp(prog, lower, upper);
}

namespace {

// Exact integer feasibility of a rounded assignment.
bool verify_integral(const BinaryProgram& prog, const std::vector<std::uint8_t>& x) {
    for (const auto& row : prog.constraints) {
        long long s = 0;
        for (const auto& t : row.terms) s += static_cast<long long>(t.coef) * x[t.var];
        if (s != row.rhs) return false;
    }
    return true;
}

}  // namespace

IpSolution solve_binary(const BinaryProgram& prog, const SolveOptions& opts) {
    prog.validate();
    IpSolution out;

    struct Node {
        long id;
        long parent;       // -1 for root
        int fix_var;       // branching variable (unused for root)
        std::uint8_t fix_val;
        double bound;      // parent LP objective (root: -inf)
    };
    std::vector<Node> arena;
    using QEntry = std::pair<double, long>;  // (bound, id), min-first
    std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> queue;

    arena.push_back({0, -1, -1, 0, -kInf});
    queue.emplace(-kInf, 0);

    bool have_incumbent = false;
    double incumbent_obj = kInf;
    std::vector<std::uint8_t> incumbent;

    std::vector<double> lb(prog.num_vars), ub(prog.num_vars);
    while (!queue.empty()) {
        auto [bound, id] = queue.top();
        queue.pop();
        if (have_incumbent && bound >= incumbent_obj - opts.abs_gap) break;

        // Recover bounds along the path to the root.
        std::fill(lb.begin(), lb.end(), 0.0);
        std::fill(ub.begin(), ub.end(), 1.0);
        for (long cur = id; cur > 0; cur = arena[cur].parent) {
            lb[arena[cur].fix_var] = arena[cur].fix_val;
            ub[arena[cur].fix_var] = arena[cur].fix_val;
        }

        if (out.node_count >= opts.max_nodes)
            throw NodeLimitError("branch-and-bound node limit (" +
                                 std::to_string(opts.max_nodes) + ") exceeded");
        ++out.node_count;
        LpSolution lp = solve_lp(prog, lb, ub);
        out.lp_iterations += lp.iterations;
        if (lp.status == SolveStatus::Infeasible) continue;
        if (bound != -kInf && lp.objective < bound - 1e-6 * (1.0 + std::abs(bound)))
            throw InternalError("branch-and-bound: child bound below parent bound");
        if (have_incumbent && lp.objective >= incumbent_obj - opts.abs_gap) continue;

        // Most fractional variable, ties to the lowest index.
        int branch_var = -1;
        double most = kIntTol;
        for (int j = 0; j < prog.num_vars; ++j) {
            double frac = std::min(lp.x[j], 1.0 - lp.x[j]);
            if (frac > most) {
                most = frac;
                branch_var = j;
            }
        }

        if (branch_var < 0) {
            std::vector<std::uint8_t> xi(prog.num_vars);
            for (int j = 0; j < prog.num_vars; ++j)
                xi[j] = static_cast<std::uint8_t>(lp.x[j] > 0.5 ? 1 : 0);
            if (!verify_integral(prog, xi))
                throw InternalError("LP solution classified integral violates a row exactly");
            double obj = 0.0;
            for (int j = 0; j < prog.num_vars; ++j)
                if (xi[j]) obj += prog.costs[j];
            if (!have_incumbent || obj < incumbent_obj) {
                have_incumbent = true;
                incumbent_obj = obj;
                incumbent = std::move(xi);
            }
            continue;
        }

        for (std::uint8_t v : {std::uint8_t{0}, std::uint8_t{1}}) {
            long nid = static_cast<long>(arena.size());
            arena.push_back({nid, id, branch_var, v, lp.objective});
            queue.emplace(lp.objective, nid);
        }
    }

    if (!have_incumbent) {
        out.status = SolveStatus::Infeasible;
        return out;
    }
    out.status = SolveStatus::Optimal;
    out.assignment = std::move(incumbent);
    out.objective = incumbent_obj;
    return out;
}

void save_program(const BinaryProgram& prog, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    using io_detail::fmt;
    f << "\\ binary program, " << prog.num_vars << " variables, " << prog.constraints.size()
      << " constraints\n";
    for (std::size_t j = 0; j < prog.var_names.size(); ++j)
        if (!prog.var_names[j].empty()) f << "\\ varname " << j << ' ' << prog.var_names[j] << '\n';
    f << "Minimize\n obj:";
    for (int j = 0; j < prog.num_vars; ++j) f << " + " << fmt(prog.costs[j]) << " x" << j;
    f << "\nSubject To\n";
    for (std::size_t r = 0; r < prog.constraints.size(); ++r) {
        f << " c" << r << ':';
        for (const auto& t : prog.constraints[r].terms)
            f << (t.coef > 0 ? " + x" : " - x") << t.var;
        f << " = " << static_cast<int>(prog.constraints[r].rhs) << '\n';
    }
    f << "Binaries\n";
    for (int j = 0; j < prog.num_vars; ++j) f << " x" << j;
    f << "\nEnd\n";
    if (!f) throw IoError("write failed: " + path);
}

BinaryProgram load_program(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    BinaryProgram prog;
    std::string line;
    enum { None, Obj, Rows, Bins } section = None;
    std::vector<std::pair<int, std::string>> names;
    std::string obj_text, rows_text;
    std::vector<std::string> row_lines;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("\\ varname ", 0) == 0) {
            std::istringstream ss(line.substr(10));
            int idx;
            std::string name;
            ss >> idx >> name;
            names.emplace_back(idx, name);
            continue;
        }
        if (line.rfind('\\', 0) == 0 || line.empty()) continue;
        if (line == "Minimize") {
            section = Obj;
            continue;
        }
        if (line == "Subject To") {
            section = Rows;
            continue;
        }
        if (line == "Binaries") {
            section = Bins;
            continue;
        }
        if (line == "End") break;
        if (section == Obj)
            obj_text += ' ' + line;
        else if (section == Rows)
            row_lines.push_back(line);
    }

    auto after_colon = [](const std::string& s) {
        auto p = s.find(':');
        return p == std::string::npos ? s : s.substr(p + 1);
    };

    // Objective: "+ <coef> x<idx>" groups.
    {
        std::istringstream ss(after_colon(obj_text));
        std::string tok;
        double sign = 1.0;
        double coef = 1.0;
        bool have_coef = false;
        while (ss >> tok) {
            if (tok == "+") {
                sign = 1.0;
                continue;
            }
            if (tok == "-") {
                sign = -1.0;
                continue;
            }
            if (tok[0] == 'x') {
                int idx = static_cast<int>(io_detail::parse_int(tok.substr(1)));
                if (idx >= prog.num_vars) prog.num_vars = idx + 1;
                prog.costs.resize(prog.num_vars, 0.0);
                prog.costs[idx] = sign * (have_coef ? coef : 1.0);
                sign = 1.0;
                have_coef = false;
            } else {
                coef = io_detail::parse_double(tok);
                have_coef = true;
            }
        }
    }

    for (const auto& rl : row_lines) {
        std::istringstream ss(after_colon(rl));
        BinaryProgram::Constraint row;
        std::string tok;
        int sign = 1;
        bool in_rhs = false;
        while (ss >> tok) {
            if (tok == "+") {
                sign = 1;
            } else if (tok == "-") {
                sign = -1;
            } else if (tok == "=") {
                in_rhs = true;
            } else if (in_rhs) {
                row.rhs = static_cast<std::int8_t>(io_detail::parse_int(tok));
            } else if (tok[0] == 'x') {
                int idx = static_cast<int>(io_detail::parse_int(tok.substr(1)));
                if (idx >= prog.num_vars) {
                    prog.num_vars = idx + 1;
                    prog.costs.resize(prog.num_vars, 0.0);
                }
                row.terms.push_back({idx, static_cast<std::int8_t>(sign)});
                sign = 1;
            } else {
                throw IoError("unexpected token in constraint: " + tok);
            }
        }
        prog.constraints.push_back(std::move(row));
    }

    if (!names.empty()) {
        prog.var_names.assign(prog.num_vars, "");
        for (auto& [idx, name] : names)
            if (idx >= 0 && idx < prog.num_vars) prog.var_names[idx] = name;
    }
    return prog;
}

}  // namespace cracksynth
