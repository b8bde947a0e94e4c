#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cracksynth/errors.hpp"

namespace cracksynth {

// Binary program  min c'x  s.t. Mx = q, x in {0,1}^n  with M entries in
// {-1,0,+1} and q in {-1,0,+1}. Shared form of the shortest-path and
// minimum-weight-surface systems.
struct BinaryProgram {
    struct Term {
        int var = 0;
        std::int8_t coef = 0;  // -1 or +1
    };
    struct Constraint {
        std::vector<Term> terms;
        std::int8_t rhs = 0;
    };

    int num_vars = 0;
    std::vector<double> costs;             // strictly positive
    std::vector<Constraint> constraints;
    std::vector<std::string> var_names;    // optional, for diagnostics

    // Checks dimensions, cost positivity, coefficient domain and duplicate
    // variables within a row. Throws InvalidProgramError.
    void validate() const;
};

enum class SolveStatus { Optimal, Infeasible };

struct LpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> x;   // size num_vars, a basic (vertex) solution
    double objective = 0.0;
    long iterations = 0;
};

struct IpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<std::uint8_t> assignment;  // size num_vars when Optimal
    double objective = 0.0;
    long node_count = 0;      // LP relaxations solved
    long lp_iterations = 0;   // simplex iterations over all nodes
};

struct SolveOptions {
    long max_nodes = 200000;
    double abs_gap = 0.0;  // prune nodes with bound >= incumbent - abs_gap
};

// Exact optimum of the relaxation 0 <= x <= 1, Mx = q, returned at a vertex
// of the feasible polytope (two-phase bounded simplex, Bland fallback for
// anti-cycling).
LpSolution solve_lp(const BinaryProgram& prog);

// Relaxation with per-variable bound overrides (used by branch-and-bound and
// available for diagnostics). lower/upper must have size num_vars with
// 0 <= lower[i] <= upper[i] <= 1.
LpSolution solve_lp(const BinaryProgram& prog, const std::vector<double>& lower,
                    const std::vector<double>& upper);

// Exact optimal binary solution via best-first branch-and-bound on the most
// fractional variable, bounding with the LP relaxation. Deterministic node
// ordering. Throws NodeLimitError when opts.max_nodes is exceeded.
IpSolution solve_binary(const BinaryProgram& prog, const SolveOptions& opts = {});

// CPLEX-LP-style text dump/load for offline debugging against external
// solvers. Round-trips exactly.
void save_program(const BinaryProgram& prog, const std::string& path);
BinaryProgram load_program(const std::string& path);

}  // namespace cracksynth
