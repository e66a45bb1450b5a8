/*
   Copyright 2026 The codebounds Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

/**
 * @file solvers.hpp
 * @brief Exact rational simplex and a dense primal-dual interior-point
 *        method for block-diagonal semidefinite programs.
 *
 * SDP convention (all matrices symmetric, block diagonal):
 *
 *   primal  max <C, X>   s.t. <A_i, X> = b_i,  X >= 0
 *   dual    min b^T y    s.t. Z = sum_i y_i A_i - C >= 0
 *
 * Blocks are either dense PSD blocks or vectors of nonnegative scalars.
 * Any dual y gives the upper bound b^T y + <Z, X> correction; when Z is not
 * exactly PSD the correction is controlled through a priori bounds on the
 * primal blocks (BlockBound). This is the value reported as dual_value.
 */

#ifndef CODEBOUNDS_SOLVERS_HPP
#define CODEBOUNDS_SOLVERS_HPP

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "codebounds/exactmath.hpp"

namespace codebounds {

// ---------------------------------------------------------------------------
// Linear programming over the rationals

enum class Sense { maximize, minimize };
enum class Relation { greater_equal, less_equal, equal };

struct LpRow {
    std::vector<ExactScalar> coefficients;
    Relation relation = Relation::greater_equal;
    ExactScalar rhs = 0;
};

struct LpProblem {
    Sense sense = Sense::maximize;
    std::vector<ExactScalar> objective;
    std::vector<LpRow> rows;
    /// Empty means every variable is >= 0; std::nullopt entries are free.
    std::vector<std::optional<ExactScalar>> lower_bounds;
    /// Empty means no upper bounds.
    std::vector<std::optional<ExactScalar>> upper_bounds;

    std::size_t variables() const { return objective.size(); }
};

struct LpSolution {
    ExactScalar value;
    std::vector<ExactScalar> x;
    /// Multipliers of the original rows; value == sum_i row_duals[i] * rhs_i
    /// plus the contribution of variable bounds.
    std::vector<ExactScalar> row_duals;
    /// Dual feasibility and zero duality gap re-checked in exact arithmetic.
    bool certificate_verified = false;
    int pivots = 0;
};

/// Two-phase tableau simplex with Bland's rule. Throws InfeasibleError or
/// UnboundedError.
LpSolution solve_lp_exact(const LpProblem& problem);

// ---------------------------------------------------------------------------
// Semidefinite programming

enum class BlockKind { psd, nonneg };

struct BlockSpec {
    BlockKind kind = BlockKind::psd;
    int size = 0;
};

/// One nonzero of a symmetric block matrix. Entries with row != col stand
/// for both (row, col) and (col, row).
struct SparseEntry {
    int block = 0;
    int row = 0;
    int col = 0;
    double value = 0.0;
};

struct BlockSparse {
    std::vector<SparseEntry> entries;

    void add(int block, int row, int col, double value) {
        if (row > col) std::swap(row, col);
        entries.push_back({block, row, col, value});
    }
};

/// A priori bound on a primal block, used to turn an approximately feasible
/// dual into a rigorous bound.
///   psd:    tr(D^{-1} X D^{-1}) <= trace  with D = diag(scaling) (identity if empty)
///   nonneg: x_l <= entries[l]  (or <= trace for all l when entries is empty)
struct BlockBound {
    double trace = std::numeric_limits<double>::infinity();
    std::vector<double> scaling;
    std::vector<double> entries;
};

struct SdpProblem {
    std::vector<BlockSpec> blocks;
    BlockSparse objective;
    std::vector<BlockSparse> constraints;
    std::vector<double> rhs;
    /// Same length as blocks, or empty.
    std::vector<BlockBound> bounds;

    int add_block(BlockKind kind, int size) {
        blocks.push_back({kind, size});
        return static_cast<int>(blocks.size()) - 1;
    }
    int add_constraint(BlockSparse a, double b) {
        constraints.push_back(std::move(a));
        rhs.push_back(b);
        return static_cast<int>(constraints.size()) - 1;
    }
    /// Throws RangeError on inconsistent dimensions or out-of-range entries.
    void validate() const;
};

/// Dense storage matching an SdpProblem's block structure; nonneg blocks
/// are held as column vectors.
struct BlockMatrix {
    std::vector<Eigen::MatrixXd> blocks;

    static BlockMatrix zeros(const std::vector<BlockSpec>& spec);
    double inner(const BlockMatrix& other) const;
};

enum class SdpStatus { optimal, max_iterations, numerical_failure };
std::string to_string(SdpStatus status);

struct SdpOptions {
    double tol = 1e-8;
    int max_iterations = 120;
    bool verbose = false;
    /// Called with the primal iterate X at the start of every iteration.
    std::function<void(const BlockMatrix&)> on_iterate;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::numerical_failure;
    BlockMatrix X;
    BlockMatrix Z;
    Eigen::VectorXd y;
    double primal_value = 0.0;
    /// b^T y without correction.
    double raw_dual_value = 0.0;
    /// Rigorous upper bound on the primal optimum (see file comment).
    double dual_value = 0.0;
    /// Correction added to raw_dual_value; 0 when Z is PSD.
    double dual_repair = 0.0;
    /// False when a correction was needed but no bound was available.
    bool certified = false;
    double relative_gap = 0.0;
    double primal_infeasibility = 0.0;
    double dual_infeasibility = 0.0;
    int iterations = 0;
};

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

/// <A_i, X> for every constraint.
Eigen::VectorXd apply_constraints(const SdpProblem& problem, const BlockMatrix& X);
double objective_value(const SdpProblem& problem, const BlockMatrix& X);

// ---------------------------------------------------------------------------
// First-order theta solver for graphs too large for the dense Schur system

struct FirstOrderOptions {
    /// Stop once upper - lower <= tol * max(1, upper).
    double tol = 1e-7;
    int max_iterations = 20000;
    int check_every = 10;
};

/// Certified enclosure of theta (or theta' when nonnegative) computed by an
/// alternating-projection splitting on the unreduced v x v program. lower
/// comes from a repaired feasible matrix, upper from lambda_max(J + M) for a
/// dual-feasible M.
struct ThetaBracket {
    double lower = 0.0;
    double upper = 0.0;
    int iterations = 0;
    bool converged = false;
};

ThetaBracket theta_first_order(const std::vector<std::vector<bool>>& adjacency, bool nonnegative,
                               const FirstOrderOptions& options = {});

struct SymmetricEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // columns, only when requested
};

/// Eigen decomposition of a symmetric matrix. When the QR iteration does not
/// converge, retries on random orthogonal similarity transforms. Throws
/// SolverError if every attempt fails.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& matrix, bool vectors = false);

struct PsdVerdict {
    double min_eigenvalue = 0.0;
    double scale = 0.0;  // largest absolute eigenvalue
    bool psd = false;
};

/// PSD iff min eigenvalue >= -tol * max(1, scale). Throws RangeError on
/// asymmetric input.
PsdVerdict psd_check(const Eigen::MatrixXd& matrix, double tol);

}  // namespace codebounds

#endif  // CODEBOUNDS_SOLVERS_HPP
