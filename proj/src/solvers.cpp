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

#include "codebounds/solvers.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <tuple>

#include "codebounds/error.hpp"

namespace codebounds {

// ===========================================================================
// Exact simplex

namespace {

using Row = std::vector<ExactScalar>;

struct Tableau {
    int rows = 0;
    int cols = 0;  // rhs lives in column `cols`
    std::vector<Row> a;
    std::vector<int> basis;

    void pivot(int r, int c) {
        const ExactScalar p = a[r][c];
        for (auto& v : a[r]) v /= p;
        std::vector<int> nz;
        for (int j = 0; j <= cols; ++j)
            if (sgn(a[r][j]) != 0) nz.push_back(j);
        for (int i = 0; i < rows; ++i) {
            if (i == r || sgn(a[i][c]) == 0) continue;
            const ExactScalar f = a[i][c];
            for (int j : nz) a[i][j] -= f * a[r][j];
        }
        basis[r] = c;
    }
};

// Maximizes cost . x over the tableau, entering only allowed columns.
void run_simplex(Tableau& t, const Row& cost, const std::vector<bool>& allowed, int& pivots) {
    std::vector<bool> is_basic(static_cast<std::size_t>(t.cols), false);
    for (;;) {
        std::fill(is_basic.begin(), is_basic.end(), false);
        for (int b : t.basis) is_basic[b] = true;

        int entering = -1;
        for (int j = 0; j < t.cols && entering < 0; ++j) {
            if (!allowed[j] || is_basic[j]) continue;
            ExactScalar reduced = cost[j];
            for (int i = 0; i < t.rows; ++i)
                if (sgn(cost[t.basis[i]]) != 0 && sgn(t.a[i][j]) != 0)
                    reduced -= cost[t.basis[i]] * t.a[i][j];
            if (sgn(reduced) > 0) entering = j;
        }
        if (entering < 0) return;

        int leaving = -1;
        ExactScalar best;
        for (int i = 0; i < t.rows; ++i) {
            if (sgn(t.a[i][entering]) <= 0) continue;
            ExactScalar ratio = t.a[i][t.cols] / t.a[i][entering];
            if (leaving < 0 || ratio < best ||
                (ratio == best && t.basis[i] < t.basis[leaving])) {
                leaving = i;
                best = ratio;
            }
        }
        if (leaving < 0) throw UnboundedError("linear program is unbounded");
        t.pivot(leaving, entering);
        ++pivots;
    }
}

}  // namespace

LpSolution solve_lp_exact(const LpProblem& p) {
    const std::size_t nv = p.variables();
    detail::require(p.lower_bounds.empty() || p.lower_bounds.size() == nv,
                    "solve_lp_exact: lower_bounds size mismatch");
    detail::require(p.upper_bounds.empty() || p.upper_bounds.size() == nv,
                    "solve_lp_exact: upper_bounds size mismatch");
    for (const auto& row : p.rows)
        detail::require(row.coefficients.size() == nv, "solve_lp_exact: row size mismatch");

    // Substitute x_j = shift_j + pos_j - neg_j with pos, neg >= 0.
    struct Split { int pos = -1; int neg = -1; ExactScalar shift = 0; };
    std::vector<Split> split(nv);
    int ncols = 0;
    for (std::size_t j = 0; j < nv; ++j) {
        std::optional<ExactScalar> lo = ExactScalar(0);
        if (!p.lower_bounds.empty()) lo = p.lower_bounds[j];
        split[j].pos = ncols++;
        if (lo) split[j].shift = *lo;
        else split[j].neg = ncols++;
    }
    const int nstruct = ncols;

    struct StdRow { Row coef; Relation rel; ExactScalar rhs; };
    std::vector<StdRow> rows;
    auto push_row = [&](const std::vector<ExactScalar>& coef, Relation rel, ExactScalar rhs) {
        StdRow r{Row(static_cast<std::size_t>(nstruct), 0), rel, rhs};
        for (std::size_t j = 0; j < nv; ++j) {
            if (sgn(coef[j]) == 0) continue;
            r.coef[split[j].pos] += coef[j];
            if (split[j].neg >= 0) r.coef[split[j].neg] -= coef[j];
            r.rhs -= coef[j] * split[j].shift;
        }
        rows.push_back(std::move(r));
    };
    for (const auto& row : p.rows) push_row(row.coefficients, row.relation, row.rhs);
    for (std::size_t j = 0; j < p.upper_bounds.size(); ++j) {
        if (!p.upper_bounds[j]) continue;
        std::vector<ExactScalar> e(nv, 0);
        e[j] = 1;
        push_row(e, Relation::less_equal, *p.upper_bounds[j]);
    }

    const int m = static_cast<int>(rows.size());
    std::vector<int> slack_col(static_cast<std::size_t>(m), -1);
    for (int i = 0; i < m; ++i)
        if (rows[i].rel != Relation::equal) slack_col[i] = ncols++;
    const int art0 = ncols;
    ncols += m;

    Tableau t;
    t.rows = m;
    t.cols = ncols;
    t.a.assign(static_cast<std::size_t>(m), Row(static_cast<std::size_t>(ncols + 1), 0));
    t.basis.resize(static_cast<std::size_t>(m));
    std::vector<bool> flipped(static_cast<std::size_t>(m), false);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < nstruct; ++j) t.a[i][j] = rows[i].coef[j];
        if (slack_col[i] >= 0) t.a[i][slack_col[i]] = rows[i].rel == Relation::less_equal ? 1 : -1;
        t.a[i][ncols] = rows[i].rhs;
        if (sgn(rows[i].rhs) < 0) {
            flipped[i] = true;
            for (int j = 0; j <= ncols; ++j) t.a[i][j] = -t.a[i][j];
        }
        t.a[i][art0 + i] = 1;
        t.basis[i] = art0 + i;
    }
    const std::vector<Row> original = t.a;

    int pivots = 0;
    Row cost(static_cast<std::size_t>(ncols), 0);
    for (int i = 0; i < m; ++i) cost[art0 + i] = -1;
    std::vector<bool> allowed(static_cast<std::size_t>(ncols), true);
    run_simplex(t, cost, allowed, pivots);
    ExactScalar phase1 = 0;
    for (int i = 0; i < m; ++i)
        if (t.basis[i] >= art0) phase1 += t.a[i][ncols];
    if (sgn(phase1) != 0) throw InfeasibleError("linear program is infeasible");

    for (int i = 0; i < m; ++i) {
        if (t.basis[i] < art0) continue;
        for (int j = 0; j < art0; ++j) {
            if (sgn(t.a[i][j]) != 0) {
                t.pivot(i, j);
                ++pivots;
                break;
            }
        }
    }

    std::fill(cost.begin(), cost.end(), ExactScalar(0));
    ExactScalar constant = 0;
    const bool maximize = p.sense == Sense::maximize;
    for (std::size_t j = 0; j < nv; ++j) {
        const ExactScalar c = maximize ? p.objective[j] : ExactScalar(-p.objective[j]);
        cost[split[j].pos] = c;
        if (split[j].neg >= 0) cost[split[j].neg] = -c;
        constant += c * split[j].shift;
    }
    for (int j = art0; j < ncols; ++j) allowed[j] = false;
    run_simplex(t, cost, allowed, pivots);

    Row xs(static_cast<std::size_t>(ncols), 0);
    for (int i = 0; i < m; ++i) xs[t.basis[i]] = t.a[i][ncols];
    ExactScalar std_value = constant;
    for (int j = 0; j < ncols; ++j) std_value += cost[j] * xs[j];

    // y = c_B B^{-1}; the artificial columns hold B^{-1}.
    Row y(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i) {
        ExactScalar v = 0;
        for (int r = 0; r < m; ++r)
            if (sgn(cost[t.basis[r]]) != 0) v += cost[t.basis[r]] * t.a[r][art0 + i];
        y[i] = v;
    }

    bool verified = true;
    for (int j = 0; j < art0 && verified; ++j) {
        ExactScalar col = 0;
        for (int i = 0; i < m; ++i) col += y[i] * original[i][j];
        if (col < cost[j]) verified = false;
    }
    ExactScalar by = constant;
    for (int i = 0; i < m; ++i) by += y[i] * original[i][ncols];
    if (by != std_value) verified = false;

    LpSolution sol;
    sol.value = maximize ? std_value : ExactScalar(-std_value);
    sol.x.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) {
        ExactScalar v = split[j].shift + xs[split[j].pos];
        if (split[j].neg >= 0) v -= xs[split[j].neg];
        sol.x[j] = v;
    }
    sol.row_duals.resize(p.rows.size());
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        ExactScalar v = flipped[i] ? ExactScalar(-y[i]) : y[i];
        sol.row_duals[i] = maximize ? v : ExactScalar(-v);
    }
    sol.certificate_verified = verified;
    sol.pivots = pivots;
    return sol;
}

// ===========================================================================
// Interior-point SDP

namespace {

// Extreme eigenvalues of a symmetric matrix. When the QR iteration fails the
// Gershgorin enclosure is returned instead, which is conservative.
std::pair<double, double> eigen_range(const Eigen::MatrixXd& m) {
    try {
        const SymmetricEigen e = symmetric_eigen(m);
        return {e.values(0), e.values(e.values.size() - 1)};
    } catch (const SolverError&) {
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double radius = m.row(i).cwiseAbs().sum() - std::abs(m(i, i));
        lo = std::min(lo, m(i, i) - radius);
        hi = std::max(hi, m(i, i) + radius);
    }
    return {lo, hi};
}

}  // namespace

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& matrix, bool vectors) {
    const auto options = vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly;
    const Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, options);
    if (es.info() == Eigen::Success) return {es.eigenvalues(), vectors ? es.eigenvectors() : Eigen::MatrixXd()};
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const Eigen::Index n = sym.rows();
    for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::MatrixXd G(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) G(i, j) = nd(rng);
        const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
        const Eigen::MatrixXd T = Q.transpose() * sym * Q;
        es.compute(0.5 * (T + T.transpose()), options);
        if (es.info() == Eigen::Success)
            return {es.eigenvalues(), vectors ? Eigen::MatrixXd(Q * es.eigenvectors()) : Eigen::MatrixXd()};
    }
    throw SolverError("symmetric_eigen: no convergence");
}

void SdpProblem::validate() const {
    detail::require(constraints.size() == rhs.size(), "SdpProblem: rhs size mismatch");
    detail::require(bounds.empty() || bounds.size() == blocks.size(),
                    "SdpProblem: bounds size mismatch");
    for (const auto& b : blocks) detail::require(b.size > 0, "SdpProblem: empty block");
    auto check = [&](const BlockSparse& s) {
        for (const auto& e : s.entries) {
            detail::require(e.block >= 0 && e.block < static_cast<int>(blocks.size()),
                            "SdpProblem: block index out of range");
            const auto& spec = blocks[static_cast<std::size_t>(e.block)];
            detail::require(e.row >= 0 && e.row <= e.col && e.col < spec.size,
                            "SdpProblem: entry index out of range");
            detail::require(spec.kind == BlockKind::psd || e.row == e.col,
                            "SdpProblem: off-diagonal entry in a nonnegative block");
            detail::require(std::isfinite(e.value), "SdpProblem: non-finite coefficient");
        }
    };
    check(objective);
    for (const auto& a : constraints) check(a);
    for (std::size_t b = 0; b < bounds.size(); ++b) {
        const auto& bd = bounds[b];
        detail::require(bd.scaling.empty() ||
                            static_cast<int>(bd.scaling.size()) == blocks[b].size,
                        "SdpProblem: bound scaling size mismatch");
        detail::require(bd.entries.empty() ||
                            static_cast<int>(bd.entries.size()) == blocks[b].size,
                        "SdpProblem: bound entries size mismatch");
    }
}

BlockMatrix BlockMatrix::zeros(const std::vector<BlockSpec>& spec) {
    BlockMatrix m;
    for (const auto& b : spec)
        m.blocks.push_back(b.kind == BlockKind::psd ? Eigen::MatrixXd::Zero(b.size, b.size)
                                                    : Eigen::MatrixXd::Zero(b.size, 1));
    return m;
}

double BlockMatrix::inner(const BlockMatrix& other) const {
    double s = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) s += blocks[b].cwiseProduct(other.blocks[b]).sum();
    return s;
}

std::string to_string(SdpStatus status) {
    switch (status) {
        case SdpStatus::optimal: return "optimal";
        case SdpStatus::max_iterations: return "max_iterations";
        case SdpStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

PsdVerdict psd_check(const Eigen::MatrixXd& matrix, double tol) {
    detail::require(matrix.rows() == matrix.cols(), "psd_check: matrix must be square");
    PsdVerdict v;
    if (matrix.size() == 0) {
        v.psd = true;
        return v;
    }
    const double mag = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12 * mag)
        throw RangeError("psd_check: matrix is not symmetric");
    const auto [lo, hi] = eigen_range(matrix);
    v.min_eigenvalue = lo;
    v.scale = std::max(std::abs(lo), std::abs(hi));
    v.psd = v.min_eigenvalue >= -tol * std::max(1.0, v.scale);
    return v;
}

namespace {

struct Term {
    int row;
    int col;
    double value;
};

struct BlockUse {
    int constraint;
    std::vector<Term> terms;
};

// Problem data grouped by block, with constraint rows rescaled to unit norm.
class Model {
public:
    explicit Model(const SdpProblem& p) : spec_(p.blocks), m_(static_cast<int>(p.constraints.size())) {
        scale_.assign(static_cast<std::size_t>(m_), 1.0);
        for (int i = 0; i < m_; ++i) {
            double norm2 = 0.0;
            for (const auto& e : p.constraints[i].entries)
                norm2 += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
            if (norm2 > 0) scale_[i] = 1.0 / std::sqrt(norm2);
        }
        uses_.resize(spec_.size());
        for (int i = 0; i < m_; ++i) {
            std::vector<std::vector<Term>> per_block(spec_.size());
            for (const auto& e : p.constraints[i].entries)
                per_block[e.block].push_back({e.row, e.col, e.value * scale_[i]});
            for (std::size_t b = 0; b < spec_.size(); ++b)
                if (!per_block[b].empty()) uses_[b].push_back({i, std::move(per_block[b])});
        }
        b_.resize(m_);
        for (int i = 0; i < m_; ++i) b_(i) = p.rhs[i] * scale_[i];
        C_ = BlockMatrix::zeros(spec_);
        for (const auto& e : p.objective.entries) {
            auto& blk = C_.blocks[e.block];
            if (spec_[e.block].kind == BlockKind::nonneg) {
                blk(e.row, 0) += e.value;
            } else {
                blk(e.row, e.col) += e.value;
                if (e.row != e.col) blk(e.col, e.row) += e.value;
            }
        }
    }

    int m() const { return m_; }
    const std::vector<BlockSpec>& spec() const { return spec_; }
    const Eigen::VectorXd& b() const { return b_; }
    const BlockMatrix& C() const { return C_; }
    const std::vector<double>& scale() const { return scale_; }
    const std::vector<BlockUse>& uses(std::size_t block) const { return uses_[block]; }

    Eigen::VectorXd apply(const BlockMatrix& X) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(m_);
        for (std::size_t b = 0; b < spec_.size(); ++b) {
            const auto& blk = X.blocks[b];
            const bool nonneg = spec_[b].kind == BlockKind::nonneg;
            for (const auto& u : uses_[b]) {
                double s = 0.0;
                for (const auto& t : u.terms) {
                    if (nonneg) s += t.value * blk(t.row, 0);
                    else if (t.row == t.col) s += t.value * blk(t.row, t.col);
                    else s += t.value * (blk(t.row, t.col) + blk(t.col, t.row));
                }
                out(u.constraint) += s;
            }
        }
        return out;
    }

    // Factor the Gram matrix [<A_i, A_j>] once; used to keep A(dX) exact.
    bool factor_gram() {
        std::map<std::tuple<std::size_t, int, int>, int> slot_of;
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t b = 0; b < spec_.size(); ++b)
            for (const auto& u : uses_[b])
                for (const auto& t : u.terms) {
                    auto [it, fresh] =
                        slot_of.try_emplace({b, t.row, t.col}, static_cast<int>(slot_of.size()));
                    (void)fresh;
                    const bool off = spec_[b].kind == BlockKind::psd && t.row != t.col;
                    trip.emplace_back(u.constraint, it->second, t.value * (off ? std::sqrt(2.0) : 1.0));
                }
        Eigen::SparseMatrix<double> S(m_, static_cast<int>(slot_of.size()));
        S.setFromTriplets(trip.begin(), trip.end());
        gram_.compute(S * S.transpose());
        gram_ok_ = gram_.info() == Eigen::Success && (gram_.vectorD().array() > 1e-12).all();
        return gram_ok_;
    }

    // dX += A^T w with A(dX) = target afterwards.
    void project(BlockMatrix& dX, const Eigen::VectorXd& target) const {
        if (!gram_ok_) return;
        const Eigen::VectorXd w = gram_.solve(target - apply(dX));
        if (w.allFinite()) axpy_into(dX, adjoint(w));
    }

    BlockMatrix adjoint(const Eigen::VectorXd& y) const {
        BlockMatrix out = BlockMatrix::zeros(spec_);
        for (std::size_t b = 0; b < spec_.size(); ++b) {
            auto& blk = out.blocks[b];
            const bool nonneg = spec_[b].kind == BlockKind::nonneg;
            for (const auto& u : uses_[b]) {
                const double yi = y(u.constraint);
                for (const auto& t : u.terms) {
                    if (nonneg) {
                        blk(t.row, 0) += yi * t.value;
                    } else {
                        blk(t.row, t.col) += yi * t.value;
                        if (t.row != t.col) blk(t.col, t.row) += yi * t.value;
                    }
                }
            }
        }
        return out;
    }

private:
    static void axpy_into(BlockMatrix& y, const BlockMatrix& x) {
        for (std::size_t b = 0; b < y.blocks.size(); ++b) y.blocks[b] += x.blocks[b];
    }

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> gram_;
    bool gram_ok_ = false;
    std::vector<BlockSpec> spec_;
    int m_;
    std::vector<double> scale_;
    std::vector<std::vector<BlockUse>> uses_;
    Eigen::VectorXd b_;
    BlockMatrix C_;
};

double frobenius(const BlockMatrix& X) { return std::sqrt(X.inner(X)); }

void axpy(BlockMatrix& y, double a, const BlockMatrix& x) {
    for (std::size_t b = 0; b < y.blocks.size(); ++b) y.blocks[b] += a * x.blocks[b];
}

// Largest alpha in (0, inf] keeping X + alpha dX in the cone; inf if unbounded.
double max_step(const Model& model, const BlockMatrix& X, const BlockMatrix& dX) {
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < X.blocks.size(); ++b) {
        if (model.spec()[b].kind == BlockKind::nonneg) {
            for (Eigen::Index l = 0; l < X.blocks[b].rows(); ++l)
                if (dX.blocks[b](l, 0) < 0) alpha = std::min(alpha, -X.blocks[b](l, 0) / dX.blocks[b](l, 0));
            continue;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(X.blocks[b]);
        if (llt.info() != Eigen::Success) return 0.0;
        Eigen::MatrixXd t = llt.matrixL().solve(dX.blocks[b]);
        Eigen::MatrixXd s = llt.matrixL().solve(t.transpose());
        s = 0.5 * (s + s.transpose());
        const double lmin = eigen_range(s).first;
        if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
    }
    return alpha;
}

struct Factors {
    BlockMatrix Zinv;
};

// Solves for (dX, dy, dZ) given the current point and a target matrix
// T = sigma mu Z^{-1} - corr, where corr is the second-order term.
struct Direction {
    BlockMatrix dX;
    Eigen::VectorXd dy;
    BlockMatrix dZ;
};

class SchurSystem {
public:
    bool factor(const Model& model, const BlockMatrix& X, const BlockMatrix& Zinv) {
        const int m = model.m();
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
        for (std::size_t b = 0; b < model.spec().size(); ++b) {
            const auto& uses = model.uses(b);
            if (model.spec()[b].kind == BlockKind::nonneg) {
                const Eigen::MatrixXd& x = X.blocks[b];
                const Eigen::MatrixXd& zi = Zinv.blocks[b];
                std::vector<std::vector<std::pair<int, double>>> by_entry(
                    static_cast<std::size_t>(x.rows()));
                for (const auto& u : uses)
                    for (const auto& t : u.terms) by_entry[t.row].push_back({u.constraint, t.value});
                for (Eigen::Index l = 0; l < x.rows(); ++l) {
                    const double w = x(l, 0) * zi(l, 0);
                    const auto& list = by_entry[l];
                    for (std::size_t p = 0; p < list.size(); ++p)
                        for (std::size_t q = p; q < list.size(); ++q) {
                            const int i = std::min(list[p].first, list[q].first);
                            const int j = std::max(list[p].first, list[q].first);
                            const double v = w * list[p].second * list[q].second;
                            M(i, j) += (i == j && p != q) ? 2.0 * v : v;
                        }
                }
                continue;
            }
            const Eigen::MatrixXd& x = X.blocks[b];
            const Eigen::MatrixXd& zi = Zinv.blocks[b];
            const Eigen::Index s = x.rows();
            Eigen::MatrixXd G(s, s);
            for (std::size_t p = 0; p < uses.size(); ++p) {
                G.setZero();
                for (const auto& t : uses[p].terms) {
                    G.noalias() += t.value * x.col(t.row) * zi.row(t.col);
                    if (t.row != t.col) G.noalias() += t.value * x.col(t.col) * zi.row(t.row);
                }
                const int i = uses[p].constraint;
                for (std::size_t q = p; q < uses.size(); ++q) {
                    double v = 0.0;
                    for (const auto& t : uses[q].terms) {
                        v += t.value * G(t.row, t.col);
                        if (t.row != t.col) v += t.value * G(t.col, t.row);
                    }
                    M(i, uses[q].constraint) += v;
                }
            }
        }
        M = M.selfadjointView<Eigen::Upper>();
        M_ = M;
        use_ldlt_ = false;
        llt_.compute(M);
        if (llt_.info() == Eigen::Success) return true;
        const double reg = 1e-12 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
        M.diagonal().array() += reg;
        ldlt_.compute(M);
        use_ldlt_ = true;
        return ldlt_.info() == Eigen::Success && (ldlt_.vectorD().array() > 0).all();
    }

    // Iterative refinement against the unregularized matrix.
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
        auto base = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
            return use_ldlt_ ? Eigen::VectorXd(ldlt_.solve(r)) : Eigen::VectorXd(llt_.solve(r));
        };
        Eigen::VectorXd x = base(rhs);
        double best = (rhs - M_ * x).norm();
        for (int r = 0; r < 5; ++r) {
            const Eigen::VectorXd cand = x + base(rhs - M_ * x);
            const double res = (rhs - M_ * cand).norm();
            if (!(res < best)) break;
            x = cand;
            best = res;
        }
        return x;
    }

private:
    Eigen::MatrixXd M_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
    bool use_ldlt_ = false;
};

BlockMatrix symmetrized(BlockMatrix X, const Model& model) {
    for (std::size_t b = 0; b < X.blocks.size(); ++b)
        if (model.spec()[b].kind == BlockKind::psd)
            X.blocks[b] = 0.5 * (X.blocks[b] + X.blocks[b].transpose()).eval();
    return X;
}

// X * S * Zinv per block (elementwise for nonneg blocks).
BlockMatrix sandwich(const Model& model, const BlockMatrix& X, const BlockMatrix& S,
                     const BlockMatrix& Zinv) {
    BlockMatrix out = BlockMatrix::zeros(model.spec());
    for (std::size_t b = 0; b < X.blocks.size(); ++b) {
        if (model.spec()[b].kind == BlockKind::nonneg)
            out.blocks[b] = X.blocks[b].cwiseProduct(S.blocks[b]).cwiseProduct(Zinv.blocks[b]);
        else
            out.blocks[b] = X.blocks[b] * S.blocks[b] * Zinv.blocks[b];
    }
    return out;
}

Direction compute_direction(const Model& model, const SchurSystem& schur, const BlockMatrix& X,
                            const BlockMatrix& Zinv, const BlockMatrix& Rd,
                            const BlockMatrix& target) {
    // dZ = A^T dy + Rd,  dX = target - X - X dZ Zinv, A(dX) = b - A(X).
    BlockMatrix W = target;
    axpy(W, -1.0, sandwich(model, X, Rd, Zinv));
    W = symmetrized(std::move(W), model);
    Eigen::VectorXd rhs = model.apply(W) - model.b();
    Direction d;
    d.dy = schur.solve(rhs);
    d.dZ = model.adjoint(d.dy);
    axpy(d.dZ, 1.0, Rd);
    d.dX = target;
    axpy(d.dX, -1.0, X);
    axpy(d.dX, -1.0, sandwich(model, X, d.dZ, Zinv));
    d.dX = symmetrized(std::move(d.dX), model);
    return d;
}

double min_eigenvalue(const Eigen::MatrixXd& m) { return eigen_range(m).first; }

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options) {
    problem.validate();
    Model model(problem);
    model.factor_gram();
    const int m = model.m();
    const auto& spec = model.spec();

    double cone_dim = 0.0;
    for (const auto& b : spec) cone_dim += b.size;

    // Identity-scaled starting point.
    BlockMatrix X = BlockMatrix::zeros(spec);
    BlockMatrix Z = BlockMatrix::zeros(spec);
    const double normC = frobenius(model.C());
    for (std::size_t b = 0; b < spec.size(); ++b) {
        const double n = spec[b].size;
        double xi = std::max(10.0, std::sqrt(n));
        double eta = std::max({10.0, std::sqrt(n), normC});
        for (const auto& u : model.uses(b)) {
            double norm2 = 0.0;
            for (const auto& t : u.terms) norm2 += (t.row == t.col ? 1.0 : 2.0) * t.value * t.value;
            const double na = std::sqrt(norm2);
            xi = std::max(xi, n * (1.0 + std::abs(model.b()(u.constraint))) / (1.0 + na));
            eta = std::max(eta, na);
        }
        eta = std::max(eta, 1.0 + eta / std::sqrt(n));
        if (spec[b].kind == BlockKind::psd) {
            X.blocks[b] = xi * Eigen::MatrixXd::Identity(spec[b].size, spec[b].size);
            Z.blocks[b] = eta * Eigen::MatrixXd::Identity(spec[b].size, spec[b].size);
        } else {
            X.blocks[b].setConstant(xi);
            Z.blocks[b].setConstant(eta);
        }
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

    const double normb = model.b().norm();
    SdpSolution sol;
    sol.status = SdpStatus::max_iterations;
    SchurSystem schur;

    // Best iterate by max(gap, pinf, dinf); returned when progress stalls.
    struct Snapshot {
        BlockMatrix X, Z;
        Eigen::VectorXd y;
        double merit = std::numeric_limits<double>::infinity();
        double gap = 0.0, pinf = 0.0, dinf = 0.0;
    } best;
    int since_best = 0;
    double last_step = 0.5;

    int iter = 0;
    for (;; ++iter) {
        const Eigen::VectorXd Rp = model.b() - model.apply(X);
        BlockMatrix Rd = model.adjoint(y);
        axpy(Rd, -1.0, model.C());
        axpy(Rd, -1.0, Z);
        const double pobj = model.C().inner(X);
        const double dobj = model.b().dot(y);
        const double xz = X.inner(Z);
        const double mu = xz / cone_dim;
        const double denom = 1.0 + std::abs(pobj) + std::abs(dobj);
        sol.relative_gap = std::max(std::abs(xz), std::abs(pobj - dobj)) / denom;
        sol.primal_infeasibility = Rp.norm() / (1.0 + normb);
        sol.dual_infeasibility = frobenius(Rd) / (1.0 + normC);
        if (options.verbose)
            std::fprintf(stderr, "it %3d  p %.10e  d %.10e  gap %.2e  pinf %.2e  dinf %.2e\n", iter,
                         pobj, dobj, sol.relative_gap, sol.primal_infeasibility,
                         sol.dual_infeasibility);
        if (options.on_iterate) options.on_iterate(X);
        const double merit = std::max({sol.relative_gap, sol.primal_infeasibility, sol.dual_infeasibility});
        if (merit < 0.5 * best.merit || (merit < best.merit && since_best > 0)) {
            best = {X, Z, y, merit, sol.relative_gap, sol.primal_infeasibility, sol.dual_infeasibility};
            since_best = 0;
        } else {
            ++since_best;
        }
        if (merit <= options.tol) {
            sol.status = SdpStatus::optimal;
            break;
        }
        if (iter >= options.max_iterations) break;
        if (since_best >= 20) {
            sol.status = SdpStatus::numerical_failure;
            break;
        }

        BlockMatrix Zinv = BlockMatrix::zeros(spec);
        bool ok = true;
        for (std::size_t b = 0; b < spec.size() && ok; ++b) {
            if (spec[b].kind == BlockKind::nonneg) {
                Zinv.blocks[b] = Z.blocks[b].cwiseInverse();
                continue;
            }
            Eigen::LLT<Eigen::MatrixXd> llt(Z.blocks[b]);
            if (llt.info() != Eigen::Success) ok = false;
            else Zinv.blocks[b] = llt.solve(Eigen::MatrixXd::Identity(spec[b].size, spec[b].size));
        }
        if (!ok || !schur.factor(model, X, Zinv)) {
            sol.status = SdpStatus::numerical_failure;
            break;
        }

        // Predictor.
        BlockMatrix zero_target = BlockMatrix::zeros(spec);
        Direction aff = compute_direction(model, schur, X, Zinv, Rd, zero_target);
        model.project(aff.dX, Rp);
        const double ap = std::min(1.0, max_step(model, X, aff.dX));
        const double ad = std::min(1.0, max_step(model, Z, aff.dZ));
        BlockMatrix Xa = X;
        axpy(Xa, ap, aff.dX);
        BlockMatrix Za = Z;
        axpy(Za, ad, aff.dZ);
        const double mu_aff = Xa.inner(Za) / cone_dim;
        const double expon = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
        double sigma = std::pow(std::max(0.0, mu_aff) / mu, expon);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // Corrector.
        BlockMatrix target = Zinv;
        for (auto& blk : target.blocks) blk *= sigma * mu;
        axpy(target, -1.0, sandwich(model, aff.dX, aff.dZ, Zinv));
        Direction dir = compute_direction(model, schur, X, Zinv, Rd, target);
        model.project(dir.dX, Rp);

        const double gamma = 0.9 + 0.09 * last_step;
        double sp = std::min(1.0, gamma * max_step(model, X, dir.dX));
        double sd = std::min(1.0, gamma * max_step(model, Z, dir.dZ));
        if (std::min(sp, sd) < 0.1 * std::min(ap, ad)) {
            // Corrector spoiled the step: plain centering direction instead.
            BlockMatrix centered = Zinv;
            for (auto& blk : centered.blocks) blk *= std::max(sigma, 0.3) * mu;
            Direction alt = compute_direction(model, schur, X, Zinv, Rd, centered);
            model.project(alt.dX, Rp);
            const double ap2 = std::min(1.0, gamma * max_step(model, X, alt.dX));
            const double ad2 = std::min(1.0, gamma * max_step(model, Z, alt.dZ));
            if (std::min(ap2, ad2) > std::min(sp, sd)) {
                dir = std::move(alt);
                sp = ap2;
                sd = ad2;
            }
        }
        if (!(sp > 0.0) || !(sd > 0.0)) {
            sol.status = SdpStatus::numerical_failure;
            break;
        }
        last_step = std::min(sp, sd);
        axpy(X, sp, dir.dX);
        axpy(Z, sd, dir.dZ);
        y += sd * dir.dy;
        X = symmetrized(std::move(X), model);
        Z = symmetrized(std::move(Z), model);
    }
    sol.iterations = iter;
    if (sol.status != SdpStatus::optimal && best.merit < std::numeric_limits<double>::infinity()) {
        X = std::move(best.X);
        Z = std::move(best.Z);
        y = std::move(best.y);
        sol.relative_gap = best.gap;
        sol.primal_infeasibility = best.pinf;
        sol.dual_infeasibility = best.dinf;
    }

    // Undo the row scaling.
    Eigen::VectorXd y_orig(m);
    for (int i = 0; i < m; ++i) y_orig(i) = y(i) * model.scale()[i];
    sol.y = y_orig;
    sol.X = X;
    sol.Z = Z;
    sol.primal_value = model.C().inner(X);

    // Rigorous dual value from the unscaled data: for any feasible X,
    // <C, X> = b^T y - <Zt, X> with Zt = sum y_i A_i - C.
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) rhs(i) = problem.rhs[i];
    sol.raw_dual_value = rhs.dot(y_orig);
    BlockMatrix Zt = BlockMatrix::zeros(spec);
    for (int i = 0; i < m; ++i) {
        for (const auto& e : problem.constraints[i].entries) {
            auto& blk = Zt.blocks[e.block];
            if (spec[e.block].kind == BlockKind::nonneg) {
                blk(e.row, 0) += y_orig(i) * e.value;
            } else {
                blk(e.row, e.col) += y_orig(i) * e.value;
                if (e.row != e.col) blk(e.col, e.row) += y_orig(i) * e.value;
            }
        }
    }
    axpy(Zt, -1.0, model.C());
    double repair = 0.0;
    bool certified = true;
    for (std::size_t b = 0; b < spec.size(); ++b) {
        const BlockBound bound = problem.bounds.empty() ? BlockBound{} : problem.bounds[b];
        if (spec[b].kind == BlockKind::nonneg) {
            for (int l = 0; l < spec[b].size; ++l) {
                const double z = Zt.blocks[b](l, 0);
                if (z >= 0) continue;
                const double ub = bound.entries.empty() ? bound.trace : bound.entries[l];
                if (!std::isfinite(ub)) certified = false;
                else repair += -z * ub;
            }
            continue;
        }
        Eigen::MatrixXd S = Zt.blocks[b];
        if (!bound.scaling.empty()) {
            for (int r = 0; r < spec[b].size; ++r)
                for (int c = 0; c < spec[b].size; ++c) S(r, c) *= bound.scaling[r] * bound.scaling[c];
        }
        const double lmin = min_eigenvalue(S);
        if (lmin >= 0) continue;
        if (!std::isfinite(bound.trace)) certified = false;
        else repair += -lmin * bound.trace;
    }
    sol.dual_repair = repair;
    sol.certified = certified;
    sol.dual_value = certified ? sol.raw_dual_value + repair
                               : std::numeric_limits<double>::infinity();
    return sol;
}


Eigen::VectorXd apply_constraints(const SdpProblem& problem, const BlockMatrix& X) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.constraints.size()));
    for (std::size_t i = 0; i < problem.constraints.size(); ++i)
        for (const auto& e : problem.constraints[i].entries) {
            const auto& blk = X.blocks[e.block];
            if (problem.blocks[e.block].kind == BlockKind::nonneg) out(i) += e.value * blk(e.row, 0);
            else if (e.row == e.col) out(i) += e.value * blk(e.row, e.col);
            else out(i) += e.value * (blk(e.row, e.col) + blk(e.col, e.row));
        }
    return out;
}

double objective_value(const SdpProblem& problem, const BlockMatrix& X) {
    double s = 0.0;
    for (const auto& e : problem.objective.entries) {
        const auto& blk = X.blocks[e.block];
        if (problem.blocks[e.block].kind == BlockKind::nonneg) s += e.value * blk(e.row, 0);
        else if (e.row == e.col) s += e.value * blk(e.row, e.col);
        else s += e.value * (blk(e.row, e.col) + blk(e.col, e.row));
    }
    return s;
}

// ===========================================================================
// First-order theta

namespace {

// Euclidean projection of d onto {x >= 0, sum x = total}.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& d, double total) {
    std::vector<double> s(d.data(), d.data() + d.size());
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0.0, tau = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        cum += s[k];
        const double t = (cum - total) / static_cast<double>(k + 1);
        if (s[k] - t > 0) tau = t;
    }
    return (d.array() - tau).max(0.0).matrix();
}

}  // namespace

ThetaBracket theta_first_order(const std::vector<std::vector<bool>>& adjacency, bool nonnegative,
                               const FirstOrderOptions& options) {
    const int v = static_cast<int>(adjacency.size());
    detail::require(v >= 1, "theta_first_order: empty graph");
    for (const auto& row : adjacency)
        detail::require(static_cast<int>(row.size()) == v, "theta_first_order: adjacency must be square");

    // Work with Xs = v X: trace v, objective <J, Xs> / v.
    const double vd = v;
    auto project_affine = [&](Eigen::MatrixXd W) {
        W = 0.5 * (W + W.transpose()).eval();
        Eigen::VectorXd diag = W.diagonal();
        if (nonnegative) diag = project_simplex(diag, vd);
        else diag.array() -= (diag.sum() - vd) / vd;
        for (int i = 0; i < v; ++i)
            for (int j = 0; j < v; ++j) {
                if (i == j) continue;
                if (adjacency[i][j]) W(i, j) = 0.0;
                else if (nonnegative && W(i, j) < 0) W(i, j) = 0.0;
            }
        W.diagonal() = diag;
        return W;
    };
    auto project_psd = [&](const Eigen::MatrixXd& W) {
        const SymmetricEigen es = symmetric_eigen(W, true);
        const Eigen::VectorXd lam = es.values.cwiseMax(0.0);
        return Eigen::MatrixXd(es.vectors * lam.asDiagonal() * es.vectors.transpose());
    };

    const Eigen::MatrixXd J = Eigen::MatrixXd::Ones(v, v);
    Eigen::MatrixXd Y = Eigen::MatrixXd::Identity(v, v);
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(v, v);
    Eigen::MatrixXd X = Y;
    double rho = 1.0 / vd;

    ThetaBracket out;
    out.lower = 1.0;  // any single vertex
    out.upper = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= options.max_iterations; ++it) {
        X = project_affine(Y - U + J / (vd * rho));
        const Eigen::MatrixXd Yprev = Y;
        Y = project_psd(X + U);
        U += X - Y;
        out.iterations = it;

        if (it % 50 == 0) {
            const double r = (X - Y).norm();
            const double s = rho * (Y - Yprev).norm();
            if (r > 10 * s) {
                rho *= 2;
                U /= 2;
            } else if (s > 10 * r) {
                rho /= 2;
                U *= 2;
            }
        }

        if (it % options.check_every != 0) continue;
        const double eps = std::max(0.0, -eigen_range(X).first);
        out.lower = std::max(out.lower, (X.sum() + vd * eps) / (vd * (1.0 + eps)));

        // Off-diagonal multiplier v * Lambda - J, zero on the diagonal.
        Eigen::MatrixXd M = vd * rho * U - J;
        for (int i = 0; i < v; ++i)
            for (int j = 0; j < v; ++j) {
                if (i == j) M(i, j) = 0.0;
                else if (!adjacency[i][j]) M(i, j) = nonnegative ? std::max(0.0, M(i, j)) : 0.0;
            }
        M = 0.5 * (M + M.transpose()).eval();
        out.upper = std::min(out.upper, eigen_range(J + M).second);
        if (std::isfinite(out.upper) && out.upper - out.lower <= options.tol * std::max(1.0, out.upper)) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace codebounds
