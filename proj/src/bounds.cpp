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

#include "codebounds/bounds.hpp"

#include <Eigen/Sparse>

#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include "codebounds/error.hpp"

namespace codebounds {

using detail::require;

std::string to_string(BoundKind kind) {
    switch (kind) {
    case BoundKind::delsarte: return "delsarte";
    case BoundKind::theta: return "theta";
    case BoundKind::ball: return "ball";
    case BoundKind::projective: return "projective";
    case BoundKind::triple: return "triple";
    }
    return "?";
}

std::string to_string(ThetaVariant variant) { return variant == ThetaVariant::plain ? "plain" : "prime"; }

ThetaVariant parse_theta_variant(const std::string& name) {
    if (name == "plain") return ThetaVariant::plain;
    if (name == "prime") return ThetaVariant::prime;
    throw RangeError("unknown theta variant '" + name + "' (expected plain or prime)");
}

// ---------------------------------------------------------------------------
// Requests and results

BoundRequest BoundRequest::delsarte(int n, int d) {
    BoundRequest r;
    r.kind = BoundKind::delsarte;
    r.n = n;
    r.d = d;
    return r;
}

BoundRequest BoundRequest::theta(Graph g, ThetaVariant variant) {
    BoundRequest r;
    r.kind = BoundKind::theta;
    r.n = g.vertices;
    r.graph = std::move(g);
    r.variant = variant;
    return r;
}

BoundRequest BoundRequest::ball(int n, std::vector<int> weights, int d) {
    BoundRequest r;
    r.kind = BoundKind::ball;
    r.n = n;
    r.weights = std::move(weights);
    r.d = d;
    return r;
}

BoundRequest BoundRequest::ball_radius(int n, int w, int d) {
    require(w >= 0 && w <= n, "ball: need 0 <= w <= n");
    std::vector<int> ws;
    for (int i = 0; i <= w; ++i) ws.push_back(i);
    return ball(n, std::move(ws), d);
}

BoundRequest BoundRequest::projective(long q, int n, int d) {
    BoundRequest r;
    r.kind = BoundKind::projective;
    r.q = q;
    r.n = n;
    r.d = d;
    return r;
}

BoundRequest BoundRequest::triple(int n, PseudoDistance f, int m) {
    BoundRequest r;
    r.kind = BoundKind::triple;
    r.n = n;
    r.f = f;
    r.m = m;
    return r;
}

void BoundRequest::validate() const {
    require(tol > 0 && tol < 1, "tolerance must lie in (0, 1)");
    switch (kind) {
    case BoundKind::delsarte:
        require(n >= 1 && n <= 64, "delsarte: need 1 <= n <= 64");
        require(d >= 1 && d <= n, "delsarte: need 1 <= d <= n");
        break;
    case BoundKind::theta:
        require(graph.vertices >= 1 && graph.vertices <= 500, "theta: need 1 <= vertices <= 500");
        break;
    case BoundKind::ball:
        require(n >= 1 && n <= 28, "ball: need 1 <= n <= 28");
        require(d >= 1 && d <= n, "ball: need 1 <= d <= n");
        require(!weights.empty(), "ball: weight set must be nonempty");
        for (int w : weights) require(w >= 0 && w <= n, "ball: weights must lie in [0, n]");
        break;
    case BoundKind::projective:
        require(is_prime_power(q) && q <= 5, "projective: q must be a prime power <= 5");
        require(n >= 1 && n <= 16, "projective: need 1 <= n <= 16");
        require(d >= 1 && d <= n, "projective: need 1 <= d <= n");
        break;
    case BoundKind::triple:
        require(n >= 1 && n <= 28, "triple: need 1 <= n <= 28");
        require(m >= 1, "triple: need m >= 1");
        break;
    }
}

nlohmann::json BoundRequest::to_json() const {
    nlohmann::json j{{"kind", to_string(kind)}, {"tol", tol}};
    switch (kind) {
    case BoundKind::delsarte:
        j["n"] = n;
        j["d"] = d;
        break;
    case BoundKind::theta:
        j["vertices"] = graph.vertices;
        j["edges"] = graph.edges.size();
        j["variant"] = to_string(variant);
        break;
    case BoundKind::ball:
        j["n"] = n;
        j["weights"] = weights;
        j["d"] = d;
        break;
    case BoundKind::projective:
        j["q"] = q;
        j["n"] = n;
        j["d"] = d;
        break;
    case BoundKind::triple:
        j["n"] = n;
        j["f"] = to_string(f);
        j["m"] = m;
        break;
    }
    return j;
}

nlohmann::json BoundResult::to_json(bool include_timing) const {
    nlohmann::json j{{"request", request.to_json()},
                     {"primal", primal},
                     {"dual", dual},
                     {"gap", gap},
                     {"status", status},
                     {"iterations", iterations},
                     {"warnings", warnings}};
    if (bound.fits_slong_p()) j["bound"] = bound.get_si();
    else j["bound"] = bound.get_str();
    if (exact) j["exact"] = codebounds::to_string(*exact);
    if (include_timing) {
        j["wall_time_ms"] = wall_time_ms;
        j["kernel_cache_hit"] = kernel_cache_hit;
    }
    return j;
}

BigInt integer_bound(double value) {
    if (!std::isfinite(value)) throw SolverError("integer_bound: non-finite dual value");
    return BigInt(std::floor(value + 1e-5));
}

// ---------------------------------------------------------------------------
// Programs

LpProblem delsarte_lp(int n, int d) {
    require(n >= 1 && d >= 1 && d <= n, "delsarte_lp: need 1 <= d <= n");
    LpProblem lp;
    lp.sense = Sense::maximize;
    lp.objective.assign(static_cast<std::size_t>(n - d + 1), 1);
    for (int k = 0; k <= n; ++k) {
        LpRow row;
        for (int i = d; i <= n; ++i) row.coefficients.push_back(ExactScalar(krawtchouk(n, k, i)));
        row.relation = Relation::greater_equal;
        row.rhs = -ExactScalar(binomial(n, k));
        lp.rows.push_back(std::move(row));
    }
    return lp;
}

SdpProblem delsarte_sdp(int n, int d) {
    require(n >= 1 && d >= 1 && d <= n, "delsarte_sdp: need 1 <= d <= n");
    const int nvar = n - d + 1;
    SdpProblem p;
    // Distance distribution A_d..A_n followed by one slack per level; row k is
    // divided by C(n, k), so t_k = s_k / C(n, k).
    const int blk = p.add_block(BlockKind::nonneg, nvar + n + 1);
    for (int v = 0; v < nvar; ++v) p.objective.add(blk, v, v, 1.0);
    for (int k = 0; k <= n; ++k) {
        const ExactScalar level(binomial(n, k));
        BlockSparse row;
        for (int i = d; i <= n; ++i) {
            const ExactScalar coef = ExactScalar(krawtchouk(n, k, i)) / level;
            if (coef != 0) row.add(blk, i - d, i - d, to_double(coef));
        }
        row.add(blk, nvar + k, nvar + k, -1.0);
        p.add_constraint(std::move(row), -1.0);
    }
    // The slacks s_k sum to 2^n, so A_i <= 2^n and t_k <= 2^n / C(n, k).
    BlockBound bound;
    bound.entries.assign(static_cast<std::size_t>(nvar + n + 1), std::ldexp(1.0, n));
    for (int k = 0; k <= n; ++k) bound.entries[nvar + k] /= binomial(n, k).get_d();
    bound.trace = 2.0 * std::ldexp(1.0, n);
    p.bounds.push_back(bound);
    return p;
}

SdpProblem theta_problem(const Graph& g, ThetaVariant variant) {
    const int v = g.vertices;
    require(v >= 1, "theta_problem: graph must have vertices");
    const auto adj = g.adjacency_matrix();
    SdpProblem p;
    const int B = p.add_block(BlockKind::psd, v);
    for (int i = 0; i < v; ++i)
        for (int j = i; j < v; ++j) p.objective.add(B, i, j, 1.0);
    BlockSparse trace;
    for (int i = 0; i < v; ++i) trace.add(B, i, i, 1.0);
    p.add_constraint(std::move(trace), 1.0);
    for (const auto& [i, j] : g.edges) {
        BlockSparse e;
        e.add(B, i, j, 0.5);
        p.add_constraint(std::move(e), 0.0);
    }
    BlockBound tb;
    tb.trace = 1.0;
    p.bounds.push_back(tb);
    if (variant == ThetaVariant::plain) return p;

    std::vector<std::pair<int, int>> non_edges;
    for (int i = 0; i < v; ++i)
        for (int j = i + 1; j < v; ++j)
            if (!adj[i][j]) non_edges.emplace_back(i, j);
    if (non_edges.empty()) return p;
    const int S = p.add_block(BlockKind::nonneg, static_cast<int>(non_edges.size()));
    for (std::size_t l = 0; l < non_edges.size(); ++l) {
        BlockSparse e;
        e.add(B, non_edges[l].first, non_edges[l].second, 0.5);
        e.add(S, static_cast<int>(l), static_cast<int>(l), -1.0);
        p.add_constraint(std::move(e), 0.0);
    }
    // |B_ij| <= (B_ii + B_jj) / 2 <= 1/2.
    BlockBound sb;
    sb.trace = 0.5;
    p.bounds.push_back(sb);
    return p;
}

int InvariantProgram::variable_index(int a, int b, int c) const {
    for (std::size_t v = 0; v < variables.size(); ++v)
        if (variables[v] == std::tuple{a, b, c}) return static_cast<int>(v);
    return -1;
}

BlockMatrix InvariantProgram::point(const std::vector<double>& values) const {
    require(values.size() == variables.size(), "InvariantProgram::point: wrong number of values");
    BlockMatrix X = BlockMatrix::zeros(problem.blocks);
    for (std::size_t v = 0; v < values.size(); ++v) X.blocks[scalar_block](static_cast<Eigen::Index>(v), 0) = values[v];
    for (const auto& t : links) {
        X.blocks[t.block](t.row, t.col) += t.coefficient * values[t.variable];
        if (t.row != t.col) X.blocks[t.block](t.col, t.row) += t.coefficient * values[t.variable];
    }
    return X;
}

namespace {

std::shared_ptr<const BlockKernel> fetch_kernel(const SpaceSpec& space, KernelCache* cache, bool& hit) {
    if (cache) {
        auto lookup = cache->get(space);
        hit = lookup.hit;
        return lookup.kernel;
    }
    hit = false;
    return std::make_shared<const BlockKernel>(build_kernel(space));
}

// Adds one PSD block per kernel level plus the scalar block, and the linking
// constraints P_k(p, q) = sum_v coef * x_v given per (level, p, q).
void link_levels(InvariantProgram& prog,
                 const std::vector<std::map<std::pair<int, int>, std::map<int, double>>>& coefs) {
    const auto& kernel = *prog.kernel;
    auto& p = prog.problem;
    std::vector<int> level_block;
    for (const auto& level : kernel.levels) level_block.push_back(p.add_block(BlockKind::psd, level.m));
    prog.scalar_block = p.add_block(BlockKind::nonneg, static_cast<int>(prog.variables.size()));
    for (std::size_t l = 0; l < kernel.levels.size(); ++l) {
        const int m = kernel.levels[l].m;
        for (int a = 0; a < m; ++a)
            for (int b = a; b < m; ++b) {
                BlockSparse row;
                row.add(level_block[l], a, b, a == b ? 1.0 : 0.5);
                auto it = coefs[l].find({a, b});
                if (it != coefs[l].end())
                    for (const auto& [var, coef] : it->second) {
                        if (coef == 0.0) continue;
                        row.add(prog.scalar_block, var, var, -coef);
                        prog.links.push_back({level_block[l], a, b, var, coef});
                    }
                p.add_constraint(std::move(row), 0.0);
            }
    }
}

// Trace bound 1 on every level block in the orthonormal scaling.
void level_bounds(InvariantProgram& prog, long q) {
    const auto& kernel = *prog.kernel;
    for (const auto& level : kernel.levels) {
        BlockBound b;
        b.trace = 1.0;
        for (int i : level.indices) b.scaling.push_back(std::sqrt(gaussian_binomial(kernel.space.n, i, q).get_d()));
        prog.problem.bounds.push_back(std::move(b));
    }
}

}  // namespace

InvariantProgram invariant_theta_program(const SpaceSpec& space, int d, KernelCache* cache) {
    require(space.kind != SpaceSpec::Kind::explicit_graph, "invariant_theta_program: need a ball or projective space");
    require(d >= 1, "invariant_theta_program: need d >= 1");
    InvariantProgram prog;
    prog.kernel = fetch_kernel(space, cache, prog.kernel_cache_hit);
    const auto& kernel = *prog.kernel;
    const int n = space.n;
    const long q = space.q;

    std::vector<BigInt> sizes;
    for (const auto& o : pair_orbits(space)) {
        if (o.a > o.b) continue;
        if (o.dist > 0 && o.dist < d) continue;
        prog.variables.emplace_back(o.a, o.b, o.c);
        sizes.push_back(o.size);
    }
    std::map<std::tuple<int, int, int>, int> var_of;
    for (std::size_t v = 0; v < prog.variables.size(); ++v) var_of[prog.variables[v]] = static_cast<int>(v);

    std::vector<std::map<std::pair<int, int>, std::map<int, double>>> coefs(kernel.levels.size());
    for (std::size_t l = 0; l < kernel.levels.size(); ++l) {
        const auto& level = kernel.levels[l];
        for (const auto& [key, value] : level.entries) {
            const auto [i, j, c] = key;
            auto it = var_of.find(key);
            if (it == var_of.end()) continue;
            coefs[l][{level.position(i), level.position(j)}][it->second] +=
                scaled_coefficient(kernel, level, i, j, c);
        }
    }
    link_levels(prog, coefs);

    auto& p = prog.problem;
    BlockSparse norm;
    for (std::size_t v = 0; v < prog.variables.size(); ++v) {
        const auto [a, b, c] = prog.variables[v];
        const int vi = static_cast<int>(v);
        p.objective.add(prog.scalar_block, vi, vi, a == b ? 1.0 : 2.0);
        if (a == b && b == c) norm.add(prog.scalar_block, vi, vi, 1.0);
    }
    p.add_constraint(std::move(norm), 1.0);

    level_bounds(prog, q);
    BlockBound sb;
    for (std::size_t v = 0; v < prog.variables.size(); ++v) {
        const auto [a, b, c] = prog.variables[v];
        (void)c;
        const double xa = gaussian_binomial(n, a, q).get_d();
        const double xb = gaussian_binomial(n, b, q).get_d();
        sb.entries.push_back(sizes[v].get_d() / std::sqrt(xa * xb));
    }
    p.bounds.push_back(std::move(sb));
    return prog;
}

InvariantProgram triple_program(int n, PseudoDistance f, int m, KernelCache* cache) {
    require(n >= 1 && n <= 28, "triple_program: need 1 <= n <= 28");
    require(m >= 1, "triple_program: need m >= 1");
    InvariantProgram prog;
    const SpaceSpec space = SpaceSpec::hamming(n);
    prog.kernel = fetch_kernel(space, cache, prog.kernel_cache_hit);
    const auto& kernel = *prog.kernel;

    const auto labels = triple_orbits(n);
    std::map<std::tuple<int, int, int>, int> label_pos;
    for (std::size_t t = 0; t < labels.size(); ++t) label_pos[{labels[t].a, labels[t].b, labels[t].c}] = static_cast<int>(t);
    std::map<int, int> var_of_class;
    for (std::size_t t = 0; t < labels.size(); ++t) {
        const auto& lab = labels[t];
        if (!lab.canonical) continue;
        if (label_points_distinct(lab.a, lab.b, lab.c) &&
            orbit_pseudo_distance(f, lab.a, lab.b, lab.c, n) <= m - 1)
            continue;
        var_of_class[static_cast<int>(t)] = static_cast<int>(prog.variables.size());
        prog.variables.emplace_back(lab.a, lab.b, lab.c);
    }
    auto var_of_label = [&](int a, int b, int c) {
        const int cls = labels[label_pos.at({a, b, c})].class_index;
        auto it = var_of_class.find(cls);
        return it == var_of_class.end() ? -1 : it->second;
    };

    const double inv_space = std::ldexp(1.0, -n);
    std::vector<std::map<std::pair<int, int>, std::map<int, double>>> coefs(kernel.levels.size());
    for (std::size_t l = 0; l < kernel.levels.size(); ++l) {
        const auto& level = kernel.levels[l];
        for (const auto& [key, value] : level.entries) {
            const auto [i, j, c] = key;
            const int var = var_of_label(i, j, c);
            if (var < 0) continue;
            const double size = subspace::pair_orbit_size(1, n, i, j, c).get_d();
            coefs[l][{level.position(i), level.position(j)}][var] +=
                scaled_coefficient(kernel, level, i, j, c) * size * inv_space;
        }
    }
    link_levels(prog, coefs);

    auto& p = prog.problem;
    const int origin = var_of_label(0, 0, 0);
    BlockSparse fix;
    fix.add(prog.scalar_block, origin, origin, 1.0);
    p.add_constraint(std::move(fix), 1.0);
    std::map<int, double> obj;
    for (int a = 0; a <= n; ++a) obj[var_of_label(a, 0, 0)] += binomial(n, a).get_d();
    for (const auto& [var, coef] : obj) p.objective.add(prog.scalar_block, var, var, coef);

    level_bounds(prog, 1);
    // Every entry of the stabilizer matrix is at most its value at (t, t).
    BlockBound sb;
    sb.trace = 1.0;
    p.bounds.push_back(sb);
    return prog;
}

// ---------------------------------------------------------------------------
// Bounds

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

BoundResult finish(const BoundRequest& request, const SdpSolution& sol, double offset, Clock::time_point t0) {
    BoundResult r;
    r.request = request;
    r.primal = sol.primal_value + offset;
    r.dual = sol.dual_value + offset;
    r.gap = r.dual - r.primal;
    r.status = to_string(sol.status);
    r.iterations = sol.iterations;
    if (!sol.certified) r.warnings.push_back("dual value could not be certified");
    if (std::isfinite(r.dual)) {
        r.bound = integer_bound(r.dual);
        if (r.gap > 1e-6 * std::max(1.0, std::abs(r.dual)))
            r.warnings.push_back("duality gap exceeds 1e-6 relative");
    }
    r.wall_time_ms = elapsed_ms(t0);
    return r;
}

}  // namespace

BoundResult delsarte_lp_bound(int n, int d) {
    const auto t0 = Clock::now();
    BoundRequest request = BoundRequest::delsarte(n, d);
    request.validate();
    const LpSolution sol = solve_lp_exact(delsarte_lp(n, d));
    BoundResult r;
    r.request = request;
    const ExactScalar value = sol.value + 1;
    r.exact = value;
    r.primal = r.dual = to_double(value);
    r.gap = 0.0;
    mpz_fdiv_q(r.bound.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    r.iterations = sol.pivots;
    if (!sol.certificate_verified) {
        r.status = "numerical_failure";
        r.warnings.push_back("exact dual certificate failed verification");
    }
    r.wall_time_ms = elapsed_ms(t0);
    return r;
}

BoundResult theta_bound(const Graph& g, ThetaVariant variant, double tol) {
    const auto t0 = Clock::now();
    BoundRequest request = BoundRequest::theta(g, variant);
    request.tol = tol;
    request.validate();
    SdpOptions opt;
    opt.tol = tol;
    const SdpSolution sol = solve_sdp(theta_problem(g, variant), opt);
    return finish(request, sol, 0.0, t0);
}

namespace {

// c0 - <C, X> - sum_{r_j < 0} ub_j r_j with X first projected onto the cone.
double certified_value(const SdpProblem& lmi, BlockMatrix X, double c0, const std::vector<double>& ub,
                       const std::vector<int>& scalar_of) {
    for (std::size_t b = 0; b < X.blocks.size(); ++b) {
        if (lmi.blocks[b].kind == BlockKind::nonneg) {
            X.blocks[b] = X.blocks[b].cwiseMax(0.0);
            continue;
        }
        SymmetricEigen es;
        try {
            es = symmetric_eigen(X.blocks[b], true);
        } catch (const SolverError&) {
            return std::numeric_limits<double>::infinity();
        }
        X.blocks[b] = es.vectors * es.values.cwiseMax(0.0).asDiagonal() * es.vectors.transpose();
    }
    const Eigen::VectorXd AX = apply_constraints(lmi, X);
    double value = c0 - objective_value(lmi, X);
    for (std::size_t j = 0; j < lmi.rhs.size(); ++j) {
        const double r = lmi.rhs[j] - AX(static_cast<Eigen::Index>(j));
        if (r >= 0) continue;
        const double u = ub[scalar_of[j]];
        if (!std::isfinite(u)) return std::numeric_limits<double>::infinity();
        value += -u * r;
    }
    return value;
}

// X += sum_j w_j A_j with <A_i, X> = b_i afterwards (least Frobenius norm).
bool least_norm_correction(const SdpProblem& lmi, BlockMatrix& X) {
    const int m = static_cast<int>(lmi.constraints.size());
    std::map<std::tuple<int, int, int>, int> slot_of;
    std::vector<std::tuple<int, int, int>> slots;
    std::vector<Eigen::Triplet<double>> trip;
    for (int j = 0; j < m; ++j)
        for (const auto& t : lmi.constraints[j].entries) {
            const auto key = std::tuple{t.block, t.row, t.col};
            auto [it, fresh] = slot_of.try_emplace(key, static_cast<int>(slots.size()));
            if (fresh) slots.push_back(key);
            const bool off = lmi.blocks[t.block].kind == BlockKind::psd && t.row != t.col;
            trip.emplace_back(j, it->second, t.value * (off ? std::sqrt(2.0) : 1.0));
        }
    Eigen::SparseMatrix<double> S(m, static_cast<int>(slots.size()));
    S.setFromTriplets(trip.begin(), trip.end());
    const Eigen::SparseMatrix<double> G = S * S.transpose();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(G);
    if (ldlt.info() != Eigen::Success) return false;
    Eigen::VectorXd r(m);
    const Eigen::VectorXd AX = apply_constraints(lmi, X);
    for (int j = 0; j < m; ++j) r(j) = lmi.rhs[j] - AX(j);
    const Eigen::VectorXd w = ldlt.solve(r);
    if (!w.allFinite()) return false;
    const Eigen::VectorXd dx = S.transpose() * w;
    for (std::size_t s = 0; s < slots.size(); ++s) {
        const auto [b, row, col] = slots[s];
        if (lmi.blocks[b].kind == BlockKind::nonneg) {
            X.blocks[b](row, 0) += dx(static_cast<Eigen::Index>(s));
        } else if (row == col) {
            X.blocks[b](row, col) += dx(static_cast<Eigen::Index>(s));
        } else {
            const double v = dx(static_cast<Eigen::Index>(s)) / std::sqrt(2.0);
            X.blocks[b](row, col) += v;
            X.blocks[b](col, row) += v;
        }
    }
    return true;
}

// The invariant programs are solved in LMI form: the scalars become the
// free multipliers y of the solver's dual, with the normalization row used
// to eliminate one pivot scalar. The matrix multipliers X of the solver's
// primal then give the rigorous bound
//   value <= c0 - <C, X> - sum_{r_j < 0} ub_j r_j,   r = b - A(X),
// for X projected onto the PSD cone and 0 <= x_j <= ub_j.
struct InvariantSolution {
    double primal = 0.0;
    double dual = 0.0;
    SdpStatus status = SdpStatus::numerical_failure;
    int iterations = 0;
};

InvariantSolution solve_invariant(const InvariantProgram& prog, double tol) {
    const SdpProblem& src = prog.problem;
    const int nvars = static_cast<int>(prog.variables.size());
    const int sblock = prog.scalar_block;
    require(!src.constraints.empty(), "solve_invariant: empty program");

    // Normalization row: the last constraint, on scalars only.
    const auto& norm = src.constraints.back().entries;
    require(!norm.empty(), "solve_invariant: empty normalization");
    std::vector<double> e(nvars, 0.0);
    for (const auto& t : norm) {
        require(t.block == sblock, "solve_invariant: normalization must involve scalars only");
        e[t.row] += t.value;
    }
    const double rhs = src.rhs.back();
    int pivot = -1;
    for (int v = 0; v < nvars; ++v)
        if (e[v] != 0.0) {
            pivot = v;
            break;
        }
    require(pivot >= 0, "solve_invariant: degenerate normalization");
    const double ep = e[pivot];

    std::vector<double> cobj(nvars, 0.0);
    for (const auto& t : src.objective.entries) {
        require(t.block == sblock, "solve_invariant: objective must involve scalars only");
        cobj[t.row] += t.value;
    }
    std::vector<double> ub(nvars, std::numeric_limits<double>::infinity());
    if (!src.bounds.empty()) {
        const BlockBound& bb = src.bounds[sblock];
        for (int v = 0; v < nvars; ++v) ub[v] = bb.entries.empty() ? bb.trace : bb.entries[v];
    }

    // Free variables: every scalar except the pivot.
    std::vector<int> free_of(nvars, -1);
    std::vector<int> scalar_of;
    for (int v = 0; v < nvars; ++v)
        if (v != pivot) {
            free_of[v] = static_cast<int>(scalar_of.size());
            scalar_of.push_back(v);
        }
    const int m = static_cast<int>(scalar_of.size());

    SdpProblem lmi;
    lmi.blocks = src.blocks;
    std::vector<BlockSparse> A(m);
    // Level blocks: P = sum_v coef_v x_v with x_pivot substituted.
    std::map<std::tuple<int, int, int>, double> constant;
    for (const auto& t : prog.links) {
        if (t.variable == pivot) {
            constant[{t.block, t.row, t.col}] += t.coefficient * rhs / ep;
            for (int v = 0; v < nvars; ++v)
                if (v != pivot && e[v] != 0.0) A[free_of[v]].add(t.block, t.row, t.col, -t.coefficient * e[v] / ep);
        } else {
            A[free_of[t.variable]].add(t.block, t.row, t.col, t.coefficient);
        }
    }
    // Scalar block: x_j for j != pivot, and x_pivot = (rhs - sum e_j x_j) / e_p.
    for (int v = 0; v < nvars; ++v) {
        if (v == pivot) continue;
        A[free_of[v]].add(sblock, v, v, 1.0);
        if (e[v] != 0.0) A[free_of[v]].add(sblock, pivot, pivot, -e[v] / ep);
    }
    constant[{sblock, pivot, pivot}] += rhs / ep;
    // Z = sum y_j A_j - C, so C = -constant.
    for (const auto& [key, value] : constant) {
        const auto [blk, r, c] = key;
        if (value != 0.0) lmi.objective.add(blk, r, c, -value);
    }
    // max sum c_v x_v = c0 + sum_j cbar_j y_j; the solver minimizes b^T y.
    const double c0 = cobj[pivot] * rhs / ep;
    for (int j = 0; j < m; ++j) {
        const int v = scalar_of[j];
        const double cbar = cobj[v] - cobj[pivot] * e[v] / ep;
        lmi.add_constraint(std::move(A[j]), -cbar);
    }

    SdpOptions opt;
    opt.tol = tol;
    std::vector<BlockMatrix> trail;
    opt.on_iterate = [&](const BlockMatrix& X) { trail.push_back(X); };
    const SdpSolution sol = solve_sdp(lmi, opt);

    InvariantSolution out;
    out.status = sol.status;
    out.iterations = sol.iterations;
    out.primal = c0 - sol.raw_dual_value;

    // Later iterates are nearly optimal but close to the boundary; earlier
    // ones survive the correction better. Certify the tail of the trail.
    trail.push_back(sol.X);
    std::vector<BlockMatrix> candidates;
    const std::size_t first = trail.size() > 12 ? trail.size() - 12 : 0;
    for (std::size_t t = first; t < trail.size(); ++t) {
        candidates.push_back(trail[t]);
        BlockMatrix Xc = trail[t];
        if (least_norm_correction(lmi, Xc)) candidates.push_back(std::move(Xc));
    }
    auto certify = [&]() {
        double v = std::numeric_limits<double>::infinity();
        for (const auto& X : candidates) v = std::min(v, certified_value(lmi, X, c0, ub, scalar_of));
        return v;
    };
    out.dual = certify();
    // With x >= 0 and positive objective weights, x_j <= value / c_j for
    // any valid upper bound on the value; tighten and certify again.
    for (int round = 0; round < 3 && std::isfinite(out.dual); ++round) {
        bool tightened = false;
        for (int v = 0; v < nvars; ++v)
            if (cobj[v] > 0 && out.dual / cobj[v] < ub[v]) {
                ub[v] = out.dual / cobj[v];
                tightened = true;
            }
        if (!tightened) break;
        out.dual = std::min(out.dual, certify());
    }
    return out;
}

BoundResult finish_invariant(const BoundRequest& request, const InvariantProgram& prog, Clock::time_point t0) {
    const InvariantSolution sol = solve_invariant(prog, request.tol);
    BoundResult r;
    r.request = request;
    r.primal = sol.primal;
    r.dual = sol.dual;
    r.gap = r.dual - r.primal;
    r.status = to_string(sol.status);
    r.iterations = sol.iterations;
    r.kernel_cache_hit = prog.kernel_cache_hit;
    if (!std::isfinite(r.dual)) {
        r.warnings.push_back("dual value could not be certified");
    } else {
        r.bound = integer_bound(r.dual);
        if (r.gap > 1e-6 * std::max(1.0, std::abs(r.dual)))
            r.warnings.push_back("duality gap exceeds 1e-6 relative");
    }
    r.wall_time_ms = elapsed_ms(t0);
    return r;
}

BoundResult invariant_bound(const BoundRequest& request, const SpaceSpec& space, KernelCache* cache) {
    const auto t0 = Clock::now();
    const InvariantProgram prog = invariant_theta_program(space, request.d, cache);
    return finish_invariant(request, prog, t0);
}

}  // namespace

BoundResult ball_sdp_bound(int n, const std::vector<int>& weights, int d, double tol, KernelCache* cache) {
    BoundRequest request = BoundRequest::ball(n, weights, d);
    request.tol = tol;
    request.validate();
    return invariant_bound(request, SpaceSpec::hamming_ball(n, weights), cache);
}

BoundResult projective_sdp_bound(long q, int n, int d, double tol, KernelCache* cache) {
    BoundRequest request = BoundRequest::projective(q, n, d);
    request.tol = tol;
    request.validate();
    return invariant_bound(request, SpaceSpec::projective(q, n), cache);
}

BoundResult invariant_theta_bound(const SpaceSpec& space, int d, double tol, KernelCache* cache) {
    BoundRequest request;
    if (space.kind == SpaceSpec::Kind::projective) {
        request = BoundRequest::projective(space.q, space.n, d);
    } else {
        require(space.kind == SpaceSpec::Kind::hamming_ball, "invariant_theta_bound: need a ball or projective space");
        request = BoundRequest::ball(space.n, space.weights, d);
    }
    request.tol = tol;
    require(d >= 1, "invariant_theta_bound: need d >= 1");
    return invariant_bound(request, space, cache);
}

BoundResult triple_sdp_bound(int n, PseudoDistance f, int m, double tol, KernelCache* cache) {
    const auto t0 = Clock::now();
    BoundRequest request = BoundRequest::triple(n, f, m);
    request.tol = tol;
    request.validate();
    const InvariantProgram prog = triple_program(n, f, m, cache);
    return finish_invariant(request, prog, t0);
}

BoundResult run_bound(const BoundRequest& request, KernelCache* cache) {
    request.validate();
    switch (request.kind) {
    case BoundKind::delsarte: return delsarte_lp_bound(request.n, request.d);
    case BoundKind::theta: return theta_bound(request.graph, request.variant, request.tol);
    case BoundKind::ball: return ball_sdp_bound(request.n, request.weights, request.d, request.tol, cache);
    case BoundKind::projective: return projective_sdp_bound(request.q, request.n, request.d, request.tol, cache);
    case BoundKind::triple: return triple_sdp_bound(request.n, request.f, request.m, request.tol, cache);
    }
    throw RangeError("run_bound: unknown kind");
}

EquivalenceReport delsarte_equivalence(int n, int d, KernelCache* cache) {
    require(n >= 1 && d >= 1 && d <= n, "delsarte_equivalence: need 1 <= d <= n");
    EquivalenceReport rep;
    rep.delsarte = delsarte_lp_bound(n, d).exact.value();
    const BoundResult sdp = ball_sdp_bound(n, SpaceSpec::hamming(n).weights, d, 1e-8, cache);
    rep.status = sdp.status;
    rep.theta_prime = sdp.dual;
    const double lp = to_double(rep.delsarte);
    rep.relative_difference = std::abs(rep.theta_prime - lp) / lp;
    rep.agree = std::isfinite(rep.theta_prime) && rep.relative_difference <= 1e-6;
    return rep;
}

bool delsarte_equivalence_check(int n, int d) { return delsarte_equivalence(n, d).agree; }

}  // namespace codebounds
