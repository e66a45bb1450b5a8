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

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>

#include "codebounds/blockdiag.hpp"
#include "codebounds/bounds.hpp"
#include "codebounds/error.hpp"
#include "codebounds/solvers.hpp"

namespace codebounds {

namespace {

struct Materialized {
    std::vector<int> level;                 // weight / dimension of each point
    std::vector<std::vector<int>> meet;     // |x ^ y| or dim(x cap y)
};

Materialized materialize(const SpaceSpec& space) {
    Materialized mat;
    if (space.kind == SpaceSpec::Kind::hamming_ball) {
        std::vector<unsigned> words;
        for (unsigned x = 0; x < (1u << space.n); ++x)
            if (space.has_level(std::popcount(x))) words.push_back(x);
        for (unsigned x : words) mat.level.push_back(std::popcount(x));
        mat.meet.assign(words.size(), std::vector<int>(words.size()));
        for (std::size_t i = 0; i < words.size(); ++i)
            for (std::size_t j = 0; j < words.size(); ++j) mat.meet[i][j] = std::popcount(words[i] & words[j]);
        return mat;
    }
    const auto subspaces = finite_geometry::enumerate_subspaces(space.q, space.n);
    for (const auto& b : subspaces) mat.level.push_back(static_cast<int>(b.size()));
    mat.meet.assign(subspaces.size(), std::vector<int>(subspaces.size()));
    for (std::size_t i = 0; i < subspaces.size(); ++i)
        for (std::size_t j = i; j < subspaces.size(); ++j)
            mat.meet[i][j] = mat.meet[j][i] = finite_geometry::intersection_dim(space.q, subspaces[i], subspaces[j]);
    return mat;
}

double relative_min(const Eigen::VectorXd& ev) {
    const double scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    return scale > 0 ? ev(0) / scale : 0.0;
}

Eigen::MatrixXd gaussian(std::mt19937_64& rng, int rows, int cols) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = nd(rng);
    return m;
}

}  // namespace

nlohmann::json KernelValidationReport::to_json() const {
    return {{"space", space},
            {"points", points},
            {"dimension_ok", dimension_ok},
            {"sufficiency_ok", sufficiency_ok},
            {"completeness_ok", completeness_ok},
            {"theta_ok", theta_ok},
            {"worst_sufficiency", worst_sufficiency},
            {"worst_completeness", worst_completeness},
            {"theta_d", theta_d},
            {"symmetrized_theta", symmetrized_theta},
            {"unsymmetrized_theta", unsymmetrized_theta},
            {"passed", passed()}};
}

KernelValidationReport validate_kernel_small(const SpaceSpec& space, const KernelValidationOptions& options) {
    detail::require(space.kind != SpaceSpec::Kind::explicit_graph,
                    "validate_kernel_small: need a ball or projective space");
    if (space.kind == SpaceSpec::Kind::projective)
        detail::require(space.q == 2 && space.n <= 4, "validate_kernel_small: projective spaces need q = 2, n <= 4");
    else
        detail::require(space.n <= 12, "validate_kernel_small: Hamming spaces need n <= 12");
    detail::require(space.point_count() <= 4096, "validate_kernel_small: at most 4096 points");

    KernelValidationReport rep;
    rep.space = space.canonical_key();
    const Materialized mat = materialize(space);
    const int v = static_cast<int>(mat.level.size());
    rep.points = v;
    const BlockKernel kernel = build_kernel(space);
    const long q = space.q;
    const int n = space.n;

    // Orbit bookkeeping.
    std::map<std::tuple<int, int, int>, BigInt> counted;
    for (int x = 0; x < v; ++x)
        for (int y = 0; y < v; ++y) counted[{mat.level[x], mat.level[y], mat.meet[x][y]}] += 1;
    rep.dimension_ok = kernel.dimension() == BigInt(v);
    BigInt total = 0;
    for (const auto& o : pair_orbits(space)) {
        auto it = counted.find({o.a, o.b, o.c});
        const BigInt seen = it == counted.end() ? BigInt(0) : it->second;
        if (seen != o.size) rep.dimension_ok = false;
        total += o.size;
    }
    if (total != BigInt(v) * v) rep.dimension_ok = false;

    // Per-pair kernel in the orthonormal scaling, per level.
    std::vector<std::map<std::tuple<int, int, int>, double>> per_pair(kernel.levels.size());
    for (std::size_t l = 0; l < kernel.levels.size(); ++l) {
        const auto& level = kernel.levels[l];
        for (const auto& [key, value] : level.entries) {
            const auto [i, j, c] = key;
            const double size = subspace::pair_orbit_size(q, n, i, j, c).get_d();
            const double norm = std::sqrt(to_double(level.norms.at(i)) * to_double(level.norms.at(j)));
            per_pair[l][key] = to_double(value) / (size * norm);
        }
    }
    auto per_pair_value = [&](std::size_t l, int a, int b, int c) {
        const auto key = a <= b ? std::tuple{a, b, c} : std::tuple{b, a, c};
        auto it = per_pair[l].find(key);
        return it == per_pair[l].end() ? 0.0 : it->second;
    };

    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<int> coin(0, 1);

    // Sufficiency: sum_k <F_k, E_k(x, y)> is PSD for PSD F_k.
    rep.worst_sufficiency = 0.0;
    for (int t = 0; t < options.trials; ++t) {
        std::vector<Eigen::MatrixXd> F;
        for (const auto& level : kernel.levels) {
            std::uniform_int_distribution<int> rank_dist(1, level.m);
            const Eigen::MatrixXd A = gaussian(rng, level.m, rank_dist(rng));
            F.push_back(A * A.transpose());
        }
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(v, v);
        for (std::size_t l = 0; l < kernel.levels.size(); ++l) {
            const auto& level = kernel.levels[l];
            for (int x = 0; x < v; ++x) {
                const int px = level.position(mat.level[x]);
                if (px < 0) continue;
                for (int y = 0; y < v; ++y) {
                    const int py = level.position(mat.level[y]);
                    if (py < 0) continue;
                    M(x, y) += F[l](px, py) * per_pair_value(l, mat.level[x], mat.level[y], mat.meet[x][y]);
                }
            }
        }
        M = 0.5 * (M + M.transpose()).eval();
        rep.worst_sufficiency = std::min(rep.worst_sufficiency, relative_min(symmetric_eigen(M).values));
    }
    rep.sufficiency_ok = rep.worst_sufficiency >= -options.eig_tol;

    // Completeness: orbit averages of PSD matrices give PSD blocks, and the
    // block spectra match the spectrum of the invariant matrix.
    auto orbit_average = [&](const Eigen::MatrixXd& P) {
        std::map<std::tuple<int, int, int>, std::pair<double, long>> acc;
        for (int x = 0; x < v; ++x)
            for (int y = 0; y < v; ++y) {
                const int a = std::min(mat.level[x], mat.level[y]);
                const int b = std::max(mat.level[x], mat.level[y]);
                auto& slot = acc[{a, b, mat.meet[x][y]}];
                slot.first += P(x, y);
                slot.second += 1;
            }
        OrbitFunction y;
        for (const auto& [key, s] : acc) y[key] = s.first / static_cast<double>(s.second);
        return y;
    };
    auto explicit_matrix = [&](const OrbitFunction& y) {
        Eigen::MatrixXd B(v, v);
        for (int x = 0; x < v; ++x)
            for (int z = 0; z < v; ++z) {
                const int a = std::min(mat.level[x], mat.level[z]);
                const int b = std::max(mat.level[x], mat.level[z]);
                B(x, z) = y.at({a, b, mat.meet[x][z]});
            }
        return B;
    };
    auto block_range = [&](const OrbitFunction& y) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& blk : assemble_blocks(kernel, y, BlockScaling::orthonormal)) {
            const Eigen::VectorXd ev = symmetric_eigen(blk).values;
            lo = std::min(lo, ev(0));
            hi = std::max(hi, ev(ev.size() - 1));
        }
        return std::pair{lo, hi};
    };

    rep.worst_completeness = 0.0;
    bool spectra_agree = true;
    for (int t = 0; t < options.trials; ++t) {
        std::uniform_int_distribution<int> rank_dist(1, v);
        const Eigen::MatrixXd G = gaussian(rng, v, rank_dist(rng));
        const OrbitFunction y = orbit_average(G * G.transpose());
        const auto [lo, hi] = block_range(y);
        const double scale = std::max(std::abs(lo), std::abs(hi));
        if (scale > 0) rep.worst_completeness = std::min(rep.worst_completeness, lo / scale);

        // A random invariant matrix, usually indefinite.
        OrbitFunction z;
        std::normal_distribution<double> nd(0.0, 1.0);
        for (const auto& [key, value] : y) {
            (void)value;
            z[key] = coin(rng) ? nd(rng) : 0.0;
        }
        const Eigen::MatrixXd B = explicit_matrix(z);
        const Eigen::VectorXd ev = symmetric_eigen(B).values;
        const auto [zlo, zhi] = block_range(z);
        const double bscale = std::max({1.0, std::abs(ev(0)), std::abs(ev(v - 1))});
        if (std::abs(zlo - ev(0)) > 1e-8 * bscale || std::abs(zhi - ev(v - 1)) > 1e-8 * bscale)
            spectra_agree = false;
    }
    rep.completeness_ok = rep.worst_completeness >= -options.eig_tol && spectra_agree;

    // theta' of the distance graph, with and without symmetry reduction.
    int d = options.d;
    if (d <= 0) d = space.kind == SpaceSpec::Kind::projective ? 2 : (n >= 3 ? 3 : 2);
    rep.theta_d = d;
    Graph g;
    g.vertices = v;
    for (int x = 0; x < v; ++x)
        for (int y = x + 1; y < v; ++y) {
            const int dist = mat.level[x] + mat.level[y] - 2 * mat.meet[x][y];
            if (dist > 0 && dist < d) g.edges.emplace_back(x, y);
        }
    rep.symmetrized_theta = invariant_theta_bound(space, d, 1e-9).dual;
    if (v <= 80) {
        rep.unsymmetrized_theta = theta_bound(g, ThetaVariant::prime, 1e-9).dual;
    } else {
        FirstOrderOptions fo;
        fo.tol = 1e-8;
        const ThetaBracket br = theta_first_order(g.adjacency_matrix(), true, fo);
        rep.unsymmetrized_theta = 0.5 * (br.lower + br.upper);
    }
    rep.theta_ok = std::abs(rep.symmetrized_theta - rep.unsymmetrized_theta) <=
                   options.theta_tol * std::max(1.0, std::abs(rep.unsymmetrized_theta));
    return rep;
}

}  // namespace codebounds
