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

#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include <Eigen/Dense>

namespace oracle {

using namespace codebounds;

long character_krawtchouk(int n, int k, int t) {
    const unsigned x = (1u << t) - 1;
    long sum = 0;
    for (unsigned z = 0; z < (1u << n); ++z) {
        if (std::popcount(z) != k) continue;
        sum += std::popcount(z & x) % 2 ? -1 : 1;
    }
    return sum;
}

long count_subspaces_gf2(int n, int k) {
    // A subspace is stored as the bitmask of its 2^k member vectors.
    std::set<std::vector<bool>> seen;
    const unsigned N = 1u << n;
    std::vector<unsigned> pick(k, 0);
    std::function<void(int)> rec = [&](int depth) {
        if (depth == k) {
            std::vector<bool> members(N, false);
            members[0] = true;
            std::vector<unsigned> span{0};
            for (unsigned g : pick) {
                const std::size_t s = span.size();
                for (std::size_t i = 0; i < s; ++i) {
                    const unsigned v = span[i] ^ g;
                    if (!members[v]) {
                        members[v] = true;
                        span.push_back(v);
                    }
                }
            }
            if (span.size() == (std::size_t{1} << k)) seen.insert(members);
            return;
        }
        for (unsigned v = 1; v < N; ++v) {
            pick[depth] = v;
            rec(depth + 1);
        }
    };
    rec(0);
    return static_cast<long>(seen.size());
}

long count_hamming_pairs(int n, int a, int b, int c) {
    long count = 0;
    for (unsigned x = 0; x < (1u << n); ++x) {
        if (std::popcount(x) != a) continue;
        for (unsigned y = 0; y < (1u << n); ++y)
            if (std::popcount(y) == b && std::popcount(x & y) == c) ++count;
    }
    return count;
}

int alpha(const Graph& g) {
    const int v = g.vertices;
    const auto adj = g.adjacency_matrix();
    int best = 0;
    for (unsigned s = 0; s < (1u << v); ++s) {
        const int size = std::popcount(s);
        if (size <= best) continue;
        bool ok = true;
        for (int i = 0; i < v && ok; ++i)
            if (s >> i & 1)
                for (int j = i + 1; j < v; ++j)
                    if ((s >> j & 1) && adj[i][j]) {
                        ok = false;
                        break;
                    }
        if (ok) best = size;
    }
    return best;
}

int chromatic(const Graph& g) {
    const int v = g.vertices;
    if (v == 0) return 0;
    const auto adj = g.adjacency_matrix();
    std::vector<int> color(v, -1);
    for (int k = 1; k <= v; ++k) {
        std::function<bool(int)> place = [&](int u) {
            if (u == v) return true;
            for (int c = 0; c < k; ++c) {
                bool ok = true;
                for (int w = 0; w < u; ++w)
                    if (adj[u][w] && color[w] == c) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                color[u] = c;
                if (place(u + 1)) return true;
            }
            color[u] = -1;
            return false;
        };
        if (place(0)) return k;
    }
    return v;
}

Graph random_graph(std::mt19937_64& rng, int vertices, double p) {
    std::bernoulli_distribution coin(p);
    Graph g;
    g.vertices = vertices;
    for (int i = 0; i < vertices; ++i)
        for (int j = i + 1; j < vertices; ++j)
            if (coin(rng)) g.edges.emplace_back(i, j);
    return g;
}

std::vector<unsigned> random_code(std::mt19937_64& rng, int n, double p) {
    std::bernoulli_distribution coin(p);
    std::vector<unsigned> code;
    for (unsigned x = 0; x < (1u << n); ++x)
        if (coin(rng)) code.push_back(x);
    if (code.empty()) code.push_back(std::uniform_int_distribution<unsigned>(0, (1u << n) - 1)(rng));
    return code;
}

std::vector<unsigned> random_greedy_code(std::mt19937_64& rng, int n, const std::vector<int>& weights, int d) {
    std::vector<unsigned> words;
    for (unsigned x = 0; x < (1u << n); ++x)
        if (std::find(weights.begin(), weights.end(), std::popcount(x)) != weights.end()) words.push_back(x);
    std::shuffle(words.begin(), words.end(), rng);
    std::vector<unsigned> code;
    for (unsigned x : words) {
        bool ok = true;
        for (unsigned y : code)
            if (std::popcount(x ^ y) < d) {
                ok = false;
                break;
            }
        if (ok) code.push_back(x);
    }
    return code;
}

BigInt positivity_sum(int n, int k, const std::vector<unsigned>& code) {
    std::vector<long> dist(n + 1, 0);
    for (unsigned x : code)
        for (unsigned y : code) ++dist[std::popcount(x ^ y)];
    BigInt sum = 0;
    for (int t = 0; t <= n; ++t) sum += BigInt(dist[t]) * character_krawtchouk(n, k, t);
    return sum;
}

int ghd3(unsigned x, unsigned y, unsigned z, int n) {
    const unsigned mask = (1u << n) - 1;
    const unsigned all_one = x & y & z;
    const unsigned all_zero = ~(x | y | z) & mask;
    return n - std::popcount(all_one) - std::popcount(all_zero);
}

int max_triple_code(int n, int m) {
    const unsigned N = 1u << n;
    if (N > 20) throw std::invalid_argument("max_triple_code: n too large");
    std::vector<std::uint32_t> bad;
    for (unsigned x = 0; x < N; ++x)
        for (unsigned y = x + 1; y < N; ++y)
            for (unsigned z = y + 1; z < N; ++z)
                if (ghd3(x, y, z, n) <= m - 1) bad.push_back((1u << x) | (1u << y) | (1u << z));
    int best = 0;
    for (std::uint32_t s = 0; s < (std::uint32_t{1} << N); ++s) {
        const int size = std::popcount(s);
        if (size <= best) continue;
        bool ok = true;
        for (std::uint32_t b : bad)
            if ((s & b) == b) {
                ok = false;
                break;
            }
        if (ok) best = size;
    }
    return best;
}

namespace {

using Subset = std::array<unsigned, 3>;  // sorted, padded by repeating the last element

Subset make_subset(unsigned x, unsigned y, unsigned z) {
    std::array<unsigned, 3> s{x, y, z};
    std::sort(s.begin(), s.end());
    // Collapse repeats: {x, x, y} and {x, y, y} are the same set.
    std::vector<unsigned> u(s.begin(), s.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    while (u.size() < 3) u.push_back(u.back());
    return {u[0], u[1], u[2]};
}

int distinct_count(const Subset& s) { return 1 + (s[1] != s[0]) + (s[2] != s[1]); }

bool forced_zero(const Subset& s, int n, int m) {
    return distinct_count(s) == 3 && ghd3(s[0], s[1], s[2], n) <= m - 1;
}

DirectSolve run(const SdpProblem& p) {
    SdpOptions opt;
    opt.tol = 1e-8;
    opt.max_iterations = 200;
    const SdpSolution sol = solve_sdp(p, opt);
    return {sol.dual_value, sol.primal_value, to_string(sol.status)};
}

}  // namespace

DirectSolve triple_direct(int n, int m) {
    if (n > 4) throw std::invalid_argument("triple_direct: n <= 4");
    const unsigned N = 1u << n;
    std::map<Subset, int> var;
    for (unsigned x = 0; x < N; ++x)
        for (unsigned y = x; y < N; ++y)
            for (unsigned z = y; z < N; ++z) {
                const Subset s = make_subset(x, y, z);
                if (!forced_zero(s, n, m) && !var.count(s)) var.emplace(s, static_cast<int>(var.size()));
            }
    SdpProblem p;
    std::vector<int> blocks;
    for (unsigned z = 0; z < N; ++z) blocks.push_back(p.add_block(BlockKind::psd, static_cast<int>(N)));
    const int F = p.add_block(BlockKind::nonneg, static_cast<int>(var.size()));

    for (unsigned z = 0; z < N; ++z)
        for (unsigned x = 0; x < N; ++x)
            for (unsigned y = x; y < N; ++y) {
                BlockSparse row;
                row.add(blocks[z], static_cast<int>(x), static_cast<int>(y), x == y ? 1.0 : 0.5);
                auto it = var.find(make_subset(x, y, z));
                if (it != var.end()) row.add(F, it->second, it->second, -1.0);
                p.add_constraint(std::move(row), 0.0);
            }
    BlockSparse norm;
    for (unsigned x = 0; x < N; ++x) {
        const int v = var.at(make_subset(x, x, x));
        norm.add(F, v, v, 1.0);
        p.objective.add(F, v, v, 1.0);
        for (unsigned y = x + 1; y < N; ++y) {
            const int w = var.at(make_subset(x, y, y));
            p.objective.add(F, w, w, 2.0);
        }
    }
    p.add_constraint(std::move(norm), 1.0);

    // tr P_z = sum_x F({x, z}) <= sum_x F({x}) = 1 and every F value is <= 1.
    BlockBound b;
    b.trace = 1.0;
    p.bounds.assign(p.blocks.size(), b);
    return run(p);
}

DirectSolve triple_translation_reduced(int n, int m) {
    if (n > 6) throw std::invalid_argument("triple_translation_reduced: n <= 6");
    const unsigned N = 1u << n;
    auto canonical = [&](const Subset& s) {
        Subset best = s;
        for (unsigned t = 0; t < N; ++t) best = std::min(best, make_subset(s[0] ^ t, s[1] ^ t, s[2] ^ t));
        return best;
    };
    std::map<Subset, int> var;
    std::map<std::pair<unsigned, unsigned>, int> entry_var;  // (x, y) of the z = 0 block
    for (unsigned x = 0; x < N; ++x)
        for (unsigned y = x; y < N; ++y) {
            const Subset s = make_subset(0, x, y);
            if (forced_zero(s, n, m)) {
                entry_var[{x, y}] = -1;
                continue;
            }
            const Subset c = canonical(s);
            auto it = var.find(c);
            if (it == var.end()) it = var.emplace(c, static_cast<int>(var.size())).first;
            entry_var[{x, y}] = it->second;
        }
    SdpProblem p;
    const int P = p.add_block(BlockKind::psd, static_cast<int>(N));
    const int F = p.add_block(BlockKind::nonneg, static_cast<int>(var.size()));
    for (const auto& [xy, v] : entry_var) {
        const auto [x, y] = xy;
        BlockSparse row;
        row.add(P, static_cast<int>(x), static_cast<int>(y), x == y ? 1.0 : 0.5);
        if (v >= 0) row.add(F, v, v, -1.0);
        p.add_constraint(std::move(row), 0.0);
    }
    // N F({0}) = 1; objective N sum_y F({0, y}).
    const int single = entry_var.at({0, 0});
    BlockSparse norm;
    norm.add(F, single, single, static_cast<double>(N));
    p.add_constraint(std::move(norm), 1.0);
    std::map<int, double> obj;
    for (unsigned y = 0; y < N; ++y) obj[entry_var.at({0, y})] += static_cast<double>(N);
    for (const auto& [v, c] : obj) p.objective.add(F, v, v, c);

    BlockBound b;
    b.trace = 1.0;
    p.bounds.assign(p.blocks.size(), b);
    return run(p);
}

std::pair<double, double> c5_certificate() {
    const double pi = std::acos(-1.0);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(5, 5);
    for (int i = 0; i < 5; ++i) {
        A(i, (i + 1) % 5) = A((i + 1) % 5, i) = 1.0;
    }
    // Feasible B: 1/5 on the diagonal, c on distance-2 pairs, 0 on edges.
    const double c = 1.0 / (10.0 * -std::cos(4.0 * pi / 5.0));
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(5, 5) / 5.0;
    for (int i = 0; i < 5; ++i) B(i, (i + 2) % 5) = B((i + 2) % 5, i) = c;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    if (es.eigenvalues().minCoeff() < -1e-12) throw std::logic_error("c5_certificate: B not PSD");
    const double lower = B.sum();
    // Dual: theta <= lambda_max(J + s A) for any s.
    const double s = -5.0 / (2.0 - 2.0 * std::cos(4.0 * pi / 5.0));
    Eigen::MatrixXd M = Eigen::MatrixXd::Ones(5, 5) + s * A;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(M);
    const double upper = em.eigenvalues().maxCoeff();
    return {lower, upper};
}

}  // namespace oracle
