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

#include "codebounds/schemes.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "codebounds/error.hpp"

namespace codebounds {

using detail::require;

// ---------------------------------------------------------------------------
// Graph

std::vector<std::uint64_t> Graph::adjacency_masks() const {
    require(vertices <= 64, "adjacency_masks: more than 64 vertices");
    std::vector<std::uint64_t> adj(static_cast<std::size_t>(vertices), 0);
    for (auto [i, j] : edges) {
        adj[static_cast<std::size_t>(i)] |= std::uint64_t{1} << j;
        adj[static_cast<std::size_t>(j)] |= std::uint64_t{1} << i;
    }
    return adj;
}

std::vector<std::vector<bool>> Graph::adjacency_matrix() const {
    std::vector<std::vector<bool>> adj(static_cast<std::size_t>(vertices),
                                       std::vector<bool>(static_cast<std::size_t>(vertices)));
    for (auto [i, j] : edges) {
        adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
        adj[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = true;
    }
    return adj;
}

Graph Graph::complement() const {
    const auto adj = adjacency_matrix();
    Graph out;
    out.vertices = vertices;
    for (int i = 0; i < vertices; ++i)
        for (int j = i + 1; j < vertices; ++j)
            if (!adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) out.edges.emplace_back(i, j);
    return out;
}

Graph graph_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
        throw FormatError("graph JSON needs 'vertices' and 'edges'");
    if (!j["vertices"].is_number_integer() || j["vertices"].get<long>() < 0)
        throw FormatError("graph JSON: 'vertices' must be a nonnegative integer");
    if (!j["edges"].is_array()) throw FormatError("graph JSON: 'edges' must be an array");
    Graph g;
    g.vertices = j["vertices"].get<int>();
    std::set<std::pair<int, int>> seen;
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            throw FormatError("graph JSON: each edge must be [i, j]");
        const int a = e[0].get<int>();
        const int b = e[1].get<int>();
        if (a < 0 || b >= g.vertices || a >= b)
            throw FormatError("graph JSON: edge [" + std::to_string(a) + ", " + std::to_string(b) +
                              "] violates 0 <= i < j < vertices");
        if (!seen.emplace(a, b).second)
            throw FormatError("graph JSON: duplicate edge [" + std::to_string(a) + ", " + std::to_string(b) + "]");
        g.edges.emplace_back(a, b);
    }
    return g;
}

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open graph file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("graph file '" + path + "': " + e.what());
    }
    return graph_from_json(j);
}

nlohmann::json graph_to_json(const Graph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (auto [i, j] : g.edges) edges.push_back({i, j});
    return {{"vertices", g.vertices}, {"edges", edges}};
}

// ---------------------------------------------------------------------------
// SpaceSpec

bool is_prime_power(long q) {
    if (q < 2) return false;
    long p = 2;
    while (p * p <= q && q % p != 0) ++p;
    if (q % p != 0) return true;  // q itself is prime
    while (q % p == 0) q /= p;
    return q == 1;
}

SpaceSpec SpaceSpec::hamming_ball(int n, std::vector<int> weights) {
    require(n >= 1, "hamming_ball: n must be >= 1");
    require(!weights.empty(), "hamming_ball: weight set must be nonempty");
    std::sort(weights.begin(), weights.end());
    weights.erase(std::unique(weights.begin(), weights.end()), weights.end());
    require(weights.front() >= 0 && weights.back() <= n, "hamming_ball: weights must lie in [0, n]");
    SpaceSpec s;
    s.kind = Kind::hamming_ball;
    s.n = n;
    s.q = 1;
    s.weights = std::move(weights);
    return s;
}

SpaceSpec SpaceSpec::hamming_radius(int n, int w) {
    require(w >= 0 && w <= n, "hamming_radius: need 0 <= w <= n");
    std::vector<int> ws(static_cast<std::size_t>(w + 1));
    for (int i = 0; i <= w; ++i) ws[static_cast<std::size_t>(i)] = i;
    return hamming_ball(n, std::move(ws));
}

SpaceSpec SpaceSpec::projective(long q, int n) {
    require(is_prime_power(q), "projective: q must be a prime power");
    require(n >= 1, "projective: n must be >= 1");
    SpaceSpec s;
    s.kind = Kind::projective;
    s.n = n;
    s.q = q;
    for (int i = 0; i <= n; ++i) s.weights.push_back(i);
    return s;
}

SpaceSpec SpaceSpec::explicit_graph(Graph g) {
    SpaceSpec s;
    s.kind = Kind::explicit_graph;
    s.n = g.vertices;
    s.graph = std::move(g);
    return s;
}

bool SpaceSpec::is_full_space() const {
    return kind != Kind::explicit_graph && static_cast<int>(weights.size()) == n + 1;
}

bool SpaceSpec::has_level(int i) const { return std::binary_search(weights.begin(), weights.end(), i); }

BigInt SpaceSpec::level_size(int i) const {
    if (kind == Kind::explicit_graph) throw RangeError("level_size: explicit graphs have no levels");
    return gaussian_binomial(n, i, q);
}

BigInt SpaceSpec::point_count() const {
    if (kind == Kind::explicit_graph) return graph.vertices;
    BigInt total = 0;
    for (int w : weights) total += level_size(w);
    return total;
}

nlohmann::json SpaceSpec::to_json() const {
    switch (kind) {
    case Kind::hamming_ball:
        return {{"kind", "hamming_ball"}, {"n", n}, {"weights", weights}};
    case Kind::projective:
        return {{"kind", "projective"}, {"q", q}, {"n", n}};
    case Kind::explicit_graph: {
        auto j = graph_to_json(graph);
        j["kind"] = "explicit_graph";
        return j;
    }
    }
    return {};
}

SpaceSpec SpaceSpec::from_json(const nlohmann::json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "hamming_ball") return hamming_ball(j.at("n").get<int>(), j.at("weights").get<std::vector<int>>());
        if (kind == "projective") return projective(j.at("q").get<long>(), j.at("n").get<int>());
        if (kind == "explicit_graph") return explicit_graph(graph_from_json(j));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("SpaceSpec: ") + e.what());
    }
    throw FormatError("SpaceSpec: unknown kind");
}

std::string SpaceSpec::canonical_key() const { return to_json().dump(); }

// ---------------------------------------------------------------------------
// Orbits

std::vector<PairOrbit> pair_orbits(const SpaceSpec& space) {
    if (space.kind == SpaceSpec::Kind::explicit_graph)
        throw RangeError("pair_orbits: explicit graphs carry no orbit structure");
    std::vector<PairOrbit> out;
    const int n = space.n;
    for (int a : space.weights)
        for (int b : space.weights)
            for (int c = std::max(0, a + b - n); c <= std::min(a, b); ++c) {
                PairOrbit o;
                o.a = a;
                o.b = b;
                o.c = c;
                o.size = subspace::pair_orbit_size(space.q, n, a, b, c);
                o.dist = a + b - 2 * c;
                out.push_back(std::move(o));
            }
    return out;
}

bool valid_triple_label(int n, int a, int b, int c) {
    return a >= 0 && b >= 0 && a <= n && b <= n && c >= std::max(0, a + b - n) && c <= std::min(a, b);
}

std::tuple<int, int, int> swap_xy(int a, int b, int c) { return {b, a, c}; }

std::tuple<int, int, int> swap_xt(int a, int b, int c) { return {a, a + b - 2 * c, a - c}; }

std::tuple<int, int, int> canonical_triple_label(int n, int a, int b, int c) {
    require(valid_triple_label(n, a, b, c), "canonical_triple_label: invalid label");
    std::set<std::tuple<int, int, int>> seen{{a, b, c}};
    std::vector<std::tuple<int, int, int>> frontier{{a, b, c}};
    while (!frontier.empty()) {
        auto [x, y, z] = frontier.back();
        frontier.pop_back();
        for (auto next : {swap_xy(x, y, z), swap_xt(x, y, z)})
            if (seen.insert(next).second) frontier.push_back(next);
    }
    return *seen.begin();
}

bool label_points_distinct(int a, int b, int c) { return a > 0 && b > 0 && a + b - 2 * c > 0; }

std::vector<TripleOrbit> triple_orbits(int n) {
    require(n >= 1, "triple_orbits: n must be >= 1");
    std::vector<TripleOrbit> out;
    std::map<std::tuple<int, int, int>, int> position;
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b)
            for (int c = std::max(0, a + b - n); c <= std::min(a, b); ++c) {
                TripleOrbit t;
                t.a = a;
                t.b = b;
                t.c = c;
                t.size = subspace::pair_orbit_size(1, n, a, b, c);
                position[{a, b, c}] = static_cast<int>(out.size());
                out.push_back(std::move(t));
            }
    for (auto& t : out) {
        const auto rep = canonical_triple_label(n, t.a, t.b, t.c);
        t.class_index = position.at(rep);
        t.canonical = rep == std::tuple{t.a, t.b, t.c};
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pseudo-distances

Word word_from_string(const std::string& bits) {
    Word w;
    w.reserve(bits.size());
    for (char ch : bits) {
        if (ch != '0' && ch != '1') throw FormatError("word_from_string: expected 0/1 characters");
        w.push_back(static_cast<std::uint8_t>(ch - '0'));
    }
    return w;
}

int hamming_distance(const Word& x, const Word& y) {
    require(x.size() == y.size(), "hamming_distance: length mismatch");
    int d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) d += x[i] != y[i];
    return d;
}

namespace {

void check_lengths(const std::vector<Word>& words) {
    require(!words.empty(), "pseudo-distance: need at least one word");
    for (const auto& w : words) require(w.size() == words.front().size(), "pseudo-distance: length mismatch");
}

// Column type (bit i = entry of word i) -> number of columns of that type.
std::map<unsigned, int> column_types(const std::vector<Word>& words) {
    std::map<unsigned, int> types;
    for (std::size_t col = 0; col < words.front().size(); ++col) {
        unsigned t = 0;
        for (std::size_t i = 0; i < words.size(); ++i) t |= static_cast<unsigned>(words[i][col] != 0) << i;
        ++types[t];
    }
    return types;
}

}  // namespace

int ghd(const std::vector<Word>& words) {
    check_lengths(words);
    const unsigned all = words.size() >= 32 ? ~0u : (1u << words.size()) - 1;
    int d = 0;
    for (auto [t, count] : column_types(words))
        if (t != 0 && t != all) d += count;
    return d;
}

int radial(const std::vector<Word>& words) {
    check_lengths(words);
    require(words.size() <= 16, "radial: at most 16 words");
    const std::size_t k = words.size();
    const unsigned all = (1u << k) - 1;
    // Constant columns are matched by the center for free; only the others are searched.
    std::vector<std::pair<unsigned, int>> types;
    for (auto [t, count] : column_types(words))
        if (t != 0 && t != all) types.emplace_back(t, count);

    std::vector<int> dist(k, 0);
    int best = std::numeric_limits<int>::max();
    std::function<void(std::size_t)> search = [&](std::size_t idx) {
        const int current = *std::max_element(dist.begin(), dist.end());
        if (current >= best) return;
        if (idx == types.size()) {
            best = current;
            return;
        }
        const auto [t, count] = types[idx];
        for (int ones = 0; ones <= count; ++ones) {
            for (std::size_t i = 0; i < k; ++i) dist[i] += ((t >> i) & 1u) ? count - ones : ones;
            search(idx + 1);
            for (std::size_t i = 0; i < k; ++i) dist[i] -= ((t >> i) & 1u) ? count - ones : ones;
        }
    };
    search(0);
    return best;
}

ExactScalar avg_radial(const std::vector<Word>& words) {
    check_lengths(words);
    long minority = 0;
    const auto k = static_cast<int>(words.size());
    for (auto [t, count] : column_types(words)) {
        const int ones = std::popcount(t);
        minority += static_cast<long>(std::min(ones, k - ones)) * count;
    }
    ExactScalar r(minority, k);
    r.canonicalize();
    return r;
}

PseudoDistance parse_pseudo_distance(const std::string& name) {
    if (name == "ghd") return PseudoDistance::ghd;
    if (name == "radial") return PseudoDistance::radial;
    if (name == "avg_radial") return PseudoDistance::avg_radial;
    throw RangeError("unknown pseudo-distance '" + name + "' (expected ghd, radial, avg_radial)");
}

std::string to_string(PseudoDistance f) {
    switch (f) {
    case PseudoDistance::ghd: return "ghd";
    case PseudoDistance::radial: return "radial";
    case PseudoDistance::avg_radial: return "avg_radial";
    }
    return "?";
}

ExactScalar evaluate_pseudo_distance(PseudoDistance f, const std::vector<Word>& words) {
    switch (f) {
    case PseudoDistance::ghd: return ghd(words);
    case PseudoDistance::radial: return radial(words);
    case PseudoDistance::avg_radial: return avg_radial(words);
    }
    return 0;
}

ExactScalar orbit_pseudo_distance(PseudoDistance f, int a, int b, int c, int n) {
    require(valid_triple_label(n, a, b, c), "orbit_pseudo_distance: invalid label");
    const auto len = static_cast<std::size_t>(n);
    Word x(len, 0), y(len, 0), t(len, 0);
    for (int i = 0; i < a; ++i) x[static_cast<std::size_t>(i)] = 1;
    // y overlaps x in its last c positions and continues past it.
    for (int i = a - c; i < a - c + b; ++i) y[static_cast<std::size_t>(i)] = 1;
    return evaluate_pseudo_distance(f, {x, y, t});
}

// ---------------------------------------------------------------------------
// Brute-force graph invariants

namespace {

int alpha_rec(std::uint64_t candidates, const std::vector<std::uint64_t>& adj) {
    if (candidates == 0) return 0;
    // Branch on a vertex of maximum degree inside the candidate set.
    int pick = -1, best_deg = -1;
    for (std::uint64_t rest = candidates; rest; rest &= rest - 1) {
        const int v = std::countr_zero(rest);
        const int deg = std::popcount(adj[static_cast<std::size_t>(v)] & candidates);
        if (deg > best_deg) {
            best_deg = deg;
            pick = v;
        }
    }
    const std::uint64_t bit = std::uint64_t{1} << pick;
    if (best_deg == 0) return std::popcount(candidates);
    const int with = 1 + alpha_rec(candidates & ~bit & ~adj[static_cast<std::size_t>(pick)], adj);
    const int without = alpha_rec(candidates & ~bit, adj);
    return std::max(with, without);
}

}  // namespace

int graph_alpha_bruteforce(const Graph& g) {
    require(g.vertices <= 20, "graph_alpha_bruteforce: at most 20 vertices");
    if (g.vertices == 0) return 0;
    const auto adj = g.adjacency_masks();
    return alpha_rec((std::uint64_t{1} << g.vertices) - 1, adj);
}

int graph_chromatic_bruteforce(const Graph& g) {
    require(g.vertices <= 12, "graph_chromatic_bruteforce: at most 12 vertices");
    const int v = g.vertices;
    if (v == 0) return 0;
    const auto adj = g.adjacency_masks();
    const std::uint32_t full = (1u << v) - 1;
    std::vector<bool> independent(full + 1, false);
    for (std::uint32_t s = 0; s <= full; ++s) {
        bool ok = true;
        for (std::uint32_t rest = s; rest && ok; rest &= rest - 1) {
            const int u = std::countr_zero(rest);
            ok = (adj[static_cast<std::size_t>(u)] & s) == 0;
        }
        independent[s] = ok;
    }
    std::vector<int> colors(full + 1, v + 1);
    colors[0] = 0;
    for (std::uint32_t s = 1; s <= full; ++s) {
        const std::uint32_t low = s & (~s + 1);
        // Color class containing the lowest vertex of s.
        for (std::uint32_t sub = s; sub; sub = (sub - 1) & s)
            if ((sub & low) && independent[sub]) colors[s] = std::min(colors[s], colors[s & ~sub] + 1);
    }
    return colors[full];
}

Graph hamming_distance_graph(int n, int d) {
    require(n >= 1 && n <= 16, "hamming_distance_graph: need 1 <= n <= 16");
    Graph g;
    g.vertices = 1 << n;
    for (int x = 0; x < g.vertices; ++x)
        for (int y = x + 1; y < g.vertices; ++y) {
            const int dist = std::popcount(static_cast<unsigned>(x ^ y));
            if (dist > 0 && dist < d) g.edges.emplace_back(x, y);
        }
    return g;
}

// ---------------------------------------------------------------------------
// Finite geometry over GF(p)

namespace finite_geometry {

namespace {

long mod(long a, long p) { return ((a % p) + p) % p; }

long inverse_mod(long a, long p) {
    long result = 1, base = mod(a, p), e = p - 2;
    while (e > 0) {
        if (e & 1) result = result * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return result;
}

}  // namespace

Basis row_reduce(long p, Basis rows) {
    if (rows.empty()) return rows;
    const std::size_t cols = rows.front().size();
    std::size_t lead = 0;
    for (std::size_t col = 0; col < cols && lead < rows.size(); ++col) {
        std::size_t pivot = lead;
        while (pivot < rows.size() && mod(rows[pivot][col], p) == 0) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[lead], rows[pivot]);
        const long inv = inverse_mod(rows[lead][col], p);
        for (auto& v : rows[lead]) v = static_cast<int>(mod(v * inv, p));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r == lead) continue;
            const long factor = mod(rows[r][col], p);
            if (factor == 0) continue;
            for (std::size_t cc = 0; cc < cols; ++cc)
                rows[r][cc] = static_cast<int>(mod(rows[r][cc] - factor * rows[lead][cc], p));
        }
        ++lead;
    }
    rows.resize(lead);
    return rows;
}

int rank(long p, Basis rows) { return static_cast<int>(row_reduce(p, std::move(rows)).size()); }

std::vector<Basis> enumerate_subspaces(long p, int n) {
    bool prime = p >= 2;
    for (long f = 2; f * f <= p && prime; ++f) prime = p % f != 0;
    require(prime, "enumerate_subspaces: p must be prime");
    require(n >= 1 && n <= 6, "enumerate_subspaces: need 1 <= n <= 6");
    std::vector<Basis> out;
    for (int k = 0; k <= n; ++k) {
        // Choose pivot columns, then fill the free entries right of each pivot.
        std::vector<int> pivots(static_cast<std::size_t>(k));
        std::function<void(int, int)> choose = [&](int idx, int start) {
            if (idx == k) {
                std::vector<std::pair<int, int>> free_slots;
                for (int r = 0; r < k; ++r)
                    for (int col = pivots[static_cast<std::size_t>(r)] + 1; col < n; ++col)
                        if (std::find(pivots.begin(), pivots.end(), col) == pivots.end())
                            free_slots.emplace_back(r, col);
                std::vector<int> values(free_slots.size(), 0);
                while (true) {
                    Basis b(static_cast<std::size_t>(k), Vector(static_cast<std::size_t>(n), 0));
                    for (int r = 0; r < k; ++r)
                        b[static_cast<std::size_t>(r)][static_cast<std::size_t>(pivots[static_cast<std::size_t>(r)])] = 1;
                    for (std::size_t s = 0; s < free_slots.size(); ++s)
                        b[static_cast<std::size_t>(free_slots[s].first)][static_cast<std::size_t>(free_slots[s].second)] =
                            values[s];
                    out.push_back(std::move(b));
                    std::size_t pos = 0;
                    while (pos < values.size() && ++values[pos] == p) values[pos++] = 0;
                    if (pos == values.size()) break;
                }
                return;
            }
            for (int col = start; col < n; ++col) {
                pivots[static_cast<std::size_t>(idx)] = col;
                choose(idx + 1, col + 1);
            }
        };
        choose(0, 0);
    }
    return out;
}

int intersection_dim(long p, const Basis& x, const Basis& y) {
    Basis both = x;
    both.insert(both.end(), y.begin(), y.end());
    return static_cast<int>(x.size() + y.size()) - rank(p, std::move(both));
}

Graph projective_distance_graph(const std::vector<Basis>& points, long p, int d) {
    Graph g;
    g.vertices = static_cast<int>(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const int c = intersection_dim(p, points[i], points[j]);
            const int dist = static_cast<int>(points[i].size() + points[j].size()) - 2 * c;
            if (dist > 0 && dist < d) g.edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
    return g;
}

}  // namespace finite_geometry

}  // namespace codebounds
