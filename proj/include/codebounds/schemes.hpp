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

#ifndef CODEBOUNDS_SCHEMES_HPP
#define CODEBOUNDS_SCHEMES_HPP

#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "codebounds/exactmath.hpp"

namespace codebounds {

/// Simple undirected graph on vertices 0..vertices-1.
struct Graph {
    int vertices = 0;
    std::vector<std::pair<int, int>> edges;  // i < j, no duplicates

    /// Adjacency as bitmasks; only for vertices <= 64.
    std::vector<std::uint64_t> adjacency_masks() const;
    std::vector<std::vector<bool>> adjacency_matrix() const;
    Graph complement() const;
};

/// Parses {"vertices": v, "edges": [[i, j], ...]}; throws FormatError on
/// out-of-range indices, i >= j, or duplicates.
Graph graph_from_json(const nlohmann::json& j);
Graph load_graph(const std::string& path);
nlohmann::json graph_to_json(const Graph& g);

/// The underlying space of a coding problem together with its group action.
struct SpaceSpec {
    enum class Kind { hamming_ball, projective, explicit_graph };

    Kind kind = Kind::hamming_ball;
    int n = 0;
    long q = 1;                // 1 for Hamming balls
    std::vector<int> weights;  // allowed weights (balls) or all dimensions (projective)
    Graph graph;               // explicit_graph only

    /// Words of length n whose weight lies in `weights`.
    static SpaceSpec hamming_ball(int n, std::vector<int> weights);
    /// B_n(w) = words of weight at most w.
    static SpaceSpec hamming_radius(int n, int w);
    static SpaceSpec hamming(int n) { return hamming_radius(n, n); }
    /// All subspaces of GF(q)^n; q must be a prime power.
    static SpaceSpec projective(long q, int n);
    static SpaceSpec explicit_graph(Graph g);

    bool is_full_space() const;
    BigInt point_count() const;
    /// |X_i|: number of points of weight / dimension i.
    BigInt level_size(int i) const;
    bool has_level(int i) const;

    nlohmann::json to_json() const;
    static SpaceSpec from_json(const nlohmann::json& j);
    /// Stable textual key used for the kernel cache.
    std::string canonical_key() const;
};

bool is_prime_power(long q);

/// Ordered pair orbit X_{a,b,c}: |x| = a, |y| = b, |x ^ y| = c.
struct PairOrbit {
    int a = 0;
    int b = 0;
    int c = 0;
    BigInt size;
    int dist = 0;  // a + b - 2c
};

/// Labels (a, b, c) = (wt(x+t), wt(y+t), |supp(x+t) ^ supp(y+t)|) of triples.
struct TripleOrbit {
    int a = 0;
    int b = 0;
    int c = 0;
    BigInt size;             // number of pairs (x, y) for a fixed t
    bool canonical = false;  // smallest label of its S_3 class
    int class_index = 0;     // position of the class representative in the list
};

std::vector<PairOrbit> pair_orbits(const SpaceSpec& space);
std::vector<TripleOrbit> triple_orbits(int n);

bool valid_triple_label(int n, int a, int b, int c);
/// Generators of the induced S_3 action on labels.
std::tuple<int, int, int> swap_xy(int a, int b, int c);
std::tuple<int, int, int> swap_xt(int a, int b, int c);
/// Lexicographically smallest label in the S_3 class of (a, b, c).
std::tuple<int, int, int> canonical_triple_label(int n, int a, int b, int c);
/// True when x, y and t are pairwise distinct.
bool label_points_distinct(int a, int b, int c);

using Word = std::vector<std::uint8_t>;  // entries 0/1

Word word_from_string(const std::string& bits);
int hamming_distance(const Word& x, const Word& y);

/// Generalized Hamming distance: columns that are neither all-0 nor all-1.
int ghd(const std::vector<Word>& words);
/// Smallest radius of a Hamming ball containing all words.
int radial(const std::vector<Word>& words);
/// min_y (1/k) sum_i d(y, x_i).
ExactScalar avg_radial(const std::vector<Word>& words);

enum class PseudoDistance { ghd, radial, avg_radial };
PseudoDistance parse_pseudo_distance(const std::string& name);
std::string to_string(PseudoDistance f);

/// f evaluated on the representative (x, y, 0) of the label.
ExactScalar orbit_pseudo_distance(PseudoDistance f, int a, int b, int c, int n);
ExactScalar evaluate_pseudo_distance(PseudoDistance f, const std::vector<Word>& words);

/// Exact independence number, vertices <= 20.
int graph_alpha_bruteforce(const Graph& g);
/// Exact chromatic number, vertices <= 12.
int graph_chromatic_bruteforce(const Graph& g);

/// Gamma(n, d): vertices H_n, edges between words at distance 1..d-1.
Graph hamming_distance_graph(int n, int d);

/// Subspaces of GF(p)^n for prime p as reduced row echelon bases.
namespace finite_geometry {

using Vector = std::vector<int>;
using Basis = std::vector<Vector>;

int rank(long p, Basis rows);
Basis row_reduce(long p, Basis rows);
/// Every subspace, ordered by dimension; p prime, small n only.
std::vector<Basis> enumerate_subspaces(long p, int n);
int intersection_dim(long p, const Basis& x, const Basis& y);
/// Distance graph on materialized subspaces: edges at distance 1..d-1.
Graph projective_distance_graph(const std::vector<Basis>& points, long p, int d);

}  // namespace finite_geometry

}  // namespace codebounds

#endif  // CODEBOUNDS_SCHEMES_HPP
