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
#include <array>
#include <bit>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "codebounds/error.hpp"
#include "codebounds/schemes.hpp"
#include "oracles.hpp"

using namespace codebounds;

namespace {

const PairOrbit* find_orbit(const std::vector<PairOrbit>& orbits, int a, int b, int c) {
    for (const auto& o : orbits)
        if (o.a == a && o.b == b && o.c == c) return &o;
    return nullptr;
}

Word to_word(unsigned x, int n) {
    Word w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = x >> i & 1;
    return w;
}

Graph complete_graph(int v) {
    Graph g;
    g.vertices = v;
    for (int i = 0; i < v; ++i)
        for (int j = i + 1; j < v; ++j) g.edges.emplace_back(i, j);
    return g;
}

}  // namespace

TEST(PairOrbits, Examples) {
    const auto h3 = pair_orbits(SpaceSpec::hamming(3));
    ASSERT_NE(find_orbit(h3, 1, 1, 0), nullptr);
    EXPECT_EQ(find_orbit(h3, 1, 1, 0)->size, 6);
    EXPECT_EQ(find_orbit(h3, 1, 1, 0)->dist, 2);
    for (int n : {1, 5, 12}) EXPECT_EQ(find_orbit(pair_orbits(SpaceSpec::hamming(n)), 0, 0, 0)->size, 1);
    const auto p2 = pair_orbits(SpaceSpec::projective(2, 2));
    ASSERT_NE(find_orbit(p2, 1, 1, 0), nullptr);
    EXPECT_EQ(find_orbit(p2, 1, 1, 0)->size, 6);
    EXPECT_THROW(pair_orbits(SpaceSpec::explicit_graph(complete_graph(3))), RangeError);
}

TEST(PairOrbits, SizesSumToSquare) {
    for (int n = 1; n <= 24; ++n)
        for (int w : {0, n / 3, n / 2, n}) {
            const SpaceSpec s = SpaceSpec::hamming_radius(n, w);
            BigInt total = 0;
            for (const auto& o : pair_orbits(s)) {
                EXPECT_GT(o.size, 0);
                EXPECT_EQ(o.dist, o.a + o.b - 2 * o.c);
                total += o.size;
            }
            ASSERT_EQ(total, s.point_count() * s.point_count()) << n << " " << w;
        }
    const SpaceSpec odd = SpaceSpec::hamming_ball(10, {1, 4, 7});
    BigInt total = 0;
    for (const auto& o : pair_orbits(odd)) total += o.size;
    EXPECT_EQ(total, odd.point_count() * odd.point_count());
    for (long q : {2, 3})
        for (int n = 1; n <= 6; ++n) {
            const SpaceSpec s = SpaceSpec::projective(q, n);
            BigInt sum = 0;
            for (const auto& o : pair_orbits(s)) sum += o.size;
            ASSERT_EQ(sum, s.point_count() * s.point_count()) << q << " " << n;
        }
}

TEST(PairOrbits, HammingSizesMatchCounting) {
    for (int n = 1; n <= 7; ++n)
        for (const auto& o : pair_orbits(SpaceSpec::hamming(n)))
            EXPECT_EQ(o.size, oracle::count_hamming_pairs(n, o.a, o.b, o.c));
}

TEST(PairOrbits, ProjectiveSizesMatchEnumeration) {
    for (int n = 1; n <= 4; ++n) {
        const auto pts = finite_geometry::enumerate_subspaces(2, n);
        ASSERT_EQ(BigInt(static_cast<long>(pts.size())), SpaceSpec::projective(2, n).point_count());
        std::map<std::tuple<int, int, int>, long> counted;
        for (const auto& x : pts)
            for (const auto& y : pts)
                ++counted[{static_cast<int>(x.size()), static_cast<int>(y.size()),
                           finite_geometry::intersection_dim(2, x, y)}];
        const auto orbits = pair_orbits(SpaceSpec::projective(2, n));
        EXPECT_EQ(orbits.size(), counted.size());
        for (const auto& o : orbits) EXPECT_EQ(o.size, (counted[{o.a, o.b, o.c}]));
    }
}

TEST(PairOrbits, LabelInvariantUnderGroup) {
    std::mt19937_64 rng(7);
    const int n = 12;
    std::uniform_int_distribution<unsigned> word(0, (1u << n) - 1);
    for (int trial = 0; trial < 1000; ++trial) {
        const unsigned x = word(rng), y = word(rng);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        auto apply = [&](unsigned v) {
            unsigned out = 0;
            for (int i = 0; i < n; ++i)
                if (v >> i & 1) out |= 1u << perm[i];
            return out;
        };
        const unsigned px = apply(x), py = apply(y);
        EXPECT_EQ(std::popcount(px), std::popcount(x));
        EXPECT_EQ(std::popcount(py), std::popcount(y));
        EXPECT_EQ(std::popcount(px & py), std::popcount(x & y));
        const unsigned t = word(rng);
        EXPECT_EQ(std::popcount((px ^ t) ^ (py ^ t)), std::popcount(x ^ y));
    }
}

TEST(PairOrbits, ProjectiveLabelInvariantUnderGL) {
    std::mt19937_64 rng(11);
    for (int n = 2; n <= 4; ++n) {
        const auto pts = finite_geometry::enumerate_subspaces(2, n);
        std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
        std::bernoulli_distribution coin(0.5);
        for (int trial = 0; trial < 1000 / 3; ++trial) {
            finite_geometry::Basis g;
            do {
                g.assign(n, finite_geometry::Vector(n));
                for (auto& row : g)
                    for (auto& e : row) e = coin(rng);
            } while (finite_geometry::rank(2, g) < n);
            auto image = [&](const finite_geometry::Basis& b) {
                finite_geometry::Basis out;
                for (const auto& v : b) {
                    finite_geometry::Vector w(n, 0);
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) w[j] = (w[j] + v[i] * g[i][j]) % 2;
                    out.push_back(w);
                }
                return out;
            };
            const auto& x = pts[pick(rng)];
            const auto& y = pts[pick(rng)];
            const auto gx = image(x), gy = image(y);
            EXPECT_EQ(finite_geometry::rank(2, gx), static_cast<int>(x.size()));
            EXPECT_EQ(finite_geometry::rank(2, gy), static_cast<int>(y.size()));
            EXPECT_EQ(finite_geometry::intersection_dim(2, gx, gy), finite_geometry::intersection_dim(2, x, y));
        }
    }
}

TEST(TripleOrbits, Examples) {
    const auto t2 = triple_orbits(2);
    const auto it = std::find_if(t2.begin(), t2.end(), [](const TripleOrbit& t) { return t.a == 0 && t.b == 0 && t.c == 0; });
    ASSERT_NE(it, t2.end());
    EXPECT_EQ(it->size, 1);
    EXPECT_EQ(swap_xt(1, 2, 1), std::make_tuple(1, 1, 0));
}

TEST(TripleOrbits, SizesAndActionGenerators) {
    for (int n = 1; n <= 10; ++n) {
        const auto labels = triple_orbits(n);
        BigInt total = 0;
        std::map<std::tuple<int, int, int>, BigInt> size_of;
        for (const auto& t : labels) {
            total += t.size;
            size_of[{t.a, t.b, t.c}] = t.size;
        }
        EXPECT_EQ(total, ipow(2, 2 * n));  // times 2^n choices of t gives 2^{3n}
        for (const auto& t : labels) {
            auto [a1, b1, c1] = swap_xy(t.a, t.b, t.c);
            ASSERT_TRUE(valid_triple_label(n, a1, b1, c1));
            EXPECT_EQ(swap_xy(a1, b1, c1), std::make_tuple(t.a, t.b, t.c));
            auto [a2, b2, c2] = swap_xt(t.a, t.b, t.c);
            ASSERT_TRUE(valid_triple_label(n, a2, b2, c2));
            EXPECT_EQ(swap_xt(a2, b2, c2), std::make_tuple(t.a, t.b, t.c));
            // swap_xy * swap_xt is a 3-cycle.
            auto cyc = [](std::tuple<int, int, int> l) {
                auto [a, b, c] = l;
                auto [p, q, r] = swap_xt(a, b, c);
                return swap_xy(p, q, r);
            };
            const auto l0 = std::make_tuple(t.a, t.b, t.c);
            EXPECT_EQ(cyc(cyc(cyc(l0))), l0);
            EXPECT_EQ(size_of.at({a1, b1, c1}), t.size);
            EXPECT_EQ(size_of.at({a2, b2, c2}), t.size);
            const auto& rep = labels[static_cast<std::size_t>(t.class_index)];
            EXPECT_TRUE(rep.canonical);
            EXPECT_EQ(rep.size, t.size);
        }
    }
}

TEST(TripleOrbits, ClassesMatchBruteForceAtN4) {
    const int n = 4;
    const unsigned N = 1u << n;
    auto label = [](unsigned x, unsigned y, unsigned t) {
        return std::make_tuple(std::popcount(x ^ t), std::popcount(y ^ t), std::popcount((x ^ t) & (y ^ t)));
    };
    // Union labels of all orderings of every triple with t = 0.
    std::map<std::tuple<int, int, int>, std::tuple<int, int, int>> parent;
    std::function<std::tuple<int, int, int>(std::tuple<int, int, int>)> root = [&](std::tuple<int, int, int> l) {
        auto it = parent.find(l);
        if (it == parent.end()) return parent[l] = l;
        return it->second == l ? l : it->second = root(it->second);
    };
    for (unsigned x = 0; x < N; ++x)
        for (unsigned y = 0; y < N; ++y) {
            const std::array<unsigned, 3> pts{x, y, 0};
            std::array<int, 3> idx{0, 1, 2};
            const auto base = root(label(x, y, 0));
            do {
                const auto other = root(label(pts[idx[0]], pts[idx[1]], pts[idx[2]]));
                parent[other] = base;
            } while (std::next_permutation(idx.begin(), idx.end()));
        }
    std::set<std::tuple<int, int, int>> classes;
    for (const auto& [l, p] : parent) classes.insert(root(l));
    int canonical = 0;
    for (const auto& t : triple_orbits(n)) {
        canonical += t.canonical;
        // Same class by both methods.
        const auto& rep = triple_orbits(n)[static_cast<std::size_t>(t.class_index)];
        EXPECT_EQ(root({t.a, t.b, t.c}), root({rep.a, rep.b, rep.c}));
    }
    EXPECT_EQ(canonical, static_cast<int>(classes.size()));
}

TEST(PseudoDistance, Examples) {
    EXPECT_EQ(ghd({word_from_string("000"), word_from_string("011"), word_from_string("101")}), 3);
    const Word x = word_from_string("0110101");
    const Word y = word_from_string("1100110");
    EXPECT_EQ(ghd({x, x, x}), 0);
    EXPECT_EQ(ghd({x, y}), hamming_distance(x, y));
    EXPECT_EQ(radial({word_from_string("000"), word_from_string("111")}), 2);
    EXPECT_EQ(radial({x, x}), 0);
    EXPECT_THROW(ghd({word_from_string("01"), word_from_string("011")}), RangeError);
    EXPECT_THROW(word_from_string("012"), FormatError);
}

TEST(PseudoDistance, BruteForceCenters) {
    std::mt19937_64 rng(3);
    for (int n = 1; n <= 10; ++n) {
        std::uniform_int_distribution<unsigned> word(0, (1u << n) - 1);
        for (int trial = 0; trial < 30; ++trial) {
            const int k = 2 + trial % 3;
            std::vector<unsigned> xs;
            std::vector<Word> ws;
            for (int i = 0; i < k; ++i) {
                xs.push_back(word(rng));
                ws.push_back(to_word(xs.back(), n));
            }
            int best_max = n + 1, best_sum = k * n + 1;
            for (unsigned c = 0; c < (1u << n); ++c) {
                int mx = 0, sum = 0;
                for (unsigned v : xs) {
                    mx = std::max(mx, std::popcount(c ^ v));
                    sum += std::popcount(c ^ v);
                }
                best_max = std::min(best_max, mx);
                best_sum = std::min(best_sum, sum);
            }
            ASSERT_EQ(radial(ws), best_max);
            ASSERT_EQ(avg_radial(ws), oracle::ratio(best_sum, k));
            if (k == 3 && n <= 6) {
                ASSERT_EQ(avg_radial(ws), oracle::ratio(ghd(ws), 3));
                ASSERT_EQ(oracle::ghd3(xs[0], xs[1], xs[2], n), ghd(ws));
            }
        }
    }
}

TEST(PseudoDistance, OrbitValuesMatchRepresentatives) {
    for (int n = 1; n <= 8; ++n) {
        // One explicit triple per label, found by search with t = 0.
        std::map<std::tuple<int, int, int>, std::pair<unsigned, unsigned>> rep;
        for (unsigned x = 0; x < (1u << n); ++x)
            for (unsigned y = 0; y < (1u << n); ++y)
                rep.try_emplace({std::popcount(x), std::popcount(y), std::popcount(x & y)}, x, y);
        const auto labels = triple_orbits(n);
        ASSERT_EQ(rep.size(), labels.size());
        for (const auto& t : labels) {
            const auto [x, y] = rep.at({t.a, t.b, t.c});
            const std::vector<Word> ws{to_word(x, n), to_word(y, n), to_word(0, n)};
            for (auto f : {PseudoDistance::ghd, PseudoDistance::radial, PseudoDistance::avg_radial})
                ASSERT_EQ(orbit_pseudo_distance(f, t.a, t.b, t.c, n), evaluate_pseudo_distance(f, ws));
            EXPECT_EQ(orbit_pseudo_distance(PseudoDistance::ghd, t.a, t.b, t.c, n), t.a + t.b - t.c);
            EXPECT_EQ(orbit_pseudo_distance(PseudoDistance::avg_radial, t.a, t.b, t.c, n), oracle::ratio(t.a + t.b - t.c, 3));
        }
        for (auto f : {PseudoDistance::ghd, PseudoDistance::radial, PseudoDistance::avg_radial})
            EXPECT_EQ(orbit_pseudo_distance(f, 0, 0, 0, n), 0);
    }
    EXPECT_THROW(orbit_pseudo_distance(PseudoDistance::ghd, 3, 0, 1, 4), RangeError);
}

TEST(GraphOracles, Examples) {
    Graph c5;
    c5.vertices = 5;
    c5.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}};
    EXPECT_EQ(graph_alpha_bruteforce(c5), 2);
    EXPECT_EQ(graph_alpha_bruteforce(complete_graph(6)), 1);
    EXPECT_EQ(graph_chromatic_bruteforce(complete_graph(6)), 6);
    EXPECT_EQ(graph_alpha_bruteforce(hamming_distance_graph(4, 3)), 2);
    Graph big;
    big.vertices = 21;
    EXPECT_THROW(graph_alpha_bruteforce(big), RangeError);
    big.vertices = 13;
    EXPECT_THROW(graph_chromatic_bruteforce(big), RangeError);
}

TEST(GraphOracles, AgreeWithIndependentSearch) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
        const Graph g = oracle::random_graph(rng, 1 + trial % 10, 0.4);
        EXPECT_EQ(graph_alpha_bruteforce(g), oracle::alpha(g));
        EXPECT_EQ(graph_chromatic_bruteforce(g), oracle::chromatic(g));
    }
}

TEST(GraphJson, ParseAndReject) {
    const Graph g = graph_from_json(nlohmann::json::parse(R"({"vertices": 3, "edges": [[0, 1], [1, 2]]})"));
    EXPECT_EQ(g.vertices, 3);
    EXPECT_EQ(g.edges.size(), 2u);
    EXPECT_EQ(graph_from_json(graph_to_json(g)).edges, g.edges);
    EXPECT_EQ(g.complement().edges, (std::vector<std::pair<int, int>>{{0, 2}}));
    EXPECT_THROW(graph_from_json(nlohmann::json::parse(R"({"vertices": 3, "edges": [[1, 0]]})")), FormatError);
    EXPECT_THROW(graph_from_json(nlohmann::json::parse(R"({"vertices": 3, "edges": [[0, 3]]})")), FormatError);
    EXPECT_THROW(graph_from_json(nlohmann::json::parse(R"({"vertices": 3, "edges": [[0, 1], [0, 1]]})")), FormatError);
    EXPECT_THROW(graph_from_json(nlohmann::json::parse(R"({"edges": []})")), FormatError);
}

TEST(SpaceSpec, CountsAndJson) {
    EXPECT_EQ(SpaceSpec::hamming_radius(6, 3).point_count(), 42);
    EXPECT_EQ(SpaceSpec::projective(2, 4).point_count(), 67);
    EXPECT_THROW(SpaceSpec::projective(6, 3), RangeError);
    EXPECT_THROW(SpaceSpec::hamming_ball(4, {}), RangeError);
    for (const SpaceSpec& s : {SpaceSpec::hamming_ball(9, {2, 5}), SpaceSpec::projective(3, 4)}) {
        const SpaceSpec back = SpaceSpec::from_json(s.to_json());
        EXPECT_EQ(back.canonical_key(), s.canonical_key());
        EXPECT_EQ(back.point_count(), s.point_count());
    }
}
