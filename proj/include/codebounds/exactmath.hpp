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
 * @file exactmath.hpp
 * @brief Exact rational arithmetic and the polynomial kernels of the binary
 *        Hamming scheme and of the subspace lattice over GF(q).
 *
 * Everything here is computed without rounding. Floating point only enters
 * when a caller converts a finished ExactScalar with to_double().
 *
 * Hahn convention. For 0 <= k <= n/2 and k <= i <= j <= n-k the value
 * hahn(q, n, i, j, k, t) is the per-pair kernel of the k-th isotypic
 * component evaluated on the pair orbit {|x| = i, |y| = j, |x ^ y| = i - t},
 * divided by its value at t = 0 (x contained in y). Hence Q_0 == 1 and
 * Q_k(0) == 1. Any other normalization differs from this one by a positive
 * factor depending on (k, i, j) only, which leaves every positive
 * semidefiniteness verdict unchanged.
 */

#ifndef CODEBOUNDS_EXACTMATH_HPP
#define CODEBOUNDS_EXACTMATH_HPP

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <tuple>

namespace codebounds {

/// Arbitrary-precision rational, always canonical (lowest terms, den > 0).
using ExactScalar = mpq_class;
using BigInt = mpz_class;

/// "num/den" with den omitted when it is 1.
std::string to_string(const ExactScalar& x);
/// Accepts "num/den" or "num"; throws FormatError otherwise.
ExactScalar parse_exact(const std::string& text);
double to_double(const ExactScalar& x);

/// C(n, k); zero outside 0 <= k <= n.
BigInt binomial(long n, long k);
/// Gaussian binomial [n choose k]_q; equals binomial(n, k) when q == 1.
BigInt gaussian_binomial(long n, long k, long q);
/// q^e for e >= 0.
BigInt ipow(long q, long e);

/// K_k^n(t) = sum_j (-1)^j C(t, j) C(n - t, k - j).
BigInt krawtchouk(int n, int k, int t);

/// Brute-force character-sum identity for all pairs of H_n and all k.
/// Only meant as an oracle; n is capped at 12.
bool krawtchouk_character_check(int n);

/// Normalized q-Hahn value Q_k(n, i, j; t); q == 1 gives the Hahn family
/// of the Johnson scheme. See the file comment for the convention.
ExactScalar hahn(long q, int n, int i, int j, int k, int t);

namespace subspace {

/// Scalar by which U_{m->i}^T U_{k->i} acts on level-k harmonic functions,
/// relative to U_{k->m}. U_{a->b}(x, z) = [z subset of x].
BigInt lift_factor(long q, int n, int k, int m, int i);

/// Orbit-summed kernel <U_{k->i} f, M^c_{ij} U_{k->j} f> / |f|^2 for a
/// harmonic f of level k; M^c_{ij} is the indicator of the pair orbit (i,j,c).
BigInt orbit_kernel(long q, int n, int k, int i, int j, int c);

/// Number of ordered pairs (x, y) with |x| = i, |y| = j, |x ^ y| = c.
BigInt pair_orbit_size(long q, int n, int i, int j, int c);

}  // namespace subspace

/// Immutable table of polynomial values, filled at construction.
class PolynomialTable {
public:
    enum class Family { krawtchouk, hahn, q_hahn };

    /// All K_k^n(t), 0 <= k, t <= n.
    static PolynomialTable krawtchouk(int n);
    /// All Q_k(n, i, j; t) over the valid index range; q == 1 is plain Hahn.
    static PolynomialTable hahn(long q, int n);

    Family family() const { return family_; }
    int n() const { return n_; }
    long q() const { return q_; }
    std::size_t size() const { return values_.size(); }

    /// Krawtchouk lookup (i, j unused).
    const ExactScalar& at(int k, int t) const;
    const ExactScalar& at(int k, int i, int j, int t) const;

private:
    PolynomialTable(Family family, int n, long q) : family_(family), n_(n), q_(q) {}

    Family family_;
    int n_;
    long q_;
    std::map<std::tuple<int, int, int, int>, ExactScalar> values_;
};

}  // namespace codebounds

#endif  // CODEBOUNDS_EXACTMATH_HPP
