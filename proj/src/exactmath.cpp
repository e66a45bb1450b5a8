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

#include "codebounds/exactmath.hpp"

#include <bit>
#include <vector>

#include "codebounds/error.hpp"

namespace codebounds {

std::string to_string(const ExactScalar& x) {
    if (x.get_den() == 1) return x.get_num().get_str();
    return x.get_num().get_str() + "/" + x.get_den().get_str();
}

ExactScalar parse_exact(const std::string& text) {
    auto valid_int = [](const std::string& s) {
        if (s.empty()) return false;
        std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (start == s.size()) return false;
        for (std::size_t i = start; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    const auto slash = text.find('/');
    std::string num = text.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
        throw FormatError("not a rational literal: '" + text + "'");
    if (num[0] == '+') num.erase(0, 1);
    BigInt d(den);
    if (d == 0) throw FormatError("zero denominator in '" + text + "'");
    ExactScalar r(BigInt(num), d);
    r.canonicalize();
    return r;
}

double to_double(const ExactScalar& x) { return x.get_d(); }

BigInt binomial(long n, long k) {
    if (n < 0 || k < 0 || k > n) return 0;
    BigInt r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

BigInt ipow(long q, long e) {
    detail::require(e >= 0, "ipow: negative exponent");
    BigInt r;
    BigInt base(q);
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), static_cast<unsigned long>(e));
    return r;
}

BigInt gaussian_binomial(long n, long k, long q) {
    detail::require(q >= 1, "gaussian_binomial: q must be >= 1");
    if (n < 0 || k < 0 || k > n) return 0;
    if (q == 1) return binomial(n, k);
    if (k > n - k) k = n - k;
    // After r factors the running value is [n choose r]_q, so every division is exact.
    BigInt acc = 1;
    for (long r = 0; r < k; ++r) {
        acc *= ipow(q, n - r) - 1;
        BigInt den = ipow(q, r + 1) - 1;
        mpz_divexact(acc.get_mpz_t(), acc.get_mpz_t(), den.get_mpz_t());
    }
    return acc;
}

BigInt krawtchouk(int n, int k, int t) {
    detail::require(n >= 0 && k >= 0 && k <= n && t >= 0 && t <= n,
                    "krawtchouk: need 0 <= k, t <= n");
    BigInt sum = 0;
    for (int j = 0; j <= k; ++j) {
        BigInt term = binomial(t, j) * binomial(n - t, k - j);
        if (j % 2) sum -= term;
        else sum += term;
    }
    return sum;
}

bool krawtchouk_character_check(int n) {
    detail::require(n >= 0 && n <= 12, "krawtchouk_character_check: n must be in [0, 12]");
    const unsigned words = 1u << n;
    // chi_z(x) chi_z(y) = (-1)^{z . (x xor y)}, so each pair reduces to u = x xor y.
    std::vector<long> sums(static_cast<std::size_t>(n + 1));
    for (unsigned u = 0; u < words; ++u) {
        std::fill(sums.begin(), sums.end(), 0);
        for (unsigned z = 0; z < words; ++z) {
            const int sign = (std::popcount(z & u) % 2) ? -1 : 1;
            sums[static_cast<std::size_t>(std::popcount(z))] += sign;
        }
        const int dist = std::popcount(u);
        for (int k = 0; k <= n; ++k)
            if (BigInt(sums[static_cast<std::size_t>(k)]) != krawtchouk(n, k, dist)) return false;
    }
    return true;
}

namespace subspace {

namespace {

long half_pairs(long s) { return s * (s - 1) / 2; }

// Coefficient of the level-k harmonic component that sits at intersection
// dimension r with a fixed m-space: (-1)^{k-r} q^{C(k-r,2)} [k choose r]_q.
BigInt harmonic_weight(long q, int k, int r) {
    BigInt w = ipow(q, half_pairs(k - r)) * gaussian_binomial(k, r, q);
    return ((k - r) % 2) ? BigInt(-w) : w;
}

}  // namespace

BigInt lift_factor(long q, int n, int k, int m, int i) {
    detail::require(0 <= k && k <= m && m <= i && i <= n - k,
                    "lift_factor: need 0 <= k <= m <= i <= n - k");
    BigInt sum = 0;
    for (int r = 0; r <= k; ++r) {
        const int free_dim = n - m - k + r;
        sum += gaussian_binomial(free_dim, i - m - k + r, q) * harmonic_weight(q, k, r);
    }
    return sum;
}

BigInt orbit_kernel(long q, int n, int k, int i, int j, int c) {
    detail::require(0 <= k && 2 * k <= n && k <= i && i <= n - k && k <= j && j <= n - k,
                    "orbit_kernel: need k <= i, j <= n - k");
    if (c < 0 || c > std::min(i, j) || c < i + j - n) return 0;
    BigInt sum = 0;
    for (int m = std::max(c, k); m <= std::min(i, j); ++m) {
        BigInt term = ipow(q, half_pairs(m - c)) * gaussian_binomial(m, c, q) *
                      lift_factor(q, n, k, m, i) * lift_factor(q, n, k, m, j) *
                      lift_factor(q, n, k, k, m);
        if ((m - c) % 2) sum -= term;
        else sum += term;
    }
    return sum;
}

BigInt pair_orbit_size(long q, int n, int i, int j, int c) {
    if (i < 0 || j < 0 || i > n || j > n || c < 0 || c > std::min(i, j) || c < i + j - n) return 0;
    return gaussian_binomial(n, i, q) * gaussian_binomial(i, c, q) *
           gaussian_binomial(n - i, j - c, q) * ipow(q, static_cast<long>(i - c) * (j - c));
}

}  // namespace subspace

ExactScalar hahn(long q, int n, int i, int j, int k, int t) {
    detail::require(q >= 1, "hahn: q must be >= 1");
    detail::require(n >= 0 && k >= 0 && 2 * k <= n, "hahn: need 0 <= k <= n/2");
    detail::require(k <= i && i <= j && j <= n - k, "hahn: need k <= i <= j <= n - k");
    detail::require(t >= 0 && t <= i && t <= n - j, "hahn: need 0 <= t <= min(i, n - j)");
    auto per_pair = [&](int c) {
        return ExactScalar(subspace::orbit_kernel(q, n, k, i, j, c),
                           subspace::pair_orbit_size(q, n, i, j, c));
    };
    const ExactScalar at_zero = per_pair(i);
    if (at_zero == 0) throw RangeError("hahn: kernel vanishes on nested pairs");
    ExactScalar v = per_pair(i - t) / at_zero;
    v.canonicalize();
    return v;
}

PolynomialTable PolynomialTable::krawtchouk(int n) {
    detail::require(n >= 0, "PolynomialTable::krawtchouk: n must be >= 0");
    PolynomialTable table(Family::krawtchouk, n, 1);
    for (int k = 0; k <= n; ++k)
        for (int t = 0; t <= n; ++t)
            table.values_.emplace(std::tuple{k, 0, 0, t}, ExactScalar(codebounds::krawtchouk(n, k, t)));
    return table;
}

PolynomialTable PolynomialTable::hahn(long q, int n) {
    detail::require(q >= 1 && n >= 0, "PolynomialTable::hahn: need q >= 1, n >= 0");
    PolynomialTable table(q == 1 ? Family::hahn : Family::q_hahn, n, q);
    for (int k = 0; 2 * k <= n; ++k)
        for (int i = k; i <= n - k; ++i)
            for (int j = i; j <= n - k; ++j)
                for (int t = 0; t <= std::min(i, n - j); ++t)
                    table.values_.emplace(std::tuple{k, i, j, t}, codebounds::hahn(q, n, i, j, k, t));
    return table;
}

const ExactScalar& PolynomialTable::at(int k, int t) const { return at(k, 0, 0, t); }

const ExactScalar& PolynomialTable::at(int k, int i, int j, int t) const {
    auto it = values_.find(std::tuple{k, i, j, t});
    if (it == values_.end()) throw RangeError("PolynomialTable: index out of range");
    return it->second;
}

}  // namespace codebounds
