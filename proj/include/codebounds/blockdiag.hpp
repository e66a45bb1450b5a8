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
 * @file blockdiag.hpp
 * @brief Block diagonalization of invariant matrices on Hamming balls and
 *        projective spaces.
 *
 * An invariant matrix B = sum_o y_o M_o (M_o the indicator of pair orbit o)
 * is positive semidefinite iff, for every level k, the m_k x m_k matrix
 *
 *     B_k(i, j) = sum_c y_{(i,j,c)} entry_k(i, j, c)
 *
 * is positive semidefinite. Rows and columns of B_k are indexed by the
 * weights (dimensions) i with k <= i <= n - k that belong to the space.
 *
 * Stored convention: entry_k(i, j, c) is the orbit-summed kernel
 * <U_{k->i} f, M_{(i,j,c)} U_{k->j} f> / |f|^2 for any level-k harmonic f,
 * and norm_k(i) = |U_{k->i} f|^2 / |f|^2. Dividing by sqrt(norm_k(i) norm_k(j))
 * gives the block in an orthonormal basis, whose eigenvalues are eigenvalues
 * of B. Any other positive per-(k, i) rescaling is a congruence and leaves
 * every PSD verdict unchanged.
 */

#ifndef CODEBOUNDS_BLOCKDIAG_HPP
#define CODEBOUNDS_BLOCKDIAG_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "codebounds/exactmath.hpp"
#include "codebounds/schemes.hpp"

namespace codebounds {

struct KernelLevel {
    int k = 0;
    int m = 0;                 // multiplicity: number of admissible indices
    BigInt h;                  // dimension of the irreducible
    std::vector<int> indices;  // admissible weights, ascending
    /// (i, j, c) with i <= j -> orbit-summed kernel value.
    std::map<std::tuple<int, int, int>, ExactScalar> entries;
    /// i -> squared norm of the lifted harmonic.
    std::map<int, ExactScalar> norms;

    /// Symmetric lookup; zero for orbits that do not exist.
    ExactScalar entry(int i, int j, int c) const;
    /// Position of weight i in indices, or -1.
    int position(int i) const;
};

struct BlockKernel {
    SpaceSpec space;
    std::vector<KernelLevel> levels;

    /// Sum over levels of m_k * h_k.
    BigInt dimension() const;
};

/// Exact kernel; ball kernels are principal sub-blocks of the full space.
/// Throws RangeError for explicit graphs or n > 64.
BlockKernel build_kernel(const SpaceSpec& space);

/// Principal sub-block of a full-space kernel for a space with the same n, q.
BlockKernel restrict_kernel(const BlockKernel& full, const SpaceSpec& space);

enum class BlockScaling {
    raw,          // entries as stored
    orthonormal,  // entry / sqrt(norm_i norm_j)
};

/// Function on unordered pair orbits, keyed by (a, b, c) with a <= b.
using OrbitFunction = std::map<std::tuple<int, int, int>, double>;

/// Blocks of the invariant matrix sum_o y_o M_o. Throws RangeError when an
/// orbit of the space is missing from y.
std::vector<Eigen::MatrixXd> assemble_blocks(const BlockKernel& kernel, const OrbitFunction& y,
                                             BlockScaling scaling = BlockScaling::raw);

/// Coefficient of the pair-orbit variable x = size * y in the
/// congruence-scaled block entry:
///     entry * sqrt(|X_i| |X_j|) / (size * sqrt(norm_i norm_j)),
/// rounded once from the exact value; equals 1 on level 0.
double scaled_coefficient(const BlockKernel& kernel, const KernelLevel& level, int i, int j, int c);

/// Full Hamming space under translations and coordinate permutations.
struct KrawtchoukKernel {
    int n = 0;
    /// coefficient[k][i] = C(n, i) K_k(i).
    std::vector<std::vector<BigInt>> coefficient;

    /// a_k = sum_i y_i C(n, i) K_k(i) for y indexed by distance; B is PSD iff all a_k >= 0.
    std::vector<double> assemble(const std::vector<double>& y_by_distance) const;
};

KrawtchoukKernel krawtchouk_kernel(int n);

// ---------------------------------------------------------------------------
// Brute-force oracle

struct KernelValidationOptions {
    std::uint64_t seed = 1;
    int trials = 100;
    /// Minimum distance of the theta' comparison; 0 picks a default.
    int d = 0;
    double eig_tol = 1e-8;
    double theta_tol = 1e-6;
};

struct KernelValidationReport {
    std::string space;
    int points = 0;
    bool dimension_ok = false;
    bool sufficiency_ok = false;
    bool completeness_ok = false;
    bool theta_ok = false;
    /// Worst min eigenvalue relative to scale over sufficiency trials.
    double worst_sufficiency = 0.0;
    /// Worst min block eigenvalue relative to scale over completeness trials.
    double worst_completeness = 0.0;
    int theta_d = 0;
    double symmetrized_theta = 0.0;
    double unsymmetrized_theta = 0.0;

    bool passed() const { return dimension_ok && sufficiency_ok && completeness_ok && theta_ok; }
    nlohmann::json to_json() const;
};

/// Materializes the space (at most 4096 points; projective only for q = 2,
/// n <= 4) and checks both directions of the block criterion plus the
/// theta' agreement. Throws RangeError when the space is too large.
KernelValidationReport validate_kernel_small(const SpaceSpec& space,
                                             const KernelValidationOptions& options = {});

// ---------------------------------------------------------------------------
// Cache

nlohmann::json kernel_to_json(const BlockKernel& kernel);
/// Throws FormatError on schema mismatch or malformed data.
BlockKernel kernel_from_json(const nlohmann::json& j);

/// FNV-1a 64-bit hash of the canonical key of the full space.
std::string kernel_cache_filename(const SpaceSpec& space);

/// Default directory: $BOUNDS_CACHE_DIR, else $HOME/.cache/codebounds.
std::filesystem::path default_cache_dir();

/// Memory plus optional disk cache of full-space kernels. Thread safe.
class KernelCache {
public:
    /// An empty directory disables the disk layer.
    explicit KernelCache(std::filesystem::path directory = {});

    struct Lookup {
        std::shared_ptr<const BlockKernel> kernel;
        bool hit = false;  // served from memory or disk without rebuilding
    };

    Lookup get(const SpaceSpec& space);
    const std::filesystem::path& directory() const { return directory_; }

private:
    std::filesystem::path directory_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const BlockKernel>> memory_;
};

}  // namespace codebounds

#endif  // CODEBOUNDS_BLOCKDIAG_HPP
