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
 * @file bounds.hpp
 * @brief Upper bounds for codes: Delsarte LP, Lovasz theta / theta', the
 *        symmetrized theta' on Hamming balls and projective spaces, and the
 *        triple-point bound for pseudo-distances.
 *
 * Every SDP bound reports the rigorous dual value of solve_sdp, and the
 * integer bound floor(dual + 1e-5).
 */

#ifndef CODEBOUNDS_BOUNDS_HPP
#define CODEBOUNDS_BOUNDS_HPP

#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "codebounds/blockdiag.hpp"
#include "codebounds/exactmath.hpp"
#include "codebounds/schemes.hpp"
#include "codebounds/solvers.hpp"

namespace codebounds {

enum class BoundKind { delsarte, theta, ball, projective, triple };
enum class ThetaVariant { plain, prime };

std::string to_string(BoundKind kind);
std::string to_string(ThetaVariant variant);
ThetaVariant parse_theta_variant(const std::string& name);

struct BoundRequest {
    BoundKind kind = BoundKind::delsarte;
    int n = 0;
    int d = 1;
    long q = 2;                // projective
    std::vector<int> weights;  // ball
    Graph graph;               // theta
    ThetaVariant variant = ThetaVariant::prime;
    PseudoDistance f = PseudoDistance::ghd;
    int m = 1;
    double tol = 1e-8;

    static BoundRequest delsarte(int n, int d);
    static BoundRequest theta(Graph g, ThetaVariant variant);
    static BoundRequest ball(int n, std::vector<int> weights, int d);
    static BoundRequest ball_radius(int n, int w, int d);
    static BoundRequest projective(long q, int n, int d);
    static BoundRequest triple(int n, PseudoDistance f, int m);

    /// Throws RangeError when parameters violate the documented ranges.
    void validate() const;
    nlohmann::json to_json() const;
};

struct BoundResult {
    BoundRequest request;
    double primal = 0.0;
    /// Rigorous upper bound on the relaxation optimum.
    double dual = 0.0;
    double gap = 0.0;
    /// floor(dual + 1e-5)
    BigInt bound;
    /// Exact optimum for LP bounds.
    std::optional<ExactScalar> exact;
    std::string status = "optimal";
    double wall_time_ms = 0.0;
    bool kernel_cache_hit = false;
    int iterations = 0;
    std::vector<std::string> warnings;

    bool optimal() const { return status == "optimal"; }
    /// {request, primal, dual, gap, bound, status, ...}; wall_time_ms and
    /// kernel_cache_hit only with include_timing.
    nlohmann::json to_json(bool include_timing = true) const;
};

/// floor(value + 1e-5) as an integer.
BigInt integer_bound(double value);

// ---------------------------------------------------------------------------
// Program builders

/// max sum_{i>=d} A_i s.t. sum_i K_k(i) A_i >= -C(n, k), A_i >= 0. The bound
/// is 1 plus the optimum.
LpProblem delsarte_lp(int n, int d);

/// The same LP as a diagonal-block SDP built from krawtchouk_kernel; the
/// bound is 1 plus the optimum.
SdpProblem delsarte_sdp(int n, int d);

/// Lovasz program on an explicit graph: one PSD block (index 0); theta'
/// adds a nonnegative block (index 1) tied to the non-edge entries.
SdpProblem theta_problem(const Graph& g, ThetaVariant variant);

/// Contribution of a scalar variable to an entry of a level block.
struct LinkTerm {
    int block = 0;
    int row = 0;
    int col = 0;
    int variable = 0;
    double coefficient = 0.0;
};

/// A program whose PSD blocks are linear images of a vector of nonnegative
/// scalars (the last block). Used for the ball, projective and triple bounds.
struct InvariantProgram {
    SdpProblem problem;
    int scalar_block = 0;
    /// Orbit (a <= b) or canonical triple label of each scalar.
    std::vector<std::tuple<int, int, int>> variables;
    std::vector<LinkTerm> links;
    std::shared_ptr<const BlockKernel> kernel;
    bool kernel_cache_hit = false;

    int variable_index(int a, int b, int c) const;
    /// Primal point with the given scalars and the linked PSD blocks.
    BlockMatrix point(const std::vector<double>& values) const;
};

/// Symmetrized theta' of the distance graph (edges at distance 1..d-1) of a
/// Hamming ball or projective space. Scalars are x_o = size(o) * y_o.
InvariantProgram invariant_theta_program(const SpaceSpec& space, int d, KernelCache* cache = nullptr);

/// Triple-point program over canonical triple labels (scalars l = 2^n lambda).
InvariantProgram triple_program(int n, PseudoDistance f, int m, KernelCache* cache = nullptr);

// ---------------------------------------------------------------------------
// Bounds

BoundResult delsarte_lp_bound(int n, int d);
BoundResult theta_bound(const Graph& g, ThetaVariant variant, double tol = 1e-8);
BoundResult ball_sdp_bound(int n, const std::vector<int>& weights, int d, double tol = 1e-8,
                           KernelCache* cache = nullptr);
BoundResult projective_sdp_bound(long q, int n, int d, double tol = 1e-8, KernelCache* cache = nullptr);
BoundResult triple_sdp_bound(int n, PseudoDistance f, int m, double tol = 1e-8, KernelCache* cache = nullptr);

/// Symmetrized theta' of a distance graph on any supported space.
BoundResult invariant_theta_bound(const SpaceSpec& space, int d, double tol = 1e-8,
                                  KernelCache* cache = nullptr);

/// Dispatches on request.kind.
BoundResult run_bound(const BoundRequest& request, KernelCache* cache = nullptr);

struct EquivalenceReport {
    double theta_prime = 0.0;
    ExactScalar delsarte;
    double relative_difference = 0.0;
    std::string status;  // solver status of the SDP solve
    bool agree = false;
};

/// Symmetrized theta'(Gamma(n, d)) against the exact Delsarte LP value.
EquivalenceReport delsarte_equivalence(int n, int d, KernelCache* cache = nullptr);
bool delsarte_equivalence_check(int n, int d);

}  // namespace codebounds

#endif  // CODEBOUNDS_BOUNDS_HPP
