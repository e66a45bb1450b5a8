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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Diagnostics for failing cases go to stderr.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "codebounds/bounds.hpp"
#include "oracles.hpp"

using namespace codebounds;

namespace {

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// Weak duality ledger shared by every solve below.
struct DualityLedger {
    long solves = 0;
    long violations = 0;
    void record(double primal, double dual, double tol, const std::string& what) {
        ++solves;
        if (!(primal <= dual + 10.0 * tol * std::max(1.0, std::abs(dual)))) {
            ++violations;
            std::cerr << "  weak duality violated: " << what << " primal " << primal << " dual " << dual << "\n";
        }
    }
    void record(const BoundResult& r, const std::string& what) { record(r.primal, r.dual, r.request.tol, what); }
} ledger;

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::vector<int> upto(int w) {
    std::vector<int> v;
    for (int i = 0; i <= w; ++i) v.push_back(i);
    return v;
}

Outcome ball_table(KernelCache& cache) {
    struct Cell {
        int n, w;
        long expected;
    };
    const Cell cells[] = {{18, 8, 67},   {19, 8, 100},  {19, 9, 123},  {19, 10, 137},  {20, 8, 154},
                          {20, 9, 222},  {20, 10, 253}, {24, 8, 760},  {24, 12, 3336}, {24, 16, 4095}};
    Outcome o;
    std::ostringstream got;
    for (const auto& c : cells) {
        const BoundResult r = ball_sdp_bound(c.n, upto(c.w), 8, 1e-8, &cache);
        ledger.record(r, "ball");
        const long b = r.bound.get_si();
        got << " (" << c.n << "," << c.w << ")=" << b;
        if (!r.optimal() || std::abs(b - c.expected) > 1) {
            o.pass = false;
            std::cerr << "  cell (" << c.n << ", " << c.w << "): got " << b << " status " << r.status << ", expected "
                      << c.expected << "\n";
        }
    }
    o.detail = "floor values" + got.str();
    return o;
}

Outcome equivalence(KernelCache& cache) {
    Outcome o;
    double worst = 0.0;
    int checked = 0;
    for (int n = 1; n <= 12; ++n)
        for (int d = 1; d <= n; ++d) {
            const EquivalenceReport rep = delsarte_equivalence(n, d, &cache);
            ++checked;
            worst = std::max(worst, rep.relative_difference);
            if (!rep.agree || rep.status != "optimal") {
                o.pass = false;
                std::cerr << "  (" << n << ", " << d << "): theta' " << rep.theta_prime << " LP "
                          << to_string(rep.delsarte) << " status " << rep.status << "\n";
            }
        }
    o.detail = std::to_string(checked) + " pairs, worst relative difference " + sci(worst);
    return o;
}

Outcome sandwich() {
    Outcome o;
    std::mt19937_64 rng(0xA11CE);
    std::uniform_int_distribution<int> vdist(1, 12);
    std::uniform_real_distribution<double> pdist(0.1, 0.9);
    for (int trial = 0; trial < 50; ++trial) {
        const Graph g = oracle::random_graph(rng, vdist(rng), pdist(rng));
        const BoundResult tp = theta_bound(g, ThetaVariant::prime);
        const BoundResult t = theta_bound(g, ThetaVariant::plain);
        ledger.record(tp, "theta'");
        ledger.record(t, "theta");
        const int a = oracle::alpha(g);
        const int chi = oracle::chromatic(g.complement());
        const bool ok = tp.optimal() && t.optimal() && a <= tp.dual + 1e-6 && tp.dual <= t.dual + 1e-6 &&
                        t.dual <= chi + 1e-6;
        if (!ok) {
            o.pass = false;
            std::cerr << "  graph " << trial << ": alpha " << a << " theta' " << tp.dual << " theta " << t.dual
                      << " chi " << chi << "\n";
        }
    }
    o.detail = "50 graphs, alpha <= theta' <= theta <= chi(complement)";
    return o;
}

Outcome kernel_oracle() {
    Outcome o;
    std::vector<SpaceSpec> specs;
    for (int n = 2; n <= 8; ++n) specs.push_back(SpaceSpec::hamming(n));
    specs.push_back(SpaceSpec::hamming_ball(6, {0, 1, 2, 3}));
    for (int n = 2; n <= 4; ++n) specs.push_back(SpaceSpec::projective(2, n));
    double worst_suff = 0.0, worst_theta = 0.0;
    for (const auto& s : specs) {
        const KernelValidationReport rep = validate_kernel_small(s);
        worst_suff = std::min(worst_suff, rep.worst_sufficiency);
        worst_theta = std::max(worst_theta, std::abs(rep.symmetrized_theta - rep.unsymmetrized_theta) /
                                                std::max(1.0, std::abs(rep.unsymmetrized_theta)));
        if (!rep.passed()) {
            o.pass = false;
            std::cerr << "  " << rep.to_json().dump() << "\n";
        }
    }
    o.detail = std::to_string(specs.size()) + " spaces, worst relative min eigenvalue " + sci(worst_suff) +
               ", worst theta' mismatch " + sci(worst_theta);
    return o;
}

Outcome dimensions() {
    Outcome o;
    int kernels = 0, orbit_specs = 0;
    for (long q : {1, 2, 3, 4})
        for (int n = 1; n <= 32; ++n) {
            const SpaceSpec s = q == 1 ? SpaceSpec::hamming(n) : SpaceSpec::projective(q, n);
            ++kernels;
            if (build_kernel(s).dimension() != s.point_count()) {
                o.pass = false;
                std::cerr << "  dimension identity fails for q " << q << " n " << n << "\n";
            }
        }
    std::vector<SpaceSpec> specs;
    for (int n = 1; n <= 24; ++n)
        for (int w = 0; w <= n; ++w) specs.push_back(SpaceSpec::hamming_radius(n, w));
    for (long q : {2, 3})
        for (int n = 1; n <= 6; ++n) specs.push_back(SpaceSpec::projective(q, n));
    for (const auto& s : specs) {
        ++orbit_specs;
        BigInt total = 0;
        for (const auto& orb : pair_orbits(s)) total += orb.size;
        if (total != s.point_count() * s.point_count()) {
            o.pass = false;
            std::cerr << "  orbit sizes fail for " << s.canonical_key() << "\n";
        }
    }
    o.detail = std::to_string(kernels) + " kernels, " + std::to_string(orbit_specs) + " orbit tables, exact";
    return o;
}

Outcome triple(KernelCache& cache) {
    Outcome o;
    std::ostringstream msg;
    // Exhaustive search at n = 4.
    for (int m = 2; m <= 4; ++m) {
        const BoundResult r = triple_sdp_bound(4, PseudoDistance::ghd, m, 1e-8, &cache);
        ledger.record(r, "triple");
        const int best = oracle::max_triple_code(4, m);
        msg << " m=" << m << ":" << best << "<=" << r.dual;
        if (!r.optimal() || r.dual < best - 1e-9) {
            o.pass = false;
            std::cerr << "  n 4 m " << m << ": bound " << r.dual << " below exhaustive " << best << "\n";
        }
    }
    // Symmetrized against the unreduced program.
    double worst = 0.0;
    for (int n = 1; n <= 5; ++n)
        for (int m = 2; m <= n + 1; ++m) {
            const BoundResult r = triple_sdp_bound(n, PseudoDistance::ghd, m, 1e-8, &cache);
            ledger.record(r, "triple");
            const oracle::DirectSolve direct =
                n <= 4 ? oracle::triple_direct(n, m) : oracle::triple_translation_reduced(n, m);
            ledger.record(direct.primal, direct.dual, 1e-8, "direct triple");
            const double diff = std::abs(r.dual - direct.dual) / std::max(1.0, std::abs(direct.dual));
            worst = std::max(worst, diff);
            if (!r.optimal() || diff > 1e-5) {
                o.pass = false;
                std::cerr << "  n " << n << " m " << m << ": symmetrized " << r.dual << " direct " << direct.dual
                          << " (" << direct.status << ")\n";
            }
        }
    msg << "; sym vs direct worst " << worst;
    // Vacuous constraint.
    double worst_vac = 0.0;
    for (int n = 1; n <= 12; ++n)
        for (auto f : {PseudoDistance::ghd, PseudoDistance::radial, PseudoDistance::avg_radial}) {
            const BoundResult r = triple_sdp_bound(n, f, 1, 1e-8, &cache);
            ledger.record(r, "triple");
            const double diff = std::abs(r.dual - std::ldexp(1.0, n));
            worst_vac = std::max(worst_vac, diff);
            if (!r.optimal() || diff > 1e-5) {
                o.pass = false;
                std::cerr << "  vacuous n " << n << " " << to_string(f) << ": " << r.dual << "\n";
            }
        }
    msg << "; vacuous worst " << worst_vac;
    o.detail = msg.str();
    return o;
}

Outcome positivity() {
    Outcome o;
    std::mt19937_64 rng(0xC0DE5);
    std::uniform_int_distribution<int> ndist(1, 10);
    std::uniform_real_distribution<double> pdist(0.02, 0.6);
    long checks = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = ndist(rng);
        const auto code = oracle::random_code(rng, n, pdist(rng));
        std::vector<long> dist(n + 1, 0);
        for (unsigned x : code)
            for (unsigned y : code) ++dist[std::popcount(x ^ y)];
        for (int k = 0; k <= n; ++k) {
            BigInt s = 0;
            for (int t = 0; t <= n; ++t) s += BigInt(dist[t]) * krawtchouk(n, k, t);
            ++checks;
            if (s < 0 || oracle::positivity_sum(n, k, code) != s) {
                o.pass = false;
                std::cerr << "  code " << trial << " k " << k << ": " << s.get_str() << "\n";
            }
        }
    }
    o.detail = "200 codes, " + std::to_string(checks) + " exact inequalities";
    return o;
}

Outcome cross_validation() {
    Outcome o;
    double worst = 0.0;
    int count = 0;
    for (int n = 1; n <= 16; ++n)
        for (int d = 1; d <= n; ++d) {
            const double lp = to_double(solve_lp_exact(delsarte_lp(n, d)).value) + 1.0;
            SdpOptions opt;
            const SdpSolution s = solve_sdp(delsarte_sdp(n, d), opt);
            ledger.record(s.primal_value, s.dual_value, opt.tol, "delsarte sdp");
            const double diff = std::abs(s.dual_value + 1.0 - lp) / lp;
            worst = std::max(worst, diff);
            ++count;
            if (s.status != SdpStatus::optimal || diff > 1e-6) {
                o.pass = false;
                std::cerr << "  (" << n << ", " << d << "): LP " << lp << " SDP " << s.dual_value + 1.0 << " "
                          << to_string(s.status) << "\n";
            }
        }
    if (ledger.violations > 0) o.pass = false;
    o.detail = std::to_string(count) + " instances, worst relative difference " + sci(worst) +
               "; weak duality held on " + std::to_string(ledger.solves - ledger.violations) + "/" +
               std::to_string(ledger.solves) + " solves";
    return o;
}

}  // namespace

int main() {
    KernelCache cache;  // memory only
    report(1, "ball table at d = 8", [&] { return ball_table(cache); });
    report(2, "theta' of Gamma(n, d) equals the Delsarte LP for n <= 12", [&] { return equivalence(cache); });
    report(3, "sandwich on random graphs", sandwich);
    report(4, "block kernel brute-force oracle", kernel_oracle);
    report(5, "dimension and orbit-size identities", dimensions);
    report(6, "triple bound soundness", [&] { return triple(cache); });
    report(7, "positivity of Krawtchouk sums on random codes", positivity);
    report(8, "exact LP vs SDP and weak duality", cross_validation);
    std::printf("%d of 8 criteria passed\n", 8 - failures);
    return failures == 0 ? 0 : 1;
}
