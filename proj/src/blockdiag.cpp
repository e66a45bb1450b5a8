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

#include "codebounds/blockdiag.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "codebounds/error.hpp"

namespace codebounds {

using detail::require;

ExactScalar KernelLevel::entry(int i, int j, int c) const {
    if (i > j) std::swap(i, j);
    auto it = entries.find({i, j, c});
    return it == entries.end() ? ExactScalar(0) : it->second;
}

int KernelLevel::position(int i) const {
    auto it = std::lower_bound(indices.begin(), indices.end(), i);
    return (it != indices.end() && *it == i) ? static_cast<int>(it - indices.begin()) : -1;
}

BigInt BlockKernel::dimension() const {
    BigInt total = 0;
    for (const auto& l : levels) total += l.h * l.m;
    return total;
}

namespace {

// Tables shared by every level: Gaussian binomials and lift factors.
class KernelTables {
public:
    KernelTables(long q, int n) : q_(q), n_(n) {
        gb_.assign(static_cast<std::size_t>(n + 1), std::vector<BigInt>(static_cast<std::size_t>(n + 1), 0));
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= a; ++b) gb_[a][b] = gaussian_binomial(a, b, q);
        qpow_.resize(static_cast<std::size_t>(n * n + 1));
        for (int e = 0; e <= n * n; ++e) qpow_[e] = ipow(q, e);
    }

    const BigInt& gb(int a, int b) const { return gb_[a][b]; }
    const BigInt& qpow(long e) const { return qpow_[static_cast<std::size_t>(e)]; }

    // L(k, m, i) for fixed k, indexed [m][i].
    std::vector<std::vector<BigInt>> lifts(int k) const {
        const int n = n_;
        std::vector<BigInt> weight(static_cast<std::size_t>(k + 1));
        for (int r = 0; r <= k; ++r) {
            BigInt w = qpow((k - r) * (k - r - 1) / 2) * gb(k, r);
            weight[r] = ((k - r) % 2) ? BigInt(-w) : w;
        }
        std::vector<std::vector<BigInt>> out(static_cast<std::size_t>(n + 1),
                                             std::vector<BigInt>(static_cast<std::size_t>(n + 1), 0));
        for (int m = k; m <= n - k; ++m)
            for (int i = m; i <= n - k; ++i) {
                BigInt s = 0;
                for (int r = 0; r <= k; ++r) {
                    const int top = n - m - k + r;
                    const int bot = i - m - k + r;
                    if (bot < 0 || bot > top) continue;
                    s += gb(top, bot) * weight[r];
                }
                out[m][i] = s;
            }
        return out;
    }

private:
    long q_;
    int n_;
    std::vector<std::vector<BigInt>> gb_;
    std::vector<BigInt> qpow_;
};

KernelLevel build_level(const KernelTables& t, int n, int k) {
    const auto L = t.lifts(k);
    KernelLevel level;
    level.k = k;
    level.h = t.gb(n, k) - (k > 0 ? t.gb(n, k - 1) : BigInt(0));
    for (int i = k; i <= n - k; ++i) {
        level.indices.push_back(i);
        level.norms[i] = ExactScalar(L[k][i]);
    }
    level.m = static_cast<int>(level.indices.size());
    for (int i = k; i <= n - k; ++i)
        for (int j = i; j <= n - k; ++j)
            for (int c = std::max(0, i + j - n); c <= i; ++c) {
                BigInt sum = 0;
                for (int m = std::max(c, k); m <= i; ++m) {
                    BigInt term = t.qpow((m - c) * (m - c - 1) / 2) * t.gb(m, c) * L[m][i] * L[m][j] * L[k][m];
                    if ((m - c) % 2) sum -= term;
                    else sum += term;
                }
                level.entries.emplace(std::tuple{i, j, c}, ExactScalar(sum));
            }
    return level;
}

}  // namespace

BlockKernel build_kernel(const SpaceSpec& space) {
    require(space.kind != SpaceSpec::Kind::explicit_graph, "build_kernel: explicit graphs are not supported");
    require(space.n >= 1 && space.n <= 64, "build_kernel: need 1 <= n <= 64");
    SpaceSpec full = space.kind == SpaceSpec::Kind::hamming_ball ? SpaceSpec::hamming(space.n) : space;
    const KernelTables tables(full.q, full.n);
    BlockKernel kernel;
    kernel.space = full;
    for (int k = 0; 2 * k <= full.n; ++k) kernel.levels.push_back(build_level(tables, full.n, k));
    return space.is_full_space() ? kernel : restrict_kernel(kernel, space);
}

BlockKernel restrict_kernel(const BlockKernel& full, const SpaceSpec& space) {
    require(full.space.kind == space.kind && full.space.n == space.n && full.space.q == space.q &&
                full.space.is_full_space(),
            "restrict_kernel: kernel must be the full-space kernel of the same n and q");
    BlockKernel out;
    out.space = space;
    for (const auto& level : full.levels) {
        KernelLevel r;
        r.k = level.k;
        r.h = level.h;
        for (int i : level.indices)
            if (space.has_level(i)) {
                r.indices.push_back(i);
                r.norms[i] = level.norms.at(i);
            }
        r.m = static_cast<int>(r.indices.size());
        if (r.m == 0) continue;
        for (const auto& [key, value] : level.entries) {
            const auto [i, j, c] = key;
            if (space.has_level(i) && space.has_level(j)) r.entries.emplace(key, value);
        }
        out.levels.push_back(std::move(r));
    }
    return out;
}

std::vector<Eigen::MatrixXd> assemble_blocks(const BlockKernel& kernel, const OrbitFunction& y,
                                             BlockScaling scaling) {
    std::vector<Eigen::MatrixXd> blocks;
    for (const auto& level : kernel.levels) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(level.m, level.m);
        for (const auto& [key, value] : level.entries) {
            const auto [i, j, c] = key;
            auto it = y.find(key);
            if (it == y.end())
                throw RangeError("assemble_blocks: missing orbit value for (" + std::to_string(i) + "," +
                                 std::to_string(j) + "," + std::to_string(c) + ")");
            double coef = to_double(value);
            if (scaling == BlockScaling::orthonormal)
                coef /= std::sqrt(to_double(level.norms.at(i)) * to_double(level.norms.at(j)));
            const int p = level.position(i);
            const int q = level.position(j);
            B(p, q) += it->second * coef;
            if (p != q) B(q, p) += it->second * coef;
        }
        blocks.push_back(std::move(B));
    }
    return blocks;
}

double scaled_coefficient(const BlockKernel& kernel, const KernelLevel& level, int i, int j, int c) {
    const ExactScalar e = level.entry(i, j, c);
    if (sgn(e) == 0) return 0.0;
    const long q = kernel.space.q;
    const int n = kernel.space.n;
    const BigInt size = subspace::pair_orbit_size(q, n, i, j, c);
    require(size > 0, "scaled_coefficient: empty orbit");
    ExactScalar r = e * e * ExactScalar(gaussian_binomial(n, i, q) * gaussian_binomial(n, j, q)) /
                    (ExactScalar(size * size) * level.norms.at(i) * level.norms.at(j));
    r.canonicalize();
    const double v = std::sqrt(to_double(r));
    return sgn(e) < 0 ? -v : v;
}

KrawtchoukKernel krawtchouk_kernel(int n) {
    require(n >= 1, "krawtchouk_kernel: n must be >= 1");
    KrawtchoukKernel kk;
    kk.n = n;
    kk.coefficient.assign(static_cast<std::size_t>(n + 1), std::vector<BigInt>(static_cast<std::size_t>(n + 1)));
    for (int k = 0; k <= n; ++k)
        for (int i = 0; i <= n; ++i) kk.coefficient[k][i] = binomial(n, i) * krawtchouk(n, k, i);
    return kk;
}

std::vector<double> KrawtchoukKernel::assemble(const std::vector<double>& y) const {
    require(static_cast<int>(y.size()) == n + 1, "KrawtchoukKernel::assemble: need n + 1 values");
    std::vector<double> a(static_cast<std::size_t>(n + 1), 0.0);
    for (int k = 0; k <= n; ++k)
        for (int i = 0; i <= n; ++i) a[k] += y[i] * coefficient[k][i].get_d();
    return a;
}

// ---------------------------------------------------------------------------
// Serialization and cache

nlohmann::json kernel_to_json(const BlockKernel& kernel) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& l : kernel.levels) {
        nlohmann::json norms = nlohmann::json::array();
        for (const auto& [i, v] : l.norms) norms.push_back({i, to_string(v)});
        nlohmann::json entries = nlohmann::json::array();
        for (const auto& [key, v] : l.entries) {
            const auto [i, j, c] = key;
            entries.push_back({i, j, c, to_string(v)});
        }
        levels.push_back({{"k", l.k},
                          {"m", l.m},
                          {"h", l.h.get_str()},
                          {"indices", l.indices},
                          {"norms", std::move(norms)},
                          {"entries", std::move(entries)}});
    }
    return {{"schema", 1}, {"space", kernel.space.to_json()}, {"levels", std::move(levels)}};
}

BlockKernel kernel_from_json(const nlohmann::json& j) {
    try {
        if (j.at("schema").get<int>() != 1) throw FormatError("kernel cache: unsupported schema");
        BlockKernel kernel;
        kernel.space = SpaceSpec::from_json(j.at("space"));
        for (const auto& lj : j.at("levels")) {
            KernelLevel l;
            l.k = lj.at("k").get<int>();
            l.m = lj.at("m").get<int>();
            l.h = BigInt(lj.at("h").get<std::string>());
            l.indices = lj.at("indices").get<std::vector<int>>();
            if (static_cast<int>(l.indices.size()) != l.m) throw FormatError("kernel cache: m mismatch");
            for (const auto& e : lj.at("norms")) l.norms[e.at(0).get<int>()] = parse_exact(e.at(1).get<std::string>());
            for (const auto& e : lj.at("entries"))
                l.entries.emplace(std::tuple{e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>()},
                                  parse_exact(e.at(3).get<std::string>()));
            kernel.levels.push_back(std::move(l));
        }
        return kernel;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("kernel cache: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("kernel cache: ") + e.what());
    }
}

namespace {

SpaceSpec full_space_of(const SpaceSpec& space) {
    return space.kind == SpaceSpec::Kind::hamming_ball ? SpaceSpec::hamming(space.n) : space;
}

}  // namespace

std::string kernel_cache_filename(const SpaceSpec& space) {
    const std::string key = full_space_of(space).canonical_key();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : key) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("kernel-") + buf + ".json";
}

std::filesystem::path default_cache_dir() {
    if (const char* env = std::getenv("BOUNDS_CACHE_DIR"); env && *env) return env;
    if (const char* home = std::getenv("HOME"); home && *home)
        return std::filesystem::path(home) / ".cache" / "codebounds";
    return std::filesystem::temp_directory_path() / "codebounds-cache";
}

KernelCache::KernelCache(std::filesystem::path directory) : directory_(std::move(directory)) {}

KernelCache::Lookup KernelCache::get(const SpaceSpec& space) {
    require(space.kind != SpaceSpec::Kind::explicit_graph, "KernelCache: explicit graphs have no kernel");
    const SpaceSpec full = full_space_of(space);
    const std::string key = full.canonical_key();

    std::lock_guard<std::mutex> lock(mutex_);
    Lookup result;
    std::shared_ptr<const BlockKernel> kernel;
    if (auto it = memory_.find(key); it != memory_.end()) {
        kernel = it->second;
        result.hit = true;
    }
    const auto path = directory_.empty() ? std::filesystem::path{} : directory_ / kernel_cache_filename(full);
    if (!kernel && !path.empty() && std::filesystem::exists(path)) {
        try {
            std::ifstream in(path);
            auto loaded = kernel_from_json(nlohmann::json::parse(in));
            if (loaded.space.canonical_key() == key) {
                kernel = std::make_shared<const BlockKernel>(std::move(loaded));
                result.hit = true;
            }
        } catch (const std::exception&) {
            // Unreadable cache files are rebuilt.
        }
    }
    if (!kernel) {
        kernel = std::make_shared<const BlockKernel>(build_kernel(full));
        if (!path.empty()) {
            static std::atomic<unsigned> counter{0};
            std::filesystem::create_directories(directory_);
            std::ostringstream tmp_name;
            tmp_name << path.filename().string() << ".tmp." << ::getpid() << "."
                     << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "." << counter++;
            const auto tmp = directory_ / tmp_name.str();
            {
                std::ofstream out(tmp);
                out << kernel_to_json(*kernel).dump();
            }
            std::filesystem::rename(tmp, path);
        }
    }
    memory_[key] = kernel;
    result.kernel = space.is_full_space() ? kernel
                                          : std::make_shared<const BlockKernel>(restrict_kernel(*kernel, space));
    return result;
}

}  // namespace codebounds
