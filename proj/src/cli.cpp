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

#include "codebounds/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "codebounds/error.hpp"

namespace codebounds::cli {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_solver = 2;

int parse_int(const std::string& s) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw RangeError("not an integer: '" + s + "'");
    }
    if (pos != s.size()) throw RangeError("not an integer: '" + s + "'");
    return v;
}

std::string fixed6(double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(6) << x;
    return os.str();
}

void print_result(const BoundResult& r, OutputFormat format, std::ostream& out) {
    if (format == OutputFormat::json) {
        out << r.to_json().dump(2) << "\n";
        return;
    }
    const auto req = r.request.to_json();
    out << std::left;
    for (const auto& [key, value] : req.items())
        out << std::setw(12) << key << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
    out << std::setw(12) << "value" << fixed6(r.dual) << "\n";
    if (r.exact) out << std::setw(12) << "exact" << to_string(*r.exact) << "\n";
    out << std::setw(12) << "primal" << fixed6(r.primal) << "\n";
    out << std::setw(12) << "gap" << r.gap << "\n";
    out << std::setw(12) << "bound" << r.bound.get_str() << "\n";
    out << std::setw(12) << "status" << r.status << "\n";
    out << std::setw(12) << "time_ms" << std::setprecision(1) << std::fixed << r.wall_time_ms << "\n";
    for (const auto& w : r.warnings) out << "warning: " << w << "\n";
}

std::filesystem::path resolve_cache_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    return default_cache_dir();
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        if (item.empty()) continue;
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_int(item));
            continue;
        }
        const int lo = parse_int(item.substr(0, dots));
        const int hi = parse_int(item.substr(dots + 2));
        for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
    return out;
}

const ScanCell* ScanTable::cell(int n_, int w_) const {
    for (const auto& c : cells)
        if (c.n == n_ && c.w == w_) return &c;
    return nullptr;
}

bool ScanTable::all_optimal() const {
    return std::all_of(cells.begin(), cells.end(),
                       [](const ScanCell& c) { return c.result && c.result->optimal(); });
}

std::string ScanTable::to_text() const {
    std::ostringstream os;
    if (n.empty() || w.empty()) return os.str();
    os << "d = " << d << "\n" << std::setw(6) << "n\\w";
    for (int wv : w) os << std::setw(8) << wv;
    os << "\n";
    for (int nv : n) {
        os << std::setw(6) << nv;
        for (int wv : w) {
            const ScanCell* c = cell(nv, wv);
            std::string text = "-";
            if (c && c->result) text = c->result->bound.get_str() + (c->result->optimal() ? "" : "?");
            else if (c) text = "fail";
            os << std::setw(8) << text;
        }
        os << "\n";
    }
    return os.str();
}

nlohmann::json ScanTable::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : cells) {
        nlohmann::json j{{"n", c.n}, {"w", c.w}};
        if (c.result) j["result"] = c.result->to_json();
        else j["error"] = c.error;
        rows.push_back(j);
    }
    return {{"d", d}, {"n", n}, {"w", w}, {"cells", rows}};
}

ScanTable scan(const ScanSpec& spec, KernelCache& cache) {
    ScanTable table;
    table.d = spec.d;
    table.n = spec.n;
    table.w = spec.w;
    for (int nv : spec.n)
        for (int wv : spec.w)
            if (wv <= nv) table.cells.push_back({nv, wv, std::nullopt, {}});

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < table.cells.size(); i = next++) {
            ScanCell& c = table.cells[i];
            try {
                c.result = ball_sdp_bound(c.n, SpaceSpec::hamming_radius(c.n, c.w).weights, spec.d, spec.tol, &cache);
            } catch (const std::exception& e) {
                c.error = e.what();
            }
        }
    };
    const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(table.cells.size())));
    std::vector<std::thread> threads;
    for (int t = 1; t < jobs; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    return table;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Upper bounds for codes via linear and semidefinite programming", "bounds"};
    app.require_subcommand(1);

    int n = 0, d = 0, w = -1, m = 1, jobs = 1;
    long q = 2;
    std::string weight_set, f_name = "ghd", graph_path, variant = "prime", format = "table", cache_dir;
    std::string n_range, w_range;
    double tol = 1e-8;
    std::uint64_t seed = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--tol", tol, "solver tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--format", format, "output format")->check(CLI::IsMember({"table", "json"}));
        sub->add_option("--cache-dir", cache_dir, "kernel cache directory");
    };

    auto* delsarte = app.add_subcommand("delsarte", "Delsarte LP bound for A(n, d), exact");
    delsarte->add_option("--n", n)->required();
    delsarte->add_option("--d", d)->required();
    add_common(delsarte);

    auto* theta = app.add_subcommand("theta", "Lovasz theta or theta' of a graph");
    theta->add_option("--graph", graph_path, "graph JSON file")->required();
    theta->add_option("--variant", variant)->check(CLI::IsMember({"plain", "prime"}));
    add_common(theta);

    auto* ball = app.add_subcommand("ball", "symmetrized SDP bound for A(B_n(w), d)");
    ball->add_option("--n", n)->required();
    ball->add_option("--d", d)->required();
    auto* w_opt = ball->add_option("--w", w, "radius");
    auto* ws_opt = ball->add_option("--weight-set", weight_set, "allowed weights, e.g. 0..3,6");
    w_opt->excludes(ws_opt);
    add_common(ball);

    auto* projective = app.add_subcommand("projective", "symmetrized SDP bound for subspace codes");
    projective->add_option("--q", q)->required();
    projective->add_option("--n", n)->required();
    projective->add_option("--d", d)->required();
    add_common(projective);

    auto* triple = app.add_subcommand("triple", "triple-point SDP bound for a pseudo-distance");
    triple->add_option("--n", n)->required();
    triple->add_option("--f", f_name)->check(CLI::IsMember({"ghd", "radial", "avg_radial"}));
    triple->add_option("--m", m)->required();
    add_common(triple);

    auto* scan_cmd = app.add_subcommand("scan", "grid of ball bounds over (n, w)");
    scan_cmd->add_option("--n", n_range, "lengths, e.g. 18..20")->required();
    scan_cmd->add_option("--w", w_range, "radii, e.g. 8..10 or 8,12,16")->required();
    scan_cmd->add_option("--d", d)->required();
    scan_cmd->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
    add_common(scan_cmd);

    auto* validate = app.add_subcommand("validate-kernel", "check the block kernel against brute force");
    validate->add_option("--n", n)->required();
    auto* vw_opt = validate->add_option("--w", w, "radius");
    auto* vws_opt = validate->add_option("--weight-set", weight_set);
    vw_opt->excludes(vws_opt);
    auto* vq_opt = validate->add_option("--q", q, "projective space over GF(q)");
    vq_opt->excludes(vw_opt)->excludes(vws_opt);
    validate->add_option("--d", d, "distance for the theta' comparison");
    validate->add_option("--seed", seed);
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "bounds: " << e.what() << "\n" << "run 'bounds --help' for usage\n";
        return exit_usage;
    }

    const OutputFormat fmt = format == "json" ? OutputFormat::json : OutputFormat::table;
    try {
        KernelCache cache(resolve_cache_dir(cache_dir));

        if (*scan_cmd) {
            ScanSpec spec;
            spec.n = parse_int_list(n_range);
            spec.w = parse_int_list(w_range);
            spec.d = d;
            spec.tol = tol;
            spec.jobs = jobs;
            for (int nv : spec.n)
                for (int wv : spec.w)
                    if (wv <= nv) BoundRequest::ball_radius(nv, wv, d).validate();
            const ScanTable table = scan(spec, cache);
            if (fmt == OutputFormat::json) out << table.to_json().dump(2) << "\n";
            else out << table.to_text();
            for (const auto& c : table.cells)
                if (!c.error.empty()) err << "bounds: cell (" << c.n << ", " << c.w << "): " << c.error << "\n";
            return table.all_optimal() ? exit_ok : exit_solver;
        }

        if (*validate) {
            SpaceSpec space;
            if (vq_opt->count() > 0) space = SpaceSpec::projective(q, n);
            else if (!weight_set.empty()) space = SpaceSpec::hamming_ball(n, parse_int_list(weight_set));
            else space = SpaceSpec::hamming_radius(n, w >= 0 ? w : n);
            KernelValidationOptions opt;
            opt.seed = seed;
            opt.d = d;
            const KernelValidationReport rep = validate_kernel_small(space, opt);
            if (fmt == OutputFormat::json) {
                out << rep.to_json().dump(2) << "\n";
            } else {
                out << std::left;
                const nlohmann::json j = rep.to_json();
                for (const auto& [key, value] : j.items())
                    out << std::setw(20) << key << (value.is_string() ? value.get<std::string>() : value.dump())
                        << "\n";
            }
            return rep.passed() ? exit_ok : exit_solver;
        }

        BoundRequest req;
        if (*delsarte) {
            req = BoundRequest::delsarte(n, d);
        } else if (*theta) {
            req = BoundRequest::theta(load_graph(graph_path), parse_theta_variant(variant));
        } else if (*ball) {
            if (w_opt->count() == 0 && ws_opt->count() == 0) {
                err << "bounds: ball requires --w or --weight-set\n" << "run 'bounds --help' for usage\n";
                return exit_usage;
            }
            if (!weight_set.empty()) req = BoundRequest::ball(n, parse_int_list(weight_set), d);
            else req = BoundRequest::ball_radius(n, w, d);
        } else if (*projective) {
            req = BoundRequest::projective(q, n, d);
        } else if (*triple) {
            req = BoundRequest::triple(n, parse_pseudo_distance(f_name), m);
        }
        req.tol = tol;
        req.validate();
        const BoundResult result = run_bound(req, &cache);
        print_result(result, fmt, out);
        return result.optimal() ? exit_ok : exit_solver;
    } catch (const RangeError& e) {
        err << "bounds: " << e.what() << "\n";
        return exit_usage;
    } catch (const FormatError& e) {
        err << "bounds: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        err << "bounds: " << e.what() << "\n";
        return exit_solver;
    }
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace codebounds::cli
