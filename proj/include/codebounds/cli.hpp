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
 * @file cli.hpp
 * @brief The `bounds` command line front end.
 *
 *   bounds delsarte|theta|ball|projective|triple|scan|validate-kernel [flags]
 *
 * Exit codes: 0 optimal, 1 usage error, 2 solver did not converge.
 */

#ifndef CODEBOUNDS_CLI_HPP
#define CODEBOUNDS_CLI_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "codebounds/blockdiag.hpp"
#include "codebounds/bounds.hpp"

namespace codebounds::cli {

enum class OutputFormat { table, json };

/// "18..20", "8,12,16", "5" or a mix such as "1..3,7". "20..18" is empty.
std::vector<int> parse_int_list(const std::string& text);

struct ScanSpec {
    std::vector<int> n;
    std::vector<int> w;
    int d = 8;
    double tol = 1e-8;
    int jobs = 1;
};

struct ScanCell {
    int n = 0;
    int w = 0;
    std::optional<BoundResult> result;
    std::string error;  // set when the cell failed
};

struct ScanTable {
    int d = 8;
    std::vector<int> n;
    std::vector<int> w;
    std::vector<ScanCell> cells;  // row-major over (n, w); w > n is skipped

    const ScanCell* cell(int n, int w) const;
    bool all_optimal() const;
    /// Rows n, columns w, entries floor(bound) or "-" / "fail".
    std::string to_text() const;
    nlohmann::json to_json() const;
};

ScanTable scan(const ScanSpec& spec, KernelCache& cache);

/// Runs the command line. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace codebounds::cli

#endif  // CODEBOUNDS_CLI_HPP
