// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "feec/derham/derham.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace feec::cli {

/// Flat key=value configuration with deterministic canonical form.
class RunConfig {
public:
    static RunConfig from_file(const std::string& path);
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void apply_override(const std::string& key_equals_value);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& dflt = "") const;
    double get_num(const std::string& key, double dflt) const;
    int get_int(const std::string& key, int dflt) const;

    std::string canonical() const;  ///< sorted "key=value" lines
    std::uint64_t hash() const;     ///< FNV-1a of the canonical text

private:
    std::map<std::string, std::string> values_;
};

std::vector<std::string> registry_cases();

/// Runs one registry case and writes its artifacts (CSV traces, sampled
/// fields, summary.json) into out_dir. Returns the headline metrics.
std::map<std::string, double> run_case(const RunConfig& config, const std::string& out_dir);

struct ConvergenceRow {
    int cells = 0;
    int dofs = 0;
    double error = 0.0;
    double order = 0.0; ///< log2(e_N / e_2N) for dyadic refinement, NaN on the first row
};

/// Repeats an error-producing case over the cell counts in n_list and reports
/// the observed orders; refinement stalls are flagged in the summary, not fatal.
std::vector<ConvergenceRow> convergence_sweep(const RunConfig& config, const std::vector<int>& n_list,
                                              const std::string& out_dir);

/// Per-patch uniform sampling of a field (physical values after push-forward).
void sample_field(const derham::FemField& field, int resolution, const std::string& path, std::uint64_t config_hash);

/// CLI entry: subcommands run / sweep / list-cases.
/// Exit codes: 0 success, 2 configuration error, 3 solver error.
int main_cli(int argc, char** argv);

} // namespace feec::cli
