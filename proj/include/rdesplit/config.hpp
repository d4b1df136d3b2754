#pragma once

#include "rdesplit/convergence.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rdesplit {

/// Batch configuration: a flat key-value text file with [sections].
///
///   [driver]     kind = smooth | synthetic | file, dim, alpha, seed, levels, displacement, samples, file
///   [field]      preset = zero | constant | linear | sine, n, d, gamma, seed, scale, box
///   [z]          kind = canonical | zero | transposed | rough, exponent, scale
///   [problem]    T, N, y0
///   [experiment] base_N, levels, beta, q, seeds, check_N, samples, box
///
/// '#' starts a comment. Unknown sections and keys are errors.
struct DriverSpec {
    std::string kind = "smooth";
    int dim = 2;
    double alpha = 0.5;
    std::uint64_t seed = 1;
    int levels = 16;
    std::string displacement = "sign";
    int samples = 65537;
    std::string file;

    bool operator==(const DriverSpec&) const = default;
};

struct FieldSpec {
    std::string preset = "sine";
    int n = 2;
    int d = 0;  // 0: take the driver's dimension
    double gamma = 3.0;
    std::uint64_t seed = 1;
    double scale = 1.0;
    double box = 2.0;

    bool operator==(const FieldSpec&) const = default;
};

struct ZSpec {
    std::string kind = "canonical";
    double exponent = 0.0;  // rough: 0 means the driver's alpha
    double scale = 1.0;

    bool operator==(const ZSpec&) const = default;
};

struct ExperimentSpec {
    int base_N = 16;
    int levels = 6;
    double beta = 0.2;
    int q_num = 3;
    int q_den = 2;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    int check_N = 32;
    int samples = 8;
    double box = 2.0;

    bool operator==(const ExperimentSpec&) const = default;
};

struct ProblemConfig {
    DriverSpec driver;
    FieldSpec field;
    ZSpec z;
    double T = 1.0;
    int N = 256;
    std::vector<double> y0 = {0.5, -0.3};
    ExperimentSpec experiment;

    bool operator==(const ProblemConfig&) const = default;
};

ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::filesystem::path& path);

/// Canonical form: every key, fixed order, shortest round-trip numbers.
std::string emit_config(const ProblemConfig& config);

/// Throws InvalidArgument on any violated precondition.
void validate_config(const ProblemConfig& config);

/// Builds the driver, field, and Z. `base_dir` resolves a relative driver file;
/// `seed` replaces the driver seed.
Problem build_problem(const ProblemConfig& config, const std::filesystem::path& base_dir = {},
                      std::optional<std::uint64_t> seed = std::nullopt);

/// True when the driver depends on a seed (multi-seed experiments apply).
bool driver_is_seeded(const ProblemConfig& config);

}  // namespace rdesplit
