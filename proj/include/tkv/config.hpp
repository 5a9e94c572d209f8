#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tkv/types.hpp"

namespace tkv::config {

// Configuration / schema failure. `path` names the offending field
// ("damping.kind", "beam.k1", ...); the message carries the diagnostic.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string path, const std::string& what)
        : std::runtime_error(path.empty() ? what : path + ": " + what),
          path_(std::move(path)) {}
    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

// Effective run parameters for every subcommand, parsed from a JSON document
// and schema-validated: unknown keys are rejected at every level, physical
// constants must be positive, enums must match exactly.
struct RunConfig {
    // physics
    BeamParameters beam;
    BoundaryConditions bc = BoundaryConditions::DirichletNeumann;
    DampingProfile damping;
    std::string damping_kind = "constant";  // zero | constant | piecewise

    // grid + time stepping (simulate)
    std::size_t n_cells = 400;
    double dt = 0.0;       // 0 = automatic CFL-scaled step
    double t_final = 200.0;
    std::size_t stride = 1;

    // initial data (simulate): random-phase modal superposition
    std::size_t init_n_max = 64;
    double init_amplitude_power = -0.5;

    // decay-fit window; 0/0 = last time decade of the run
    double fit_t_lo = 0.0;
    double fit_t_hi = 0.0;

    // spectral configuration (spectrum, resolvent frequency seeding)
    double c = 1.0;
    int case_override = 0;

    // spectrum command
    std::vector<int> branches{1, 2};
    long n_lo = 50;
    long n_hi = 100;
    bool verify_boxes = true;

    // resolvent command
    long res_n_lo = 10;
    long res_n_hi = 80;
    double res_tol = 1e-6;
    std::string res_frequencies = "auto";  // auto | blowup | branch1 | branch2

    // verify command
    std::string suite = "all";  // identities | decay | blowup | resolvent | all

    // common
    std::uint64_t seed = 42;
    int threads = 1;
    std::string out;  // empty = stdout

    // normalized document (defaults merged, overrides applied) for metadata
    nlohmann::json echo;
};

// Replaces values in `doc` from environment variables with the given prefix.
// The variable name is the upper-cased key path with "__" separating levels:
//   TKV_BEAM__K1=2.5, TKV_GRID__N_CELLS=800, TKV_SEED=7.
// Values are parsed as JSON scalars (falling back to string). Only keys whose
// path already exists in the schema are recognized; unknown variables with
// the prefix raise ConfigError.
void apply_env_overrides(nlohmann::json& doc, const std::string& prefix = "TKV_");

// Schema-validates and converts. Throws ConfigError on any violation.
RunConfig parse_run_config(const nlohmann::json& doc);

// Reads the file, applies env overrides (optional), parses. File/JSON errors
// surface as ConfigError with the parser's line diagnostics.
RunConfig load_run_config(const std::string& path, bool env_overrides = true);

}  // namespace tkv::config
