#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "logit.hpp"
#include "rng.hpp"
#include "table.hpp"

namespace catinfo {

inline constexpr std::uint64_t kDefaultSeed = 20080531;

// Draw n covariate patterns from the source's empirical predictor margin,
// then the target from the fitted logit probability at each pattern. The
// sampled table spans pattern_vars | predictors | target (pattern_vars lets
// a study keep covariates needed by other models under test).
ContingencyTable sample_model_parametric(const LogitFit& fit,
                                         const ContingencyTable& covariate_source,
                                         std::size_t n, Rng& rng,
                                         VarSet pattern_vars = 0);

// n iid draws from the table's empirical joint distribution.
ContingencyTable sample_empirical_multinomial(const ContingencyTable& table,
                                              std::size_t n, Rng& rng);

// Simple random sample of n subjects without replacement; the table must
// carry observed integer counts.
ContingencyTable sample_subset(const ContingencyTable& table, std::size_t n, Rng& rng);

enum class Design {
    ModelParametric,
    EmpiricalMultinomial,
    SubsetWithoutReplacement,
};

const char* design_name(Design d);

struct SimModelSpec {
    std::string name;
    std::string formula; // logit model text, parsed per replicate by name
};

struct SimulationConfig {
    std::vector<Design> designs;
    std::vector<SimModelSpec> models;
    int replicates = 1000;
    std::vector<std::size_t> sample_sizes;
    double alpha_fit = 0.05;
    std::uint64_t master_seed = kDefaultSeed;
};

struct AcceptanceCell {
    Design design{};
    std::string generator; // generating model name (parametric design only)
    std::string model;     // model under test
    std::size_t sample_size = 0;
    int replicates = 0;
    int accepted = 0;
    int failed_fits = 0;
    double proportion = 0.0;    // accepted / replicates
    double mean_deviance = 0.0; // over successful refits
};

struct AcceptanceReport {
    SimulationConfig config;
    std::vector<AcceptanceCell> cells;
};

// The bootstrap goodness-of-fit study: per replicate, sample under the
// design, refit each model under test, and accept when the residual-deviance
// p-value clears alpha_fit. Failed or non-converged refits count as
// rejections. Replicate r draws from a stream derived from the master seed
// and the task coordinates, so reports are identical under any thread count.
AcceptanceReport run_acceptance_study(const SimulationConfig& config,
                                      const ContingencyTable& data,
                                      const std::vector<LogitFit>& fits,
                                      int threads = 1);

} // namespace catinfo
