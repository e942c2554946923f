#pragma once

#include <string>
#include <vector>

#include "mmfp/diffusion.hpp"
#include "mmfp/flow.hpp"
#include "mmfp/manifold.hpp"
#include "mmfp/metrics.hpp"

namespace mmfp {

// Parameters a schedule is built from; the kind comes from the CLI.
struct ScheduleParams {
    int n_steps = 1000;
    double beta_min = 1e-4, beta_max = 0.02;
    double sigma_min = 0.01, sigma_max = 10.0;

    NoiseSchedule build(ScheduleKind kind) const;
};

struct EvalConfig {
    int n_per_text = 100;
    int max_timesteps = 64;
    std::uint64_t seed = 0;
    ClassifierConfig classifier;
};

// One config file drives every stage; each command reads its section.
// Unknown keys anywhere are an error so typos cannot silently fall back
// to defaults.
struct RunConfig {
    ManifoldConfig manifold;
    FlowTrainConfig flow;
    DiffusionTrainConfig diffusion;
    ScheduleParams schedule;
    SamplerConfig sampler;
    KernelSpec kernel;
    EvalConfig eval;
};

RunConfig default_run_config();

// Empty path gives the defaults. Later paths override earlier ones key
// by key (objects merge recursively).
RunConfig load_run_config(const std::vector<std::string>& paths);
RunConfig load_run_config(const std::string& path);

// Compact JSON with every field materialized, defaults included.
std::string run_config_echo(const RunConfig& cfg);
std::string manifold_config_echo(const ManifoldConfig& cfg);
std::string flow_config_echo(const FlowTrainConfig& cfg);
std::string diffusion_config_echo(const DiffusionTrainConfig& cfg, const NoiseSchedule& sched);

} // namespace mmfp
