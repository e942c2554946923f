#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmfp/diffusion.hpp"
#include "mmfp/flow.hpp"
#include "mmfp/manifold.hpp"
#include "mmfp/textenc.hpp"
#include "mmfp/trajectory.hpp"

namespace mmfp {

enum class GenerativeKind { none, flow, diffusion };

std::string generative_name(GenerativeKind k);

// Everything needed to turn a text into motions: normalization, the
// manifold pair, the text pipeline, and (once trained) a latent
// generative model. Serialized as a single JSON file; identical inputs
// produce byte-identical files.
struct Checkpoint {
    Space space = Space::euclidean;
    int point_dim = 0, T = 0;
    std::uint64_t dataset_fingerprint = 0;
    Normalization norm;
    MotionManifold manifold = MotionManifold::identity_adapter(Space::euclidean, 1, 1, 1.0);
    TextEncoder text_encoder = TextEncoder::hash_encoder();

    GenerativeKind generative = GenerativeKind::none;
    Mlp head; // h: 768 -> p, present when generative != none
    Mlp net;  // flow field v(s, z, tau) or eps predictor eps(t/N, z, tau)
    SamplerConfig sampler;   // flow
    NoiseSchedule schedule;  // diffusion

    // Training config echoes by stage name ("manifold", "flow",
    // "diffusion"), each a compact JSON object string.
    std::vector<std::pair<std::string, std::string>> training;

    int latent_dim() const { return manifold.m(); }
    void validate() const; // cross-checks every dimension against every other
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Samples n motions conditioned on a text and maps them through the
// decoder and denormalization. Draw i uses stream derive(seed, i), so
// prefixes of a larger batch match smaller batches exactly.
std::vector<Trajectory> generate_motion(const Checkpoint& ckpt, const std::string& text, int n,
                                        std::uint64_t seed);
std::vector<Trajectory> generate_motion(const Checkpoint& ckpt, const std::string& text, int n,
                                        const SamplerConfig& sampler);

} // namespace mmfp
