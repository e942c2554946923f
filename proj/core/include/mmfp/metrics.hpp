#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mmfp/dataset.hpp"
#include "mmfp/mlp.hpp"
#include "mmfp/textenc.hpp"
#include "mmfp/trajectory.hpp"

namespace mmfp {

// Gaussian RBF kernel k(a,b) = exp(-||a-b||^2 / (2 sigma^2)).
// bandwidth > 0 fixes sigma; 0 selects the median heuristic over the
// pooled points of both sets.
struct KernelSpec {
    double bandwidth = 0.0;
};

// Median of pairwise Euclidean distances over the pooled set, with the
// mean of the two middle values on even counts; 1.0 when all points
// coincide. Deterministic function of the multiset A of B.
double median_heuristic_bandwidth(const std::vector<std::vector<double>>& a,
                                  const std::vector<std::vector<double>>& b);

// Biased V-statistic MMD^2; identical summation order on both diagonal
// terms makes mmd_sq(A, A) exactly zero.
double mmd_sq(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
              const KernelSpec& k);

// Kernel inputs: trajectories are subsampled to at most max_timesteps
// with this stride before flattening.
int eval_stride(int T, int max_timesteps);
std::vector<double> eval_features(const Trajectory& x_norm, int max_timesteps);

struct ClassifierConfig {
    std::vector<int> hidden{64};
    int epochs = 300;
    int batch_size = 10;
    double lr = 1e-3;
    std::uint64_t seed = 0;
};

// Softmax classifier over flattened normalized trajectories for one
// label kind.
struct TrajClassifier {
    std::string kind;
    Space space = Space::euclidean;
    int point_dim = 0, T = 0;
    Mlp net;
    std::vector<int> class_ids; // output index -> class id

    int predict(const Trajectory& x_norm) const; // returns class id
};

// Labels come from the dataset tags for label_kind; trajectories without
// that tag are skipped. Throws if fewer than 2 classes remain.
TrajClassifier train_classifier(const MotionDataset& ds, const std::string& label_kind,
                                const ClassifierConfig& cfg);

// Percent correct on the trajectories that carry the label kind.
double classifier_train_accuracy(const TrajClassifier& clf, const MotionDataset& ds);

// Mean softmax cross-entropy of net logits against class indices;
// accumulates parameter gradients into grad, exactly one trainer batch
// step. grad must be pre-sized; it is added to, not reset.
double classifier_loss_grad(const Mlp& net, const std::vector<std::vector<double>>& feats,
                            const std::vector<int>& labels, std::vector<double>& grad);

// Produces n raw (denormalized) trajectories conditioned on a text.
using SampleFn = std::function<std::vector<Trajectory>(const std::string& text, int n, std::uint64_t seed)>;

// Per-text RNG stream so that identical conditioning texts always see
// identical samples regardless of evaluation order.
std::uint64_t text_seed(std::uint64_t base_seed, const std::string& text);

// Percent of samples whose predicted class matches the text's tag, per
// label kind over every tagged text, plus "both": the joint match over
// texts that carry every label kind in the dataset.
std::map<std::string, double> motion_accuracy(const SampleFn& sample, const MotionDataset& ds,
                                              const std::vector<TrajClassifier>& clfs, int n_per_text,
                                              std::uint64_t seed);

// Mean over distinct level texts of MMD^2 between n generated samples
// for the text and the demos annotated with it.
double level_mmd(const SampleFn& sample, const MotionDataset& ds, int level, int n_per_text,
                 const KernelSpec& k, int max_timesteps, std::uint64_t seed);

// Same but conditioning on each text's held-out paraphrases, still
// comparing against the canonical text's demos. Throws if no level text
// has held-out paraphrases.
double robust_level_mmd(const SampleFn& sample, const MotionDataset& ds, int level, const ParaphraseMap& heldout,
                        int n_per_text, const KernelSpec& k, int max_timesteps, std::uint64_t seed);

} // namespace mmfp
