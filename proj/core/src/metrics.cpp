#include "mmfp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "mmfp/adam.hpp"
#include "mmfp/log.hpp"
#include "mmfp/rng.hpp"

namespace mmfp {

namespace {

double dist_sq(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("mmd: feature dimension mismatch (" + std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

} // namespace

double median_heuristic_bandwidth(const std::vector<std::vector<double>>& a,
                                  const std::vector<std::vector<double>>& b) {
    std::vector<const std::vector<double>*> pool;
    pool.reserve(a.size() + b.size());
    for (const auto& x : a) pool.push_back(&x);
    for (const auto& x : b) pool.push_back(&x);
    std::vector<double> dists;
    dists.reserve(pool.size() * (pool.size() - 1) / 2);
    for (std::size_t i = 0; i < pool.size(); ++i)
        for (std::size_t j = i + 1; j < pool.size(); ++j)
            dists.push_back(std::sqrt(dist_sq(*pool[i], *pool[j])));
    if (dists.empty()) return 1.0;
    std::sort(dists.begin(), dists.end());
    const std::size_t n = dists.size();
    const double med = (n % 2 == 1) ? dists[n / 2] : 0.5 * (dists[n / 2 - 1] + dists[n / 2]);
    return med > 0.0 ? med : 1.0;
}

double mmd_sq(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
              const KernelSpec& k) {
    if (a.empty() || b.empty()) throw std::invalid_argument("mmd_sq: empty sample set");
    // Argument order is canonicalized so mmd_sq(A, B) and mmd_sq(B, A)
    // evaluate the same float expression and agree bit for bit.
    const auto* x = &a;
    const auto* y = &b;
    if (b < a) std::swap(x, y);
    const double sigma = k.bandwidth > 0.0 ? k.bandwidth : median_heuristic_bandwidth(*x, *y);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    auto mean_kernel = [&](const std::vector<std::vector<double>>& u, const std::vector<std::vector<double>>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j) s += std::exp(-dist_sq(u[i], v[j]) * inv);
        return s / (static_cast<double>(u.size()) * static_cast<double>(v.size()));
    };
    const double kxx = mean_kernel(*x, *x);
    const double kyy = mean_kernel(*y, *y);
    const double kxy = mean_kernel(*x, *y);
    return kxx + kyy - 2.0 * kxy;
}

int eval_stride(int T, int max_timesteps) {
    if (T <= 0) throw std::invalid_argument("eval_stride: T must be positive");
    if (max_timesteps <= 0) throw std::invalid_argument("eval_stride: max_timesteps must be positive");
    return (T + max_timesteps - 1) / max_timesteps;
}

std::vector<double> eval_features(const Trajectory& x_norm, int max_timesteps) {
    const int stride = eval_stride(x_norm.T(), max_timesteps);
    std::vector<double> out;
    out.reserve((x_norm.T() / stride + 1) * static_cast<std::size_t>(x_norm.point_dim));
    for (int t = 0; t < x_norm.T(); t += stride)
        out.insert(out.end(), x_norm.points[t].begin(), x_norm.points[t].end());
    return out;
}

namespace {

// Trajectory indices with this label kind, paired with their class ids.
std::vector<std::pair<int, int>> labeled_indices(const MotionDataset& ds, const std::string& kind) {
    std::vector<std::pair<int, int>> items;
    for (std::size_t i = 0; i < ds.trajectories.size(); ++i) {
        for (const auto& ann : ds.annotations[i]) {
            auto it = ann.tags.find(kind);
            if (it != ann.tags.end()) {
                items.emplace_back(static_cast<int>(i), it->second);
                break;
            }
        }
    }
    return items;
}

// One example's cross-entropy via logsumexp; accumulates d(loss/nb)/dp.
double ce_example_grad(const Mlp& net, const std::vector<double>& x, int label, double nb,
                       std::vector<double>& grad) {
    Mlp::Tape tape;
    const std::vector<double> logits = net.forward(x, tape);
    const double mx = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double l : logits) z += std::exp(l - mx);
    std::vector<double> dlogits(logits.size());
    for (std::size_t c = 0; c < logits.size(); ++c)
        dlogits[c] = (std::exp(logits[c] - mx) / z - (static_cast<int>(c) == label ? 1.0 : 0.0)) / nb;
    net.backward(tape, dlogits, grad);
    return std::log(z) + mx - logits[label];
}

} // namespace

double classifier_loss_grad(const Mlp& net, const std::vector<std::vector<double>>& feats,
                            const std::vector<int>& labels, std::vector<double>& grad) {
    if (feats.empty() || feats.size() != labels.size())
        throw std::invalid_argument("classifier_loss_grad: need matching non-empty feats and labels");
    if (grad.size() != net.params().size())
        throw std::invalid_argument("classifier_loss_grad: grad size does not match parameter count");
    const double n = static_cast<double>(feats.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < feats.size(); ++i) loss += ce_example_grad(net, feats[i], labels[i], n, grad);
    return loss / n;
}

TrajClassifier train_classifier(const MotionDataset& ds, const std::string& label_kind,
                                const ClassifierConfig& cfg) {
    ds.validate();
    if (cfg.epochs < 0 || cfg.batch_size <= 0 || !(cfg.lr > 0.0))
        throw std::invalid_argument("train_classifier: invalid config");
    const auto items = labeled_indices(ds, label_kind);
    std::set<int> classes;
    for (const auto& [i, c] : items) classes.insert(c);
    if (classes.size() < 2)
        throw std::invalid_argument("train_classifier: label kind '" + label_kind + "' has " +
                                    std::to_string(classes.size()) + " classes, need at least 2");

    TrajClassifier clf;
    clf.kind = label_kind;
    clf.space = ds.space;
    clf.point_dim = ds.point_dim;
    clf.T = ds.T;
    clf.class_ids.assign(classes.begin(), classes.end());

    std::map<int, int> class_index;
    for (std::size_t i = 0; i < clf.class_ids.size(); ++i) class_index[clf.class_ids[i]] = static_cast<int>(i);

    MlpSpec spec;
    spec.in_dim = ds.T * ds.point_dim;
    spec.hidden = cfg.hidden;
    spec.out_dim = static_cast<int>(clf.class_ids.size());
    clf.net = Mlp(spec);
    Rng init_rng = Rng::derive(cfg.seed, 0);
    clf.net.init(init_rng);
    Rng shuffle_rng = Rng::derive(cfg.seed, 2);

    std::vector<std::vector<double>> feats(items.size());
    std::vector<int> labels(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        feats[i] = flatten(ds.norm.normalize(ds.trajectories[items[i].first]));
        labels[i] = class_index.at(items[i].second);
    }

    Adam opt(clf.net.params().size(), AdamConfig{cfg.lr, 0.9, 0.999, 1e-8});
    std::vector<double> grad(clf.net.params().size());
    std::vector<int> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const double nb = static_cast<double>(end - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t k = start; k < end; ++k) {
                const int i = order[k];
                batch_loss += ce_example_grad(clf.net, feats[i], labels[i], nb, grad);
            }
            epoch_loss += batch_loss;
            if (!std::isfinite(batch_loss))
                throw std::runtime_error("train_classifier: non-finite loss at epoch " + std::to_string(epoch));
            opt.step(clf.net.params(), grad);
        }
        if (epoch % 100 == 0)
            log_debug("classifier", "kind=" + label_kind + " epoch=" + std::to_string(epoch) +
                                        " loss=" + std::to_string(epoch_loss / static_cast<double>(items.size())));
    }
    return clf;
}

int TrajClassifier::predict(const Trajectory& x_norm) const {
    if (x_norm.T() != T || x_norm.point_dim != point_dim)
        throw std::invalid_argument("TrajClassifier::predict: trajectory shape " + std::to_string(x_norm.T()) + "x" +
                                    std::to_string(x_norm.point_dim) + " does not match classifier " +
                                    std::to_string(T) + "x" + std::to_string(point_dim));
    const std::vector<double> logits = net.forward(flatten(x_norm));
    std::size_t best = 0;
    for (std::size_t c = 1; c < logits.size(); ++c)
        if (logits[c] > logits[best]) best = c;
    return class_ids[best];
}

double classifier_train_accuracy(const TrajClassifier& clf, const MotionDataset& ds) {
    const auto items = labeled_indices(ds, clf.kind);
    if (items.empty()) throw std::invalid_argument("classifier_train_accuracy: no trajectories carry this label kind");
    int hits = 0;
    for (const auto& [i, c] : items)
        if (clf.predict(ds.norm.normalize(ds.trajectories[i])) == c) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(items.size());
}

std::uint64_t text_seed(std::uint64_t base_seed, const std::string& text) {
    return base_seed ^ fnv1a64(text.data(), text.size());
}

std::map<std::string, double> motion_accuracy(const SampleFn& sample, const MotionDataset& ds,
                                              const std::vector<TrajClassifier>& clfs, int n_per_text,
                                              std::uint64_t seed) {
    if (n_per_text <= 0) throw std::invalid_argument("motion_accuracy: n_per_text must be positive");
    std::map<std::string, const TrajClassifier*> by_kind;
    for (const auto& clf : clfs) by_kind[clf.kind] = &clf;
    const std::vector<std::string> all_kinds = ds.label_kinds();
    if (all_kinds.empty()) throw std::invalid_argument("motion_accuracy: dataset has no labeled texts");
    for (const auto& kind : all_kinds)
        if (!by_kind.count(kind))
            throw std::invalid_argument("motion_accuracy: no classifier for label kind '" + kind + "'");

    // Distinct tagged texts in first-appearance order.
    std::vector<std::string> texts;
    std::set<std::string> seen;
    for (const auto& anns : ds.annotations)
        for (const auto& ann : anns)
            if (!ann.tags.empty() && seen.insert(ann.text).second) texts.push_back(ann.text);

    std::map<std::string, int> hits, totals;
    for (const std::string& text : texts) {
        const std::map<std::string, int> tags = ds.tags_for_text(text);
        const bool covers_all = tags.size() == all_kinds.size();
        const auto samples = sample(text, n_per_text, text_seed(seed, text));
        for (const Trajectory& raw : samples) {
            bool joint = true;
            for (const auto& [kind, want] : tags) {
                const int got = by_kind.at(kind)->predict(ds.norm.normalize(raw));
                ++totals[kind];
                if (got == want)
                    ++hits[kind];
                else
                    joint = false;
            }
            if (covers_all) {
                ++totals["both"];
                if (joint) ++hits["both"];
            }
        }
    }

    std::map<std::string, double> out;
    for (const auto& [kind, total] : totals)
        out[kind] = 100.0 * static_cast<double>(hits[kind]) / static_cast<double>(total);
    return out;
}

double level_mmd(const SampleFn& sample, const MotionDataset& ds, int level, int n_per_text,
                 const KernelSpec& k, int max_timesteps, std::uint64_t seed) {
    if (n_per_text <= 0) throw std::invalid_argument("level_mmd: n_per_text must be positive");
    const std::vector<std::string> texts = ds.texts_at_level(level);
    if (texts.empty()) throw std::invalid_argument("level_mmd: no texts at level " + std::to_string(level));
    double total = 0.0;
    for (const std::string& text : texts) {
        std::vector<std::vector<double>> demo;
        for (int i : ds.trajectories_for_text(text))
            demo.push_back(eval_features(ds.norm.normalize(ds.trajectories[i]), max_timesteps));
        std::vector<std::vector<double>> gen;
        for (const Trajectory& raw : sample(text, n_per_text, text_seed(seed, text)))
            gen.push_back(eval_features(ds.norm.normalize(raw), max_timesteps));
        total += mmd_sq(gen, demo, k);
    }
    return total / static_cast<double>(texts.size());
}

double robust_level_mmd(const SampleFn& sample, const MotionDataset& ds, int level, const ParaphraseMap& heldout,
                        int n_per_text, const KernelSpec& k, int max_timesteps, std::uint64_t seed) {
    if (n_per_text <= 0) throw std::invalid_argument("robust_level_mmd: n_per_text must be positive");
    const std::vector<std::string> texts = ds.texts_at_level(level);
    if (texts.empty()) throw std::invalid_argument("robust_level_mmd: no texts at level " + std::to_string(level));
    double total = 0.0;
    int covered = 0;
    for (const std::string& text : texts) {
        auto it = heldout.find(text);
        if (it == heldout.end() || it->second.variants.empty()) continue;
        ++covered;
        std::vector<std::vector<double>> demo;
        for (int i : ds.trajectories_for_text(text))
            demo.push_back(eval_features(ds.norm.normalize(ds.trajectories[i]), max_timesteps));
        double text_total = 0.0;
        for (const std::string& variant : it->second.variants) {
            std::vector<std::vector<double>> gen;
            for (const Trajectory& raw : sample(variant, n_per_text, text_seed(seed, variant)))
                gen.push_back(eval_features(ds.norm.normalize(raw), max_timesteps));
            text_total += mmd_sq(gen, demo, k);
        }
        total += text_total / static_cast<double>(it->second.variants.size());
    }
    if (covered == 0)
        throw std::invalid_argument("robust_level_mmd: no held-out paraphrases for any text at level " +
                                    std::to_string(level));
    return total / static_cast<double>(covered);
}

} // namespace mmfp
