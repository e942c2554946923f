#include "mmfp/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "mmfp/checkpoint.hpp"
#include "mmfp/datagen.hpp"
#include "mmfp/dataset.hpp"
#include "mmfp/diffusion.hpp"
#include "mmfp/flow.hpp"
#include "mmfp/log.hpp"
#include "mmfp/manifold.hpp"
#include "mmfp/metrics.hpp"
#include "mmfp/runconfig.hpp"
#include "mmfp/textenc.hpp"

namespace mmfp {

namespace {

using nlohmann::json;

std::string shortest_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& body, const char* what) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(std::string(what) + ": cannot open '" + path + "' for writing");
    out << body;
    if (!out) throw std::runtime_error(std::string(what) + ": write to '" + path + "' failed");
}

// "foo.json" -> "foo.<tag>.json"; no extension -> append ".<tag>.json".
std::string sibling_path(const std::string& out, const std::string& tag) {
    const std::string suffix = ".json";
    if (out.size() > suffix.size() && out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
        return out.substr(0, out.size() - suffix.size()) + "." + tag + suffix;
    return out + "." + tag + suffix;
}

// "foo.json" -> "foo.csv"; otherwise append ".csv".
std::string csv_path_for(const std::string& out) {
    const std::string suffix = ".json";
    if (out.size() > suffix.size() && out.compare(out.size() - suffix.size(), suffix.size(), suffix) == 0)
        return out.substr(0, out.size() - suffix.size()) + ".csv";
    return out + ".csv";
}

int cmd_gen_data(const std::string& kind, std::uint64_t seed, const std::string& out) {
    MotionDataset ds = generate_dataset(kind, seed);
    save_dataset(ds, out);
    const std::string train_path = sibling_path(out, "train-paraphrases");
    const std::string heldout_path = sibling_path(out, "heldout-paraphrases");
    save_paraphrases(builtin_train_paraphrases(kind), train_path);
    save_paraphrases(builtin_heldout_paraphrases(kind), heldout_path);
    log_info("gen-data", "wrote " + std::to_string(ds.trajectories.size()) + " trajectories (T=" +
                             std::to_string(ds.T) + ", " + space_name(ds.space) + ") to '" + out + "'");
    log_info("gen-data", "wrote paraphrases to '" + train_path + "' and '" + heldout_path + "'");
    return 0;
}

TextEncoder encoder_from_flag(const std::string& embeddings_path) {
    if (embeddings_path.empty()) return TextEncoder::hash_encoder();
    return TextEncoder::load_lookup(embeddings_path);
}

// Dimension conflicts are fatal; a changed fingerprint alone only warns,
// so a regenerated-but-identical-shape dataset stays usable.
void check_ckpt_against_data(const Checkpoint& ckpt, const MotionDataset& ds) {
    if (ckpt.space != ds.space || ckpt.point_dim != ds.point_dim || ckpt.T != ds.T)
        throw std::runtime_error("checkpoint trained on " + space_name(ckpt.space) + " " +
                                 std::to_string(ckpt.point_dim) + "-dim T=" + std::to_string(ckpt.T) +
                                 " trajectories, dataset has " + space_name(ds.space) + " " +
                                 std::to_string(ds.point_dim) + "-dim T=" + std::to_string(ds.T));
    if (ckpt.dataset_fingerprint != 0 && ckpt.dataset_fingerprint != ds.fingerprint)
        log_info("cli", "dataset fingerprint " + fingerprint_hex(ds.fingerprint) +
                            " differs from the checkpoint's " + fingerprint_hex(ckpt.dataset_fingerprint));
}

int cmd_train_manifold(const std::string& data, const std::string& config, const std::string& out) {
    const MotionDataset ds = load_dataset(data);
    const RunConfig cfg = load_run_config(config);
    const ManifoldTrainResult result = train_manifold(ds, cfg.manifold);

    Checkpoint ckpt;
    ckpt.space = ds.space;
    ckpt.point_dim = ds.point_dim;
    ckpt.T = ds.T;
    ckpt.dataset_fingerprint = ds.fingerprint;
    ckpt.norm = ds.norm;
    ckpt.manifold = result.manifold;
    ckpt.training.emplace_back("manifold", manifold_config_echo(cfg.manifold));
    save_checkpoint(ckpt, out);
    if (!result.loss_log.empty()) {
        const auto& last = result.loss_log.back();
        log_info("train-manifold", "final losses: reconstruction=" + std::to_string(last[0]) +
                                       " latent_norm=" + std::to_string(last[1]) +
                                       " smoothness=" + std::to_string(last[2]));
    }
    log_info("train-manifold", "wrote checkpoint '" + out + "'");
    return 0;
}

int cmd_train_flow(const std::string& data, const std::string& ckpt_path, const std::string& paraphrases,
                   const std::string& config, const std::string& embeddings, const std::string& out) {
    const MotionDataset ds = load_dataset(data);
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    check_ckpt_against_data(ckpt, ds);
    const RunConfig cfg = load_run_config(config);
    if (ckpt.generative != GenerativeKind::none)
        log_info("train-flow", "checkpoint already has a " + generative_name(ckpt.generative) +
                                   " model; replacing it");
    ckpt.text_encoder = encoder_from_flag(embeddings);

    const ParaphraseMap paras = paraphrases.empty() ? ParaphraseMap{} : load_paraphrases(paraphrases);
    const std::vector<FlowItem> items = make_latent_pairs(ds, ckpt.manifold, ckpt.text_encoder, paras);
    FlowTrainResult result = train_latent_flow(items, ckpt.manifold.m(), cfg.flow);
    log_info("train-flow", "loss " + std::to_string(result.initial_loss) + " -> " +
                               std::to_string(result.final_loss) + " on frozen draws");

    ckpt.generative = GenerativeKind::flow;
    ckpt.head = std::move(result.head);
    ckpt.net = std::move(result.field);
    ckpt.sampler = cfg.sampler;
    ckpt.training.emplace_back("flow", flow_config_echo(cfg.flow));
    save_checkpoint(ckpt, out);
    log_info("train-flow", "wrote checkpoint '" + out + "'");
    return 0;
}

int cmd_train_diffusion(const std::string& data, const std::string& ckpt_path, const std::string& schedule,
                        const std::string& config, const std::string& embeddings, const std::string& out) {
    const MotionDataset ds = load_dataset(data);
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    check_ckpt_against_data(ckpt, ds);
    const RunConfig cfg = load_run_config(config);
    if (ckpt.generative != GenerativeKind::none)
        log_info("train-diffusion", "checkpoint already has a " + generative_name(ckpt.generative) +
                                        " model; replacing it");
    ckpt.text_encoder = encoder_from_flag(embeddings);

    ScheduleKind kind;
    if (schedule == "ve")
        kind = ScheduleKind::ve;
    else if (schedule == "vp1")
        kind = ScheduleKind::vp_linear;
    else if (schedule == "vp2")
        kind = ScheduleKind::vp_cosine;
    else
        throw std::runtime_error("train-diffusion: --schedule must be ve, vp1 or vp2, got '" + schedule + "'");
    const NoiseSchedule sched = cfg.schedule.build(kind);

    const std::vector<FlowItem> items = make_latent_pairs(ds, ckpt.manifold, ckpt.text_encoder, {});
    DiffusionTrainResult result = train_latent_diffusion(items, ckpt.manifold.m(), sched, cfg.diffusion);
    log_info("train-diffusion", "loss " + std::to_string(result.initial_loss) + " -> " +
                                    std::to_string(result.final_loss) + " on frozen draws");

    ckpt.generative = GenerativeKind::diffusion;
    ckpt.head = std::move(result.head);
    ckpt.net = std::move(result.score);
    ckpt.schedule = sched;
    ckpt.training.emplace_back("diffusion", diffusion_config_echo(cfg.diffusion, sched));
    save_checkpoint(ckpt, out);
    log_info("train-diffusion", "wrote checkpoint '" + out + "'");
    return 0;
}

std::string trajectories_json(const Checkpoint& ckpt, const std::string& text, std::uint64_t seed,
                              const std::vector<Trajectory>& trajs) {
    json doc;
    doc["schema_version"] = 1;
    doc["space"] = space_name(ckpt.space);
    doc["point_dim"] = ckpt.point_dim;
    doc["T"] = ckpt.T;
    doc["text"] = text;
    doc["seed"] = seed;
    json arr = json::array();
    for (const auto& x : trajs) arr.push_back(x.points);
    doc["trajectories"] = arr;
    return doc.dump();
}

std::string trajectories_csv(const std::vector<Trajectory>& trajs) {
    std::ostringstream out;
    out << "t";
    for (std::size_t i = 0; i < trajs.size(); ++i)
        for (int d = 0; d < trajs[i].point_dim; ++d) out << ",traj" << i << "_d" << d;
    out << "\n";
    for (int t = 0; t < trajs[0].T(); ++t) {
        out << t;
        for (const auto& x : trajs)
            for (int d = 0; d < x.point_dim; ++d) out << "," << shortest_double(x.points[t][d]);
        out << "\n";
    }
    return out.str();
}

std::string trajectories_svg(const std::vector<Trajectory>& trajs) {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    bool first = true;
    for (const auto& x : trajs)
        for (const auto& p : x.points) {
            if (first) {
                xmin = xmax = p[0];
                ymin = ymax = p[1];
                first = false;
            }
            xmin = std::min(xmin, p[0]);
            xmax = std::max(xmax, p[0]);
            ymin = std::min(ymin, p[1]);
            ymax = std::max(ymax, p[1]);
        }
    const double pad = 0.05 * std::max(xmax - xmin, ymax - ymin) + 1e-6;
    xmin -= pad, xmax += pad, ymin -= pad, ymax += pad;
    const double w = 640.0, h = 640.0;
    const double sx = w / (xmax - xmin), sy = h / (ymax - ymin);
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    char buf[64];
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" viewBox=\"0 0 640 640\">\n";
    out << "<rect width=\"640\" height=\"640\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        out << "<polyline fill=\"none\" stroke=\"" << palette[i % 8] << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : trajs[i].points) {
            // SVG y grows downward; flip so plots read like the plane.
            std::snprintf(buf, sizeof(buf), "%.3f,%.3f ", (p[0] - xmin) * sx, h - (p[1] - ymin) * sy);
            out << buf;
        }
        out << "\"/>\n";
    }
    out << "</svg>\n";
    return out.str();
}

int cmd_sample(const std::string& ckpt_path, const std::string& text, int n, std::uint64_t seed,
               const std::string& out, const std::string& svg, const std::string& csv) {
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    const std::vector<Trajectory> trajs = generate_motion(ckpt, text, n, seed);
    write_text_file(out, trajectories_json(ckpt, text, seed, trajs), "sample");
    log_info("sample", "wrote " + std::to_string(trajs.size()) + " trajectories to '" + out + "'");
    if (!svg.empty()) {
        if (ckpt.space != Space::euclidean || ckpt.point_dim != 2)
            throw std::runtime_error("sample: --svg needs 2-dimensional euclidean trajectories; use --csv for " +
                                     std::to_string(ckpt.point_dim) + "-dim " + space_name(ckpt.space));
        write_text_file(svg, trajectories_svg(trajs), "sample");
        log_info("sample", "wrote plot '" + svg + "'");
    }
    if (!csv.empty()) {
        write_text_file(csv, trajectories_csv(trajs), "sample");
        log_info("sample", "wrote csv '" + csv + "'");
    }
    return 0;
}

struct EvalResult {
    std::map<int, double> mmd;
    std::map<int, double> robust; // only covered levels
    std::map<std::string, double> accuracy;
    std::map<std::string, double> clf_train_accuracy;
};

bool level_has_heldout(const MotionDataset& ds, int level, const ParaphraseMap& heldout) {
    for (const auto& text : ds.texts_at_level(level)) {
        auto it = heldout.find(text);
        if (it != heldout.end() && !it->second.variants.empty()) return true;
    }
    return false;
}

EvalResult evaluate_checkpoint(const Checkpoint& ckpt, const MotionDataset& ds, const ParaphraseMap& heldout,
                               const RunConfig& cfg, const std::vector<TrajClassifier>& clfs) {
    SampleFn sample = [&](const std::string& text, int n, std::uint64_t seed) {
        SamplerConfig sc = ckpt.sampler;
        sc.seed = seed;
        return generate_motion(ckpt, text, n, sc);
    };
    EvalResult r;
    for (int level = 1; level <= ds.max_level(); ++level) {
        r.mmd[level] = level_mmd(sample, ds, level, cfg.eval.n_per_text, cfg.kernel, cfg.eval.max_timesteps,
                                 cfg.eval.seed);
        if (level_has_heldout(ds, level, heldout))
            r.robust[level] = robust_level_mmd(sample, ds, level, heldout, cfg.eval.n_per_text, cfg.kernel,
                                               cfg.eval.max_timesteps, cfg.eval.seed);
    }
    r.accuracy = motion_accuracy(sample, ds, clfs, cfg.eval.n_per_text, cfg.eval.seed);
    for (const auto& clf : clfs) r.clf_train_accuracy[clf.kind] = classifier_train_accuracy(clf, ds);
    return r;
}

std::vector<TrajClassifier> train_eval_classifiers(const MotionDataset& ds, const RunConfig& cfg) {
    std::vector<TrajClassifier> clfs;
    for (const std::string& kind : ds.label_kinds()) {
        ClassifierConfig ccfg = cfg.eval.classifier;
        ccfg.seed = ccfg.seed ^ fnv1a64(kind.data(), kind.size());
        clfs.push_back(train_classifier(ds, kind, ccfg));
        log_info("eval", "classifier '" + kind + "' train accuracy " +
                             std::to_string(classifier_train_accuracy(clfs.back(), ds)) + "%");
    }
    return clfs;
}

json eval_result_json(const MotionDataset& ds, const EvalResult& r, int max_timesteps) {
    json levels = json::object();
    for (const auto& [level, v] : r.mmd) {
        json lj{{"mmd", v}};
        auto it = r.robust.find(level);
        lj["robust_mmd"] = it == r.robust.end() ? json() : json(it->second);
        levels[std::to_string(level)] = lj;
    }
    return json{{"levels", levels},
                {"accuracy", r.accuracy},
                {"classifier_train_accuracy", r.clf_train_accuracy},
                {"stride", eval_stride(ds.T, max_timesteps)}};
}

int cmd_eval(const std::string& ckpt_path, const std::string& data, const std::string& paraphrases,
             const std::string& config, const std::string& report) {
    const Checkpoint ckpt = load_checkpoint(ckpt_path);
    const MotionDataset ds = load_dataset(data);
    check_ckpt_against_data(ckpt, ds);
    const RunConfig cfg = load_run_config(config);
    const ParaphraseMap heldout = paraphrases.empty() ? ParaphraseMap{} : load_paraphrases(paraphrases);
    log_info("eval", "kernel timestep stride " + std::to_string(eval_stride(ds.T, cfg.eval.max_timesteps)));

    const std::vector<TrajClassifier> clfs = train_eval_classifiers(ds, cfg);
    const EvalResult r = evaluate_checkpoint(ckpt, ds, heldout, cfg, clfs);

    json doc = eval_result_json(ds, r, cfg.eval.max_timesteps);
    doc["schema_version"] = 1;
    doc["dataset"] = {{"path", data}, {"fingerprint", fingerprint_hex(ds.fingerprint)}};
    doc["checkpoint"] = {{"path", ckpt_path}, {"generative", generative_name(ckpt.generative)}};
    doc["config"] = json::parse(run_config_echo(cfg));
    doc["seeds"] = {{"eval", cfg.eval.seed}, {"classifier", cfg.eval.classifier.seed}};
    write_text_file(report, doc.dump(), "eval");
    log_info("eval", "wrote report '" + report + "'");
    return 0;
}

int cmd_compare(const std::string& data, const std::vector<std::string>& configs, const std::string& paraphrases,
                const std::string& heldout_path, const std::string& out) {
    const MotionDataset ds = load_dataset(data);
    const RunConfig cfg = load_run_config(configs);
    const ParaphraseMap train_paras = paraphrases.empty() ? ParaphraseMap{} : load_paraphrases(paraphrases);
    const ParaphraseMap heldout = heldout_path.empty() ? ParaphraseMap{} : load_paraphrases(heldout_path);

    log_info("compare", "training shared manifold");
    const ManifoldTrainResult mres = train_manifold(ds, cfg.manifold);
    const TextEncoder enc = TextEncoder::hash_encoder();

    Checkpoint base;
    base.space = ds.space;
    base.point_dim = ds.point_dim;
    base.T = ds.T;
    base.dataset_fingerprint = ds.fingerprint;
    base.norm = ds.norm;
    base.manifold = mres.manifold;
    base.text_encoder = enc;
    base.training.emplace_back("manifold", manifold_config_echo(cfg.manifold));

    const std::vector<TrajClassifier> clfs = train_eval_classifiers(ds, cfg);
    const std::vector<FlowItem> flow_items = make_latent_pairs(ds, base.manifold, enc, train_paras);
    const std::vector<FlowItem> diff_items = make_latent_pairs(ds, base.manifold, enc, {});

    struct Row {
        std::string model;
        EvalResult r;
    };
    std::vector<Row> rows;

    {
        log_info("compare", "training flow model");
        FlowTrainResult fres = train_latent_flow(flow_items, base.manifold.m(), cfg.flow);
        Checkpoint ckpt = base;
        ckpt.generative = GenerativeKind::flow;
        ckpt.head = std::move(fres.head);
        ckpt.net = std::move(fres.field);
        ckpt.sampler = cfg.sampler;
        rows.push_back({"mmfp-flow", evaluate_checkpoint(ckpt, ds, heldout, cfg, clfs)});
    }
    const std::pair<std::string, ScheduleKind> variants[] = {{"diffusion-ve", ScheduleKind::ve},
                                                             {"diffusion-vp1", ScheduleKind::vp_linear},
                                                             {"diffusion-vp2", ScheduleKind::vp_cosine}};
    for (const auto& [name, kind] : variants) {
        log_info("compare", "training " + name);
        const NoiseSchedule sched = cfg.schedule.build(kind);
        DiffusionTrainResult dres = train_latent_diffusion(diff_items, base.manifold.m(), sched, cfg.diffusion);
        Checkpoint ckpt = base;
        ckpt.generative = GenerativeKind::diffusion;
        ckpt.head = std::move(dres.head);
        ckpt.net = std::move(dres.score);
        ckpt.schedule = sched;
        rows.push_back({name, evaluate_checkpoint(ckpt, ds, heldout, cfg, clfs)});
    }

    json rows_json = json::array();
    for (const auto& row : rows) {
        json rj = eval_result_json(ds, row.r, cfg.eval.max_timesteps);
        rj["model"] = row.model;
        rows_json.push_back(rj);
    }
    json doc{{"schema_version", 1},
             {"dataset", {{"path", data}, {"fingerprint", fingerprint_hex(ds.fingerprint)}}},
             {"config", json::parse(run_config_echo(cfg))},
             {"rows", rows_json}};
    write_text_file(out, doc.dump(), "compare");

    std::ostringstream csv;
    csv << "model";
    for (int level = 1; level <= ds.max_level(); ++level) csv << ",mmd_l" << level;
    for (int level = 1; level <= ds.max_level(); ++level) csv << ",robust_mmd_l" << level;
    std::vector<std::string> acc_keys;
    for (const auto& [k, v] : rows[0].r.accuracy) acc_keys.push_back(k);
    for (const auto& k : acc_keys) csv << ",acc_" << k;
    csv << "\n";
    for (const auto& row : rows) {
        csv << row.model;
        for (int level = 1; level <= ds.max_level(); ++level) csv << "," << shortest_double(row.r.mmd.at(level));
        for (int level = 1; level <= ds.max_level(); ++level) {
            auto it = row.r.robust.find(level);
            csv << ",";
            if (it != row.r.robust.end()) csv << shortest_double(it->second);
        }
        for (const auto& k : acc_keys) csv << "," << shortest_double(row.r.accuracy.at(k));
        csv << "\n";
    }
    const std::string csv_path = csv_path_for(out);
    write_text_file(csv_path, csv.str(), "compare");
    log_info("compare", "wrote '" + out + "' and '" + csv_path + "'");
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"motion manifold flow primitives"};
    app.require_subcommand(1);

    std::string kind, data, config, out, ckpt, paraphrases, heldout, text, svg, csv, schedule, report, embeddings;
    std::vector<std::string> configs;
    std::uint64_t seed = 0;
    int n = 1;

    auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset and its paraphrase files");
    gen->add_option("--kind", kind, "toy2d, se3-pouring or waving7")->required();
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--out", out, "dataset path")->required();

    auto* tm = app.add_subcommand("train-manifold", "train the autoencoder stage");
    tm->add_option("--data", data, "dataset path")->required();
    tm->add_option("--config", config, "run config path");
    tm->add_option("--out", out, "checkpoint path")->required();

    auto* tf = app.add_subcommand("train-flow", "train the latent flow on a manifold checkpoint");
    tf->add_option("--data", data, "dataset path")->required();
    tf->add_option("--ckpt", ckpt, "manifold checkpoint path")->required();
    tf->add_option("--paraphrases", paraphrases, "training paraphrase file");
    tf->add_option("--config", config, "run config path");
    tf->add_option("--embeddings", embeddings, "text embedding table (default: built-in hash encoder)");
    tf->add_option("--out", out, "checkpoint path")->required();

    auto* td = app.add_subcommand("train-diffusion", "train a latent diffusion baseline");
    td->add_option("--data", data, "dataset path")->required();
    td->add_option("--ckpt", ckpt, "manifold checkpoint path")->required();
    td->add_option("--schedule", schedule, "ve, vp1 or vp2")->required();
    td->add_option("--config", config, "run config path");
    td->add_option("--embeddings", embeddings, "text embedding table (default: built-in hash encoder)");
    td->add_option("--out", out, "checkpoint path")->required();

    auto* sm = app.add_subcommand("sample", "generate motions from a checkpoint");
    sm->add_option("--ckpt", ckpt, "checkpoint path")->required();
    sm->add_option("--text", text, "conditioning text")->required();
    sm->add_option("--n", n, "number of samples")->required();
    sm->add_option("--seed", seed, "sampling seed");
    sm->add_option("--out", out, "trajectory JSON path")->required();
    sm->add_option("--svg", svg, "2D plot path");
    sm->add_option("--csv", csv, "CSV export path");

    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint against a dataset");
    ev->add_option("--ckpt", ckpt, "checkpoint path")->required();
    ev->add_option("--data", data, "dataset path")->required();
    ev->add_option("--paraphrases", paraphrases, "held-out paraphrase file for robust MMD");
    ev->add_option("--config", config, "run config path");
    ev->add_option("--report", report, "report JSON path")->required();

    auto* cp = app.add_subcommand("compare", "train flow + diffusion variants and tabulate metrics");
    cp->add_option("--data", data, "dataset path")->required();
    cp->add_option("--configs,--config", configs, "run config paths, later override earlier");
    cp->add_option("--paraphrases", paraphrases, "training paraphrase file (flow)");
    cp->add_option("--heldout-paraphrases", heldout, "held-out paraphrase file for robust MMD");
    cp->add_option("--out", out, "table JSON path (CSV lands next to it)")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (gen->parsed()) return cmd_gen_data(kind, seed, out);
        if (tm->parsed()) return cmd_train_manifold(data, config, out);
        if (tf->parsed()) return cmd_train_flow(data, ckpt, paraphrases, config, embeddings, out);
        if (td->parsed()) return cmd_train_diffusion(data, ckpt, schedule, config, embeddings, out);
        if (sm->parsed()) return cmd_sample(ckpt, text, n, seed, out, svg, csv);
        if (ev->parsed()) return cmd_eval(ckpt, data, paraphrases, config, report);
        if (cp->parsed()) return cmd_compare(data, configs, paraphrases, heldout, out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    std::fprintf(stderr, "error: no command\n");
    return 1;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

} // namespace mmfp
