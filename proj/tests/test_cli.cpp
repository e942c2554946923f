#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mmfp/checkpoint.hpp"
#include "mmfp/cli.hpp"
#include "mmfp/dataset.hpp"
#include "mmfp/flow.hpp"

using namespace mmfp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    Scratch() : dir("/tmp/mmfp_cli_scratch") {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string p(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
}

const char* kTinyConfig = R"({
  "manifold": {"m": 2, "encoder_hidden": [8], "decoder_hidden": [8], "epochs": 2, "batch_size": 16},
  "flow": {"epochs": 2, "batch_size": 16, "field_hidden": [8], "head_hidden": [8], "p": 2},
  "diffusion": {"epochs": 2, "batch_size": 16, "score_hidden": [8], "head_hidden": [8], "p": 2},
  "schedule": {"n_steps": 20},
  "sampler": {"steps": 8},
  "eval": {"n_per_text": 2, "max_timesteps": 16, "classifier": {"hidden": [8], "epochs": 2, "batch_size": 16}}
})";

} // namespace

TEST_CASE("gen-data writes the dataset plus both paraphrase files, deterministically") {
    Scratch s;
    CHECK(run_cli({"gen-data", "--kind", "toy2d", "--seed", "3", "--out", s.p("d1.json")}) == 0);
    CHECK(fs::exists(s.p("d1.json")));
    CHECK(fs::exists(s.p("d1.train-paraphrases.json")));
    CHECK(fs::exists(s.p("d1.heldout-paraphrases.json")));

    auto ds = load_dataset(s.p("d1.json"));
    CHECK(ds.trajectories.size() == 20);
    CHECK(ds.T == 201);
    CHECK(ds.fingerprint != 0);

    CHECK(run_cli({"gen-data", "--kind", "toy2d", "--seed", "3", "--out", s.p("d2.json")}) == 0);
    CHECK(slurp(s.p("d1.json")) == slurp(s.p("d2.json")));
    CHECK(slurp(s.p("d1.train-paraphrases.json")) == slurp(s.p("d2.train-paraphrases.json")));
}

TEST_CASE("the toy pipeline runs end to end through sample and eval") {
    Scratch s;
    spit(s.p("cfg.json"), kTinyConfig);
    REQUIRE(run_cli({"gen-data", "--kind", "toy2d", "--seed", "3", "--out", s.p("data.json")}) == 0);
    REQUIRE(run_cli({"train-manifold", "--data", s.p("data.json"), "--config", s.p("cfg.json"), "--out",
                     s.p("manifold.json")}) == 0);
    auto mckpt = load_checkpoint(s.p("manifold.json"));
    CHECK(mckpt.generative == GenerativeKind::none);
    CHECK(mckpt.manifold.m() == 2);
    CHECK(mckpt.dataset_fingerprint != 0);

    REQUIRE(run_cli({"train-flow", "--data", s.p("data.json"), "--ckpt", s.p("manifold.json"), "--paraphrases",
                     s.p("data.train-paraphrases.json"), "--config", s.p("cfg.json"), "--out",
                     s.p("flow.json")}) == 0);
    auto fckpt = load_checkpoint(s.p("flow.json"));
    CHECK(fckpt.generative == GenerativeKind::flow);
    CHECK(fckpt.sampler.steps == 8);
    REQUIRE(fckpt.training.size() == 2);

    REQUIRE(run_cli({"sample", "--ckpt", s.p("flow.json"), "--text", "move to the origin", "--n", "3", "--seed",
                     "11", "--out", s.p("samples.json"), "--svg", s.p("samples.svg"), "--csv",
                     s.p("samples.csv")}) == 0);
    json doc = json::parse(slurp(s.p("samples.json")));
    CHECK(doc["space"] == "euclidean");
    CHECK(doc["point_dim"] == 2);
    CHECK(doc["T"] == 201);
    CHECK(doc["text"] == "move to the origin");
    CHECK(doc["seed"] == 11);
    REQUIRE(doc["trajectories"].size() == 3);
    for (const auto& rows : doc["trajectories"]) {
        REQUIRE(rows.size() == 201);
        CHECK(rows[0].size() == 2);
    }
    CHECK(slurp(s.p("samples.svg")).rfind("<svg", 0) == 0);
    const std::string csv = slurp(s.p("samples.csv"));
    CHECK(csv.rfind("t,traj0_d0,traj0_d1,traj1_d0", 0) == 0);

    // identical invocations give identical bytes
    REQUIRE(run_cli({"sample", "--ckpt", s.p("flow.json"), "--text", "move to the origin", "--n", "3", "--seed",
                     "11", "--out", s.p("samples2.json")}) == 0);
    CHECK(slurp(s.p("samples.json")) == slurp(s.p("samples2.json")));

    REQUIRE(run_cli({"eval", "--ckpt", s.p("flow.json"), "--data", s.p("data.json"), "--paraphrases",
                     s.p("data.heldout-paraphrases.json"), "--config", s.p("cfg.json"), "--report",
                     s.p("report.json")}) == 0);
    json report = json::parse(slurp(s.p("report.json")));
    REQUIRE(report["levels"].size() == 2);
    CHECK(report["levels"]["1"]["mmd"].is_number());
    CHECK(report["levels"]["2"]["mmd"].is_number());
    CHECK(report["levels"]["1"]["robust_mmd"].is_number());
    CHECK(report["levels"]["2"]["robust_mmd"].is_number());
    for (const char* key : {"path", "task", "both"}) CHECK(report["accuracy"].contains(key));
    CHECK(report["checkpoint"]["generative"] == "flow");
    CHECK(report["config"]["flow"]["epochs"] == 2);
    CHECK(report["stride"] == 13); // (201 + 15) / 16
}

TEST_CASE("train-diffusion produces a sampleable checkpoint and rejects unknown schedules") {
    Scratch s;
    spit(s.p("cfg.json"), kTinyConfig);
    REQUIRE(run_cli({"gen-data", "--kind", "toy2d", "--seed", "3", "--out", s.p("data.json")}) == 0);
    REQUIRE(run_cli({"train-manifold", "--data", s.p("data.json"), "--config", s.p("cfg.json"), "--out",
                     s.p("manifold.json")}) == 0);
    REQUIRE(run_cli({"train-diffusion", "--data", s.p("data.json"), "--ckpt", s.p("manifold.json"), "--schedule",
                     "vp2", "--config", s.p("cfg.json"), "--out", s.p("diff.json")}) == 0);
    auto dckpt = load_checkpoint(s.p("diff.json"));
    CHECK(dckpt.generative == GenerativeKind::diffusion);
    CHECK(dckpt.schedule.kind == ScheduleKind::vp_cosine);
    CHECK(dckpt.schedule.n_steps == 20);
    CHECK(run_cli({"sample", "--ckpt", s.p("diff.json"), "--text", "move to the origin", "--n", "2", "--out",
                   s.p("dsamples.json")}) == 0);
    CHECK(json::parse(slurp(s.p("dsamples.json")))["trajectories"].size() == 2);

    CHECK(run_cli({"train-diffusion", "--data", s.p("data.json"), "--ckpt", s.p("manifold.json"), "--schedule",
                   "ddpm", "--config", s.p("cfg.json"), "--out", s.p("bad.json")}) == 1);
}

TEST_CASE("compare tabulates the flow model against all three diffusion baselines") {
    Scratch s;
    spit(s.p("cfg.json"), kTinyConfig);
    REQUIRE(run_cli({"gen-data", "--kind", "toy2d", "--seed", "3", "--out", s.p("data.json")}) == 0);
    REQUIRE(run_cli({"compare", "--data", s.p("data.json"), "--config", s.p("cfg.json"), "--paraphrases",
                     s.p("data.train-paraphrases.json"), "--heldout-paraphrases",
                     s.p("data.heldout-paraphrases.json"), "--out", s.p("table.json")}) == 0);
    json doc = json::parse(slurp(s.p("table.json")));
    REQUIRE(doc["rows"].size() == 4);
    CHECK(doc["rows"][0]["model"] == "mmfp-flow");
    CHECK(doc["rows"][1]["model"] == "diffusion-ve");
    CHECK(doc["rows"][2]["model"] == "diffusion-vp1");
    CHECK(doc["rows"][3]["model"] == "diffusion-vp2");
    for (const auto& row : doc["rows"]) {
        CHECK(row["levels"]["2"]["mmd"].is_number());
        CHECK(row["levels"]["2"]["robust_mmd"].is_number());
        CHECK(row["accuracy"].contains("both"));
    }
    const std::string csv = slurp(s.p("table.csv"));
    CHECK(csv.rfind("model,mmd_l1,mmd_l2,robust_mmd_l1,robust_mmd_l2,acc_", 0) == 0);
    CHECK(csv.find("\nmmfp-flow,") != std::string::npos);
    CHECK(csv.find("\ndiffusion-vp2,") != std::string::npos);
}

TEST_CASE("failures exit nonzero instead of throwing") {
    Scratch s;
    CHECK(run_cli({"train-manifold", "--data", s.p("missing.json"), "--out", s.p("x.json")}) == 1);
    CHECK(run_cli({"gen-data", "--kind", "nope", "--seed", "0", "--out", s.p("x.json")}) == 1);
    CHECK(run_cli({"bogus-command"}) != 0);
    CHECK(run_cli({"gen-data", "--kind", "toy2d"}) != 0);        // missing required --out
    CHECK(run_cli({"sample", "--ckpt", s.p("missing.json"), "--text", "x", "--n", "1", "--out",
                   s.p("y.json")}) == 1);
}

TEST_CASE("the svg exporter refuses trajectories it cannot plot") {
    Scratch s;
    MotionDataset ds;
    ds.space = Space::euclidean;
    ds.point_dim = 3;
    ds.T = 4;
    Rng rng(5);
    for (int i = 0; i < 4; ++i) {
        Trajectory x;
        x.space = Space::euclidean;
        x.point_dim = 3;
        for (int t = 0; t < 4; ++t) x.points.push_back(rng.normal_vec(3));
        ds.trajectories.push_back(std::move(x));
        ds.annotations.push_back({Annotation{1, "spin", {}}});
    }
    ds.norm = Normalization::fit(ds.trajectories);

    ManifoldConfig mcfg;
    mcfg.m = 2;
    mcfg.encoder_hidden = {6};
    mcfg.decoder_hidden = {6};
    mcfg.epochs = 2;
    mcfg.batch_size = 4;
    auto trained = train_manifold(ds, mcfg);

    Checkpoint ckpt;
    ckpt.space = ds.space;
    ckpt.point_dim = 3;
    ckpt.T = 4;
    ckpt.norm = ds.norm;
    ckpt.manifold = std::move(trained.manifold);
    auto items = make_latent_pairs(ds, ckpt.manifold, ckpt.text_encoder, {});
    FlowTrainConfig fcfg;
    fcfg.epochs = 2;
    fcfg.batch_size = 4;
    fcfg.field_hidden = {6};
    fcfg.head_hidden = {6};
    fcfg.p = 2;
    auto flow = train_latent_flow(items, ckpt.latent_dim(), fcfg);
    ckpt.generative = GenerativeKind::flow;
    ckpt.head = std::move(flow.head);
    ckpt.net = std::move(flow.field);
    ckpt.sampler.steps = 4;
    save_checkpoint(ckpt, s.p("ckpt3d.json"));

    CHECK(run_cli({"sample", "--ckpt", s.p("ckpt3d.json"), "--text", "spin", "--n", "1", "--out",
                   s.p("out.json"), "--svg", s.p("out.svg")}) == 1);
    CHECK_FALSE(fs::exists(s.p("out.svg")));
    // csv export works for any dimension
    CHECK(run_cli({"sample", "--ckpt", s.p("ckpt3d.json"), "--text", "spin", "--n", "1", "--out",
                   s.p("out.json"), "--csv", s.p("out.csv")}) == 0);
    CHECK(slurp(s.p("out.csv")).rfind("t,traj0_d0,traj0_d1,traj0_d2", 0) == 0);
}
