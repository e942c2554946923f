#include "mmfp/runconfig.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace mmfp {

using nlohmann::json;

NoiseSchedule ScheduleParams::build(ScheduleKind kind) const {
    switch (kind) {
        case ScheduleKind::ve: return NoiseSchedule::ve(sigma_min, sigma_max, n_steps);
        case ScheduleKind::vp_linear: return NoiseSchedule::vp_linear(beta_min, beta_max, n_steps);
        case ScheduleKind::vp_cosine: return NoiseSchedule::vp_cosine(n_steps);
    }
    throw std::invalid_argument("ScheduleParams::build: bad kind");
}

RunConfig default_run_config() { return RunConfig{}; }

namespace {

// Reads known keys out of an object and rejects whatever is left over.
class Section {
  public:
    Section(const json& j, std::string context) : j_(j), context_(std::move(context)) {
        if (!j_.is_object()) throw std::invalid_argument("config: " + context_ + " must be a JSON object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw std::invalid_argument("config: " + context_ + "." + key + ": " + e.what());
        }
    }

    const json* sub(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key))
                throw std::invalid_argument("config: unknown key '" + context_ + "." + key + "'");
    }

  private:
    const json& j_;
    std::string context_;
    std::set<std::string> seen_;
};

OdeSolver solver_from_string(const std::string& name) {
    if (name == "euler") return OdeSolver::euler;
    if (name == "rk4") return OdeSolver::rk4;
    throw std::invalid_argument("config: sampler.solver must be 'euler' or 'rk4', got '" + name + "'");
}

void parse_manifold(const json& j, ManifoldConfig& cfg) {
    Section s(j, "manifold");
    s.get("m", cfg.m);
    s.get("eta", cfg.eta);
    s.get("delta", cfg.delta);
    s.get("mixup_low", cfg.mixup_low);
    s.get("mixup_high", cfg.mixup_high);
    s.get("encoder_hidden", cfg.encoder_hidden);
    s.get("decoder_hidden", cfg.decoder_hidden);
    s.get("epochs", cfg.epochs);
    s.get("batch_size", cfg.batch_size);
    s.get("lr", cfg.lr);
    s.get("lambda_rot", cfg.lambda_rot);
    s.get("seed", cfg.seed);
    s.get("identity", cfg.identity);
    s.finish();
    cfg.validate();
}

void parse_flow(const json& j, FlowTrainConfig& cfg) {
    Section s(j, "flow");
    s.get("gamma", cfg.gamma);
    s.get("k_paraphrases", cfg.k_paraphrases);
    s.get("epochs", cfg.epochs);
    s.get("batch_size", cfg.batch_size);
    s.get("lr", cfg.lr);
    s.get("seed", cfg.seed);
    s.get("field_hidden", cfg.field_hidden);
    s.get("head_hidden", cfg.head_hidden);
    s.get("p", cfg.p);
    s.finish();
    cfg.validate();
}

void parse_diffusion(const json& j, DiffusionTrainConfig& cfg) {
    Section s(j, "diffusion");
    s.get("epochs", cfg.epochs);
    s.get("batch_size", cfg.batch_size);
    s.get("lr", cfg.lr);
    s.get("seed", cfg.seed);
    s.get("score_hidden", cfg.score_hidden);
    s.get("head_hidden", cfg.head_hidden);
    s.get("p", cfg.p);
    s.finish();
    cfg.validate();
}

void parse_schedule(const json& j, ScheduleParams& cfg) {
    Section s(j, "schedule");
    s.get("n_steps", cfg.n_steps);
    s.get("beta_min", cfg.beta_min);
    s.get("beta_max", cfg.beta_max);
    s.get("sigma_min", cfg.sigma_min);
    s.get("sigma_max", cfg.sigma_max);
    s.finish();
    if (cfg.n_steps < 1) throw std::invalid_argument("config: schedule.n_steps must be >= 1");
}

void parse_sampler(const json& j, SamplerConfig& cfg) {
    Section s(j, "sampler");
    s.get("steps", cfg.steps);
    std::string solver = cfg.solver == OdeSolver::rk4 ? "rk4" : "euler";
    s.get("solver", solver);
    cfg.solver = solver_from_string(solver);
    s.get("seed", cfg.seed);
    s.finish();
    cfg.validate();
}

void parse_kernel(const json& j, KernelSpec& cfg) {
    Section s(j, "kernel");
    auto it = j.find("bandwidth");
    if (it != j.end()) {
        s.sub("bandwidth");
        if (it->is_string()) {
            if (it->get<std::string>() != "median")
                throw std::invalid_argument("config: kernel.bandwidth must be a positive number or \"median\"");
            cfg.bandwidth = 0.0;
        } else {
            cfg.bandwidth = it->get<double>();
            if (!(cfg.bandwidth > 0.0))
                throw std::invalid_argument("config: kernel.bandwidth must be a positive number or \"median\"");
        }
    }
    s.finish();
}

void parse_classifier(const json& j, ClassifierConfig& cfg) {
    Section s(j, "eval.classifier");
    s.get("hidden", cfg.hidden);
    s.get("epochs", cfg.epochs);
    s.get("batch_size", cfg.batch_size);
    s.get("lr", cfg.lr);
    s.get("seed", cfg.seed);
    s.finish();
}

void parse_eval(const json& j, EvalConfig& cfg) {
    Section s(j, "eval");
    s.get("n_per_text", cfg.n_per_text);
    s.get("max_timesteps", cfg.max_timesteps);
    s.get("seed", cfg.seed);
    if (const json* c = s.sub("classifier")) parse_classifier(*c, cfg.classifier);
    s.finish();
    if (cfg.n_per_text < 1) throw std::invalid_argument("config: eval.n_per_text must be >= 1");
    if (cfg.max_timesteps < 1) throw std::invalid_argument("config: eval.max_timesteps must be >= 1");
}

RunConfig parse_run_config(const json& doc) {
    RunConfig cfg;
    Section s(doc, "(top level)");
    if (const json* j = s.sub("manifold")) parse_manifold(*j, cfg.manifold);
    if (const json* j = s.sub("flow")) parse_flow(*j, cfg.flow);
    if (const json* j = s.sub("diffusion")) parse_diffusion(*j, cfg.diffusion);
    if (const json* j = s.sub("schedule")) parse_schedule(*j, cfg.schedule);
    if (const json* j = s.sub("sampler")) parse_sampler(*j, cfg.sampler);
    if (const json* j = s.sub("kernel")) parse_kernel(*j, cfg.kernel);
    if (const json* j = s.sub("eval")) parse_eval(*j, cfg.eval);
    s.finish();
    return cfg;
}

void deep_merge(json& base, const json& over) {
    if (!base.is_object() || !over.is_object()) {
        base = over;
        return;
    }
    for (const auto& [key, value] : over.items()) {
        if (base.contains(key))
            deep_merge(base[key], value);
        else
            base[key] = value;
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("config: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config: '" + path + "': " + e.what());
    }
}

} // namespace

RunConfig load_run_config(const std::vector<std::string>& paths) {
    json merged = json::object();
    for (const auto& path : paths) deep_merge(merged, load_json_file(path));
    return parse_run_config(merged);
}

RunConfig load_run_config(const std::string& path) {
    if (path.empty()) return default_run_config();
    return load_run_config(std::vector<std::string>{path});
}

namespace {

json manifold_json(const ManifoldConfig& c) {
    return json{{"m", c.m},
                {"eta", c.eta},
                {"delta", c.delta},
                {"mixup_low", c.mixup_low},
                {"mixup_high", c.mixup_high},
                {"encoder_hidden", c.encoder_hidden},
                {"decoder_hidden", c.decoder_hidden},
                {"epochs", c.epochs},
                {"batch_size", c.batch_size},
                {"lr", c.lr},
                {"lambda_rot", c.lambda_rot},
                {"seed", c.seed},
                {"identity", c.identity}};
}

json flow_json(const FlowTrainConfig& c) {
    return json{{"gamma", c.gamma},
                {"k_paraphrases", c.k_paraphrases},
                {"epochs", c.epochs},
                {"batch_size", c.batch_size},
                {"lr", c.lr},
                {"seed", c.seed},
                {"field_hidden", c.field_hidden},
                {"head_hidden", c.head_hidden},
                {"p", c.p}};
}

json diffusion_json(const DiffusionTrainConfig& c) {
    return json{{"epochs", c.epochs},     {"batch_size", c.batch_size},
                {"lr", c.lr},             {"seed", c.seed},
                {"score_hidden", c.score_hidden}, {"head_hidden", c.head_hidden},
                {"p", c.p}};
}

json schedule_json(const ScheduleParams& c) {
    return json{{"n_steps", c.n_steps},
                {"beta_min", c.beta_min},
                {"beta_max", c.beta_max},
                {"sigma_min", c.sigma_min},
                {"sigma_max", c.sigma_max}};
}

json sampler_json(const SamplerConfig& c) {
    return json{{"steps", c.steps}, {"solver", c.solver == OdeSolver::rk4 ? "rk4" : "euler"}, {"seed", c.seed}};
}

json kernel_json(const KernelSpec& c) {
    return c.bandwidth > 0.0 ? json{{"bandwidth", c.bandwidth}} : json{{"bandwidth", "median"}};
}

json eval_json(const EvalConfig& c) {
    return json{{"n_per_text", c.n_per_text},
                {"max_timesteps", c.max_timesteps},
                {"seed", c.seed},
                {"classifier", json{{"hidden", c.classifier.hidden},
                                    {"epochs", c.classifier.epochs},
                                    {"batch_size", c.classifier.batch_size},
                                    {"lr", c.classifier.lr},
                                    {"seed", c.classifier.seed}}}};
}

} // namespace

std::string run_config_echo(const RunConfig& cfg) {
    json doc{{"manifold", manifold_json(cfg.manifold)}, {"flow", flow_json(cfg.flow)},
             {"diffusion", diffusion_json(cfg.diffusion)}, {"schedule", schedule_json(cfg.schedule)},
             {"sampler", sampler_json(cfg.sampler)},      {"kernel", kernel_json(cfg.kernel)},
             {"eval", eval_json(cfg.eval)}};
    return doc.dump();
}

std::string manifold_config_echo(const ManifoldConfig& cfg) { return manifold_json(cfg).dump(); }

std::string flow_config_echo(const FlowTrainConfig& cfg) { return flow_json(cfg).dump(); }

std::string diffusion_config_echo(const DiffusionTrainConfig& cfg, const NoiseSchedule& sched) {
    json j = diffusion_json(cfg);
    json sj{{"kind", schedule_name(sched.kind)}, {"n_steps", sched.n_steps}};
    if (sched.kind == ScheduleKind::vp_linear) {
        sj["beta_min"] = sched.beta_min;
        sj["beta_max"] = sched.beta_max;
    } else if (sched.kind == ScheduleKind::ve) {
        sj["sigma_min"] = sched.sigma_min;
        sj["sigma_max"] = sched.sigma_max;
    }
    j["schedule"] = sj;
    return j.dump();
}

} // namespace mmfp
