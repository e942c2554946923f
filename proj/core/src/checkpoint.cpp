#include "mmfp/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "mmfp/log.hpp"

namespace mmfp {

using nlohmann::json;

std::string generative_name(GenerativeKind k) {
    switch (k) {
        case GenerativeKind::none: return "none";
        case GenerativeKind::flow: return "flow";
        case GenerativeKind::diffusion: return "diffusion";
    }
    throw std::invalid_argument("generative_name: bad kind");
}

namespace {

GenerativeKind generative_from_name(const std::string& name) {
    if (name == "none") return GenerativeKind::none;
    if (name == "flow") return GenerativeKind::flow;
    if (name == "diffusion") return GenerativeKind::diffusion;
    throw std::invalid_argument("checkpoint: unknown generative kind '" + name + "'");
}

json mlp_to_json(const Mlp& net) {
    return json{{"in_dim", net.spec().in_dim},
                {"hidden", net.spec().hidden},
                {"out_dim", net.spec().out_dim},
                {"params", net.params()}};
}

Mlp mlp_from_json(const json& j, const std::string& what) {
    MlpSpec spec;
    spec.in_dim = j.at("in_dim").get<int>();
    spec.hidden = j.at("hidden").get<std::vector<int>>();
    spec.out_dim = j.at("out_dim").get<int>();
    Mlp net(spec);
    auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != net.params().size())
        throw std::runtime_error("checkpoint: " + what + " has " + std::to_string(params.size()) +
                                 " parameters, spec needs " + std::to_string(net.params().size()));
    net.params() = std::move(params);
    return net;
}

json solver_to_json(const SamplerConfig& s) {
    return json{{"steps", s.steps}, {"solver", s.solver == OdeSolver::rk4 ? "rk4" : "euler"}};
}

SamplerConfig solver_from_json(const json& j) {
    SamplerConfig s;
    s.steps = j.at("steps").get<int>();
    const std::string name = j.at("solver").get<std::string>();
    if (name == "euler")
        s.solver = OdeSolver::euler;
    else if (name == "rk4")
        s.solver = OdeSolver::rk4;
    else
        throw std::runtime_error("checkpoint: unknown solver '" + name + "'");
    s.validate();
    return s;
}

json schedule_to_json(const NoiseSchedule& s) {
    json j{{"kind", schedule_name(s.kind)}, {"n_steps", s.n_steps}};
    if (s.is_vp()) {
        if (s.kind == ScheduleKind::vp_linear) {
            j["beta_min"] = s.beta_min;
            j["beta_max"] = s.beta_max;
        }
    } else {
        j["sigma_min"] = s.sigma_min;
        j["sigma_max"] = s.sigma_max;
    }
    return j;
}

// Schedules are rebuilt from their defining scalars rather than stored
// as tables; the constructors are deterministic so this reproduces the
// exact training-time values.
NoiseSchedule schedule_from_json(const json& j) {
    const ScheduleKind kind = schedule_from_name(j.at("kind").get<std::string>());
    const int n = j.at("n_steps").get<int>();
    switch (kind) {
        case ScheduleKind::ve:
            return NoiseSchedule::ve(j.at("sigma_min").get<double>(), j.at("sigma_max").get<double>(), n);
        case ScheduleKind::vp_linear:
            return NoiseSchedule::vp_linear(j.at("beta_min").get<double>(), j.at("beta_max").get<double>(), n);
        case ScheduleKind::vp_cosine: return NoiseSchedule::vp_cosine(n);
    }
    throw std::runtime_error("checkpoint: bad schedule kind");
}

} // namespace

void Checkpoint::validate() const {
    if (point_dim < 1 || T < 1) throw std::invalid_argument("Checkpoint: bad trajectory shape");
    norm.validate(point_dim);
    const int dim = T * point_dim;
    if (manifold.space() != space || manifold.point_dim() != point_dim || manifold.T() != T)
        throw std::invalid_argument("Checkpoint: manifold shape does not match header");
    if (manifold.is_identity()) {
        if (manifold.m() != dim) throw std::invalid_argument("Checkpoint: identity manifold latent dim mismatch");
    } else {
        if (manifold.encoder().spec().in_dim != dim || manifold.encoder().spec().out_dim != manifold.m())
            throw std::invalid_argument("Checkpoint: encoder shape mismatch");
        if (manifold.decoder().spec().in_dim != manifold.m() || manifold.decoder().spec().out_dim != dim)
            throw std::invalid_argument("Checkpoint: decoder shape mismatch");
    }
    if (generative == GenerativeKind::none) return;
    if (head.spec().in_dim != kTaskVectorDim)
        throw std::invalid_argument("Checkpoint: head input dim " + std::to_string(head.spec().in_dim) +
                                    ", expected " + std::to_string(kTaskVectorDim));
    const int p = head.spec().out_dim;
    if (net.spec().in_dim != 1 + manifold.m() + p)
        throw std::invalid_argument("Checkpoint: generative net input dim " + std::to_string(net.spec().in_dim) +
                                    ", expected 1 + m + p = " + std::to_string(1 + manifold.m() + p));
    if (net.spec().out_dim != manifold.m())
        throw std::invalid_argument("Checkpoint: generative net output dim mismatch");
    if (generative == GenerativeKind::flow)
        sampler.validate();
    else
        schedule.validate();
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    ckpt.validate();
    json doc;
    doc["schema_version"] = 1;
    doc["space"] = space_name(ckpt.space);
    doc["point_dim"] = ckpt.point_dim;
    doc["T"] = ckpt.T;
    doc["dataset_fingerprint"] = fingerprint_hex(ckpt.dataset_fingerprint);
    doc["normalization"] = {{"offset", ckpt.norm.offset}, {"scale", ckpt.norm.scale}};

    json mj;
    mj["identity"] = ckpt.manifold.is_identity();
    mj["m"] = ckpt.manifold.m();
    mj["lambda_rot"] = ckpt.manifold.lambda_rot();
    if (!ckpt.manifold.is_identity()) {
        mj["encoder"] = mlp_to_json(ckpt.manifold.encoder());
        mj["decoder"] = mlp_to_json(ckpt.manifold.decoder());
    }
    doc["manifold"] = mj;

    if (ckpt.text_encoder.kind() == TextEncoder::Kind::hash) {
        doc["text_encoder"] = {{"kind", "hash"}};
    } else {
        json table = json::array();
        for (const auto& [text, vec] : ckpt.text_encoder.table())
            table.push_back(json{{"text", text}, {"vector", vec}});
        doc["text_encoder"] = {{"kind", "lookup"}, {"table", table}};
    }

    json gj;
    gj["kind"] = generative_name(ckpt.generative);
    if (ckpt.generative != GenerativeKind::none) {
        gj["head"] = mlp_to_json(ckpt.head);
        gj["net"] = mlp_to_json(ckpt.net);
        if (ckpt.generative == GenerativeKind::flow)
            gj["sampler"] = solver_to_json(ckpt.sampler);
        else
            gj["schedule"] = schedule_to_json(ckpt.schedule);
    }
    doc["generative"] = gj;

    json tr;
    for (const auto& [stage, echo] : ckpt.training) {
        try {
            tr[stage] = json::parse(echo);
        } catch (const json::parse_error& e) {
            throw std::runtime_error("save_checkpoint: training echo for '" + stage + "' is not JSON: " + e.what());
        }
    }
    doc["training"] = tr;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open '" + path + "' for writing");
    out << doc.dump();
    if (!out) throw std::runtime_error("save_checkpoint: write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();

    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw std::runtime_error("load_checkpoint: '" + path + "': " + e.what());
    }

    Checkpoint ckpt;
    try {
        if (doc.at("schema_version").get<int>() != 1)
            throw std::runtime_error("unsupported schema_version");
        ckpt.space = space_from_name(doc.at("space").get<std::string>());
        ckpt.point_dim = doc.at("point_dim").get<int>();
        ckpt.T = doc.at("T").get<int>();
        const std::string fp = doc.at("dataset_fingerprint").get<std::string>();
        ckpt.dataset_fingerprint = std::stoull(fp, nullptr, 16);
        ckpt.norm.offset = doc.at("normalization").at("offset").get<std::vector<double>>();
        ckpt.norm.scale = doc.at("normalization").at("scale").get<std::vector<double>>();

        const json& mj = doc.at("manifold");
        ManifoldConfig mcfg;
        mcfg.identity = mj.at("identity").get<bool>();
        mcfg.lambda_rot = mj.at("lambda_rot").get<double>();
        if (mcfg.identity) {
            ckpt.manifold = MotionManifold::identity_adapter(ckpt.space, ckpt.point_dim, ckpt.T, mcfg.lambda_rot);
        } else {
            Mlp enc = mlp_from_json(mj.at("encoder"), "encoder");
            Mlp dec = mlp_from_json(mj.at("decoder"), "decoder");
            mcfg.m = mj.at("m").get<int>();
            mcfg.encoder_hidden = enc.spec().hidden;
            mcfg.decoder_hidden = dec.spec().hidden;
            ckpt.manifold = MotionManifold::make(ckpt.space, ckpt.point_dim, ckpt.T, mcfg);
            if (ckpt.manifold.encoder().spec().in_dim != enc.spec().in_dim ||
                ckpt.manifold.decoder().spec().out_dim != dec.spec().out_dim)
                throw std::runtime_error("encoder/decoder width does not match T * point_dim");
            ckpt.manifold.encoder() = std::move(enc);
            ckpt.manifold.decoder() = std::move(dec);
        }

        const json& tj = doc.at("text_encoder");
        const std::string tkind = tj.at("kind").get<std::string>();
        if (tkind == "hash") {
            ckpt.text_encoder = TextEncoder::hash_encoder();
        } else if (tkind == "lookup") {
            std::map<std::string, std::vector<double>> table;
            for (const auto& row : tj.at("table"))
                table[row.at("text").get<std::string>()] = row.at("vector").get<std::vector<double>>();
            ckpt.text_encoder = TextEncoder::lookup_encoder(std::move(table));
        } else {
            throw std::runtime_error("unknown text encoder kind '" + tkind + "'");
        }

        const json& gj = doc.at("generative");
        ckpt.generative = generative_from_name(gj.at("kind").get<std::string>());
        if (ckpt.generative != GenerativeKind::none) {
            ckpt.head = mlp_from_json(gj.at("head"), "head");
            ckpt.net = mlp_from_json(gj.at("net"), generative_name(ckpt.generative) + " net");
            if (ckpt.generative == GenerativeKind::flow)
                ckpt.sampler = solver_from_json(gj.at("sampler"));
            else
                ckpt.schedule = schedule_from_json(gj.at("schedule"));
        }

        for (const auto& [stage, echo] : doc.at("training").items())
            ckpt.training.emplace_back(stage, echo.dump());
    } catch (const json::exception& e) {
        throw std::runtime_error("load_checkpoint: '" + path + "': " + e.what());
    }
    ckpt.validate();
    return ckpt;
}

std::vector<Trajectory> generate_motion(const Checkpoint& ckpt, const std::string& text, int n,
                                        const SamplerConfig& sampler) {
    if (n < 1) throw std::invalid_argument("generate_motion: n must be >= 1");
    if (ckpt.generative == GenerativeKind::none)
        throw std::invalid_argument("generate_motion: checkpoint has no generative model, train one first");
    sampler.validate();
    const std::vector<double> c = ckpt.text_encoder.encode(text);
    const std::vector<double> tau = ckpt.head.forward(c);
    std::vector<Trajectory> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng::derive(sampler.seed, static_cast<std::uint64_t>(i));
        std::vector<double> z1;
        if (ckpt.generative == GenerativeKind::flow)
            z1 = sample_latent(ckpt.net, tau, sampler, ckpt.manifold.m(), rng);
        else
            z1 = sample_diffusion(ckpt.net, tau, ckpt.schedule, ckpt.manifold.m(), rng);
        out.push_back(ckpt.norm.denormalize(ckpt.manifold.decode(z1)));
    }
    return out;
}

std::vector<Trajectory> generate_motion(const Checkpoint& ckpt, const std::string& text, int n,
                                        std::uint64_t seed) {
    SamplerConfig sampler = ckpt.sampler;
    sampler.seed = seed;
    return generate_motion(ckpt, text, n, sampler);
}

} // namespace mmfp
