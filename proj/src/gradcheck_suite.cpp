#include <atfnet/error.hpp>
#include <atfnet/gradcheck_suite.hpp>
#include <atfnet/model.hpp>

namespace atfnet {

namespace {

using nn::ParamStore;

nn::EncoderLayerConfig tiny_encoder(nn::Field field)
{
    nn::EncoderLayerConfig c;
    c.model_dim = 4;
    c.head_dim = 2;
    c.num_heads = 2;
    c.ffn_dim = 6;
    c.field = field;
    c.attention_scale = field == nn::Field::Real ? nn::AttentionScale::InvSqrtD : nn::AttentionScale::None;
    return c;
}

ad::Var probe(const ad::Var& out, std::uint64_t seed)
{
    return ad::scale(nn::random_projection(out, seed), kProbeScale);
}

ad::Var probe(const ad::CVar& out, std::uint64_t seed)
{
    return ad::scale(nn::random_projection(out, seed), kProbeScale);
}

/// Builds the parameter store and a one-tensor input store, then checks both.
template <typename Build>
nn::GradcheckReport run(std::uint64_t seed, std::vector<Index> input_shape, bool complex_input, double tolerance,
                        Build build)
{
    Rng rng(seed);
    ParamStore params;
    ParamStore inputs;
    inputs.add("input", std::move(input_shape), complex_input, nn::InitRule::FanIn, 1);
    auto forward = build(params);
    params.initialize(rng);
    inputs.initialize(rng);
    // Gains start at exactly one; perturb them so their gradients are generic.
    for (auto& t : params) {
        if (t.init == nn::InitRule::One || t.init == nn::InitRule::Zero) {
            for (Index i = 0; i < t.data.size(); ++i) {
                t.data(i) += rng.uniform(-0.5, 0.5);
            }
        }
    }
    const auto projection_seed = derive_seed(seed, 0x70726f6265ULL);
    const nn::LossBuilder loss = [&](ad::Tape& tape) { return forward(tape, params, inputs, projection_seed); };
    return nn::gradcheck(loss, {&params, &inputs}, tolerance);
}

nn::GradcheckReport check_block_model(std::uint64_t seed, const std::string& which)
{
    AtfnetConfig c;
    c.lookback = which == "tblock" ? 16 : 8;
    c.horizon = 4;
    c.fblock.model_dim = 4;
    c.fblock.head_dim = 4;
    c.fblock.heads = 1;
    c.fblock.layers = 1;
    c.fblock.ffn_dim = 8;
    c.tblock.patch_len = which == "tblock" ? 8 : 4;
    c.tblock.stride = which == "tblock" ? 4 : 2;
    c.tblock.model_dim = 4;
    c.tblock.heads = 1;
    c.tblock.layers = 1;
    c.tblock.ffn_dim = 8;
    c.sync();
    Atfnet model = init_params(c, seed);
    Rng rng(derive_seed(seed, 0x6d6f64656cULL));
    for (auto& t : model.params()) {
        if (t.init == nn::InitRule::One || t.init == nn::InitRule::Zero) {
            for (Index i = 0; i < t.data.size(); ++i) {
                t.data(i) += rng.uniform(-0.5, 0.5);
            }
        }
    }
    ParamStore inputs;
    inputs.add("input", {c.lookback, 1}, false, nn::InitRule::FanIn, 1);
    inputs.initialize(rng);
    // A fixed blend keeps the weighting, which is piecewise constant in x, out of the check.
    EnergyWeights blend;
    blend.w_f = 0.375;
    blend.w_t = 0.625;
    const auto projection_seed = derive_seed(seed, 0x70726f6265ULL);

    const nn::LossBuilder loss = [&](ad::Tape& tape) {
        const ad::Var x = inputs.real(tape, 0);
        ad::Var out;
        if (which == "fblock") {
            out = model.fblock().forward(tape, model.params(), x);
        } else if (which == "tblock") {
            out = model.tblock().forward(tape, model.params(), x);
        } else {
            out = model.forward(tape, x, blend).y_hat;
        }
        return probe(out, projection_seed);
    };
    return nn::gradcheck(loss, {&model.params(), &inputs}, kEndToEndTolerance);
}

} // namespace

const std::vector<std::string>& gradcheck_layers()
{
    static const std::vector<std::string> layers{
        "complex_linear", "csa",       "complex_layernorm", "complex_ffn", "complex_encoder",
        "revin_freq",     "revin_time", "linear",           "attention",   "layernorm",
        "ffn",            "encoder",    "fblock",           "tblock",      "atfnet",
    };
    return layers;
}

LayerCheck check_layer(const std::string& layer, std::uint64_t seed)
{
    LayerCheck out;
    out.layer = layer;
    out.tolerance = kLayerTolerance;
    const auto complex_cfg = tiny_encoder(nn::Field::Complex);
    const auto real_cfg = tiny_encoder(nn::Field::Real);

    if (layer == "complex_linear") {
        out.report = run(seed, {3, 4}, true, out.tolerance, [](ParamStore& p) {
            nn::ComplexLinear f(p, "linear", 4, 5);
            return [f](ad::Tape& t, const ParamStore& p, const ParamStore& in, std::uint64_t s) {
                return probe(f.forward(t, p, in.complex(t, 0)), s);
            };
        });
    } else if (layer == "csa") {
        out.report = run(seed, {3, 4}, true, out.tolerance, [&](ParamStore& p) {
            nn::ComplexSpectrumAttention f(p, "csa", complex_cfg);
            return [f](ad::Tape& t, const ParamStore& p, const ParamStore& in, std::uint64_t s) {
                return probe(f.forward(t, p, in.complex(t, 0)), s);
            };
        });
    } else if (layer == "complex_layernorm") {
        out.report = run(seed, {3, 4}, true, out.tolerance, [](ParamStore& p) {
            nn::ComplexLayerNorm f(p, "norm", 4);
            return [f](ad::Tape& t, const ParamStore& p, const ParamStore& in, std::uint64_t s) {
                return probe(f.forward(t, p, in.complex(t, 0)), s);
            };
        });
    } else if (layer == "complex_ffn") {
        out.report = run(seed, {3, 4}, true, out.tolerance, [](ParamStore& p) {
            nn::ComplexFeedForward f(p, "ffn", 4, 6);
            return [f](ad::Tape& t, const ParamStore& p, const ParamStore& in, std::uint64_t s) {
                return probe(f.forward(t, p, in.complex(t, 0)), s);
            };
        });
    } else if (layer == "complex_encoder") {
        out.report = run(seed, {3, 4}, true, out.tolerance, [&](ParamStore& p) {
            nn::ComplexEncoderLayer f(p, "layer", complex_cfg);
            return [f](ad::Tape& t, const ParamStore& p, const ParamStore& in, std::uint64_t s) {
                return probe(f.forward(t, p, in.complex(t, 0)), s);
            };
        });
    } else if (layer == "revin_freq") {
        // A complex linear map over the bins sits between the pair.
        out.report = run(seed, {5, 1}, true, out.tolerance, [](ParamStore& p) {
            const auto mix = p.add("mix", {5, 5}, true, nn::InitRule::FanIn, 10);
            return [mix](ad::Tape& t, const ParamStore& p, const ParamStore& in, std::uint64_t s) {
                const nn::FreqRevin r = nn::revin_freq_normalize(in.complex(t, 0));
                return probe(nn::revin_freq_denormalize(ad::cmatmul(p.complex(t, mix), r.normalized), r), s);
            };
        });
    } else if (layer == "revin_time") {
        out.report = run(seed, {6, 1}, false, out.tolerance, [](ParamStore& p) {
            const auto mix = p.add("mix", {6, 6}, false, nn::InitRule::FanIn, 6);
            return [mix](ad::Tape& t, const ParamStore& p, const ParamStore& in, std::uint64_t s) {
                const nn::TimeRevin r = nn::revin_time_normalize(in.real(t, 0));
                return probe(nn::revin_time_denormalize(ad::matmul(p.real(t, mix), r.normalized), r), s);
            };
        });
    } else if (layer == "linear") {
        out.report = run(seed, {3, 4}, false, out.tolerance, [](ParamStore& p) {
            nn::Linear f(p, "linear", 4, 5);
            return [f](ad::Tape& t, const ParamStore& p, const ParamStore& in, std::uint64_t s) {
                return probe(f.forward(t, p, in.real(t, 0)), s);
            };
        });
    } else if (layer == "attention") {
        out.report = run(seed, {3, 4}, false, out.tolerance, [&](ParamStore& p) {
            nn::MultiHeadAttention f(p, "attention", real_cfg);
            return [f](ad::Tape& t, const ParamStore& p, const ParamStore& in, std::uint64_t s) {
                return probe(f.forward(t, p, in.real(t, 0)), s);
            };
        });
    } else if (layer == "layernorm") {
        out.report = run(seed, {3, 4}, false, out.tolerance, [](ParamStore& p) {
            nn::LayerNorm f(p, "norm", 4);
            return [f](ad::Tape& t, const ParamStore& p, const ParamStore& in, std::uint64_t s) {
                return probe(f.forward(t, p, in.real(t, 0)), s);
            };
        });
    } else if (layer == "ffn") {
        out.report = run(seed, {3, 4}, false, out.tolerance, [](ParamStore& p) {
            nn::FeedForward f(p, "ffn", 4, 6);
            return [f](ad::Tape& t, const ParamStore& p, const ParamStore& in, std::uint64_t s) {
                return probe(f.forward(t, p, in.real(t, 0)), s);
            };
        });
    } else if (layer == "encoder") {
        out.report = run(seed, {3, 4}, false, out.tolerance, [&](ParamStore& p) {
            nn::EncoderLayer f(p, "layer", real_cfg);
            return [f](ad::Tape& t, const ParamStore& p, const ParamStore& in, std::uint64_t s) {
                return probe(f.forward(t, p, in.real(t, 0)), s);
            };
        });
    } else if (layer == "fblock" || layer == "tblock" || layer == "atfnet") {
        out.tolerance = kEndToEndTolerance;
        out.report = check_block_model(seed, layer);
    } else {
        throw Error(ErrorCode::InvalidInput, "unknown layer '" + layer + "'");
    }
    return out;
}

std::vector<LayerCheck> gradcheck_suite(std::uint64_t seed)
{
    std::vector<LayerCheck> out;
    for (const auto& layer : gradcheck_layers()) {
        out.push_back(check_layer(layer, seed));
    }
    return out;
}

} // namespace atfnet
