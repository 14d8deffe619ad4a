#include <atfnet/config.hpp>
#include <atfnet/error.hpp>

namespace atfnet {

namespace {

template <typename T>
void read(const json& j, const char* key, T& out)
{
    if (j.contains(key)) {
        try {
            out = j.at(key).get<T>();
        } catch (const json::exception& e) {
            throw Error(ErrorCode::InvalidInput, std::string("config key '") + key + "': " + e.what());
        }
    }
}

std::string tokenization_name(Tokenization t) { return t == Tokenization::Bins ? "bins" : "full_spectrum"; }

Tokenization parse_tokenization(const std::string& s)
{
    if (s == "bins") {
        return Tokenization::Bins;
    }
    if (s == "full_spectrum") {
        return Tokenization::FullSpectrum;
    }
    throw Error(ErrorCode::InvalidInput, "unknown tokenization '" + s + "'");
}

std::string scale_name(nn::AttentionScale s) { return s == nn::AttentionScale::None ? "none" : "inv_sqrt_d"; }

nn::AttentionScale parse_scale(const std::string& s)
{
    if (s == "none") {
        return nn::AttentionScale::None;
    }
    if (s == "inv_sqrt_d") {
        return nn::AttentionScale::InvSqrtD;
    }
    throw Error(ErrorCode::InvalidInput, "unknown attention_scale '" + s + "'");
}

} // namespace

nn::EncoderLayerConfig FBlockConfig::encoder() const
{
    nn::EncoderLayerConfig c;
    c.model_dim = model_dim;
    c.head_dim = head_dim;
    c.num_heads = heads;
    c.ffn_dim = ffn_dim;
    c.attention_scale = attention_scale;
    c.conjugate_keys = conjugate_keys;
    c.field = nn::Field::Complex;
    return c;
}

void FBlockConfig::validate() const
{
    if (lookback < 1 || horizon < 1) {
        throw Error(ErrorCode::InvalidInput, "lookback and horizon must be positive");
    }
    if (layers < 0) {
        throw Error(ErrorCode::InvalidInput, "layer count must be non-negative");
    }
    encoder().validate();
}

nn::EncoderLayerConfig TBlockConfig::encoder() const
{
    nn::EncoderLayerConfig c;
    c.model_dim = model_dim;
    c.num_heads = heads;
    c.head_dim = heads > 0 ? model_dim / heads : 0;
    c.ffn_dim = ffn_dim;
    c.attention_scale = nn::AttentionScale::InvSqrtD;
    c.field = nn::Field::Real;
    return c;
}

void TBlockConfig::validate() const
{
    if (lookback < 1 || horizon < 1) {
        throw Error(ErrorCode::InvalidInput, "lookback and horizon must be positive");
    }
    if (patch_len < 1 || stride < 1) {
        throw Error(ErrorCode::InvalidInput, "patch length and stride must be positive");
    }
    if (patch_len > lookback) {
        throw Error(ErrorCode::PatchTooLong, "patch length " + std::to_string(patch_len) + " exceeds lookback " +
                                                 std::to_string(lookback));
    }
    if (heads < 1 || model_dim % heads != 0) {
        throw Error(ErrorCode::InvalidInput, "T-block model_dim must be divisible by heads");
    }
    if (layers < 0) {
        throw Error(ErrorCode::InvalidInput, "layer count must be non-negative");
    }
    encoder().validate();
}

AtfnetConfig& AtfnetConfig::sync()
{
    fblock.lookback = tblock.lookback = lookback;
    fblock.horizon = tblock.horizon = horizon;
    return *this;
}

void AtfnetConfig::validate() const
{
    if (fblock.lookback != lookback || tblock.lookback != lookback || fblock.horizon != horizon ||
        tblock.horizon != horizon) {
        throw Error(ErrorCode::ConfigMismatch, "block lookback/horizon differ from the model's");
    }
    fblock.validate();
    tblock.validate();
}

bool operator==(const AtfnetConfig& a, const AtfnetConfig& b) { return to_json(a) == to_json(b); }

json to_json(const AtfnetConfig& c)
{
    json j;
    j["lookback"] = c.lookback;
    j["horizon"] = c.horizon;
    j["fblock"] = {
        {"model_dim", c.fblock.model_dim},
        {"head_dim", c.fblock.head_dim},
        {"heads", c.fblock.heads},
        {"layers", c.fblock.layers},
        {"ffn_dim", c.fblock.ffn_dim},
        {"tokenization", tokenization_name(c.fblock.tokenization)},
        {"attention_scale", scale_name(c.fblock.attention_scale)},
        {"conjugate_keys", c.fblock.conjugate_keys},
    };
    j["tblock"] = {
        {"patch_len", c.tblock.patch_len}, {"stride", c.tblock.stride}, {"model_dim", c.tblock.model_dim},
        {"heads", c.tblock.heads},         {"layers", c.tblock.layers}, {"ffn_dim", c.tblock.ffn_dim},
    };
    if (c.weighting.harmonics.is_all()) {
        j["weighting"] = {{"n_harmonics", "all"}, {"pitch", "naive"}};
    } else {
        j["weighting"] = {{"n_harmonics", c.weighting.harmonics.count()}, {"pitch", "naive"}};
    }
    return j;
}

AtfnetConfig config_from_json(const json& j)
{
    if (!j.is_object()) {
        throw Error(ErrorCode::InvalidInput, "config must be a JSON object");
    }
    AtfnetConfig c;
    read(j, "lookback", c.lookback);
    read(j, "horizon", c.horizon);
    if (j.contains("fblock")) {
        const json& f = j.at("fblock");
        read(f, "model_dim", c.fblock.model_dim);
        read(f, "head_dim", c.fblock.head_dim);
        read(f, "heads", c.fblock.heads);
        read(f, "layers", c.fblock.layers);
        read(f, "ffn_dim", c.fblock.ffn_dim);
        read(f, "conjugate_keys", c.fblock.conjugate_keys);
        std::string s;
        if (f.contains("tokenization")) {
            read(f, "tokenization", s);
            c.fblock.tokenization = parse_tokenization(s);
        }
        if (f.contains("attention_scale")) {
            read(f, "attention_scale", s);
            c.fblock.attention_scale = parse_scale(s);
        }
    }
    if (j.contains("tblock")) {
        const json& t = j.at("tblock");
        read(t, "patch_len", c.tblock.patch_len);
        read(t, "stride", c.tblock.stride);
        read(t, "model_dim", c.tblock.model_dim);
        read(t, "heads", c.tblock.heads);
        read(t, "layers", c.tblock.layers);
        read(t, "ffn_dim", c.tblock.ffn_dim);
    }
    if (j.contains("weighting")) {
        const json& w = j.at("weighting");
        if (w.contains("pitch") && w.at("pitch") != "naive") {
            throw Error(ErrorCode::InvalidInput, "only naive pitch detection is available");
        }
        if (w.contains("n_harmonics")) {
            const json& n = w.at("n_harmonics");
            if (n.is_string() && n.get<std::string>() == "all") {
                c.weighting.harmonics = HarmonicSelection::all();
            } else if (n.is_number_integer()) {
                c.weighting.harmonics = HarmonicSelection::first(n.get<Index>());
            } else {
                throw Error(ErrorCode::InvalidInput, "n_harmonics must be a positive integer or \"all\"");
            }
        }
    }
    c.sync();
    c.validate();
    return c;
}

std::string canonical_json(const json& j) { return j.dump(); }

} // namespace atfnet
