#include <atfnet/error.hpp>
#include <atfnet/model.hpp>

#include <bit>
#include <fstream>
#include <sstream>

namespace atfnet {

Atfnet::Atfnet(const AtfnetConfig& config) : config_(config)
{
    config_.validate();
    fblock_ = FBlock(config_.fblock, params_);
    tblock_ = TBlock(config_.tblock, params_);
}

EnergyWeights Atfnet::weights_for(const Eigen::VectorXd& x) const
{
    return harmonic_weights_or_time_only(x, config_.weighting.harmonics);
}

GraphForecast Atfnet::forward(ad::Tape& tape, const Eigen::VectorXd& x) const
{
    return forward(tape, x, weights_for(x));
}

GraphForecast Atfnet::forward(ad::Tape& tape, const Eigen::VectorXd& x, const EnergyWeights& weights) const
{
    return forward(tape, tape.constant(x), weights);
}

GraphForecast Atfnet::forward(ad::Tape& tape, const ad::Var& input, const EnergyWeights& weights) const
{
    if (input.rows() != config_.lookback || input.cols() != 1) {
        throw Error(ErrorCode::ShapeMismatch, "window has " + std::to_string(input.rows()) + "x" +
                                                  std::to_string(input.cols()) + " samples, model expects " +
                                                  std::to_string(config_.lookback) + "x1");
    }
    GraphForecast out;
    out.weights = weights;
    out.y_f = fblock_.forward(tape, params_, input);
    out.y_t = tblock_.forward(tape, params_, input);
    out.y_hat = ad::add(ad::scale(out.y_t, weights.w_t), ad::scale(out.y_f, weights.w_f));
    return out;
}

Forecast Atfnet::predict(const Eigen::VectorXd& x) const
{
    ad::Tape tape(false);
    const GraphForecast g = forward(tape, x);
    return {g.y_hat.value().col(0), g.y_f.value().col(0), g.y_t.value().col(0), g.weights};
}

Atfnet init_params(const AtfnetConfig& config, std::uint64_t seed)
{
    Atfnet model(config);
    Rng rng(seed);
    model.params().initialize(rng);
    return model;
}

// ------------------------------------------------------------ checkpoint --

namespace {

constexpr std::string_view kMagic = "ATFN";

void put_u32(std::string& out, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
    }
}

void put_f64(std::string& out, double v)
{
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xffu));
    }
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::string_view take(std::size_t n)
    {
        if (bytes_.size() - pos_ < n) {
            throw Error(ErrorCode::CorruptCheckpoint, "truncated at byte " + std::to_string(pos_));
        }
        const std::string_view out = bytes_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    std::uint32_t u32()
    {
        const auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[static_cast<std::size_t>(i)])) << (8 * i);
        }
        return v;
    }

    double f64()
    {
        const auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[static_cast<std::size_t>(i)])) << (8 * i);
        }
        return std::bit_cast<double>(v);
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::string checkpoint_bytes(const Atfnet& model)
{
    std::string out(kMagic);
    put_u32(out, kCheckpointVersion);
    const std::string config = canonical_json(to_json(model.config()));
    put_u32(out, static_cast<std::uint32_t>(config.size()));
    out += config;
    put_u32(out, static_cast<std::uint32_t>(model.params().size()));
    for (const nn::ParamTensor& t : model.params()) {
        put_u32(out, static_cast<std::uint32_t>(t.name.size()));
        out += t.name;
        put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
        for (Index d : t.shape) {
            put_u32(out, static_cast<std::uint32_t>(d));
        }
        for (Index i = 0; i < t.data.size(); ++i) {
            put_f64(out, t.data(i));
        }
    }
    return out;
}

Atfnet checkpoint_from_bytes(std::string_view bytes)
{
    Reader in(bytes);
    if (bytes.size() < kMagic.size() || in.take(kMagic.size()) != kMagic) {
        throw Error(ErrorCode::CorruptCheckpoint, "bad magic");
    }
    const std::uint32_t version = in.u32();
    if (version != kCheckpointVersion) {
        throw Error(ErrorCode::CorruptCheckpoint, "unsupported format version " + std::to_string(version));
    }
    const std::string_view config_text = in.take(in.u32());
    AtfnetConfig config;
    try {
        config = config_from_json(json::parse(config_text));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptCheckpoint, std::string("config is not valid JSON: ") + e.what());
    }

    Atfnet model(config);
    nn::ParamStore& store = model.params();
    const std::uint32_t count = in.u32();
    if (count != store.size()) {
        throw Error(ErrorCode::CorruptCheckpoint, "checkpoint holds " + std::to_string(count) +
                                                      " tensors, config implies " + std::to_string(store.size()));
    }
    for (std::size_t i = 0; i < store.size(); ++i) {
        nn::ParamTensor& t = store[i];
        const std::string_view name = in.take(in.u32());
        if (name != t.name) {
            throw Error(ErrorCode::CorruptCheckpoint,
                        "tensor " + std::to_string(i) + " is '" + std::string(name) + "', expected '" + t.name + "'");
        }
        const std::uint32_t rank = in.u32();
        std::vector<Index> shape(rank);
        for (auto& d : shape) {
            d = in.u32();
        }
        if (shape != t.shape) {
            throw Error(ErrorCode::CorruptCheckpoint, "shape mismatch for " + t.name);
        }
        for (Index j = 0; j < t.data.size(); ++j) {
            t.data(j) = in.f64();
        }
    }
    if (!in.done()) {
        throw Error(ErrorCode::CorruptCheckpoint, "trailing bytes after last tensor");
    }
    return model;
}

void save_checkpoint(const Atfnet& model, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    }
    const std::string bytes = checkpoint_bytes(model);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::Io, "failed writing " + path.string());
    }
}

Atfnet load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return checkpoint_from_bytes(buffer.str());
}

Atfnet load_checkpoint(const std::filesystem::path& path, const AtfnetConfig& expected)
{
    Atfnet model = load_checkpoint(path);
    if (!(model.config() == expected)) {
        throw Error(ErrorCode::ConfigMismatch, "checkpoint config " + canonical_json(to_json(model.config())) +
                                                   " differs from expected " + canonical_json(to_json(expected)));
    }
    return model;
}

} // namespace atfnet
