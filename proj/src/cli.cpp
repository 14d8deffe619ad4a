#include <atfnet/cli.hpp>
#include <atfnet/cvnn.hpp>
#include <atfnet/gradcheck_suite.hpp>
#include <atfnet/train.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace atfnet::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidInput:
    case ErrorCode::PatchTooLong:
        return kUsage;
    case ErrorCode::ParseError:
    case ErrorCode::ConstantChannel:
    case ErrorCode::TooShort:
    case ErrorCode::EmptySplit:
    case ErrorCode::CorruptCheckpoint:
    case ErrorCode::ConfigMismatch:
    case ErrorCode::Io:
        return kDataError;
    case ErrorCode::ImaginaryResidueTooLarge:
    case ErrorCode::NoDominantFrequency:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::GradcheckFailure:
    case ErrorCode::NonFiniteLoss:
    case ErrorCode::SingularDesign:
        return kNumericFailure;
    }
    return kNumericFailure;
}

namespace {

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw Error(ErrorCode::Io, "failed writing " + path.string());
    }
}

/// One per run, written next to the primary artifact as <artifact>.manifest.json.
struct Manifest {
    std::string command;
    std::vector<std::string> args;
    json config;
    std::uint64_t seed = 0;
    std::string started_at = utc_now();
    std::vector<std::string> artifacts;

    void write(const fs::path& primary) const
    {
        const json j{
            {"command", command},
            {"args", args},
            {"config", canonical_json(config)},
            {"seed", seed},
            {"started_at", started_at},
            {"finished_at", utc_now()},
            {"artifacts", artifacts},
        };
        write_text(fs::path(primary.string() + ".manifest.json"), j.dump(2) + "\n");
    }
};

HarmonicSelection parse_harmonics(const std::string& s)
{
    if (s == "all") {
        return HarmonicSelection::all();
    }
    try {
        std::size_t used = 0;
        const long n = std::stol(s, &used);
        if (used == s.size()) {
            return HarmonicSelection::first(n);
        }
    } catch (const std::logic_error&) {
    }
    throw Error(ErrorCode::InvalidInput, "--harmonics must be a positive integer or 'all'");
}

SplitFractions parse_fractions(const std::vector<double>& v)
{
    if (v.size() != 3) {
        throw Error(ErrorCode::InvalidInput, "--split-fractions takes train,val,test");
    }
    SplitFractions f{v[0], v[1], v[2]};
    f.validate();
    return f;
}

/// Options shared by train and sweep-lookback.
struct TrainOptions {
    std::string config_path;
    Index lookback = 0;
    Index horizon = 0;
    TrainConfig train;
    std::vector<double> fractions{0.7, 0.1, 0.2};

    void attach(CLI::App& app)
    {
        app.add_option("--config", config_path, "Model configuration JSON; flags override it");
        app.add_option("--seed", train.seed, "Seed for initialization and shuffling");
        app.add_option("--lr", train.lr, "Adam learning rate")->capture_default_str();
        app.add_option("--batch-size", train.batch_size, "Windows per batch")->capture_default_str();
        app.add_option("--epochs", train.max_epochs, "Maximum epochs")->capture_default_str();
        app.add_option("--patience", train.patience, "Early-stopping patience in epochs")->capture_default_str();
        app.add_flag("!--no-shuffle", train.shuffle, "Keep chronological window order");
        app.add_option("--split-fractions", fractions, "train,val,test fractions")->delimiter(',')->expected(3);
    }

    AtfnetConfig model_config() const
    {
        json j = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                throw Error(ErrorCode::Io, "cannot open " + config_path);
            }
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw Error(ErrorCode::InvalidInput, "config " + config_path + ": " + e.what());
            }
        }
        if (lookback > 0) {
            j["lookback"] = lookback;
        }
        if (horizon > 0) {
            j["horizon"] = horizon;
        }
        return config_from_json(j);
    }

    json train_json() const
    {
        return {{"lr", train.lr},
                {"batch_size", train.batch_size},
                {"max_epochs", train.max_epochs},
                {"patience", train.patience},
                {"shuffle", train.shuffle},
                {"split_fractions", fractions}};
    }
};

int cmd_synth(const std::string& kind, const fs::path& out_path, Index length, double period, double amplitude,
              double noise, double lambda, std::uint64_t seed, Manifest& m, std::ostream& out)
{
    std::vector<std::string> names;
    Eigen::MatrixXd values;
    if (kind == "tone") {
        names = {"tone"};
        values = synth_tone(length, period, amplitude, 0.0, noise, seed);
    } else if (kind == "noise") {
        names = {"noise"};
        values = synth_noise(length, noise > 0.0 ? noise : 1.0, seed);
    } else if (kind == "mixed") {
        names = {"tone", "noise"};
        values.resize(length, 2);
        values.col(0) = synth_tone(length, period, amplitude, 0.0, 0.0, seed);
        values.col(1) = synth_noise(length, noise > 0.0 ? noise : 1.0, derive_seed(seed, 1));
    } else {
        const auto p = static_cast<Index>(std::llround(period));
        if (std::abs(static_cast<double>(p) - period) > 0.0) {
            throw Error(ErrorCode::InvalidInput, "decomp needs an integer period");
        }
        const PeriodicDecomposition d = synth_decomposition(p, length / p, lambda, seed);
        names = {"series"};
        values = d.combined();
    }
    write_csv(out_path, names, values);
    m.config = {{"kind", kind}, {"length", values.rows()}, {"period", period},   {"amplitude", amplitude},
                {"noise", noise}, {"lambda", lambda},       {"channels", names}};
    m.seed = seed;
    m.artifacts = {out_path.string()};
    m.write(out_path);
    out << "wrote " << values.rows() << " rows x " << values.cols() << " channels to " << out_path.string() << '\n';
    return kOk;
}

int cmd_analyze(const fs::path& data_path, Index lookback, const std::string& harmonics, const fs::path& out_path,
                Manifest& m, std::ostream& out)
{
    const HarmonicSelection selection = parse_harmonics(harmonics);
    if (lookback < 4) {
        throw Error(ErrorCode::InvalidInput, "--lookback must be at least 4");
    }
    const Dataset data = load_csv(data_path, {}, lookback);
    std::ostringstream csv;
    csv << "channel_id,fundamental_index,w_f,w_t,E_h,E_f\n";
    for (Index c = 0; c < data.channels(); ++c) {
        const Eigen::VectorXd window = data.raw.col(c).tail(lookback);
        const EnergyWeights w = harmonic_weights_or_time_only(window, selection);
        csv << c << ',' << w.fundamental_index << ',' << number(w.w_f) << ',' << number(w.w_t) << ','
            << number(w.harmonic_energy()) << ',' << number(w.total_energy) << '\n';
    }
    write_text(out_path, csv.str());
    m.config = {{"lookback", lookback}, {"harmonics", harmonics}, {"data", data_path.string()}};
    m.artifacts = {out_path.string()};
    m.write(out_path);
    out << csv.str();
    return kOk;
}

int cmd_train(const fs::path& data_path, const TrainOptions& opt, const fs::path& checkpoint, fs::path history,
              Manifest& m, std::ostream& out)
{
    const AtfnetConfig config = opt.model_config();
    const Dataset data = load_csv(data_path, parse_fractions(opt.fractions), config.lookback + config.horizon);
    Atfnet model = init_params(config, opt.train.seed);
    const TrainHistory h = train(model, data, opt.train);
    if (history.empty()) {
        history = checkpoint.string() + ".history.csv";
    }
    save_checkpoint(model, checkpoint);
    write_text(history, history_csv(h));
    m.config = to_json(config);
    m.config["train"] = opt.train_json();
    m.seed = opt.train.seed;
    m.artifacts = {checkpoint.string(), history.string()};
    m.write(checkpoint);
    out << "trained " << h.epochs.size() << " epochs, best epoch " << h.best_epoch << " (val mse "
        << number(h.best_val_mse) << ")\n";
    return kOk;
}

int cmd_eval(const fs::path& data_path, const fs::path& checkpoint, const std::string& part,
             const std::vector<double>& fractions, const fs::path& out_path, Manifest& m, std::ostream& out)
{
    const SplitPart which = parse_split_part(part);
    const Atfnet model = load_checkpoint(checkpoint);
    const Dataset data = load_csv(data_path, parse_fractions(fractions));
    json report = to_json(evaluate(model, data, which));
    report["split"] = part;
    write_text(out_path, report.dump(2) + "\n");
    m.config = to_json(model.config());
    m.config["split"] = part;
    m.config["split_fractions"] = fractions;
    m.artifacts = {out_path.string()};
    m.write(out_path);
    out << report.dump(2) << '\n';
    return kOk;
}

int cmd_forecast(const fs::path& data_path, const fs::path& checkpoint, Index origin,
                 const std::vector<double>& fractions, const fs::path& out_path, Manifest& m, std::ostream& out)
{
    const Atfnet model = load_checkpoint(checkpoint);
    const Index lookback = model.config().lookback;
    const Dataset data = load_csv(data_path, parse_fractions(fractions), lookback);
    if (origin < 0) {
        origin = data.rows() - lookback;
    }
    if (origin + lookback > data.rows()) {
        throw Error(ErrorCode::InvalidInput, "origin " + std::to_string(origin) + " leaves fewer than " +
                                                 std::to_string(lookback) + " rows of history");
    }
    std::ostringstream csv;
    csv << "channel,step,y_f,y_t,w_f,y_hat\n";
    for (Index c = 0; c < data.channels(); ++c) {
        const Forecast f = model.predict(data.values.col(c).segment(origin, lookback));
        for (Index s = 0; s < f.y_hat.size(); ++s) {
            csv << c << ',' << s + 1 << ',' << number(f.y_f(s)) << ',' << number(f.y_t(s)) << ','
                << number(f.weights.w_f) << ',' << number(f.y_hat(s)) << '\n';
        }
    }
    write_text(out_path, csv.str());
    m.config = to_json(model.config());
    m.config["origin"] = origin;
    m.config["split_fractions"] = fractions;
    m.artifacts = {out_path.string()};
    m.write(out_path);
    out << "wrote " << data.channels() << " x " << model.config().horizon << " forecasts to " << out_path.string()
        << '\n';
    return kOk;
}

int cmd_gradcheck(std::uint64_t seed, const fs::path& out_path, Manifest& m, std::ostream& out)
{
    std::ostringstream csv;
    csv << "layer,max_rel_error,tolerance,checked,worst,status\n";
    bool all = true;
    for (const LayerCheck& c : gradcheck_suite(seed)) {
        all = all && c.report.passed;
        csv << c.layer << ',' << number(c.report.max_rel_error) << ',' << number(c.tolerance) << ','
            << c.report.checked << ',' << c.report.worst_name << '[' << c.report.worst_index << "],"
            << (c.report.passed ? "pass" : "fail") << '\n';
    }
    write_text(out_path, csv.str());
    m.config = {{"layers", gradcheck_layers()}, {"probe_scale", kProbeScale}};
    m.seed = seed;
    m.artifacts = {out_path.string()};
    m.write(out_path);
    out << csv.str();
    return all ? kOk : kNumericFailure;
}

int cmd_cvnn_demo(const cvnn::ComplexRegressionProblem& problem, const std::vector<Index>& sizes, Index trials,
                  std::uint64_t seed, const fs::path& out_path, Manifest& m, std::ostream& out)
{
    const auto rows = cvnn::consistency_report(problem, sizes, trials, seed);
    write_text(out_path, cvnn::consistency_csv(rows));
    m.config = {{"beta0", {problem.beta0.real(), problem.beta0.imag()}},
                {"beta1", {problem.beta1.real(), problem.beta1.imag()}},
                {"input_corr", problem.input_corr},
                {"noise_sigma", problem.noise_sigma},
                {"sizes", sizes},
                {"trials", trials}};
    m.seed = seed;
    m.artifacts = {out_path.string()};
    m.write(out_path);

    out << "complex vs split-real least squares, corr " << problem.input_corr << ", beta1 = " << problem.beta1.real()
        << (problem.beta1.imag() < 0 ? " - " : " + ") << std::abs(problem.beta1.imag()) << "i, " << trials
        << " trials per n\n";
    out << std::setw(8) << "n" << std::setw(16) << "complex err" << std::setw(16) << "split err" << std::setw(16)
        << "gamma1 bias" << std::setw(16) << "delta1 bias" << '\n';
    for (const auto& r : rows) {
        out << std::setw(8) << r.n << std::setw(16) << r.complex_error << std::setw(16) << r.split_error
            << std::setw(16) << r.split_gamma_bias << std::setw(16) << r.split_delta_bias << '\n';
    }
    out << "the omitted cross term predicts gamma1 bias " << -problem.input_corr * problem.beta1.imag()
        << " and delta1 bias " << problem.input_corr * problem.beta1.imag() << '\n';
    return kOk;
}

int cmd_sweep(const fs::path& data_path, const std::vector<Index>& lookbacks, TrainOptions opt,
              const fs::path& out_path, Manifest& m, std::ostream& out)
{
    if (lookbacks.empty()) {
        throw Error(ErrorCode::InvalidInput, "--lookbacks is empty");
    }
    std::ostringstream csv;
    csv << "lookback,horizon,test_mse,test_mae,n_windows,best_epoch\n";
    json configs = json::array();
    for (Index l : lookbacks) {
        opt.lookback = l;
        const AtfnetConfig config = opt.model_config();
        const Dataset data = load_csv(data_path, parse_fractions(opt.fractions), config.lookback + config.horizon);
        Atfnet model = init_params(config, opt.train.seed);
        const TrainHistory h = train(model, data, opt.train);
        const EvalReport r = evaluate(model, data, SplitPart::Test);
        csv << l << ',' << config.horizon << ',' << number(r.mse) << ',' << number(r.mae) << ',' << r.n_windows
            << ',' << h.best_epoch << '\n';
        configs.push_back(to_json(config));
    }
    write_text(out_path, csv.str());
    m.config = {{"models", configs}, {"train", opt.train_json()}};
    m.seed = opt.train.seed;
    m.artifacts = {out_path.string()};
    m.write(out_path);
    out << csv.str();
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Time/frequency ensemble forecaster"};
    app.name("atfnet");
    app.require_subcommand(1);

    Manifest manifest;
    manifest.args = args;

    // synth
    std::string kind = "tone";
    std::string synth_out;
    Index length = 480;
    double period = 24.0;
    double amplitude = 1.0;
    double noise = 0.0;
    double lambda = 9.0;
    std::uint64_t seed = 0;
    CLI::App* synth = app.add_subcommand("synth", "Write a synthetic series as CSV");
    synth->add_option("--out", synth_out, "Output CSV")->required();
    synth->add_option("--kind", kind, "tone, decomp, noise or mixed (tone and noise channels)")
        ->check(CLI::IsMember({"tone", "decomp", "noise", "mixed"}))
        ->capture_default_str();
    synth->add_option("--length", length, "Rows")->capture_default_str();
    synth->add_option("--period", period, "Tone or periodic-part period")->capture_default_str();
    synth->add_option("--amplitude", amplitude, "Tone amplitude")->capture_default_str();
    synth->add_option("--noise", noise, "Noise sigma (tone: additive, noise/mixed: 1 when 0)")->capture_default_str();
    synth->add_option("--lambda", lambda, "Periodic/residual energy ratio for decomp")->capture_default_str();
    synth->add_option("--seed", seed, "Random seed")->capture_default_str();

    // analyze
    std::string data_path;
    std::string out_path;
    Index lookback = 96;
    std::string harmonics = "10";
    CLI::App* analyze = app.add_subcommand("analyze", "Harmonic energy weights of the last window per channel");
    analyze->add_option("--data", data_path, "Input CSV")->required();
    analyze->add_option("--lookback", lookback, "Window length")->capture_default_str();
    analyze->add_option("--harmonics", harmonics, "Harmonic count or 'all'")->capture_default_str();
    analyze->add_option("--out", out_path, "Weights CSV (default weights.csv)");

    // train
    TrainOptions train_opt;
    std::string checkpoint;
    std::string history;
    CLI::App* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
    train_cmd->add_option("--data", data_path, "Input CSV")->required();
    train_cmd->add_option("--out-checkpoint", checkpoint, "Checkpoint path")->required();
    train_cmd->add_option("--history", history, "History CSV (default <checkpoint>.history.csv)");
    train_cmd->add_option("--lookback", train_opt.lookback, "Override the configured lookback");
    train_cmd->add_option("--horizon", train_opt.horizon, "Override the configured horizon");
    train_opt.attach(*train_cmd);

    // eval
    std::string part = "test";
    std::vector<double> fractions{0.7, 0.1, 0.2};
    CLI::App* eval = app.add_subcommand("eval", "MSE/MAE of a checkpoint on one split");
    eval->add_option("--data", data_path, "Input CSV")->required();
    eval->add_option("--checkpoint", checkpoint, "Checkpoint path")->required();
    eval->add_option("--split", part, "train, val or test")->capture_default_str();
    eval->add_option("--split-fractions", fractions, "train,val,test fractions")->delimiter(',')->expected(3);
    eval->add_option("--out", out_path, "Report JSON (default eval_<split>.json)");

    // forecast
    Index origin = -1;
    CLI::App* forecast = app.add_subcommand("forecast", "Forecast every channel from one window");
    forecast->add_option("--data", data_path, "Input CSV")->required();
    forecast->add_option("--checkpoint", checkpoint, "Checkpoint path")->required();
    forecast->add_option("--origin", origin, "First row of the window (default: last lookback rows)");
    forecast->add_option("--split-fractions", fractions, "train,val,test fractions")->delimiter(',')->expected(3);
    forecast->add_option("--out", out_path, "Forecast CSV")->required();

    // gradcheck
    CLI::App* grad = app.add_subcommand("gradcheck", "Finite-difference check of every layer type");
    grad->add_option("--seed", seed, "Random seed")->capture_default_str();
    grad->add_option("--out", out_path, "Result CSV (default gradcheck.csv)");

    // cvnn-demo
    cvnn::ComplexRegressionProblem problem;
    problem.input_corr = 0.8;
    double beta1_real = 1.0;
    double beta1_imag = 1.0;
    Index trials = 200;
    std::vector<Index> sizes{1000, 4000, 10000};
    CLI::App* demo = app.add_subcommand("cvnn-demo", "Complex vs split-real least squares consistency");
    demo->add_option("--corr", problem.input_corr, "Correlation of Re(w) and Im(w)")->capture_default_str();
    demo->add_option("--beta1-real", beta1_real, "Re(beta1)")->capture_default_str();
    demo->add_option("--beta1-imag", beta1_imag, "Im(beta1)")->capture_default_str();
    demo->add_option("--noise", problem.noise_sigma, "Noise sigma")->capture_default_str();
    demo->add_option("--trials", trials, "Trials per sample size")->capture_default_str();
    demo->add_option("--sizes", sizes, "Sample sizes")->delimiter(',');
    demo->add_option("--seed", seed, "Random seed")->capture_default_str();
    demo->add_option("--out", out_path, "Report CSV (default cvnn_report.csv)");

    // sweep-lookback
    TrainOptions sweep_opt;
    std::vector<Index> lookbacks{48, 96, 192};
    CLI::App* sweep = app.add_subcommand("sweep-lookback", "Test MSE as a function of the lookback");
    sweep->add_option("--data", data_path, "Input CSV")->required();
    sweep->add_option("--lookbacks", lookbacks, "Lookbacks to train")->delimiter(',');
    sweep->add_option("--horizon", sweep_opt.horizon, "Override the configured horizon");
    sweep->add_option("--out", out_path, "Result CSV (default sweep_lookback.csv)");
    sweep_opt.attach(*sweep);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        manifest.command = cmd->get_name();
        auto or_default = [&](const std::string& name) { return out_path.empty() ? fs::path(name) : fs::path(out_path); };
        if (cmd == synth) {
            return cmd_synth(kind, synth_out, length, period, amplitude, noise, lambda, seed, manifest, out);
        }
        if (cmd == analyze) {
            return cmd_analyze(data_path, lookback, harmonics, or_default("weights.csv"), manifest, out);
        }
        if (cmd == train_cmd) {
            return cmd_train(data_path, train_opt, checkpoint, history, manifest, out);
        }
        if (cmd == eval) {
            return cmd_eval(data_path, checkpoint, part, fractions, or_default("eval_" + part + ".json"), manifest, out);
        }
        if (cmd == forecast) {
            return cmd_forecast(data_path, checkpoint, origin, fractions, out_path, manifest, out);
        }
        if (cmd == grad) {
            return cmd_gradcheck(seed, or_default("gradcheck.csv"), manifest, out);
        }
        if (cmd == demo) {
            problem.beta1 = {beta1_real, beta1_imag};
            return cmd_cvnn_demo(problem, sizes, trials, seed, or_default("cvnn_report.csv"), manifest, out);
        }
        return cmd_sweep(data_path, lookbacks, sweep_opt, or_default("sweep_lookback.csv"), manifest, out);
    } catch (const Error& e) {
        err << "atfnet " << manifest.command << ": " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "atfnet " << manifest.command << ": " << e.what() << '\n';
        return kNumericFailure;
    }
}

} // namespace atfnet::cli
