#include <atfnet/data.hpp>
#include <atfnet/error.hpp>
#include <atfnet/rng.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace atfnet {

void SplitFractions::validate() const
{
    if (train <= 0.0 || val < 0.0 || test < 0.0 || std::abs(train + val + test - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidInput, "split fractions must be non-negative, train positive, and sum to 1");
    }
}

SplitPart parse_split_part(const std::string& name)
{
    if (name == "train") {
        return SplitPart::Train;
    }
    if (name == "val") {
        return SplitPart::Val;
    }
    if (name == "test") {
        return SplitPart::Test;
    }
    throw Error(ErrorCode::InvalidInput, "unknown split '" + name + "'");
}

std::string to_string(SplitPart part)
{
    switch (part) {
    case SplitPart::Train:
        return "train";
    case SplitPart::Val:
        return "val";
    case SplitPart::Test:
        return "test";
    }
    return "?";
}

std::pair<Index, Index> Dataset::range(SplitPart part) const
{
    switch (part) {
    case SplitPart::Train:
        return {0, train_end};
    case SplitPart::Val:
        return {train_end, val_end};
    case SplitPart::Test:
        return {val_end, rows()};
    }
    return {0, 0};
}

Dataset make_dataset(Eigen::MatrixXd raw, std::vector<std::string> channel_names, SplitFractions split,
                     Index min_rows)
{
    split.validate();
    if (static_cast<Index>(channel_names.size()) != raw.cols() || raw.cols() < 1) {
        throw Error(ErrorCode::InvalidInput, "need one name per channel and at least one channel");
    }
    const Index n = raw.rows();
    Dataset d;
    d.split = split;
    d.train_end = static_cast<Index>(std::floor(split.train * static_cast<double>(n)));
    d.val_end = d.train_end + static_cast<Index>(std::floor(split.val * static_cast<double>(n)));
    if (n < min_rows || d.train_end < 2) {
        throw Error(ErrorCode::TooShort, std::to_string(n) + " rows leave " + std::to_string(d.train_end) +
                                             " for training; need at least " + std::to_string(min_rows) +
                                             " rows and 2 training rows");
    }

    d.values.resize(n, raw.cols());
    for (Index c = 0; c < raw.cols(); ++c) {
        const auto train = raw.col(c).head(d.train_end);
        NormStats s;
        s.mean = train.mean();
        s.std = std::sqrt((train.array() - s.mean).square().mean());
        if (!(s.std >= kMinChannelStd)) {
            throw Error(ErrorCode::ConstantChannel, "channel '" + channel_names[static_cast<std::size_t>(c)] +
                                                        "' is constant over the training slice");
        }
        d.values.col(c) = (raw.col(c).array() - s.mean) / s.std;
        d.norm_stats.push_back(s);
    }
    d.raw = std::move(raw);
    d.channel_names = std::move(channel_names);
    return d;
}

namespace {

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const auto first = cell.find_first_not_of(" \t\r");
        const auto last = cell.find_last_not_of(" \t\r");
        cells.push_back(first == std::string::npos ? std::string() : cell.substr(first, last - first + 1));
        if (comma == std::string::npos) {
            return cells;
        }
        start = comma + 1;
    }
}

double parse_cell(const std::string& cell, Index line, Index column)
{
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    if (!cell.empty() && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw Error(ErrorCode::ParseError, "row " + std::to_string(line) + ", column " + std::to_string(column) +
                                               ": '" + cell + "' is not a finite number");
    }
    return v;
}

} // namespace

Dataset load_csv(const std::filesystem::path& path, SplitFractions split, Index min_rows)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::ParseError, "row 1, column 1: missing header");
    }
    std::vector<std::string> header = split_line(line);
    if (header.size() < 2) {
        throw Error(ErrorCode::ParseError, "row 1: need a timestamp column and at least one channel");
    }
    std::vector<std::string> names(header.begin() + 1, header.end());
    const auto width = static_cast<Index>(names.size());

    std::vector<double> cells;
    Index rows = 0;
    Index line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::vector<std::string> row = split_line(line);
        if (static_cast<Index>(row.size()) != width + 1) {
            throw Error(ErrorCode::ParseError, "row " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(width + 1) + " columns, found " +
                                                   std::to_string(row.size()));
        }
        for (Index c = 0; c < width; ++c) {
            cells.push_back(parse_cell(row[static_cast<std::size_t>(c + 1)], line_no, c + 2));
        }
        ++rows;
    }
    Eigen::MatrixXd raw =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(cells.data(), rows,
                                                                                                 width);
    return make_dataset(std::move(raw), std::move(names), split, min_rows);
}

std::string iso_timestamp(Index hour)
{
    using namespace std::chrono;
    const sys_days epoch = year{2000} / January / 1;
    const sys_days day = epoch + days{hour / 24};
    const year_month_day ymd{day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00:00", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(hour % 24));
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& channel_names,
               const Eigen::MatrixXd& values)
{
    if (static_cast<Index>(channel_names.size()) != values.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "one name per column required");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    }
    out << "date";
    for (const auto& name : channel_names) {
        out << ',' << name;
    }
    out << '\n';
    char buf[32];
    for (Index r = 0; r < values.rows(); ++r) {
        out << iso_timestamp(r);
        for (Index c = 0; c < values.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", values(r, c));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) {
        throw Error(ErrorCode::Io, "failed writing " + path.string());
    }
}

Index window_count(Index part_len, Index lookback, Index horizon, Index stride)
{
    if (stride < 1) {
        throw Error(ErrorCode::InvalidInput, "stride must be positive");
    }
    const Index span = part_len - lookback - horizon;
    return span < 0 ? 0 : span / stride + 1;
}

std::vector<SeriesWindow> windows(const Dataset& data, Index lookback, Index horizon, SplitPart part, Index stride)
{
    const auto [first, last] = data.range(part);
    const Index count = window_count(last - first, lookback, horizon, stride);
    std::vector<SeriesWindow> out;
    out.reserve(static_cast<std::size_t>(count * data.channels()));
    for (Index c = 0; c < data.channels(); ++c) {
        for (Index w = 0; w < count; ++w) {
            const Index origin = first + w * stride;
            out.push_back({c, data.values.col(c).segment(origin, lookback),
                           data.values.col(c).segment(origin + lookback, horizon), origin});
        }
    }
    return out;
}

Eigen::VectorXd synth_tone(Index length, double period, double amplitude, double phase, double noise_sigma,
                           std::uint64_t seed)
{
    if (length < 1 || !(period > 0.0)) {
        throw Error(ErrorCode::InvalidInput, "tone needs a positive length and period");
    }
    Rng rng(seed);
    Eigen::VectorXd x(length);
    for (Index n = 0; n < length; ++n) {
        x(n) = amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(n) / period + phase);
        if (noise_sigma > 0.0) {
            x(n) += noise_sigma * rng.normal();
        }
    }
    return x;
}

Eigen::VectorXd synth_noise(Index length, double sigma, std::uint64_t seed)
{
    if (length < 1) {
        throw Error(ErrorCode::InvalidInput, "noise length must be positive");
    }
    Rng rng(seed);
    Eigen::VectorXd x(length);
    for (Index n = 0; n < length; ++n) {
        x(n) = sigma * rng.normal();
    }
    return x;
}

PeriodicDecomposition synth_decomposition(Index period, Index repetitions, double lambda, std::uint64_t seed)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorCode::InvalidInput, "lambda must be positive and finite");
    }
    if (period < 3 || repetitions < 1) {
        throw Error(ErrorCode::InvalidInput, "need period >= 3 and at least one repetition");
    }
    Rng rng(seed);
    const Index q = (period + 1) / 2 - 1;
    const Index length = period * repetitions;

    Eigen::VectorXd one_period = Eigen::VectorXd::Zero(period);
    for (Index m = 1; m <= q; ++m) {
        const double a = rng.normal();
        const double b = rng.normal();
        for (Index n = 0; n < period; ++n) {
            const double angle = 2.0 * std::numbers::pi * static_cast<double>(m * n) / static_cast<double>(period);
            one_period(n) += a * std::cos(angle) + b * std::sin(angle);
        }
    }
    one_period.array() -= one_period.mean();

    PeriodicDecomposition d;
    d.period = period;
    d.repetitions = repetitions;
    d.periodic_part = one_period.replicate(repetitions, 1);

    Eigen::VectorXd residual(length);
    for (Index n = 0; n < length; ++n) {
        residual(n) = rng.normal();
    }
    residual.array() -= residual.mean();
    const double e_p = d.periodic_part.squaredNorm();
    residual *= std::sqrt(e_p / (lambda * residual.squaredNorm()));
    d.residual_part = std::move(residual);
    d.lambda = e_p / d.residual_part.squaredNorm();
    return d;
}

} // namespace atfnet
