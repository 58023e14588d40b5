#include "srp/series_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "json.hpp"
#include "srp/error.hpp"

namespace srp::io {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'R', 'P', 'T', 'S', '\0', '\0', '\0'};

template <typename U>
void put_le(std::ostream& out, U v) {
    std::array<char, sizeof(U)> bytes{};
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
    std::array<unsigned char, sizeof(U)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
        raise(ErrorCode::CorruptFile, "unexpected end of stream");
    }
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
    return v;
}

const char* domain_name(Domain d) { return d == Domain::Raw ? "raw" : "preprocessed"; }

Domain parse_domain(const std::string& s) {
    if (s == "raw") return Domain::Raw;
    if (s == "preprocessed") return Domain::Preprocessed;
    raise(ErrorCode::CorruptFile, "unknown domain tag '" + s + "'");
}

bool parse_double(std::string_view s, double& out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace

void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }
void put_u32(std::ostream& out, std::uint32_t v) { put_le(out, v); }
void put_u64(std::ostream& out, std::uint64_t v) { put_le(out, v); }
void put_f32(std::ostream& out, float v) { put_le(out, std::bit_cast<std::uint32_t>(v)); }
void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
std::uint8_t get_u8(std::istream& in) { return get_le<std::uint8_t>(in); }
std::uint32_t get_u32(std::istream& in) { return get_le<std::uint32_t>(in); }
std::uint64_t get_u64(std::istream& in) { return get_le<std::uint64_t>(in); }
float get_f32(std::istream& in) { return std::bit_cast<float>(get_le<std::uint32_t>(in)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

void write_csv(const std::filesystem::path& csv_path, const TimeSeries& series) {
    std::ofstream out(csv_path);
    require(out.good(), ErrorCode::Io, "cannot open " + csv_path.string());
    out << "t,value\n" << std::setprecision(17);
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << static_cast<double>(i) / series.sample_rate_hz() << ',' << series[i] << '\n';
    }
    nlohmann::json meta = {{"sample_rate_hz", series.sample_rate_hz()}, {"domain", domain_name(series.domain())}};
    std::ofstream side(sidecar_path(csv_path));
    require(side.good(), ErrorCode::Io, "cannot open sidecar for " + csv_path.string());
    side << meta.dump(2) << '\n';
}

TimeSeries read_csv(const std::filesystem::path& csv_path) {
    std::ifstream side(sidecar_path(csv_path));
    require(side.good(), ErrorCode::Io, "missing sidecar " + sidecar_path(csv_path).string());
    nlohmann::json meta;
    try {
        side >> meta;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::CorruptFile, std::string("sidecar: ") + e.what());
    }
    if (!meta.contains("sample_rate_hz") || !meta.contains("domain")) {
        raise(ErrorCode::CorruptFile, "sidecar lacks sample_rate_hz/domain");
    }

    std::ifstream in(csv_path);
    require(in.good(), ErrorCode::Io, "cannot open " + csv_path.string());
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == "t,value", ErrorCode::CorruptFile, "expected header 't,value'");
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto comma = line.find(',');
        double t = 0.0, v = 0.0;
        if (comma == std::string::npos || !parse_double(std::string_view(line).substr(0, comma), t) ||
            !parse_double(std::string_view(line).substr(comma + 1), v)) {
            raise(ErrorCode::CorruptFile, "bad row: " + line);
        }
        values.push_back(v);
    }
    return {std::move(values), meta.at("sample_rate_hz").get<double>(), parse_domain(meta.at("domain"))};
}

void write_binary(std::ostream& out, const TimeSeries& series) {
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, kSeriesVersion);
    put_f64(out, series.sample_rate_hz());
    put_u8(out, static_cast<std::uint8_t>(series.domain()));
    put_u64(out, series.size());
    for (double v : series.samples()) put_f32(out, static_cast<float>(v));
}

TimeSeries read_binary(std::istream& in) {
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 8 || magic != kMagic) raise(ErrorCode::CorruptFile, "bad series magic");
    const auto version = get_u32(in);
    if (version != kSeriesVersion) {
        raise(ErrorCode::VersionMismatch, "series version " + std::to_string(version));
    }
    const double rate = get_f64(in);
    const auto tag = get_u8(in);
    if (tag > 1) raise(ErrorCode::CorruptFile, "bad domain tag");
    const auto count = get_u64(in);
    if (count == 0 || count > (std::uint64_t{1} << 40)) raise(ErrorCode::CorruptFile, "bad sample count");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = 0; i < count; ++i) values.push_back(get_f32(in));
    if (!(rate > 0.0)) raise(ErrorCode::CorruptFile, "bad sample rate");
    return {std::move(values), rate, static_cast<Domain>(tag)};
}

void write_binary(const std::filesystem::path& path, const TimeSeries& series) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::Io, "cannot open " + path.string());
    write_binary(out, series);
}

TimeSeries read_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::Io, "cannot open " + path.string());
    return read_binary(in);
}

TimeSeries read_series(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? read_csv(path) : read_binary(path);
}

void write_series(const std::filesystem::path& path, const TimeSeries& series) {
    if (path.extension() == ".csv") {
        write_csv(path, series);
    } else {
        write_binary(path, series);
    }
}

}  // namespace srp::io
