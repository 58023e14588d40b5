#include "srp/checkpoint.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "srp/series_io.hpp"

namespace srp::nn {

namespace {

using nlohmann::json;

constexpr std::array<char, 8> kMagic = {'S', 'R', 'P', 'C', 'K', 'P', 'T', '\0'};

json shape_json(const Shape& s) { return json::array({s.batch, s.channels, s.length}); }

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const SrpModel& model, const AdamState<float>* optimizer) {
    std::vector<std::pair<std::string, const Tensor<float>*>> blobs = model.named_tensors();
    const std::size_t n_params = blobs.size();
    if (optimizer != nullptr) {
        require(optimizer->m.size() == n_params && optimizer->v.size() == n_params, ErrorCode::ShapeMismatch,
                "optimizer state does not match the model");
        for (std::size_t i = 0; i < n_params; ++i) blobs.emplace_back("adam.m/" + blobs[i].first, &optimizer->m[i]);
        for (std::size_t i = 0; i < n_params; ++i) blobs.emplace_back("adam.v/" + blobs[i].first, &optimizer->v[i]);
    }

    json tensors = json::array();
    std::uint64_t offset = 0;
    for (const auto& [name, t] : blobs) {
        tensors.push_back({{"name", name}, {"shape", shape_json(t->shape())}, {"offset", offset}, {"count", t->size()}});
        offset += 4 * t->size();
    }
    const auto& h = model.hyper();
    const json header = {
        {"format", "srpnet-checkpoint"},
        {"version", kCheckpointVersion},
        {"hyper",
         {{"alpha", h.alpha},
          {"n_blocks", h.n_blocks},
          {"channels", h.channels},
          {"kernel_size", h.kernel_size},
          {"residual_init_scale", h.residual_init_scale}}},
        {"seed", model.seed()},
        {"update_count", optimizer != nullptr ? optimizer->step : 0},
        {"has_optimizer", optimizer != nullptr},
        {"blob_bytes", offset},
        {"tensors", tensors},
    };
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::Io, "cannot write checkpoint " + path.string());
    out.write(kMagic.data(), kMagic.size());
    io::put_u32(out, kCheckpointVersion);
    io::put_u64(out, header_text.size());
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    for (const auto& blob : blobs) {
        for (float v : blob.second->values()) io::put_f32(out, v);
    }
    require(out.good(), ErrorCode::Io, "failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) raise(ErrorCode::MissingArtifact, "no checkpoint at " + path.string());
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::Io, "cannot open checkpoint " + path.string());
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 8 || magic != kMagic) raise(ErrorCode::CorruptFile, "not a checkpoint (bad magic)");
    const auto version = io::get_u32(in);
    if (version != kCheckpointVersion) {
        raise(ErrorCode::VersionMismatch, "checkpoint version " + std::to_string(version) + ", expected " +
                                              std::to_string(kCheckpointVersion));
    }
    const auto header_len = io::get_u64(in);
    if (header_len == 0 || header_len > (1u << 26)) raise(ErrorCode::CorruptFile, "implausible header length");
    std::string header_text(static_cast<std::size_t>(header_len), '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(header_len));
    if (static_cast<std::uint64_t>(in.gcount()) != header_len) raise(ErrorCode::CorruptFile, "truncated header");

    json header;
    try {
        header = json::parse(header_text);
    } catch (const json::exception& e) {
        raise(ErrorCode::CorruptFile, std::string("checkpoint header: ") + e.what());
    }

    try {
        if (header.at("version").get<std::uint32_t>() != kCheckpointVersion) {
            raise(ErrorCode::VersionMismatch, "header version disagrees with container");
        }
        const auto& hj = header.at("hyper");
        SrpHyper hyper{.alpha = hj.at("alpha").get<int>(),
                       .n_blocks = hj.at("n_blocks").get<int>(),
                       .channels = hj.at("channels").get<int>(),
                       .kernel_size = hj.at("kernel_size").get<int>(),
                       .residual_init_scale = hj.at("residual_init_scale").get<double>()};
        Checkpoint ck{.model = SrpModel(hyper, header.at("seed").get<std::uint64_t>()),
                      .optimizer = std::nullopt,
                      .update_count = header.at("update_count").get<std::uint64_t>()};
        auto params = ck.model.parameters();
        const bool has_opt = header.at("has_optimizer").get<bool>();
        if (has_opt) ck.optimizer = AdamState<float>::zeros_like(params);

        std::vector<Tensor<float>*> targets;
        for (auto& p : params) targets.push_back(p.value);
        if (has_opt) {
            for (auto& m : ck.optimizer->m) targets.push_back(&m);
            for (auto& v : ck.optimizer->v) targets.push_back(&v);
            ck.optimizer->step = ck.update_count;
        }
        const auto& manifest = header.at("tensors");
        if (manifest.size() != targets.size()) raise(ErrorCode::CorruptFile, "tensor manifest size mismatch");

        std::uint64_t expected_offset = 0;
        for (std::size_t i = 0; i < targets.size(); ++i) {
            const auto& e = manifest.at(i);
            const auto shape = e.at("shape").get<std::vector<std::size_t>>();
            if (shape.size() != 3 || !(Shape{shape[0], shape[1], shape[2]} == targets[i]->shape())) {
                raise(ErrorCode::CorruptFile, "shape mismatch for " + e.at("name").get<std::string>());
            }
            if (e.at("offset").get<std::uint64_t>() != expected_offset) {
                raise(ErrorCode::CorruptFile, "bad offset for " + e.at("name").get<std::string>());
            }
            for (float& v : targets[i]->values()) v = io::get_f32(in);
            expected_offset += 4 * targets[i]->size();
        }
        if (expected_offset != header.at("blob_bytes").get<std::uint64_t>()) {
            raise(ErrorCode::CorruptFile, "blob size mismatch");
        }
        return ck;
    } catch (const json::exception& e) {
        raise(ErrorCode::CorruptFile, std::string("checkpoint header: ") + e.what());
    }
}

}  // namespace srp::nn
