// SPDX-License-Identifier: Apache-2.0
//
// Checkpoint layout (all integers little-endian):
//   "QRNC" magic, u8 format version, config JSON (u32 len + bytes),
//   u64 init seed, u32 tensor count, per tensor {name, u64 element count},
//   all tensor values as raw f64, u64 FNV-1a checksum of everything above.
#include <fstream>

#include "qrn/core/serial.hpp"
#include "qrn/train/model.hpp"

namespace qrn::train {

namespace {
constexpr char kMagic[4] = {'Q', 'R', 'N', 'C'};
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
    std::vector<std::uint8_t> buf;
    buf.insert(buf.end(), kMagic, kMagic + 4);
    serial::put_u8(buf, static_cast<std::uint8_t>(kCheckpointVersion));
    serial::put_string(buf, config_to_json(model.config));
    serial::put_u64(buf, model.init_seed);

    Model& m = const_cast<Model&>(model);  // read-only traversal
    auto refs = param_refs(m);
    serial::put_u32(buf, static_cast<std::uint32_t>(refs.size()));
    for (const auto& [name, vec] : refs) {
        serial::put_string(buf, name);
        serial::put_u64(buf, vec->size());
    }
    for (const auto& [name, vec] : refs)
        for (double v : *vec) serial::put_f64(buf, v);

    serial::put_u64(buf, serial::fnv1a64(buf.data(), buf.size()));

    std::ofstream f(path, std::ios::binary);
    if (!f) throw CheckpointError("cannot write checkpoint '" + path.string() + "'");
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!f) throw CheckpointError("short write to checkpoint '" + path.string() + "'");
}

Model load_checkpoint(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());

    serial::Reader r(buf);
    char magic[4];
    for (char& c : magic) c = static_cast<char>(r.get_u8());
    if (!std::equal(magic, magic + 4, kMagic))
        throw CheckpointError("'" + path.string() + "' is not a checkpoint file");
    const int version = r.get_u8();
    if (version != kCheckpointVersion)
        throw VersionMismatchError(version, kCheckpointVersion);

    const ModelConfig config = config_from_json(r.get_string());
    const std::uint64_t init_seed = r.get_u64();
    Model model = init_model(config, init_seed);
    auto refs = param_refs(model);

    const std::uint32_t n_tensors = r.get_u32();
    if (n_tensors != refs.size())
        throw CheckpointError("checkpoint tensor count " + std::to_string(n_tensors) +
                              " does not match model structure (" +
                              std::to_string(refs.size()) + ")");
    std::vector<std::uint64_t> counts(n_tensors);
    for (std::uint32_t i = 0; i < n_tensors; ++i) {
        const std::string name = r.get_string();
        counts[i] = r.get_u64();
        if (name != refs[i].first)
            throw CheckpointError("checkpoint tensor '" + name + "' does not match expected '" +
                                  refs[i].first + "'");
        if (counts[i] != refs[i].second->size())
            throw TruncationError("tensor '" + name + "' length " + std::to_string(counts[i]) +
                                  " does not match model (" +
                                  std::to_string(refs[i].second->size()) + ")");
    }
    for (std::uint32_t i = 0; i < n_tensors; ++i)
        for (std::uint64_t j = 0; j < counts[i]; ++j) (*refs[i].second)[j] = r.get_f64();

    const std::size_t payload_end = r.pos();
    const std::uint64_t stored = r.get_u64();
    if (stored != serial::fnv1a64(buf.data(), payload_end))
        throw ChecksumError("checkpoint checksum mismatch in '" + path.string() + "'");
    return model;
}

}  // namespace qrn::train
