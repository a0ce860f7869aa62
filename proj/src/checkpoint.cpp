#include "rainlane/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "rainlane/error.hpp"

namespace rainlane {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::vector<unsigned char>& buf, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
    buf.insert(buf.end(), std::begin(bytes), std::end(bytes));
}

class Reader {
public:
    Reader(std::vector<unsigned char> data, std::string name) : data_(std::move(data)), name_(std::move(name)) {}

    template <typename T>
    T get(const char* what) {
        if (pos_ + sizeof(T) > data_.size()) {
            throw DataError("checkpoint '" + name_ + "' is truncated while reading " + what);
        }
        unsigned char bytes[sizeof(T)];
        std::memcpy(bytes, data_.data() + pos_, sizeof(T));
        if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
        pos_ += sizeof(T);
        T value;
        std::memcpy(&value, bytes, sizeof(T));
        return value;
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    const std::string& name() const { return name_; }

private:
    std::vector<unsigned char> data_;
    std::string name_;
    std::size_t pos_ = 0;
};

void encode_layer(std::vector<unsigned char>& buf, const KpnModel& m) {
    if (m.params.size() != m.arch.param_count()) {
        throw InvalidArgument("save_checkpoint: parameter count does not match the architecture");
    }
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.arch.in_channels));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.arch.conv_size));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.arch.hidden.size()));
    for (int w : m.arch.hidden) put<std::uint32_t>(buf, static_cast<std::uint32_t>(w));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.arch.ksize));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.arch.levels));
    put<std::uint64_t>(buf, static_cast<std::uint64_t>(m.params.size()));
    for (double p : m.params) put<float>(buf, static_cast<float>(p));
}

KpnModel decode_layer(Reader& in, unsigned index) {
    const std::string tag = "layer " + std::to_string(index);
    KpnModel m;
    m.arch.in_channels = static_cast<int>(in.get<std::uint32_t>("in_channels"));
    m.arch.conv_size = static_cast<int>(in.get<std::uint32_t>("conv_size"));
    const std::uint32_t hidden = in.get<std::uint32_t>("hidden count");
    if (hidden > 64) throw DataError("checkpoint '" + in.name() + "' " + tag + " has an implausible stage count");
    m.arch.hidden.clear();
    for (std::uint32_t i = 0; i < hidden; ++i) {
        m.arch.hidden.push_back(static_cast<int>(in.get<std::uint32_t>("hidden width")));
    }
    m.arch.ksize = static_cast<int>(in.get<std::uint32_t>("ksize"));
    m.arch.levels = static_cast<int>(in.get<std::uint32_t>("levels"));
    try {
        m.arch.validate();
    } catch (const InvalidArgument& e) {
        throw DataError("checkpoint '" + in.name() + "' " + tag + " has an invalid architecture: " + e.what());
    }
    for (int w : m.arch.hidden) {
        if (w > 4096) throw DataError("checkpoint '" + in.name() + "' " + tag + " has an implausible width");
    }
    const std::uint64_t count = in.get<std::uint64_t>("param count");
    if (count != m.arch.param_count()) {
        throw DataError("checkpoint '" + in.name() + "' " + tag + " declares " + std::to_string(count) +
                        " parameters, architecture needs " + std::to_string(m.arch.param_count()));
    }
    if (in.remaining() < count * sizeof(float)) {
        throw DataError("checkpoint '" + in.name() + "' is truncated in the parameters of " + tag);
    }
    m.params.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const float v = in.get<float>("parameter");
        if (!std::isfinite(v)) throw DataError("checkpoint '" + in.name() + "' " + tag + " has a non-finite parameter");
        m.params[i] = v;
    }
    return m;
}

}  // namespace

void save_checkpoint(const std::vector<KpnModel>& layers, const std::filesystem::path& path) {
    if (layers.empty() || layers.size() > 2) throw InvalidArgument("a checkpoint holds one or two layers");
    std::vector<unsigned char> buf(std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
    put<std::uint32_t>(buf, kCheckpointVersion);
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(layers.size()));
    for (const KpnModel& m : layers) encode_layer(buf, m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open checkpoint '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw DataError("write failed for checkpoint '" + path.string() + "'");
}

void save_checkpoint(const DlkpnModel& model, const std::filesystem::path& path) {
    save_checkpoint(std::vector<KpnModel>{model.layer1, model.layer2}, path);
}

std::vector<KpnModel> load_layers(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Reader reader(std::move(data), path.string());

    char magic[8];
    for (char& c : magic) {
        c = static_cast<char>(reader.get<std::uint8_t>("magic"));
    }
    if (std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
        throw DataError("checkpoint '" + path.string() + "' has wrong magic: expected 'RLKPNCK', found '" +
                        std::string(magic, strnlen(magic, sizeof(magic))) + "'");
    }
    const std::uint32_t version = reader.get<std::uint32_t>("version");
    if (version != kCheckpointVersion) {
        throw DataError("checkpoint '" + path.string() + "' has format version " + std::to_string(version) +
                        ", expected " + std::to_string(kCheckpointVersion));
    }
    const std::uint32_t count = reader.get<std::uint32_t>("layer count");
    if (count < 1 || count > 2) {
        throw DataError("checkpoint '" + path.string() + "' declares " + std::to_string(count) + " layers");
    }
    std::vector<KpnModel> layers;
    for (std::uint32_t i = 0; i < count; ++i) layers.push_back(decode_layer(reader, i + 1));
    if (reader.remaining() != 0) {
        throw DataError("checkpoint '" + path.string() + "' has " + std::to_string(reader.remaining()) +
                        " trailing bytes");
    }
    return layers;
}

DlkpnModel load_checkpoint(const std::filesystem::path& path) {
    std::vector<KpnModel> layers = load_layers(path);
    if (layers.size() != 2) {
        throw DataError("checkpoint '" + path.string() + "' holds " + std::to_string(layers.size()) +
                        " layer(s), a dual-layer model needs 2");
    }
    return DlkpnModel{std::move(layers[0]), std::move(layers[1])};
}

}  // namespace rainlane
