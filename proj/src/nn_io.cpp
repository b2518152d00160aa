// Model file format "RNN1", version 1, little-endian:
//   magic "RNN1" | u16 version | u16 layer count | u32 input length | u32 input channels
//   per layer: u8 kind | u8 trainable | kind-specific u32 fields
//     conv1d: filters, kernel, activation   maxpool1d: size
//     dense: units, activation              flatten: (none)
//   then per parametric layer, in order: f64 weights | f64 biases
// Optimizer moments and the step counter are transient and not stored.

#include <fstream>

#include "resp/binio.hpp"
#include "resp/errors.hpp"
#include "resp/nn.hpp"

namespace resp::nn {

namespace {
constexpr char kMagic[4] = {'R', 'N', 'N', '1'};
constexpr std::uint16_t kVersion = 1;
} // namespace

void save_model(const ModelState& model, const std::string& path) {
    if (model.specs.empty()) throw std::invalid_argument("refusing to save an empty model");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("cannot open for writing: " + path);

    binio::write_bytes(os, kMagic, 4);
    binio::write_u16(os, kVersion);
    binio::write_u16(os, static_cast<std::uint16_t>(model.specs.size()));
    binio::write_u32(os, static_cast<std::uint32_t>(model.input_shape.length));
    binio::write_u32(os, static_cast<std::uint32_t>(model.input_shape.channels));

    for (const LayerSpec& s : model.specs) {
        binio::write_u8(os, static_cast<std::uint8_t>(s.kind));
        binio::write_u8(os, s.trainable ? 1 : 0);
        switch (s.kind) {
        case LayerKind::conv1d:
            binio::write_u32(os, static_cast<std::uint32_t>(s.filters));
            binio::write_u32(os, static_cast<std::uint32_t>(s.kernel));
            binio::write_u32(os, static_cast<std::uint32_t>(s.act));
            break;
        case LayerKind::maxpool1d:
            binio::write_u32(os, static_cast<std::uint32_t>(s.pool));
            break;
        case LayerKind::flatten:
            break;
        case LayerKind::dense:
            binio::write_u32(os, static_cast<std::uint32_t>(s.units));
            binio::write_u32(os, static_cast<std::uint32_t>(s.act));
            break;
        }
    }
    for (std::size_t i = 0; i < model.specs.size(); ++i) {
        if (!model.specs[i].has_params()) continue;
        binio::write_f64_array(os, model.weights[i].w.data(), model.weights[i].w.size());
        binio::write_f64_array(os, model.weights[i].b.data(), model.weights[i].b.size());
    }
    os.flush();
    if (!os) throw io_error("write failed: " + path);
}

ModelState load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open for reading: " + path);

    char magic[4];
    binio::read_bytes(is, magic, 4, "model magic");
    if (!std::equal(magic, magic + 4, kMagic))
        throw io_error("not a model file: " + path);
    const std::uint16_t version = binio::read_u16(is, "model version");
    if (version != kVersion)
        throw io_error("unsupported model version " + std::to_string(version));

    const std::uint16_t nlayers = binio::read_u16(is, "layer count");
    Shape input{static_cast<int>(binio::read_u32(is, "input length")),
                static_cast<int>(binio::read_u32(is, "input channels"))};

    std::vector<LayerSpec> specs;
    specs.reserve(nlayers);
    for (int i = 0; i < nlayers; ++i) {
        const std::uint8_t kind = binio::read_u8(is, "layer kind");
        if (kind > static_cast<std::uint8_t>(LayerKind::dense))
            throw io_error("unknown layer kind in " + path);
        const std::uint8_t trainable = binio::read_u8(is, "trainable flag");
        LayerSpec s;
        s.kind = static_cast<LayerKind>(kind);
        s.trainable = trainable != 0;
        auto read_act = [&](const char* what) {
            const std::uint32_t a = binio::read_u32(is, what);
            if (a > static_cast<std::uint32_t>(Activation::softmax))
                throw io_error("unknown activation in " + path);
            return static_cast<Activation>(a);
        };
        switch (s.kind) {
        case LayerKind::conv1d:
            s.filters = static_cast<int>(binio::read_u32(is, "conv filters"));
            s.kernel = static_cast<int>(binio::read_u32(is, "conv kernel"));
            s.act = read_act("conv activation");
            break;
        case LayerKind::maxpool1d:
            s.pool = static_cast<int>(binio::read_u32(is, "pool size"));
            break;
        case LayerKind::flatten:
            break;
        case LayerKind::dense:
            s.units = static_cast<int>(binio::read_u32(is, "dense units"));
            s.act = read_act("dense activation");
            break;
        }
        specs.push_back(s);
    }

    ModelState m;
    m.input_shape = input;
    m.specs = std::move(specs);
    m.shapes = shape_chain(m.specs, input); // validates the stored structure
    m.weights.resize(m.specs.size());
    m.moments.resize(m.specs.size());

    Shape cur = input;
    for (std::size_t i = 0; i < m.specs.size(); ++i) {
        const LayerSpec& s = m.specs[i];
        if (s.has_params()) {
            std::size_t nw, nb;
            if (s.kind == LayerKind::conv1d) {
                nw = static_cast<std::size_t>(s.filters) * s.kernel * cur.channels;
                nb = static_cast<std::size_t>(s.filters);
            } else {
                nw = static_cast<std::size_t>(s.units) * cur.size();
                nb = static_cast<std::size_t>(s.units);
            }
            m.weights[i].w.resize(nw);
            m.weights[i].b.resize(nb);
            binio::read_f64_array(is, m.weights[i].w.data(), nw, "layer weights");
            binio::read_f64_array(is, m.weights[i].b.data(), nb, "layer biases");
        }
        cur = m.shapes[i];
    }
    if (is.peek() != std::char_traits<char>::eof())
        throw io_error("trailing bytes in model file: " + path);
    return m;
}

} // namespace resp::nn
