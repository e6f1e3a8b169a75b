#include "nsplan/io/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "nsplan/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint writer assumes a little-endian host");

namespace nsplan {

namespace {

struct Writer {
    std::string out;
    void raw(const void* p, std::size_t n) {
        out.append(reinterpret_cast<const char*>(p), n);
    }
    void u32(uint32_t v) { raw(&v, 4); }
    void u64(uint64_t v) { raw(&v, 8); }
    void f64(double v) { raw(&v, 8); }
    void str(const std::string& s) {
        u32(static_cast<uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    void tensor(const std::string& name, const Tensor<float>& t) {
        str(name);
        u32(static_cast<uint32_t>(t.ndim()));
        for (std::size_t d : t.shape) u64(d);
        raw(t.data.data(), t.data.size() * sizeof(float));
    }
};

struct Reader {
    const std::string& in;
    std::size_t pos = 0;
    explicit Reader(const std::string& s) : in(s) {}
    void raw(void* p, std::size_t n) {
        if (pos + n > in.size()) throw IoError("checkpoint truncated");
        std::memcpy(p, in.data() + pos, n);
        pos += n;
    }
    uint32_t u32() {
        uint32_t v;
        raw(&v, 4);
        return v;
    }
    uint64_t u64() {
        uint64_t v;
        raw(&v, 8);
        return v;
    }
    double f64() {
        double v;
        raw(&v, 8);
        return v;
    }
    std::string str() {
        uint32_t n = u32();
        if (pos + n > in.size()) throw IoError("checkpoint truncated");
        std::string s = in.substr(pos, n);
        pos += n;
        return s;
    }
    Tensor<float> tensor(std::string& name) {
        name = str();
        uint32_t nd = u32();
        std::vector<std::size_t> shape(nd);
        for (auto& d : shape) d = static_cast<std::size_t>(u64());
        Tensor<float> t(shape);
        raw(t.data.data(), t.data.size() * sizeof(float));
        return t;
    }
};

std::string unit_name(int layer, int arity, const char* kind) {
    return "layer" + std::to_string(layer) + "/arity" + std::to_string(arity) + "/" +
           kind;
}

}  // namespace

std::string checkpoint_bytes(const NlmModel<float>& model, const AdamState<float>* adam) {
    Writer w;
    w.raw(kCheckpointMagic, 8);
    w.u32(1);  // version
    w.u64(model.fingerprint);
    w.u32(static_cast<uint32_t>(model.schedule.input_arity));
    w.u32(static_cast<uint32_t>(model.schedule.max_arity));
    w.u32(static_cast<uint32_t>(model.schedule.layers));
    w.u32(static_cast<uint32_t>(model.features));
    w.f64(model.gamma);
    w.f64(model.tau);
    w.str(model.shaping);
    w.str(model.perm_order);
    w.u32(static_cast<uint32_t>(model.input_channels.size()));
    for (std::size_t c : model.input_channels) w.u64(c);

    const char flag = adam ? 1 : 0;
    w.raw(&flag, 1);
    if (adam) {
        w.u64(static_cast<uint64_t>(adam->step));
        w.f64(adam->lr);
        w.f64(adam->beta1);
        w.f64(adam->beta2);
        w.f64(adam->eps);
    }

    uint32_t count = 0;
    for (const auto& layer : model.units) count += 2 * layer.size();
    if (adam) count *= 3;  // weights + first and second moments
    w.u32(count);
    for (std::size_t l = 0; l < model.units.size(); ++l)
        for (std::size_t a = 0; a < model.units[l].size(); ++a) {
            w.tensor(unit_name(l, a, "weight"), model.units[l][a].weight);
            w.tensor(unit_name(l, a, "bias"), model.units[l][a].bias);
        }
    if (adam) {
        std::size_t i = 0;
        for (std::size_t l = 0; l < model.units.size(); ++l)
            for (std::size_t a = 0; a < model.units[l].size(); ++a) {
                w.tensor("adam/m/" + unit_name(l, a, "weight"), adam->m[i]);
                w.tensor("adam/m/" + unit_name(l, a, "bias"), adam->m[i + 1]);
                i += 2;
            }
        i = 0;
        for (std::size_t l = 0; l < model.units.size(); ++l)
            for (std::size_t a = 0; a < model.units[l].size(); ++a) {
                w.tensor("adam/v/" + unit_name(l, a, "weight"), adam->v[i]);
                w.tensor("adam/v/" + unit_name(l, a, "bias"), adam->v[i + 1]);
                i += 2;
            }
    }
    return std::move(w.out);
}

void save_checkpoint(const std::string& path, const NlmModel<float>& model,
                     const AdamState<float>* adam) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint: " + path);
    std::string bytes = checkpoint_bytes(model, adam);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write on checkpoint: " + path);
}

LoadedCheckpoint parse_checkpoint(const std::string& bytes) {
    Reader r(bytes);
    char magic[8];
    r.raw(magic, 8);
    if (std::memcmp(magic, kCheckpointMagic, 8) != 0)
        throw IoError("not a checkpoint file (bad magic)");
    uint32_t version = r.u32();
    if (version != 1)
        throw IoError("unsupported checkpoint version " + std::to_string(version));

    uint64_t fingerprint = r.u64();
    int n = static_cast<int>(r.u32());
    int m = static_cast<int>(r.u32());
    int l = static_cast<int>(r.u32());
    int q = static_cast<int>(r.u32());
    double gamma = r.f64();
    double tau = r.f64();
    std::string shaping = r.str();
    std::string perm_order = r.str();
    if (perm_order != "lex")
        throw IoError("unsupported permutation order tag '" + perm_order + "'");
    uint32_t nch = r.u32();
    std::vector<std::size_t> channels(nch);
    for (auto& c : channels) c = static_cast<std::size_t>(r.u64());
    if (static_cast<int>(nch) != n + 1)
        throw IoError("checkpoint channel table does not match input arity");

    char flag;
    r.raw(&flag, 1);

    LoadedCheckpoint out;
    std::mt19937_64 dummy(0);
    out.model = build_nlm<float>(channels, fingerprint, m, l, q, gamma, tau, shaping, dummy);
    if (out.model.schedule.input_arity != n)
        throw IoError("checkpoint input arity mismatch");

    if (flag) {
        AdamState<float> adam;
        adam.step = static_cast<long>(r.u64());
        adam.lr = r.f64();
        adam.beta1 = r.f64();
        adam.beta2 = r.f64();
        adam.eps = r.f64();
        out.adam = std::move(adam);
    }

    uint32_t count = r.u32();
    std::size_t param_count = 0;
    for (const auto& layer : out.model.units) param_count += 2 * layer.size();
    if (count != (out.adam ? 3 * param_count : param_count))
        throw IoError("checkpoint tensor count mismatch");

    if (out.adam) {
        out.adam->m.assign(param_count, Tensor<float>());
        out.adam->v.assign(param_count, Tensor<float>());
    }

    for (uint32_t i = 0; i < count; ++i) {
        std::string name;
        Tensor<float> t = r.tensor(name);
        std::string base = name;
        std::vector<Tensor<float>>* moments = nullptr;
        if (base.rfind("adam/m/", 0) == 0) {
            moments = &out.adam->m;
            base = base.substr(7);
        } else if (base.rfind("adam/v/", 0) == 0) {
            moments = &out.adam->v;
            base = base.substr(7);
        }
        unsigned layer, arity;
        char kind[16];
        if (std::sscanf(base.c_str(), "layer%u/arity%u/%15s", &layer, &arity, kind) != 3 ||
            layer >= out.model.units.size() ||
            arity >= out.model.units[layer].size())
            throw IoError("unknown tensor '" + name + "' in checkpoint");
        bool is_weight = std::strcmp(kind, "weight") == 0;
        if (!is_weight && std::strcmp(kind, "bias") != 0)
            throw IoError("unknown tensor '" + name + "' in checkpoint");

        Tensor<float>& expected = is_weight ? out.model.units[layer][arity].weight
                                            : out.model.units[layer][arity].bias;
        if (t.shape != expected.shape)
            throw IoError("tensor '" + name + "' has shape " + shape_str(t.shape) +
                          ", expected " + shape_str(expected.shape));
        if (moments) {
            std::size_t flat = 0;
            for (std::size_t li = 0; li < layer; ++li)
                flat += 2 * out.model.units[li].size();
            flat += 2 * arity + (is_weight ? 0 : 1);
            (*moments)[flat] = std::move(t);
        } else {
            expected = std::move(t);
        }
    }
    if (r.pos != bytes.size()) throw IoError("trailing bytes in checkpoint");
    return out;
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read checkpoint: " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    return parse_checkpoint(bytes);
}

}  // namespace nsplan
