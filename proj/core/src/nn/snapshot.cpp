#include "tsf/nn/snapshot.hpp"

#include "tsf/error.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace tsf::nn {

namespace {

constexpr const char* kMagic = "TSFSNAP";

void write_double(std::ostream& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
    out.write(buf, 8);
}

double read_double(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    if (!in) throw DataError("snapshot: truncated parameter data");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

} // namespace

void save_snapshot(const SequenceRegressor& model, std::ostream& out) {
    nlohmann::json header;
    header["kind"] = to_string(model.kind());
    header["metadata"] = model.metadata();
    header["parameters"] = nlohmann::json::array();
    const auto params = model.parameters();
    for (const Parameter* p : params) header["parameters"].push_back({{"name", p->name}, {"shape", p->value.shape()}});
    out << kMagic << ' ' << kSnapshotVersion << '\n' << header.dump() << '\n';
    for (const Parameter* p : params) {
        for (double v : p->value.data()) write_double(out, v);
    }
    if (!out) throw std::runtime_error("snapshot: write failed");
}

void save_snapshot(const SequenceRegressor& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("snapshot: cannot open " + path.string() + " for writing");
    save_snapshot(model, out);
}

SnapshotHeader read_snapshot_header(std::istream& in) {
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (!in || magic != kMagic) throw DataError("snapshot: bad magic");
    if (version != kSnapshotVersion) throw DataError("snapshot: unsupported version " + std::to_string(version));
    in.ignore(1);
    std::string line;
    if (!std::getline(in, line)) throw DataError("snapshot: missing header");
    SnapshotHeader h;
    h.version = version;
    try {
        const auto j = nlohmann::json::parse(line);
        h.kind = j.at("kind").get<std::string>();
        h.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
        for (const auto& e : j.at("parameters")) {
            h.parameters.push_back({e.at("name").get<std::string>(), e.at("shape").get<std::vector<std::size_t>>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("snapshot: malformed header: ") + e.what());
    }
    return h;
}

void load_snapshot(SequenceRegressor& model, std::istream& in) {
    const SnapshotHeader h = read_snapshot_header(in);
    if (h.kind != to_string(model.kind())) throw DataError("snapshot: model kind " + h.kind + " does not match");
    auto params = model.parameters();
    if (params.size() != h.parameters.size()) throw DataError("snapshot: parameter count mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i]->name != h.parameters[i].name || params[i]->value.shape() != h.parameters[i].shape) {
            throw DataError("snapshot: parameter '" + h.parameters[i].name + "' does not match the model");
        }
    }
    // Stage everything first so a bad body leaves the model unchanged.
    std::vector<double> values;
    for (const Parameter* p : params) {
        for (std::size_t i = 0; i < p->value.size(); ++i) values.push_back(read_double(in));
    }
    if (in.peek() != std::char_traits<char>::eof()) throw DataError("snapshot: trailing bytes after parameter data");
    auto next = values.begin();
    for (Parameter* p : params) {
        for (double& v : p->value.data()) v = *next++;
    }
}

void load_snapshot(SequenceRegressor& model, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("snapshot: cannot open " + path.string());
    load_snapshot(model, in);
}

} // namespace tsf::nn
