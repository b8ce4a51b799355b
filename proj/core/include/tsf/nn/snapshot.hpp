#pragma once

#include "tsf/nn/model.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace tsf::nn {

inline constexpr int kSnapshotVersion = 1;

struct SnapshotEntry {
    std::string name;
    std::vector<std::size_t> shape;
};

struct SnapshotHeader {
    int version = kSnapshotVersion;
    std::string kind;
    std::map<std::string, std::string> metadata;
    std::vector<SnapshotEntry> parameters;
};

/// Writes "TSFSNAP <version>\n", one line of JSON header, then every
/// parameter's values as little-endian IEEE-754 doubles in header order.
void save_snapshot(const SequenceRegressor& model, std::ostream& out);
void save_snapshot(const SequenceRegressor& model, const std::filesystem::path& path);

[[nodiscard]] SnapshotHeader read_snapshot_header(std::istream& in);

/// Loads values into a model of identical architecture (names and shapes must match).
void load_snapshot(SequenceRegressor& model, std::istream& in);
void load_snapshot(SequenceRegressor& model, const std::filesystem::path& path);

} // namespace tsf::nn
