#pragma once

#include "streammvc/harness.hpp"
#include "streammvc/metrics.hpp"
#include "streammvc/solver.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace smvc::io {

namespace fs = std::filesystem;

inline constexpr int kCheckpointVersion = 1;

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// View file: header `id,<feature>...`, then one row per present sample.
ViewBatch read_view(const fs::path& path, std::size_t view_index = 1);
void write_view(const fs::path& path, const ViewBatch& view);

/// Labels file: header `id,label`, one row per sample. Arbitrary integer labels
/// are mapped to 0..k-1 in order of first appearance.
LabeledSamples read_labels(const fs::path& path);
void write_labels(const fs::path& path, const std::vector<SampleId>& ids, const Partition& labels);

nlohmann::json to_json(const MetricReport& r);
nlohmann::json to_json(const SolveDiagnostics& d);
nlohmann::json to_json(const MissingPattern& p);

nlohmann::json checkpoint_to_json(const ConsensusState& state);
/// Throws DataError on a wrong format tag or version, missing fields, or an
/// inconsistent or non-orthonormal Z.
ConsensusState checkpoint_from_json(const nlohmann::json& doc);

/// Writes to a sibling temporary file and renames it over `path`, so an
/// existing checkpoint is never left half-written.
void save_checkpoint(const fs::path& path, const ConsensusState& state);
ConsensusState load_checkpoint(const fs::path& path);

/// Atomic text write (temporary file + rename).
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

}  // namespace smvc::io
