#include "streammvc/io.hpp"

#include "streammvc/error.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace smvc::io {

using nlohmann::json;

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

template <typename T>
T parse_number(std::string_view field, const fs::path& path, std::size_t line) {
  T value{};
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw DataError(where(path, line) + ": cannot parse '" + std::string(field) + "' as a number");
  }
  return value;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!strip_cr(line).empty()) lines.push_back(std::string(strip_cr(line)));
  }
  return lines;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw DataError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw DataError("cannot replace " + path.string() + ": " + ec.message());
  }
}

ViewBatch read_view(const fs::path& path, std::size_t view_index) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw DataError(path.string() + ": empty view file");
  const auto header = split(lines[0]);
  if (header.empty() || header[0] != "id") throw DataError(path.string() + ": first column must be 'id'");
  const Index d = static_cast<Index>(header.size()) - 1;
  if (d < 1) throw DataError(path.string() + ": no feature columns");
  const Index n = static_cast<Index>(lines.size()) - 1;
  if (n < 1) throw DataError(path.string() + ": no samples");

  ViewBatch view;
  view.view_index = view_index;
  view.data.resize(d, n);
  view.ids.reserve(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    const std::size_t lineno = static_cast<std::size_t>(j) + 2;
    const auto fields = split(lines[static_cast<std::size_t>(j) + 1]);
    if (static_cast<Index>(fields.size()) != d + 1) {
      throw DataError(where(path, lineno) + ": expected " + std::to_string(d + 1) + " fields, got " +
                      std::to_string(fields.size()));
    }
    view.ids.emplace_back(fields[0]);
    for (Index i = 0; i < d; ++i) view.data(i, j) = parse_number<double>(fields[i + 1], path, lineno);
  }
  try {
    view.validate();
  } catch (const ValidationError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return view;
}

void write_view(const fs::path& path, const ViewBatch& view) {
  std::string out = "id";
  for (Index i = 0; i < view.data.rows(); ++i) out += ",f" + std::to_string(i);
  out += '\n';
  for (Index j = 0; j < view.data.cols(); ++j) {
    out += view.ids[static_cast<std::size_t>(j)];
    for (Index i = 0; i < view.data.rows(); ++i) {
      out += ',';
      out += format_double(view.data(i, j));
    }
    out += '\n';
  }
  write_text(path, out);
}

LabeledSamples read_labels(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw DataError(path.string() + ": empty labels file");
  const auto header = split(lines[0]);
  if (header.size() != 2 || header[0] != "id" || header[1] != "label") {
    throw DataError(path.string() + ": header must be 'id,label'");
  }
  LabeledSamples out;
  std::unordered_map<long long, int> remap;
  std::unordered_map<std::string, std::size_t> seen;
  for (std::size_t l = 1; l < lines.size(); ++l) {
    const auto fields = split(lines[l]);
    if (fields.size() != 2 || fields[0].empty()) throw DataError(where(path, l + 1) + ": expected 'id,label'");
    std::string id(fields[0]);
    if (!seen.emplace(id, l).second) throw DataError(where(path, l + 1) + ": duplicate id '" + id + "'");
    const auto raw = parse_number<long long>(fields[1], path, l + 1);
    auto [it, inserted] = remap.try_emplace(raw, static_cast<int>(remap.size()));
    out.ids.push_back(std::move(id));
    out.truth.labels.push_back(it->second);
  }
  if (out.ids.empty()) throw DataError(path.string() + ": no labels");
  out.truth.k = static_cast<int>(remap.size());
  return out;
}

void write_labels(const fs::path& path, const std::vector<SampleId>& ids, const Partition& labels) {
  if (ids.size() != labels.size()) throw ValidationError("write_labels: id/label count mismatch");
  std::string out = "id,label\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out += ids[i] + "," + std::to_string(labels.labels[i]) + "\n";
  write_text(path, out);
}

json to_json(const MetricReport& r) {
  return {{"acc", r.acc}, {"nmi", r.nmi}, {"purity", r.purity}, {"fscore", r.fscore}};
}

json to_json(const SolveDiagnostics& d) {
  return {{"objective_trace", d.objective_trace},
          {"iters", d.iters},
          {"converged", d.converged},
          {"lower_bound", d.lower_bound},
          {"max_z_error", d.max_z_error},
          {"max_w_error", d.max_w_error},
          {"max_h_error", d.max_h_error}};
}

json to_json(const MissingPattern& p) {
  json views = json::array();
  for (std::size_t t = 0; t < p.retained.size(); ++t) {
    views.push_back({{"view", t + 1}, {"retained", p.retained[t].size()}, {"dropped", p.dropped[t]}});
  }
  return {{"ratio", p.ratio}, {"seed", p.seed}, {"views", views}};
}

json checkpoint_to_json(const ConsensusState& state) {
  std::vector<double> z;
  z.reserve(static_cast<std::size_t>(state.z.size()));
  for (Index i = 0; i < state.z.rows(); ++i)
    for (Index j = 0; j < state.z.cols(); ++j) z.push_back(state.z(i, j));
  return {{"format", "streammvc-checkpoint"},
          {"format_version", kCheckpointVersion},
          {"k", state.k},
          {"views_seen", state.views_seen},
          {"ids", state.registry.ids()},
          {"z", z},
          {"last_diagnostics", to_json(state.last_diag)}};
}

ConsensusState checkpoint_from_json(const json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", std::string{}) != "streammvc-checkpoint") {
      throw DataError("checkpoint: not a streammvc checkpoint");
    }
    const int version = doc.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      throw DataError("checkpoint: unsupported format_version " + std::to_string(version));
    }
    ConsensusState state;
    state.k = doc.at("k").get<int>();
    state.views_seen = doc.at("views_seen").get<std::size_t>();
    state.registry = SampleRegistry(doc.at("ids").get<std::vector<SampleId>>());
    const auto z = doc.at("z").get<std::vector<double>>();
    const auto n = static_cast<Index>(state.registry.size());
    if (state.k < 1 || static_cast<Index>(z.size()) != state.k * n) {
      throw DataError("checkpoint: z has " + std::to_string(z.size()) + " entries, expected k*n");
    }
    state.z.resize(state.k, n);
    for (Index i = 0; i < state.k; ++i)
      for (Index j = 0; j < n; ++j) state.z(i, j) = z[static_cast<std::size_t>(i * n + j)];

    const json& diag = doc.at("last_diagnostics");
    state.last_diag.objective_trace = diag.at("objective_trace").get<std::vector<double>>();
    state.last_diag.iters = diag.at("iters").get<int>();
    state.last_diag.converged = diag.at("converged").get<bool>();
    state.last_diag.lower_bound = diag.at("lower_bound").get<double>();
    state.last_diag.max_z_error = diag.value("max_z_error", 0.0);
    state.last_diag.max_w_error = diag.value("max_w_error", 0.0);
    state.last_diag.max_h_error = diag.value("max_h_error", 0.0);
    state.validate();
    return state;
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  } catch (const ValidationError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const fs::path& path, const ConsensusState& state) {
  write_text(path, checkpoint_to_json(state).dump() + "\n");
}

ConsensusState load_checkpoint(const fs::path& path) {
  const std::string text = read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": corrupt checkpoint (" + e.what() + ")");
  }
  return checkpoint_from_json(doc);
}

}  // namespace smvc::io
