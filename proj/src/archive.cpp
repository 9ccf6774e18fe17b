#include "yamabe/archive.hpp"

#include "yamabe/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace yamabe {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_num(const json& j, const char* key) {
  const json& v = j.at(key);
  return v.is_null() ? kNaN : v.get<double>();
}

json energy_json(const EnergyBreakdown& e) {
  return {{"quadratic", num(e.quadratic)}, {"potential", num(e.potential)},
          {"total", num(e.total)}, {"nehari_residual", num(e.nehari_residual)},
          {"grad_norm", num(e.grad_norm)}};
}

EnergyBreakdown energy_from(const json& j) {
  EnergyBreakdown e;
  e.quadratic = get_num(j, "quadratic");
  e.potential = get_num(j, "potential");
  e.total = get_num(j, "total");
  e.nehari_residual = get_num(j, "nehari_residual");
  e.grad_norm = get_num(j, "grad_norm");
  return e;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CorruptArchive("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + p.string());
}

std::string fmt(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(RecordKind k) { return k == RecordKind::positive ? "positive" : "nodal"; }

json to_json(const SolutionRecord& r) {
  json j = {
      {"id", r.id},
      {"eps", r.eps},
      {"kind", to_string(r.kind)},
      {"seed",
       {{"strategy", r.seed_strategy}, {"index", r.seed_index}, {"x", r.seed_x},
        {"y", r.seed_y}, {"admissible", r.seed_admissible}}},
      {"outcome", r.outcome},
      {"error", r.error},
      {"converged", r.converged},
      {"steps", r.steps},
      {"energy", energy_json(r.energy)},
      {"gap_plus", num(r.gap_plus)},
      {"gap_minus", num(r.gap_minus)},
      {"region", to_string(r.region)},
      {"sign_changing", r.sign_changing},
      {"part_residual_plus", num(r.part_residual_plus)},
      {"part_residual_minus", num(r.part_residual_minus)},
      {"pde_residual", num(r.pde_residual)},
      {"pde_residual_l2", num(r.pde_residual_l2)},
      {"pde_ok", r.pde_ok},
      {"captured_plus", num(r.captured_plus)},
      {"captured_minus", num(r.captured_minus)},
      {"cm_error", r.cm_error},
      {"nodal_set_hits", r.nodal_set_hits},
      {"nodal_set_violations", r.nodal_set_violations},
      {"max_gap_plus", num(r.max_gap_plus)},
      {"cluster_id", r.cluster_id},
      {"snapshot", r.snapshot},
  };
  if (r.cm)
    j["cm"] = {{"c_plus", r.cm->c_plus}, {"c_minus", r.cm->c_minus},
               {"separation", r.cm->separation}, {"radius", r.cm->radius}};
  else
    j["cm"] = nullptr;
  return j;
}

SolutionRecord record_from_json(const json& j) {
  try {
    SolutionRecord r;
    r.id = j.at("id").get<int>();
    r.eps = j.at("eps").get<double>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind != "positive" && kind != "nodal") throw CorruptArchive("unknown record kind " + kind);
    r.kind = kind == "positive" ? RecordKind::positive : RecordKind::nodal;
    const json& s = j.at("seed");
    r.seed_strategy = s.at("strategy").get<std::string>();
    r.seed_index = s.at("index").get<int>();
    r.seed_x = s.at("x").get<std::vector<double>>();
    r.seed_y = s.at("y").get<std::vector<double>>();
    r.seed_admissible = s.at("admissible").get<bool>();
    r.outcome = j.at("outcome").get<std::string>();
    r.error = j.at("error").get<std::string>();
    r.converged = j.at("converged").get<bool>();
    r.steps = j.at("steps").get<int>();
    r.energy = energy_from(j.at("energy"));
    r.gap_plus = get_num(j, "gap_plus");
    r.gap_minus = get_num(j, "gap_minus");
    r.region = region_from_string(j.at("region").get<std::string>());
    r.sign_changing = j.at("sign_changing").get<bool>();
    r.part_residual_plus = get_num(j, "part_residual_plus");
    r.part_residual_minus = get_num(j, "part_residual_minus");
    r.pde_residual = get_num(j, "pde_residual");
    r.pde_residual_l2 = get_num(j, "pde_residual_l2");
    r.pde_ok = j.at("pde_ok").get<bool>();
    r.captured_plus = get_num(j, "captured_plus");
    r.captured_minus = get_num(j, "captured_minus");
    r.cm_error = j.at("cm_error").get<std::string>();
    r.nodal_set_hits = j.at("nodal_set_hits").get<int>();
    r.nodal_set_violations = j.at("nodal_set_violations").get<int>();
    r.max_gap_plus = get_num(j, "max_gap_plus");
    r.cluster_id = j.at("cluster_id").get<int>();
    r.snapshot = j.at("snapshot").get<std::string>();
    const json& cm = j.at("cm");
    if (!cm.is_null()) {
      CenterPairRecord c;
      c.c_plus = cm.at("c_plus").get<std::vector<double>>();
      c.c_minus = cm.at("c_minus").get<std::vector<double>>();
      c.separation = cm.at("separation").get<double>();
      c.radius = cm.at("radius").get<double>();
      r.cm = c;
    }
    return r;
  } catch (const json::exception& e) {
    throw CorruptArchive(std::string("malformed record: ") + e.what());
  } catch (const ConfigError& e) {
    throw CorruptArchive(std::string("malformed record: ") + e.what());
  }
}

std::vector<SummaryRow> summarize(const SolutionArchive& a) {
  std::vector<double> eps_list;
  for (const auto& r : a.records)
    if (std::find(eps_list.begin(), eps_list.end(), r.eps) == eps_list.end())
      eps_list.push_back(r.eps);
  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
  eps_list.erase(std::unique(eps_list.begin(), eps_list.end()), eps_list.end());

  const double mE = a.ground.contains("mE") ? a.ground["mE"].get<double>() : kNaN;
  const bool clustered = a.kind == "multiplicity";
  std::vector<SummaryRow> rows;
  for (double e : eps_list) {
    SummaryRow row;
    row.eps = e;
    row.mE = mE;
    row.alpha = kNaN;
    for (const auto& [ae, av] : a.alpha)
      if (ae == e) row.alpha = av;
    row.m_hat = kNaN;
    row.d_hat = kNaN;
    std::set<int> clusters;
    for (const auto& r : a.records) {
      if (r.eps != e) continue;
      ++row.records;
      if (!r.converged) continue;
      if (r.kind == RecordKind::positive && !r.sign_changing) {
        if (!(row.m_hat <= r.energy.total)) row.m_hat = r.energy.total;
      } else if (r.kind == RecordKind::nodal && r.sign_changing) {
        ++row.converged_nodal;
        if (!(row.d_hat <= r.energy.total)) row.d_hat = r.energy.total;
        if (r.cluster_id >= 0) clusters.insert(r.cluster_id);
      }
    }
    row.m_ratio = row.m_hat / mE;
    row.d_ratio = row.d_hat / (2.0 * mE);
    const double slack = a.config.contains("tolerances")
                             ? a.config["tolerances"]["inequality_slack"].get<double>()
                             : 1e-6;
    row.inequality = row.d_hat >= 2.0 * row.m_hat - slack;
    row.clusters = clustered ? static_cast<int>(clusters.size()) : -1;
    rows.push_back(row);
  }
  return rows;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "eps,alpha,m_hat,d_hat,mE,m_ratio,d_ratio,inequality,records,converged_nodal,clusters\n";
  for (const auto& r : rows)
    os << fmt(r.eps) << ',' << fmt(r.alpha) << ',' << fmt(r.m_hat) << ',' << fmt(r.d_hat) << ','
       << fmt(r.mE) << ',' << fmt(r.m_ratio) << ',' << fmt(r.d_ratio) << ','
       << (r.inequality ? "true" : "false") << ',' << r.records << ',' << r.converged_nodal
       << ',' << (r.clusters >= 0 ? std::to_string(r.clusters) : std::string()) << '\n';
  return os.str();
}

void save_archive(const SolutionArchive& a, const std::string& dir) {
  fs::create_directories(dir);
  json alpha = json::array();
  for (const auto& [e, v] : a.alpha) alpha.push_back({{"eps", e}, {"alpha", num(v)}});
  json meta = {{"schema_version", a.schema_version}, {"kind", a.kind}, {"config", a.config},
               {"ground", a.ground}, {"alpha", alpha}, {"record_count", a.records.size()}};
  write_text(fs::path(dir) / "archive.json", meta.dump(2) + "\n");
  std::string lines;
  for (const auto& r : a.records) lines += to_json(r).dump() + "\n";
  write_text(fs::path(dir) / "records.jsonl", lines);
  write_text(fs::path(dir) / "summary.csv", summary_csv(summarize(a)));
}

SolutionArchive load_archive(const std::string& dir) {
  const fs::path root(dir);
  json meta;
  try {
    meta = json::parse(read_text(root / "archive.json"));
  } catch (const json::exception& e) {
    throw CorruptArchive(std::string("archive.json: ") + e.what());
  }
  SolutionArchive a;
  try {
    a.schema_version = meta.at("schema_version").get<int>();
  } catch (const json::exception& e) {
    throw CorruptArchive(std::string("archive.json: ") + e.what());
  }
  if (a.schema_version != kSchemaVersion)
    throw VersionMismatch("archive schema_version " + std::to_string(a.schema_version) +
                          ", expected " + std::to_string(kSchemaVersion));
  std::size_t expected = 0;
  try {
    a.kind = meta.at("kind").get<std::string>();
    a.config = meta.at("config");
    a.ground = meta.at("ground");
    for (const auto& e : meta.at("alpha"))
      a.alpha.emplace_back(e.at("eps").get<double>(), get_num(e, "alpha"));
    expected = meta.at("record_count").get<std::size_t>();
  } catch (const json::exception& e) {
    throw CorruptArchive(std::string("archive.json: ") + e.what());
  }

  std::istringstream lines(read_text(root / "records.jsonl"));
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw CorruptArchive(std::string("records.jsonl: ") + e.what());
    }
    a.records.push_back(record_from_json(j));
  }
  if (a.records.size() != expected)
    throw CorruptArchive("records.jsonl holds " + std::to_string(a.records.size()) +
                         " records, archive.json expects " + std::to_string(expected));
  for (const auto& r : a.records)
    if (!r.snapshot.empty() && !fs::exists(root / r.snapshot))
      throw CorruptArchive("missing snapshot " + r.snapshot);
  return a;
}

void write_snapshot(const std::string& path, const Eigen::VectorXd& values,
                    const SnapshotMeta& meta) {
  fs::create_directories(fs::path(path).parent_path());
  std::string bytes(static_cast<std::size_t>(values.size()) * 8, '\0');
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b)
      bytes[static_cast<std::size_t>(i) * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  write_text(path, bytes);
  json side = {{"shape", meta.shape}, {"lengths", meta.lengths}, {"eps", meta.eps},
               {"schema_version", meta.schema_version}, {"dtype", "<f8"},
               {"order", "axis 0 fastest"}};
  write_text(path + ".json", side.dump(2) + "\n");
}

Eigen::VectorXd read_snapshot(const std::string& path, SnapshotMeta* meta) {
  json side;
  try {
    side = json::parse(read_text(path + ".json"));
  } catch (const json::exception& e) {
    throw CorruptArchive(path + ".json: " + e.what());
  }
  SnapshotMeta m;
  try {
    m.shape = side.at("shape").get<std::vector<long>>();
    m.lengths = side.at("lengths").get<std::vector<double>>();
    m.eps = side.at("eps").get<double>();
    m.schema_version = side.at("schema_version").get<int>();
  } catch (const json::exception& e) {
    throw CorruptArchive(path + ".json: " + e.what());
  }
  if (m.schema_version != kSchemaVersion)
    throw VersionMismatch("snapshot schema_version " + std::to_string(m.schema_version));
  long count = 1;
  for (long s : m.shape) count *= s;
  const std::string bytes = read_text(path);
  if (bytes.size() != static_cast<std::size_t>(count) * 8)
    throw CorruptArchive("snapshot " + path + " has " + std::to_string(bytes.size()) +
                         " bytes, expected " + std::to_string(count * 8));
  Eigen::VectorXd v(count);
  for (long i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + b])) << (8 * b);
    v[i] = std::bit_cast<double>(bits);
  }
  if (meta) *meta = m;
  return v;
}

}  // namespace yamabe
