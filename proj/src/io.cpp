#include "pcmeta/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pcmeta/errors.hpp"

namespace pcmeta::io {

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string where(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

CsvTable parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_was_quoted = false;
  bool any = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(field_was_quoted ? field : trim(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
    any = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"') {
      if (!trim(field).empty()) throw InputError(where(line) + "quote inside an unquoted field");
      field.clear();
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      end_record();
      ++line;
      continue;
    } else if (field_was_quoted && c != ' ' && c != '\t' && c != '\r') {
      throw InputError(where(line) + "text after a closing quote");
    } else if (!field_was_quoted) {
      field += c;
    }
    any = true;
  }
  if (quoted) throw InputError(where(line) + "unterminated quoted field");
  if (any || !field.empty() || !record.empty()) end_record();
  if (records.empty()) throw InputError("empty CSV input");

  CsvTable t;
  t.header = std::move(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != t.header.size()) {
      throw InputError("CSV record " + std::to_string(i + 1) + " has " + std::to_string(records[i].size()) +
                       " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(records[i]));
  }
  return t;
}

std::string csv_field(std::string_view raw) {
  if (raw.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(raw);
  std::string out = "\"";
  for (char c : raw) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

double parse_double(const std::string& s, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || (errno == ERANGE && v != 0.0)) {
    throw InputError(what + ": not a number: '" + s + "'");
  }
  return v;
}

std::int64_t parse_count(const std::string& s, const std::string& what) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    throw InputError(what + ": not a nonnegative integer: '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<StudyRecord> parse_studies(std::string_view csv_text) {
  const CsvTable t = parse_csv(csv_text);
  static const std::vector<std::string> known{"study_id", "group_factor", "p",        "events_a", "total_a",
                                              "events_b", "total_b",      "n_sample", "sigma"};
  for (const auto& h : t.header) {
    if (std::find(known.begin(), known.end(), h) == known.end()) throw InputError("unknown CSV column '" + h + "'");
  }
  const auto id = t.column("study_id");
  if (!id) throw InputError("CSV must have a study_id column");
  if (t.rows.empty()) throw InputError("CSV has no data rows");
  const auto group = t.column("group_factor");
  const auto pcol = t.column("p");
  const std::optional<std::size_t> cols[4] = {t.column("events_a"), t.column("total_a"), t.column("events_b"),
                                              t.column("total_b")};
  const auto n_sample = t.column("n_sample");
  const auto sigma = t.column("sigma");

  std::vector<StudyRecord> out;
  std::optional<bool> uses_p;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string ctx = "row " + std::to_string(i + 1);
    StudyRecord rec;
    rec.study_id = row[*id];
    if (rec.study_id.empty()) throw InputError(ctx + ": empty study_id");
    if (group && !row[*group].empty()) rec.group_factor = row[*group];

    const bool has_p = pcol && !row[*pcol].empty();
    int count_fields = 0;
    for (const auto& c : cols) count_fields += (c && !row[*c].empty()) ? 1 : 0;
    if (count_fields != 0 && count_fields != 4) throw InputError(ctx + ": counts need all four of events/total a/b");
    const bool has_counts = count_fields == 4;
    if (has_p == has_counts) throw InputError(ctx + ": exactly one of p or counts must be given");
    if (uses_p && *uses_p != has_p) throw InputError(ctx + ": mixed p-value and count rows");
    uses_p = has_p;

    if (has_p) {
      const double p = parse_double(row[*pcol], ctx + " p");
      if (!(p >= 0.0 && p <= 1.0)) throw DomainError(ctx + ": p must lie in [0, 1]");
      rec.p = p;
    } else {
      CountTable2x2 ct{parse_count(row[*cols[0]], ctx + " events_a"), parse_count(row[*cols[1]], ctx + " total_a"),
                       parse_count(row[*cols[2]], ctx + " events_b"), parse_count(row[*cols[3]], ctx + " total_b")};
      ct.validate();
      rec.counts = ct;
    }
    if (n_sample && !row[*n_sample].empty()) {
      const double v = parse_double(row[*n_sample], ctx + " n_sample");
      if (!(v > 0.0) || v != std::floor(v)) throw InputError(ctx + ": n_sample must be a positive integer");
      rec.n_sample = v;
    }
    if (sigma && !row[*sigma].empty()) {
      rec.sigma = parse_double(row[*sigma], ctx + " sigma");
      if (!(rec.sigma > 0.0) || !std::isfinite(rec.sigma)) throw InputError(ctx + ": sigma must be positive");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw InputError("write failed: " + path.string());
}

std::vector<ProbValue> study_pvalues(const std::vector<StudyRecord>& records) {
  std::vector<ProbValue> p;
  p.reserve(records.size());
  for (const auto& r : records) {
    p.push_back(r.p ? ProbValue::from_linear(*r.p) : fisher_exact_2x2(*r.counts).p_two_sided);
  }
  return p;
}

GroupPartition study_groups(const std::vector<StudyRecord>& records) {
  std::vector<std::string> labels;
  for (const auto& r : records) {
    if (!r.group_factor) throw InputError("study '" + r.study_id + "' has no group_factor label");
    labels.push_back(*r.group_factor);
  }
  return GroupPartition::from_labels(labels);
}

std::string sig6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string exact(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string pc_curve_json(const PcCurve& curve) {
  nlohmann::ordered_json doc;
  doc["method"] = curve.method;
  doc["n"] = curve.n;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& e : curve.entries) {
    nlohmann::ordered_json row;
    row["r"] = e.r;
    row["p"] = e.p.linear();
    // JSON has no infinities; p = 0 carries log_p = null.
    row["log_p"] = std::isfinite(e.p.log()) ? nlohmann::ordered_json(e.p.log()) : nlohmann::ordered_json(nullptr);
    entries.push_back(row);
  }
  doc["entries"] = entries;
  doc["alpha"] = curve.alpha;
  doc["confidence_set"] = curve.confidence_set;
  doc["r_hat"] = curve.r_hat;
  doc["warnings"] = curve.warnings;
  return doc.dump(2) + "\n";
}

std::string pc_curve_csv(const PcCurve& curve) {
  std::string out = "r,p,log_p,rejected\n";
  std::size_t k = 0;
  for (const auto& e : curve.entries) {
    while (k < curve.confidence_set.size() && curve.confidence_set[k] < e.r) ++k;
    const bool rejected = k < curve.confidence_set.size() && curve.confidence_set[k] == e.r;
    out += std::to_string(e.r) + "," + exact(e.p.linear()) + "," + exact(e.p.log()) + "," + (rejected ? "1" : "0") +
           "\n";
  }
  return out;
}

std::string pc_curve_table(const PcCurve& curve) {
  std::ostringstream os;
  os << "method: " << curve.method << "   n = " << curve.n << "   alpha = " << sig6(curve.alpha) << "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "%4s  %-14s %-14s %s\n", "r", "p", "log p", "reject");
  os << buf;
  for (const auto& e : curve.entries) {
    const bool rejected = std::find(curve.confidence_set.begin(), curve.confidence_set.end(), e.r) !=
                          curve.confidence_set.end();
    std::snprintf(buf, sizeof buf, "%4zu  %-14s %-14s %s\n", e.r, sig6(e.p.linear()).c_str(),
                  sig6(e.p.log()).c_str(), rejected ? "*" : "");
    os << buf;
  }
  os << "rejected r (p <= alpha): {";
  for (std::size_t i = 0; i < curve.confidence_set.size(); ++i) os << (i ? "," : "") << curve.confidence_set[i];
  os << "}\n" << curve.interpretation() << "\n";
  for (const auto& w : curve.warnings) os << "warning: " << w << "\n";
  return os.str();
}

std::string power_grid_csv(const PowerGrid& grid) {
  std::string out = "mu0,sigma0,method,r0,power,se\n";
  for (const auto& e : grid.entries) {
    out += exact(e.mu0) + "," + exact(e.sigma0) + "," + std::string(to_string(e.method)) + "," +
           std::to_string(e.r0) + "," + exact(e.power) + "," + exact(e.se) + "\n";
  }
  return out;
}

std::string power_cells_csv(const std::vector<PowerCell>& cells) {
  std::string out = "mu1,mu2,test,power,se\n";
  for (const auto& c : cells) {
    out += exact(c.mu1) + "," + exact(c.mu2) + "," + std::string(to_string(c.test)) + "," + exact(c.power) + "," +
           exact(c.se) + "\n";
  }
  return out;
}

}  // namespace pcmeta::io
