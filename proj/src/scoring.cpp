#include "veyes/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "veyes/csv.hpp"
#include "veyes/error.hpp"
#include "veyes/util.hpp"

namespace veyes {

namespace {

constexpr const char* kScoresHeader = "patient_id,series_uid,slice_index,score,label";
constexpr const char* kPooledHeader = "patient_id,score,label,method,k";

double parse_double(const std::string& s, const char* what) {
  char* end = nullptr;
  std::string t = trim(s);
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw Error(errc::schema_error, std::string("bad ") + what + ": '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const char* what) {
  char* end = nullptr;
  std::string t = trim(s);
  long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size())
    throw Error(errc::schema_error, std::string("bad ") + what + ": '" + s + "'");
  return static_cast<int>(v);
}

}  // namespace

const char* to_string(PoolMethod method) {
  switch (method) {
    case PoolMethod::mean: return "mean";
    case PoolMethod::max: return "max";
    case PoolMethod::topk: return "topk";
  }
  return "";
}

PoolMethod pool_method_from_string(const std::string& name) {
  if (name == "mean") return PoolMethod::mean;
  if (name == "max") return PoolMethod::max;
  if (name == "topk") return PoolMethod::topk;
  throw Error(errc::schema_error, "unknown pooling method: " + name);
}

ScoreTable load_scores_csv(const std::filesystem::path& path) {
  auto rows = csv::parse(csv::read_file(path));
  if (rows.empty() || csv::join_row(rows[0]) != kScoresHeader)
    throw Error(errc::schema_error, "bad scores header in " + path.string());

  ScoreTable table;
  std::map<std::string, int> label_by_patient;
  std::set<std::tuple<std::string, std::string, int>> seen;

  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 5)
      throw Error(errc::schema_error,
                  "row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) + " fields");
    ScoreRow r;
    r.patient_id = row[0];
    r.series_uid = row[1];
    r.slice_index = parse_int(row[2], "slice_index");
    if (r.slice_index < 0) throw Error(errc::schema_error, "negative slice_index");
    r.score = parse_double(row[3], "score");
    if (!(r.score >= 0.0 && r.score <= 1.0))
      throw Error(errc::range_error, "score " + row[3] + " outside [0,1]");
    r.label = parse_int(row[4], "label");
    if (r.label != 0 && r.label != 1)
      throw Error(errc::schema_error, "label must be 0 or 1, got " + row[4]);

    auto [it, inserted] = label_by_patient.try_emplace(r.patient_id, r.label);
    if (!inserted && it->second != r.label)
      throw Error(errc::label_conflict, "patient " + r.patient_id + " has mixed labels");
    if (!seen.insert({r.patient_id, r.series_uid, r.slice_index}).second)
      throw Error(errc::schema_error,
                  "duplicate (patient, series, slice): " + r.patient_id + "," + r.series_uid +
                      "," + std::to_string(r.slice_index));
    table.rows.push_back(std::move(r));
  }
  return table;
}

double pool_patient(const std::vector<double>& scores, PoolMethod method,
                    std::optional<int> k) {
  if (scores.empty()) throw Error(errc::empty_input, "no scores to pool");
  switch (method) {
    case PoolMethod::max:
      return *std::max_element(scores.begin(), scores.end());
    case PoolMethod::mean: {
      double sum = 0.0;
      for (double s : scores) sum += s;
      return sum / static_cast<double>(scores.size());
    }
    case PoolMethod::topk: {
      if (!k || *k < 1) throw Error(errc::schema_error, "topk pooling requires k >= 1");
      std::vector<double> sorted = scores;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      std::size_t take = std::min<std::size_t>(*k, sorted.size());
      double sum = 0.0;
      for (std::size_t i = 0; i < take; ++i) sum += sorted[i];
      return sum / static_cast<double>(take);
    }
  }
  throw Error(errc::schema_error, "unknown pooling method");
}

std::vector<PatientScore> pool_table(const ScoreTable& table, PoolMethod method,
                                     std::optional<int> k) {
  std::map<std::string, std::pair<std::vector<double>, int>> by_patient;
  for (const auto& row : table.rows) {
    auto& entry = by_patient[row.patient_id];
    entry.first.push_back(row.score);
    entry.second = row.label;
  }
  std::vector<PatientScore> out;
  out.reserve(by_patient.size());
  for (const auto& [pid, entry] : by_patient) {
    PatientScore ps;
    ps.patient_id = pid;
    ps.score = pool_patient(entry.first, method, k);
    ps.label = entry.second;
    ps.method = method;
    if (method == PoolMethod::topk) ps.k = k;
    out.push_back(std::move(ps));
  }
  return out;
}

double within_patient_dispersion(const ScoreTable& table) {
  if (table.rows.empty()) throw Error(errc::empty_input, "empty score table");
  std::map<std::string, std::vector<double>> by_patient;
  for (const auto& row : table.rows) by_patient[row.patient_id].push_back(row.score);

  std::vector<double> stds;
  stds.reserve(by_patient.size());
  for (const auto& [pid, scores] : by_patient) {
    std::size_t n = scores.size();
    if (n == 1) {
      stds.push_back(0.0);
      continue;
    }
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double s : scores) ss += (s - mean) * (s - mean);
    stds.push_back(std::sqrt(ss / static_cast<double>(n - 1)));
  }

  std::sort(stds.begin(), stds.end());
  std::size_t n = stds.size();
  if (n % 2 == 1) return stds[n / 2];
  return (stds[n / 2 - 1] + stds[n / 2]) / 2.0;
}

void write_pooled_csv(const std::vector<PatientScore>& scores,
                      const std::filesystem::path& path) {
  std::vector<PatientScore> sorted = scores;
  std::sort(sorted.begin(), sorted.end(),
            [](const PatientScore& a, const PatientScore& b) {
              return a.patient_id < b.patient_id;
            });
  std::string text = std::string(kPooledHeader) + "\n";
  for (const auto& s : sorted) {
    text += csv::join_row({s.patient_id, format_double(s.score), std::to_string(s.label),
                           to_string(s.method), s.k ? std::to_string(*s.k) : ""});
    text += '\n';
  }
  csv::write_file(path, text);
}

std::vector<PatientScore> read_pooled_csv(const std::filesystem::path& path) {
  auto rows = csv::parse(csv::read_file(path));
  if (rows.empty() || csv::join_row(rows[0]) != kPooledHeader)
    throw Error(errc::schema_error, "bad pooled header in " + path.string());

  std::vector<PatientScore> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 5)
      throw Error(errc::schema_error, "pooled row has " + std::to_string(row.size()) + " fields");
    PatientScore ps;
    ps.patient_id = row[0];
    ps.score = parse_double(row[1], "score");
    ps.label = parse_int(row[2], "label");
    if (ps.label != 0 && ps.label != 1)
      throw Error(errc::schema_error, "label must be 0 or 1");
    ps.method = pool_method_from_string(row[3]);
    if (!row[4].empty()) ps.k = parse_int(row[4], "k");
    out.push_back(std::move(ps));
  }
  return out;
}

}  // namespace veyes
