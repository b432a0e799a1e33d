#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace veyes {

struct ScoreRow {
  std::string patient_id;
  std::string series_uid;
  int slice_index = 0;
  double score = 0.0;
  int label = 0;  // 0 or 1
};

/// Per-slice model scores; one label per patient, unique
/// (patient, series, slice) keys. Both checked at load.
struct ScoreTable {
  std::vector<ScoreRow> rows;
};

enum class PoolMethod { mean, max, topk };

const char* to_string(PoolMethod method);
PoolMethod pool_method_from_string(const std::string& name);

struct PatientScore {
  std::string patient_id;
  double score = 0.0;
  int label = 0;
  PoolMethod method = PoolMethod::mean;
  std::optional<int> k;
};

/// CSV with header "patient_id,series_uid,slice_index,score,label".
ScoreTable load_scores_csv(const std::filesystem::path& path);

/// mean / max / mean of the k largest (all values when fewer than k).
double pool_patient(const std::vector<double>& scores, PoolMethod method,
                    std::optional<int> k = std::nullopt);

/// Pools every patient's slices (across series), sorted by patient_id.
std::vector<PatientScore> pool_table(const ScoreTable& table, PoolMethod method,
                                     std::optional<int> k = std::nullopt);

/// Median across patients of the per-patient sample standard deviation
/// (n-1 divisor, 0 for singleton patients) of slice scores.
double within_patient_dispersion(const ScoreTable& table);

/// CSV with header "patient_id,score,label,method,k".
void write_pooled_csv(const std::vector<PatientScore>& scores,
                      const std::filesystem::path& path);

std::vector<PatientScore> read_pooled_csv(const std::filesystem::path& path);

}  // namespace veyes
