#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "veyes/config.hpp"
#include "veyes/csv.hpp"
#include "veyes/error.hpp"
#include "veyes/eval_stats.hpp"
#include "veyes/pipeline.hpp"
#include "veyes/qc_report.hpp"
#include "veyes/scoring.hpp"
#include "veyes/util.hpp"
#include "veyes/volume_export.hpp"

namespace {

using veyes::Error;
using veyes::errc;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFatal = 2;

veyes::PipelineConfig resolve_config(const std::string& config_path) {
  if (!config_path.empty()) return veyes::load_config_file(config_path);
  if (const char* env = std::getenv("VIRTUAL_EYES_CONFIG"); env && *env)
    return veyes::load_config_file(env);
  return veyes::PipelineConfig{};
}

int cmd_qc(const std::string& input, const std::string& output,
           const std::string& config_path, int workers_flag, bool overwrite_flag) {
  veyes::PipelineConfig cfg = resolve_config(config_path);
  if (workers_flag > 0) cfg.workers = workers_flag;
  if (overwrite_flag) cfg.overwrite = true;

  veyes::PipelineResult result = veyes::run_qc_pipeline(input, output, cfg);
  std::cout << "files_examined=" << result.files_examined << "\n"
            << "files_skipped=" << result.skipped_files << "\n"
            << veyes::format_summary(result.summary);

  if (result.summary.total_series == 0 || result.summary.accepted_series > 0)
    return kExitOk;
  std::cerr << "no series accepted\n";
  return kExitUsage;
}

int cmd_report(const std::string& output) {
  auto records = veyes::read_qc_csv(std::filesystem::path(output) / "qc_report.csv");
  std::cout << veyes::format_summary(veyes::summarize(records));
  return kExitOk;
}

int cmd_pool(const std::string& scores_path, const std::string& method_name,
             int k, const std::string& out_path) {
  veyes::PoolMethod method = veyes::pool_method_from_string(method_name);
  std::optional<int> kopt;
  if (method == veyes::PoolMethod::topk) kopt = k;

  veyes::ScoreTable table = veyes::load_scores_csv(scores_path);
  auto pooled = veyes::pool_table(table, method, kopt);
  veyes::write_pooled_csv(pooled, out_path);
  std::cout << "patients=" << pooled.size() << "\n";
  if (!table.rows.empty())
    std::cout << "within_patient_dispersion="
              << veyes::format_double(veyes::within_patient_dispersion(table)) << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& pooled_a, const std::string& pooled_b,
             const std::string& out_dir) {
  auto a = veyes::read_pooled_csv(pooled_a);
  auto b = veyes::read_pooled_csv(pooled_b);

  std::map<std::string, veyes::PatientScore> by_id;
  for (const auto& ps : a) by_id[ps.patient_id] = ps;
  if (by_id.size() != a.size())
    throw Error(errc::schema_error, "duplicate patient in " + pooled_a);

  std::vector<double> scores_a, scores_b;
  std::vector<int> labels;
  std::set<std::string> seen_b;
  for (const auto& ps : b) {
    if (!seen_b.insert(ps.patient_id).second)
      throw Error(errc::schema_error, "duplicate patient in " + pooled_b);
    auto it = by_id.find(ps.patient_id);
    if (it == by_id.end())
      throw Error(errc::length_mismatch, "patient " + ps.patient_id + " only in " + pooled_b);
    if (it->second.label != ps.label)
      throw Error(errc::label_conflict, "labels disagree for patient " + ps.patient_id);
    scores_a.push_back(it->second.score);
    scores_b.push_back(ps.score);
    labels.push_back(ps.label);
  }
  if (b.size() != a.size())
    throw Error(errc::length_mismatch, "patient sets differ between pooled files");

  std::filesystem::path out(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw Error(errc::io_error, "cannot create " + out.string());

  std::vector<std::vector<std::string>> metrics;
  auto add = [&](const std::string& name, const std::string& value,
                 const std::string& detail = "") {
    metrics.push_back({name, value, detail});
  };
  auto fd = [](double v) { return veyes::format_double(v); };

  veyes::RocCurve roc_a = veyes::roc_curve(scores_a, labels);
  veyes::RocCurve roc_b = veyes::roc_curve(scores_b, labels);
  add("auc_a", fd(roc_a.auc));
  add("auc_b", fd(roc_b.auc));

  try {
    veyes::DeLongResult dl = veyes::delong_test(scores_a, scores_b, labels);
    add("delong_delta", fd(dl.delta));
    add("delong_variance", fd(dl.variance));
    add("delong_z", fd(dl.z));
    add("delong_p", fd(dl.p_two_sided));
  } catch (const Error& e) {
    if (e.code() != errc::degenerate_variance) throw;
    add("delong_delta", fd(0.0), "DEGENERATE_VARIANCE");
    add("delong_variance", "", "DEGENERATE_VARIANCE");
    add("delong_z", "", "DEGENERATE_VARIANCE");
    add("delong_p", "", "DEGENERATE_VARIANCE");
  }

  add("brier_a", fd(veyes::brier(scores_a, labels)));
  add("brier_b", fd(veyes::brier(scores_b, labels)));

  veyes::KsResult ks = veyes::ks_two_sample(scores_a, scores_b);
  add("ks_d", fd(ks.d));
  add("ks_p", fd(ks.p));

  veyes::BaStats ba = veyes::bland_altman(scores_a, scores_b);
  add("ba_bias", fd(ba.bias));
  add("ba_sd", fd(ba.sd));
  add("ba_loa_low", fd(ba.loa_low));
  add("ba_loa_high", fd(ba.loa_high));

  auto add_confusion = [&](const char* suffix, const veyes::ConfusionMetrics& m) {
    add(std::string("accuracy_") + suffix, fd(m.accuracy));
    add(std::string("sensitivity_") + suffix, m.sensitivity ? fd(*m.sensitivity) : "",
        m.sensitivity ? "" : "UNDEFINED");
    add(std::string("specificity_") + suffix, m.specificity ? fd(*m.specificity) : "",
        m.specificity ? "" : "UNDEFINED");
  };
  add_confusion("a", veyes::confusion_metrics(scores_a, labels));
  add_confusion("b", veyes::confusion_metrics(scores_b, labels));

  std::string metrics_csv = "metric,value,detail\n";
  std::string report_txt;
  for (const auto& row : metrics) {
    metrics_csv += veyes::csv::join_row(row) + "\n";
    report_txt += row[0] + "=" + row[1] +
                  (row[2].empty() ? "" : " (" + row[2] + ")") + "\n";
  }
  veyes::csv::write_file(out / "metrics.csv", metrics_csv);
  veyes::csv::write_file(out / "report.txt", report_txt);

  auto dump_roc = [&](const veyes::RocCurve& roc, const std::filesystem::path& path) {
    std::string text = "threshold,fpr,tpr\n";
    for (const auto& p : roc.points)
      text += fd(p.threshold) + "," + fd(p.fpr) + "," + fd(p.tpr) + "\n";
    veyes::csv::write_file(path, text);
  };
  dump_roc(roc_a, out / "roc_a.csv");
  dump_roc(roc_b, out / "roc_b.csv");

  std::string ba_csv = "mean,diff\n";
  for (const auto& [mean, diff] : ba.points) ba_csv += fd(mean) + "," + fd(diff) + "\n";
  veyes::csv::write_file(out / "bland_altman.csv", ba_csv);

  std::cout << report_txt;
  return kExitOk;
}

int cmd_montage(const std::string& block_path, const std::string& out_path, int columns) {
  veyes::LungBlock block = veyes::read_npy_int16(block_path);
  veyes::write_montage_pgm(block, out_path, columns);
  std::cout << "tiles=" << block.depth << " columns=" << columns << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lung-focused CT series quality control and model-comparison statistics"};
  app.require_subcommand(1);

  std::string input, output, config_path, scores_path, method_name, out_path;
  std::string pooled_a, pooled_b, block_path;
  int workers = 0, k = 0, columns = 0;
  bool overwrite = false;

  auto* qc = app.add_subcommand("qc", "Run the DICOM-to-lung-block pipeline");
  qc->add_option("--input", input, "DICOM root directory")->required();
  qc->add_option("--output", output, "Output directory")->required();
  qc->add_option("--config", config_path, "Config file (key = value lines)");
  qc->add_option("--workers", workers, "Worker threads (default: logical processors)")
      ->check(CLI::Range(1, 1 << 20));
  qc->add_flag("--overwrite", overwrite, "Replace existing outputs");

  auto* report = app.add_subcommand("report", "Summarize an existing qc_report.csv");
  report->add_option("--output", output, "Directory holding qc_report.csv")->required();

  auto* pool = app.add_subcommand("pool", "Pool per-slice scores into patient scores");
  pool->add_option("--scores", scores_path, "Per-slice scores CSV")->required();
  pool->add_option("--method", method_name, "mean, max or topk")->required();
  pool->add_option("--k", k, "K for topk pooling")->check(CLI::Range(1, 1 << 20));
  pool->add_option("--out", out_path, "Pooled output CSV")->required();

  auto* eval = app.add_subcommand("eval", "Compare two pooled score files");
  eval->add_option("--pooled-a", pooled_a, "Pooled CSV, model A")->required();
  eval->add_option("--pooled-b", pooled_b, "Pooled CSV, model B")->required();
  eval->add_option("--out", out_path, "Output directory")->required();

  auto* montage = app.add_subcommand("montage", "Render a lung block as a PGM montage");
  montage->add_option("--block", block_path, "lung_block.npy path")->required();
  montage->add_option("--out", out_path, "Output PGM path")->required();
  montage->add_option("--columns", columns, "Tiles per row")->check(CLI::Range(1, 1 << 20));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (qc->parsed()) return cmd_qc(input, output, config_path, workers, overwrite);
    if (report->parsed()) return cmd_report(output);
    if (pool->parsed()) {
      if (method_name == "topk" && k < 1) {
        std::cerr << "--method topk requires --k >= 1\n";
        return kExitUsage;
      }
      return cmd_pool(scores_path, method_name, k, out_path);
    }
    if (eval->parsed()) return cmd_eval(pooled_a, pooled_b, out_path);
    if (montage->parsed()) {
      veyes::PipelineConfig defaults = resolve_config(config_path);
      int cols = columns > 0 ? columns : defaults.montage_columns;
      return cmd_montage(block_path, out_path, cols);
    }
  } catch (const Error& e) {
    if (e.code() == errc::config_error) {
      std::cerr << e.what() << "\n";
      return kExitUsage;
    }
    std::cerr << e.what() << "\n";
    return kExitFatal;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitFatal;
  }
  return kExitUsage;
}
