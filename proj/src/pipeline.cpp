#include "veyes/pipeline.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "veyes/error.hpp"
#include "veyes/volume_export.hpp"

namespace veyes {

PipelineResult run_qc_pipeline(const std::filesystem::path& input_root,
                               const std::filesystem::path& output_root,
                               const PipelineConfig& cfg) {
  cfg.validate();
  ScanResult scan = scan_directory(input_root);

  std::error_code ec;
  std::filesystem::create_directories(output_root, ec);
  if (ec)
    throw Error(errc::io_error, "cannot create " + output_root.string() + ": " + ec.message());

  const std::size_t n = scan.series.size();
  std::vector<QcRecord> records(n);
  std::vector<std::exception_ptr> failures(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        ProcessResult res = process_record(scan.series[i], cfg.detect, cfg.gate);
        if (res.outcome.accepted)
          export_block(res.outcome, *res.block, output_root, cfg.overwrite);
        records[i] = to_qc_record(res.outcome);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  int pool_size = std::max(1, std::min<int>(cfg.effective_workers(), static_cast<int>(n)));
  if (pool_size <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool_size);
    for (int t = 0; t < pool_size; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  // First failure in key order, so errors are as deterministic as outputs.
  for (std::size_t i = 0; i < n; ++i)
    if (failures[i]) std::rethrow_exception(failures[i]);

  PipelineResult result;
  result.records = std::move(records);
  result.summary = summarize(result.records);
  result.files_examined = scan.files_examined;
  result.skipped_files = scan.skipped_count;

  write_qc_csv(result.records, output_root / "qc_report.csv");
  write_qc_summary(result.summary, output_root / "qc_summary.txt");
  return result;
}

}  // namespace veyes
