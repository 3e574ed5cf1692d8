#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fairsim {

// Merged per-round CSV emitted by the compare command.
inline constexpr std::string_view kCompareCsvHeader =
    "pipeline,round,ndcg,agg_div,cum_agg_div,ee,cum_ee,discrepancy,clicks";
// Summary table (one row per run): the quantities plotted per pipeline.
inline constexpr std::string_view kCompareSummaryHeader =
    "pipeline,rounds,mean_ndcg,final_cum_agg_div,final_cum_ee";

// Command bodies behind the CLI. Exit status convention: 0 success,
// 1 runtime failure, 2 invalid arguments or config.
int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            bool force, bool resume, std::ostream& out, std::ostream& err);

int cmd_compare(const std::vector<std::string>& run_dirs, const std::string& merged_csv_path,
                std::ostream& out, std::ostream& err);

int cmd_inspect(const std::string& run_dir, int round, std::ostream& out, std::ostream& err);

int cmd_dataset_stats(const std::string& dataset_path, const std::string& format,
                      const std::string& separator, std::ostream& out, std::ostream& err);

}  // namespace fairsim
