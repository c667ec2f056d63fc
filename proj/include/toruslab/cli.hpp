#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace toruslab::cli {

using nlohmann::json;

/// Shortest round-trip decimal form of x (CSV float convention).
std::string format_double(double x);

/// RFC-4180 CSV: comma separators, LF line endings, quotes only when needed.
class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& fields);

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Fully config-driven run: executes the mapped operation, writes
/// summary.json (sorted keys, config hash, seeds) and detail.csv under
/// out_dir. Returns the process exit code: 0 pass, 1 assertion failure,
/// 2 invalid config.
int run(const json& config, const std::filesystem::path& out_dir, int threads,
        bool verbose);

/// Parses the file at path and dispatches to run().
int run_config_file(const std::string& config_path, const std::string& out_dir,
                    int threads, bool verbose);

}  // namespace toruslab::cli
