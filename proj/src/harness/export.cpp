#include "catrl/harness/export.hpp"

#include <filesystem>
#include <fstream>

#include "catrl/harness/metrics.hpp"

namespace catrl::harness {

namespace fs = std::filesystem;

std::vector<std::string> export_plotdata(const std::string& metrics_path,
                                         const std::string& out_dir) {
  const MetricsTable table = MetricsTable::read(metrics_path);
  const int epoch_col = table.column_index("epoch");
  if (epoch_col < 0) {
    throw ConfigError("metrics file '" + metrics_path + "' has no epoch column");
  }
  fs::create_directories(out_dir);

  std::vector<std::string> written;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (static_cast<int>(c) == epoch_col) continue;
    const fs::path path = fs::path(out_dir) / (table.columns[c] + ".csv");
    std::ofstream out(path);
    if (!out) {
      throw TrainingError("cannot write series file '" + path.string() + "'");
    }
    out << "epoch," << table.columns[c] << '\n';
    for (const auto& row : table.rows) {
      out << format_double(row[static_cast<std::size_t>(epoch_col)]) << ','
          << format_double(row[c]) << '\n';
    }
    written.push_back(path.string());
  }
  return written;
}

}  // namespace catrl::harness
