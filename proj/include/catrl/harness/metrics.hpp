#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "catrl/algo/trainer.hpp"

namespace catrl::harness {

/// Shortest round-trip decimal rendering (std::to_chars), so identical
/// doubles always print identically.
std::string format_double(double value);

/// Append-only CSV sink for per-epoch training metrics. The header is fixed
/// at open time from the constraint ids; every append writes one complete
/// row and flushes.
class MetricsWriter {
 public:
  MetricsWriter(const std::string& path, const std::vector<std::string>& constraint_ids);

  void append(const algo::EpochRecord& rec);

  static std::vector<std::string> header_columns(
      const std::vector<std::string>& constraint_ids);

 private:
  std::ofstream out_;
  std::size_t num_constraints_;
};

/// Minimal reader for the files MetricsWriter produces.
struct MetricsTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  static MetricsTable read(const std::string& path);
  int column_index(const std::string& name) const;  // -1 when absent
};

}  // namespace catrl::harness
