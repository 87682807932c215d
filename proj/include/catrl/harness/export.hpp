#pragma once

#include <string>
#include <vector>

namespace catrl::harness {

/// Splits a run's metrics file into one two-column series file per metric
/// (epoch, value) for external plotting. Returns the files written.
/// Truncated runs export exactly the rows present.
std::vector<std::string> export_plotdata(const std::string& metrics_path,
                                         const std::string& out_dir);

}  // namespace catrl::harness
