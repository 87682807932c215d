#include "catrl/harness/metrics.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace catrl::harness {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::vector<std::string> MetricsWriter::header_columns(
    const std::vector<std::string>& constraint_ids) {
  std::vector<std::string> cols = {"epoch",       "steps",       "reward_raw",
                                   "reward_shaped", "episode_return", "episodes",
                                   "delta_mean",  "kl",          "lr",
                                   "loss_actor",  "loss_critic", "entropy",
                                   "grad_norm"};
  for (const auto& id : constraint_ids) cols.push_back("cplus_" + id);
  for (const auto& id : constraint_ids) cols.push_back("violfrac_" + id);
  for (const auto& id : constraint_ids) cols.push_back("cmax_" + id);
  for (const auto& id : constraint_ids) cols.push_back("pmax_" + id);
  return cols;
}

MetricsWriter::MetricsWriter(const std::string& path,
                             const std::vector<std::string>& constraint_ids)
    : out_(path, std::ios::out | std::ios::trunc),
      num_constraints_(constraint_ids.size()) {
  if (!out_) {
    throw TrainingError("cannot open metrics file '" + path + "' for writing");
  }
  const auto cols = header_columns(constraint_ids);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out_ << ',';
    out_ << cols[i];
  }
  out_ << '\n';
  out_.flush();
}

void MetricsWriter::append(const algo::EpochRecord& rec) {
  if (rec.cplus_mean.size() != num_constraints_ ||
      rec.viol_frac.size() != num_constraints_ || rec.c_max.size() != num_constraints_ ||
      rec.p_max.size() != num_constraints_) {
    throw std::logic_error("metrics row has the wrong constraint count");
  }
  std::ostringstream row;
  row << rec.epoch << ',' << rec.total_steps << ',' << format_double(rec.mean_reward_raw)
      << ',' << format_double(rec.mean_reward_shaped) << ','
      << format_double(rec.mean_episode_return) << ',' << rec.episodes_completed << ','
      << format_double(rec.mean_delta) << ',' << format_double(rec.update.kl) << ','
      << format_double(rec.update.learning_rate) << ','
      << format_double(rec.update.loss_actor) << ','
      << format_double(rec.update.loss_critic) << ',' << format_double(rec.update.entropy)
      << ',' << format_double(rec.update.grad_norm);
  for (double v : rec.cplus_mean) row << ',' << format_double(v);
  for (double v : rec.viol_frac) row << ',' << format_double(v);
  for (double v : rec.c_max) row << ',' << format_double(v);
  for (double v : rec.p_max) row << ',' << format_double(v);
  out_ << row.str() << '\n';
  out_.flush();
  if (!out_) {
    throw TrainingError("metrics file write failed");
  }
}

MetricsTable MetricsTable::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open metrics file '" + path + "'");
  }
  MetricsTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("metrics file '" + path + "' is empty");
  }
  std::stringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) table.columns.push_back(cell);

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(table.columns.size());
    std::stringstream cells(line);
    while (std::getline(cells, cell, ',')) {
      double v = std::nan("");
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() && cell != "nan" && cell != "-nan") {
        throw ConfigError("metrics file '" + path + "' has a non-numeric cell '" + cell +
                          "'");
      }
      row.push_back(v);
    }
    if (row.size() != table.columns.size()) {
      throw ConfigError("metrics file '" + path + "' has a ragged row");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

int MetricsTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace catrl::harness
