#include "compete/core.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>

namespace compete {

MeanRewardVector::MeanRewardVector(Eigen::VectorXd means) : means_(std::move(means)) {
  if (means_.size() < 1) throw ConfigError("mean reward vector needs at least one arm");
  for (Index a = 0; a < means_.size(); ++a) {
    if (!(means_(a) >= 0.0 && means_(a) <= 1.0)) {
      throw ConfigError(fmt::format("mean reward of arm {} is {}, outside [0,1]", a, means_(a)));
    }
  }
}

Index MeanRewardVector::best_arm() const {
  Index best = 0;
  for (Index a = 1; a < means_.size(); ++a) {
    if (means_(a) > means_(best)) best = a;
  }
  return best;
}

RealizationTable::RealizationTable(Matrix rewards) : rewards_(std::move(rewards)) {
  if ((rewards_.array() > 1).any()) throw ConfigError("realization table entries must be 0 or 1");
}

double RealizationTable::column_mean(Index arm) const {
  if (rows() == 0) return 0.0;
  return rewards_.col(arm).cast<double>().mean();
}

RealizationTable generate_realization_table(const MeanRewardVector& mrv, Index rows, const RngStream& rng) {
  if (rows < 1) throw ConfigError("realization table needs at least one row");
  RealizationTable::Matrix w(rows, mrv.arms());
  for (Index a = 0; a < mrv.arms(); ++a) {
    RngStream column = rng.split(static_cast<std::uint64_t>(a));
    const double mu = mrv[a];
    for (Index t = 0; t < rows; ++t) w(t, a) = column.bernoulli(mu) ? 1 : 0;
  }
  return RealizationTable(std::move(w));
}

void write_tables_csv(std::ostream& out, const std::map<std::size_t, RealizationTable>& tables) {
  out << "mrv_index,row,arm,reward\n";
  for (const auto& [index, table] : tables) {
    for (Index t = 0; t < table.rows(); ++t) {
      for (Index a = 0; a < table.arms(); ++a) {
        out << index << ',' << t << ',' << a << ',' << table(t, a) << '\n';
      }
    }
  }
}

std::map<std::size_t, RealizationTable> read_tables_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "mrv_index,row,arm,reward") {
    throw ConfigError("realization table CSV: bad header");
  }
  std::map<std::size_t, std::vector<std::tuple<long, long, int>>> entries;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::size_t index = 0;
    long row = 0;
    long arm = 0;
    int reward = 0;
    char c1 = 0;
    char c2 = 0;
    char c3 = 0;
    if (!(fields >> index >> c1 >> row >> c2 >> arm >> c3 >> reward) || c1 != ',' || c2 != ',' || c3 != ',') {
      throw ConfigError(fmt::format("realization table CSV: malformed line '{}'", line));
    }
    if (row < 0 || arm < 0 || (reward != 0 && reward != 1)) {
      throw ConfigError(fmt::format("realization table CSV: invalid entry '{}'", line));
    }
    entries[index].emplace_back(row, arm, reward);
  }
  std::map<std::size_t, RealizationTable> tables;
  for (auto& [index, cells] : entries) {
    long rows = 0;
    long arms = 0;
    for (const auto& [r, a, v] : cells) {
      rows = std::max(rows, r + 1);
      arms = std::max(arms, a + 1);
    }
    if (static_cast<std::size_t>(rows * arms) != cells.size()) {
      throw ConfigError(fmt::format("realization table CSV: table {} is incomplete", index));
    }
    RealizationTable::Matrix w(rows, arms);
    for (const auto& [r, a, v] : cells) w(r, a) = static_cast<std::uint8_t>(v);
    tables.emplace(index, RealizationTable(std::move(w)));
  }
  return tables;
}

}  // namespace compete
