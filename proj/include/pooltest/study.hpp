#pragma once

// Simulation study: draw risk vectors from Beta(1, beta) with mean p, optimise
// ordered plans for D, D' and S, and aggregate expected totals and entropy.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pooltest/cost.hpp"

namespace pooltest {

struct StudyConfig {
  std::vector<double> p_targets{0.001, 0.01, 0.05, 0.10, 0.20, 0.30};
  std::size_t n = 100;
  std::size_t m = 200;
  std::uint64_t seed = 20180501;
  unsigned threads = 0;
  /// Published reproduces the tabulated study; Optimal gives the true
  /// within-block optimum and lower S means.
  SterrettRule s_rule = SterrettRule::Published;

  /// Throws InputError unless n >= 1, m >= 2 and every target is in (0,1).
  void validate() const;
};

struct MeanWithError {
  double mean = 0.0;
  double se = 0.0;  // sample sd / sqrt(M)
};

struct StudyRow {
  double p = 0.0;
  /// Empirical standard deviation of all M*N drawn risks.
  double std = 0.0;
  MeanWithError dorfman;
  MeanWithError modified_dorfman;
  MeanWithError sterrett;
  MeanWithError entropy;
};

/// Risk draws are shared by the three procedures within a replicate.
std::vector<StudyRow> run_study(const StudyConfig& config);

enum class TableFormat { Csv, Json, Markdown };

/// Throws UnknownFormat.
TableFormat parse_table_format(std::string_view name);

/// Columns: p, std, D_mean, D_se, Dp_mean, Dp_se, S_mean, S_se, H_mean, H_se.
/// Numbers use 10 significant digits and '.' as decimal separator. Throws
/// InputError on empty rows. The JSON form carries `config` as metadata when
/// given.
std::string emit_table(const std::vector<StudyRow>& rows, TableFormat format,
                       const StudyConfig* config = nullptr);

}  // namespace pooltest
