#include "pooltest/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pooltest/bounds.hpp"
#include "pooltest/optimize.hpp"
#include "pooltest/serialization.hpp"
#include "pooltest/simulate.hpp"

namespace pooltest {

namespace {

struct ReplicateResult {
  double dorfman = 0.0;
  double modified_dorfman = 0.0;
  double sterrett = 0.0;
  double entropy = 0.0;
  // Moments of the drawn risks, for the pooled std column.
  double draw_mean = 0.0;
  double draw_m2 = 0.0;
};

class Accumulator {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  MeanWithError summary() const {
    const double variance = count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
    return {mean_, std::sqrt(variance / static_cast<double>(count_))};
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

ReplicateResult run_replicate(double beta, std::size_t n, SterrettRule s_rule, RngSpec spec) {
  Rng rng(spec);
  std::vector<double> draws(n);
  for (double& x : draws) x = sample_beta_one(beta, rng);

  ReplicateResult out;
  for (std::size_t i = 0; i < n; ++i) {
    const double delta = draws[i] - out.draw_mean;
    out.draw_mean += delta / static_cast<double>(i + 1);
    out.draw_m2 += delta * (draws[i] - out.draw_mean);
  }
  out.entropy = entropy(ProbabilityVector::validate(draws));

  std::sort(draws.begin(), draws.end());
  out.dorfman = solve_ordered_dp(draws, Procedure::Dorfman).cost_to_go.back();
  out.modified_dorfman =
      solve_ordered_dp(draws, Procedure::ModifiedDorfman).cost_to_go.back();
  out.sterrett = solve_ordered_dp(draws, Procedure::Sterrett, s_rule).cost_to_go.back();
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<double> row_values(const StudyRow& r) {
  return {r.p,
          r.std,
          r.dorfman.mean,
          r.dorfman.se,
          r.modified_dorfman.mean,
          r.modified_dorfman.se,
          r.sterrett.mean,
          r.sterrett.se,
          r.entropy.mean,
          r.entropy.se};
}

const std::vector<std::string>& column_names() {
  static const std::vector<std::string> names{"p",     "std",     "D_mean", "D_se",
                                              "Dp_mean", "Dp_se", "S_mean", "S_se",
                                              "H_mean",  "H_se"};
  return names;
}

}  // namespace

void StudyConfig::validate() const {
  if (n < 1) throw InputError("population size n must be at least 1");
  if (m < 2) throw InputError("replicate count m must be at least 2");
  if (p_targets.empty()) throw InputError("at least one p target is required");
  for (double p : p_targets) {
    if (!(p > 0.0 && p < 1.0)) {
      throw InputError("p target " + format_number(p) + " is not strictly between 0 and 1");
    }
  }
}

std::vector<StudyRow> run_study(const StudyConfig& config) {
  config.validate();
  const unsigned workers = resolve_threads(config.threads);
  std::vector<StudyRow> rows;
  rows.reserve(config.p_targets.size());

  for (std::size_t ri = 0; ri < config.p_targets.size(); ++ri) {
    const double p = config.p_targets[ri];
    const double beta = (1.0 - p) / p;
    std::vector<ReplicateResult> results(config.m);
    auto run_range = [&](std::size_t begin, std::size_t end) {
      for (std::size_t r = begin; r < end; ++r) {
        const std::uint64_t stream = (static_cast<std::uint64_t>(ri) << 32) | r;
        results[r] = run_replicate(beta, config.n, config.s_rule, {config.seed, stream});
      }
    };
    const std::size_t w = std::min<std::size_t>(workers, config.m);
    if (w <= 1) {
      run_range(0, config.m);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t chunk = (config.m + w - 1) / w;
      for (std::size_t t = 0; t < w; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(config.m, begin + chunk);
        if (begin < end) pool.emplace_back(run_range, begin, end);
      }
    }

    Accumulator d, dp, s, h;
    // Pooled moments of all draws (Chan et al. combination, replicate order).
    double pooled_mean = 0.0;
    double pooled_m2 = 0.0;
    double pooled_count = 0.0;
    const auto n = static_cast<double>(config.n);
    for (const auto& res : results) {
      d.add(res.dorfman);
      dp.add(res.modified_dorfman);
      s.add(res.sterrett);
      h.add(res.entropy);
      const double total = pooled_count + n;
      const double delta = res.draw_mean - pooled_mean;
      pooled_mean += delta * n / total;
      pooled_m2 += res.draw_m2 + delta * delta * pooled_count * n / total;
      pooled_count = total;
    }

    StudyRow row;
    row.p = p;
    row.std = pooled_count > 1 ? std::sqrt(pooled_m2 / (pooled_count - 1)) : 0.0;
    row.dorfman = d.summary();
    row.modified_dorfman = dp.summary();
    row.sterrett = s.summary();
    row.entropy = h.summary();
    rows.push_back(row);
  }
  return rows;
}

TableFormat parse_table_format(std::string_view name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "json") return TableFormat::Json;
  if (name == "markdown" || name == "md") return TableFormat::Markdown;
  throw UnknownFormat(std::string(name));
}

std::string emit_table(const std::vector<StudyRow>& rows, TableFormat format,
                       const StudyConfig* config) {
  if (rows.empty()) throw InputError("no study rows to emit");
  const auto& names = column_names();
  std::ostringstream out;
  switch (format) {
    case TableFormat::Csv: {
      for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
      out << '\n';
      for (const auto& r : rows) {
        const auto values = row_values(r);
        for (std::size_t c = 0; c < values.size(); ++c) {
          out << (c ? "," : "") << format_number(values[c]);
        }
        out << '\n';
      }
      break;
    }
    case TableFormat::Markdown: {
      out << '|';
      for (const auto& name : names) out << ' ' << name << " |";
      out << "\n|";
      for (std::size_t c = 0; c < names.size(); ++c) out << "---|";
      out << '\n';
      for (const auto& r : rows) {
        out << '|';
        for (double v : row_values(r)) out << ' ' << format_number(v) << " |";
        out << '\n';
      }
      break;
    }
    case TableFormat::Json: {
      nlohmann::json doc;
      doc["columns"] = names;
      nlohmann::json json_rows = nlohmann::json::array();
      for (const auto& r : rows) {
        nlohmann::json obj;
        const auto values = row_values(r);
        for (std::size_t c = 0; c < names.size(); ++c) {
          obj[names[c]] = round_significant(values[c]);
        }
        json_rows.push_back(obj);
      }
      doc["rows"] = json_rows;
      if (config != nullptr) {
        doc["metadata"] = {{"n", config->n},
                           {"m", config->m},
                           {"seed", config->seed},
                           {"p_targets", config->p_targets},
                           {"common_draws", true},
                           {"search", "dp"},
                           {"s_arrangement", to_string(config->s_rule)}};
      }
      out << doc.dump(2) << '\n';
      break;
    }
  }
  return out.str();
}

}  // namespace pooltest
