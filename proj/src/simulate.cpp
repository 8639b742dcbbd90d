#include "pooltest/simulate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <thread>

namespace pooltest {

namespace {

std::mt19937_64 seeded_engine(RngSpec spec) {
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                    static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(spec.stream),
                    static_cast<std::uint32_t>(spec.stream >> 32)};
  return std::mt19937_64(seq);
}

ProtocolTrace unclassified(std::size_t k) {
  ProtocolTrace trace;
  trace.classifications.assign(k, Status::Good);
  return trace;
}

Status status_of(bool defective) { return defective ? Status::Defective : Status::Good; }

bool any_defective(const std::vector<bool>& defects, std::size_t from) {
  return std::find(defects.begin() + static_cast<std::ptrdiff_t>(from), defects.end(),
                   true) != defects.end();
}

std::size_t procedure_index(Procedure procedure) {
  return static_cast<std::size_t>(procedure);
}

}  // namespace

Rng::Rng(RngSpec spec) : engine_(seeded_engine(spec)) {}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

ProtocolTrace run_D(const std::vector<bool>& defects) {
  const std::size_t k = defects.size();
  auto trace = unclassified(k);
  if (k == 0) return trace;
  trace.tests_performed = 1;
  if (k == 1) {
    trace.classifications[0] = status_of(defects[0]);
    return trace;
  }
  if (!any_defective(defects, 0)) return trace;
  trace.tests_performed += k;
  for (std::size_t i = 0; i < k; ++i) trace.classifications[i] = status_of(defects[i]);
  return trace;
}

ProtocolTrace run_Dprime(const std::vector<bool>& defects) {
  const std::size_t k = defects.size();
  auto trace = unclassified(k);
  if (k == 0) return trace;
  trace.tests_performed = 1;
  if (k == 1) {
    trace.classifications[0] = status_of(defects[0]);
    return trace;
  }
  if (!any_defective(defects, 0)) return trace;
  bool found = false;
  for (std::size_t i = 0; i + 1 < k; ++i) {
    ++trace.tests_performed;
    trace.classifications[i] = status_of(defects[i]);
    found = found || defects[i];
  }
  if (found) {
    ++trace.tests_performed;
    trace.classifications[k - 1] = status_of(defects[k - 1]);
  } else {
    trace.classifications[k - 1] = Status::Defective;
    trace.inferred_without_test.push_back(k - 1);
  }
  return trace;
}

ProtocolTrace run_S(const std::vector<bool>& defects) {
  const std::size_t k = defects.size();
  auto trace = unclassified(k);
  std::size_t start = 0;
  // Each pass handles the fresh group defects[start..k-1].
  while (start < k) {
    ++trace.tests_performed;
    if (!any_defective(defects, start)) break;  // all remaining good
    if (start + 1 == k) {
      trace.classifications[start] = Status::Defective;
      break;
    }
    bool restarted = false;
    for (std::size_t j = start; j + 1 < k; ++j) {
      ++trace.tests_performed;
      trace.classifications[j] = status_of(defects[j]);
      if (defects[j]) {
        start = j + 1;
        restarted = true;
        break;
      }
    }
    if (!restarted) {
      trace.classifications[k - 1] = Status::Defective;
      trace.inferred_without_test.push_back(k - 1);
      break;
    }
  }
  return trace;
}

ProtocolTrace run_protocol(Procedure procedure, const std::vector<bool>& defects) {
  switch (procedure) {
    case Procedure::Dorfman:
      return run_D(defects);
    case Procedure::ModifiedDorfman:
      return run_Dprime(defects);
    case Procedure::Sterrett:
      return run_S(defects);
  }
  return {};
}

double enumerate_expected_tests(Procedure procedure, std::span<const double> q) {
  const std::size_t k = q.size();
  if (k > 24) throw InstanceTooLarge(k, 24);
  double expected = 0.0;
  std::vector<bool> defects(k);
  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << k); ++pattern) {
    double probability = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      defects[i] = ((pattern >> i) & 1U) != 0;
      probability *= defects[i] ? 1.0 - q[i] : q[i];
    }
    expected += probability *
                static_cast<double>(run_protocol(procedure, defects).tests_performed);
  }
  return expected;
}

double beta_one_from_uniform(double u, double beta) {
  if (!(beta > 0.0)) throw InputError("beta must be positive");
  // 1 - (1-u)^(1/beta), without cancellation for small draws.
  return -std::expm1(std::log1p(-u) / beta);
}

double sample_beta_one(double beta, Rng& rng) {
  while (true) {
    const double x = beta_one_from_uniform(rng.uniform(), beta);
    if (x > 0.0 && x < 1.0) return x;
  }
}

unsigned resolve_threads(unsigned requested) {
  unsigned threads = requested != 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("POOLTEST_THREADS"); env != nullptr) {
    const std::string_view text(env);
    unsigned cap = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec != std::errc() || ptr != text.data() + text.size() || cap == 0) {
      throw InputError("POOLTEST_THREADS must be a positive integer, got '" +
                       std::string(text) + "'");
    }
    threads = std::min(threads, cap);
  }
  return threads;
}

SimulationSummary estimate_cost(const Plan& plan, const ProbabilityVector& pv,
                                Procedure procedure, const SimulationOptions& options) {
  if (options.replicates < 2) throw InputError("at least 2 replicates are required");
  if (population_size(plan) != pv.size()) {
    throw InputError("plan covers " + std::to_string(population_size(plan)) +
                     " items, population has " + std::to_string(pv.size()));
  }
  std::vector<Group> groups;
  for (const Group& g : plan_groups(plan, sort_ascending(pv))) {
    groups.push_back(options.ordering == Ordering::Optimal
                         ? arrange_optimal(procedure, g, pv).group
                         : g);
  }

  const std::uint64_t stream_tag =
      options.common_random_numbers
          ? 0
          : (static_cast<std::uint64_t>(procedure_index(procedure)) + 1) << 56;
  const std::uint64_t m = options.replicates;
  std::vector<double> totals(m, 0.0);

  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<bool> defective(pv.size());
    std::vector<bool> block;
    for (std::uint64_t r = begin; r < end; ++r) {
      Rng rng({options.seed, r ^ stream_tag});
      for (std::size_t i = 0; i < pv.size(); ++i) defective[i] = rng.uniform() < pv.p(i);
      std::size_t tests = 0;
      for (const Group& g : groups) {
        block.resize(g.size());
        for (std::size_t pos = 0; pos < g.size(); ++pos) block[pos] = defective[g[pos]];
        tests += run_protocol(procedure, block).tests_performed;
      }
      totals[r] = static_cast<double>(tests);
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(options.threads), m));
  if (workers <= 1) {
    run_range(0, m);
  } else {
    std::vector<std::jthread> pool;
    const std::uint64_t chunk = (m + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t begin = w * chunk;
      const std::uint64_t end = std::min(m, begin + chunk);
      if (begin < end) pool.emplace_back(run_range, begin, end);
    }
  }

  // Welford over replicate order, so the result is independent of workers.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t r = 0; r < m; ++r) {
    const double delta = totals[r] - mean;
    mean += delta / static_cast<double>(r + 1);
    m2 += delta * (totals[r] - mean);
  }
  const double variance = m2 / static_cast<double>(m - 1);

  SimulationSummary summary;
  summary.procedure = procedure;
  summary.plan = plan;
  summary.replicates = m;
  summary.mean_tests = mean;
  summary.std_error = std::sqrt(variance / static_cast<double>(m));
  summary.seed = options.seed;
  return summary;
}

}  // namespace pooltest
