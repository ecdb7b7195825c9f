#include "saa/harness.hpp"

#include <bit>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "saa/errors.hpp"
#include "saa/rng.hpp"
#include "saa/synthetic.hpp"

namespace saa::harness {

namespace {

using nlohmann::json;

constexpr std::uint64_t kStreamTrialBase = 0x4000;

int default_max_iters(SolverKind kind, int k) {
  switch (kind) {
    case SolverKind::Iht:
    case SolverKind::Fista:
      return 3000;  // slow-converging methods get the long leash
    case SolverKind::Omp:
      return std::max(k, 1);  // one greedy selection per nonzero
    default:
      return 100;
  }
}

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

}  // namespace

std::vector<int> SweepSpec::effective_k_grid() const {
  if (!k_grid.empty()) return k_grid;
  std::vector<int> grid;
  const int k_max = static_cast<int>(0.55 * m);
  for (int k = 20; k <= k_max; k += 5) grid.push_back(k);
  return grid;
}

int SweepSpec::effective_max_iters(SolverKind kind, int k) const {
  const auto it = max_iters.find(kind);
  return it != max_iters.end() ? it->second : default_max_iters(kind, k);
}

void SweepSpec::validate() const {
  if (m < 2 || p < 2) {
    throw std::invalid_argument("SweepSpec: need m >= 2 and p >= 2");
  }
  if (trials_per_k < 1) {
    throw std::invalid_argument("SweepSpec: trials_per_K must be >= 1");
  }
  if (solvers.empty()) {
    throw std::invalid_argument("SweepSpec: solver list must be non-empty");
  }
  if (effective_k_grid().empty()) {
    throw std::invalid_argument("SweepSpec: K grid must be non-empty");
  }
  for (int k : effective_k_grid()) {
    if (k < 0 || k > m * p) {
      throw std::invalid_argument("SweepSpec: K values must lie in [0, pm]");
    }
  }
  for (SolverKind kind : solvers) {
    if (kind == SolverKind::Tsaa && p != 2) {
      throw std::invalid_argument("SweepSpec: TSAA requires p = 2");
    }
    if (kind == SolverKind::Msaa && p <= 2) {
      throw std::invalid_argument("SweepSpec: MSAA requires p > 2");
    }
  }
}

SweepSpec SweepSpec::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("sweep spec: invalid JSON: ") +
                                e.what());
  }
  SweepSpec spec;
  try {
    spec.m = doc.at("m").get<int>();
    spec.p = doc.at("p").get<int>();
    if (doc.contains("K_grid")) {
      spec.k_grid = doc.at("K_grid").get<std::vector<int>>();
    }
    if (doc.contains("trials_per_K")) {
      spec.trials_per_k = doc.at("trials_per_K").get<int>();
    }
    for (const auto& name : doc.at("solvers")) {
      spec.solvers.push_back(parse_solver_kind(name.get<std::string>()));
    }
    if (doc.contains("noise_level")) {
      spec.noise_level = doc.at("noise_level").get<double>();
    }
    if (doc.contains("master_seed")) {
      spec.master_seed = doc.at("master_seed").get<std::uint64_t>();
    }
    if (doc.contains("max_iters")) {
      for (const auto& [name, count] : doc.at("max_iters").items()) {
        spec.max_iters[parse_solver_kind(name)] = count.get<int>();
      }
    }
    if (doc.contains("zero_time")) {
      spec.zero_time = doc.at("zero_time").get<bool>();
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("sweep spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

SweepSpec SweepSpec::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("sweep spec: cannot open " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string SweepReport::to_csv() const {
  std::string out =
      "solver,K,trials,successes,success_rate,mean_time_s,mean_iters\n";
  for (const auto& row : rows) {
    out += to_string(row.solver);
    out += ',' + std::to_string(row.k);
    out += ',' + std::to_string(row.trials);
    out += ',' + std::to_string(row.successes);
    out += ',' + format_fixed(row.success_rate);
    out += ',' + format_fixed(spec.zero_time ? 0.0 : row.mean_time_s);
    out += ',' + format_fixed(row.mean_iters);
    out += '\n';
  }
  return out;
}

const SweepRow* SweepReport::find(SolverKind solver, int k) const {
  for (const auto& row : rows) {
    if (row.solver == solver && row.k == k) return &row;
  }
  return nullptr;
}

SweepReport run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepReport report;
  report.spec = spec;
  const std::vector<int> grid = spec.effective_k_grid();

  for (int k : grid) {
    for (int trial = 0; trial < spec.trials_per_k; ++trial) {
      const std::uint64_t trial_seed = derive_seed(
          derive_seed(spec.master_seed, kStreamTrialBase + k), trial);
      // One instance per trial, shared by every solver for fair comparison.
      const Instance inst = gen_instance(
          {trial_seed, spec.m, spec.p, k, spec.noise_level});
      const double truth_norm = inst.x_star.norm();

      for (SolverKind kind : spec.solvers) {
        SolverConfig cfg;
        cfg.sparsity = k;
        cfg.max_iters = spec.effective_max_iters(kind, k);
        TrialRecord record;
        record.solver = kind;
        record.k = k;
        record.trial_index = trial;
        const auto start = std::chrono::steady_clock::now();
        try {
          const SolveResult result = solve(kind, inst.a, inst.y, cfg);
          record.wall_time_s =
              std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
          record.iterations = result.iterations;
          record.final_relative_error =
              (result.x_hat - inst.x_star).norm() / truth_norm;
          record.success = recovery_success(result.x_hat, inst.x_star);
          record.stop_reason = to_string(result.stop_reason);
        } catch (const std::exception& e) {
          record.wall_time_s =
              std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
          record.success = false;
          record.final_relative_error = 1.0;
          record.stop_reason = std::string("error: ") + e.what();
        }
        report.trials.push_back(std::move(record));
      }
    }
  }

  for (SolverKind kind : spec.solvers) {
    for (int k : grid) {
      SweepRow row;
      row.solver = kind;
      row.k = k;
      double time_sum = 0.0;
      double iter_sum = 0.0;
      for (const auto& record : report.trials) {
        if (record.solver != kind || record.k != k) continue;
        ++row.trials;
        if (record.success) ++row.successes;
        time_sum += record.wall_time_s;
        iter_sum += record.iterations;
      }
      row.success_rate = static_cast<double>(row.successes) / row.trials;
      row.mean_time_s = time_sum / row.trials;
      row.mean_iters = iter_sum / row.trials;
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string FewIterationReport::to_csv() const {
  std::string out = "solver,budget,K,trials,successes,success_rate\n";
  for (const auto& row : rows) {
    out += to_string(row.solver);
    out += ',' + std::to_string(row.budget);
    out += ',' + std::to_string(row.k);
    out += ',' + std::to_string(row.trials);
    out += ',' + std::to_string(row.successes);
    out += ',' + format_fixed(row.success_rate);
    out += '\n';
  }
  return out;
}

const FewIterationRow* FewIterationReport::find(SolverKind solver, int budget,
                                                int k) const {
  for (const auto& row : rows) {
    if (row.solver == solver && row.budget == budget && row.k == k) return &row;
  }
  return nullptr;
}

FewIterationReport run_few_iteration_study(const SweepSpec& spec,
                                           const std::vector<int>& budgets) {
  spec.validate();
  if (budgets.empty()) {
    throw std::invalid_argument("few-iteration study: no budgets given");
  }
  for (SolverKind kind : spec.solvers) {
    if (kind != SolverKind::Tsaa && kind != SolverKind::Htp &&
        kind != SolverKind::Sp && kind != SolverKind::Cosamp) {
      throw std::invalid_argument(
          "few-iteration study: solvers limited to TSAA/HTP/SP/CoSaMP");
    }
  }
  FewIterationReport report;
  const std::vector<int> grid = spec.effective_k_grid();
  for (SolverKind kind : spec.solvers) {
    for (int budget : budgets) {
      if (budget < 0) {
        throw std::invalid_argument("few-iteration study: negative budget");
      }
      for (int k : grid) {
        FewIterationRow row;
        row.solver = kind;
        row.budget = budget;
        row.k = k;
        row.trials = spec.trials_per_k;
        for (int trial = 0; trial < spec.trials_per_k; ++trial) {
          const std::uint64_t trial_seed = derive_seed(
              derive_seed(spec.master_seed, kStreamTrialBase + k), trial);
          const Instance inst = gen_instance(
              {trial_seed, spec.m, spec.p, k, spec.noise_level});
          bool success = false;
          if (budget == 0) {
            // Zero iterations: judge the zero initial point as-is.
            success = recovery_success(
                Eigen::VectorXd::Zero(inst.a.cols()), inst.x_star);
          } else {
            SolverConfig cfg;
            cfg.sparsity = k;
            cfg.max_iters = budget;
            cfg.residual_tol = 0.0;  // the budget is the only stopping rule
            cfg.iterate_tol = 0.0;
            try {
              const SolveResult result = solve(kind, inst.a, inst.y, cfg);
              success = recovery_success(result.x_hat, inst.x_star);
            } catch (const std::exception&) {
              success = false;
            }
          }
          if (success) ++row.successes;
        }
        row.success_rate = static_cast<double>(row.successes) / row.trials;
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

double monotonicity_violation_fraction(const SweepReport& report) {
  const std::vector<int> grid = report.spec.effective_k_grid();
  long pairs = 0;
  long violations = 0;
  for (SolverKind kind : report.spec.solvers) {
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const SweepRow* lo = report.find(kind, grid[i]);
      const SweepRow* hi = report.find(kind, grid[i + 1]);
      if (lo == nullptr || hi == nullptr) continue;
      ++pairs;
      if (hi->success_rate >
          lo->success_rate + 3.0 / report.spec.trials_per_k) {
        ++violations;
      }
    }
  }
  return pairs == 0 ? 0.0 : static_cast<double>(violations) / pairs;
}

// ---------------------------------------------------------------------------
// Dictionary container
// ---------------------------------------------------------------------------

namespace {
constexpr char kMagic[8] = {'B', 'L', 'K', 'D', 'C', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "dictionary container assumes a little-endian host");
}  // namespace

void save_dictionary(const BlockDictionary& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("save_dictionary: cannot open " + path);
  }
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t m = static_cast<std::uint32_t>(a.block_dim());
  const std::uint32_t p = static_cast<std::uint32_t>(a.block_count());
  out.write(reinterpret_cast<const char*>(&m), sizeof(m));
  out.write(reinterpret_cast<const char*>(&p), sizeof(p));
  for (int i = 0; i < a.block_count(); ++i) {
    // Row-major payload.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                        Eigen::RowMajor>
        block = a.block(i);
    out.write(reinterpret_cast<const char*>(block.data()),
              static_cast<std::streamsize>(sizeof(double)) * m * m);
  }
  if (!out) {
    throw numerical_error("save_dictionary: write failed for " + path);
  }
}

BlockDictionary load_dictionary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("load_dictionary: cannot open " + path);
  }
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw std::invalid_argument("load_dictionary: bad magic in " + path);
  }
  std::uint32_t m = 0;
  std::uint32_t p = 0;
  in.read(reinterpret_cast<char*>(&m), sizeof(m));
  in.read(reinterpret_cast<char*>(&p), sizeof(p));
  if (!in || m < 2 || p < 2 || m > (1u << 20) || p > (1u << 16)) {
    throw std::invalid_argument("load_dictionary: bad header in " + path);
  }
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(p);
  for (std::uint32_t i = 0; i < p; ++i) {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>
        block(m, m);
    in.read(reinterpret_cast<char*>(block.data()),
            static_cast<std::streamsize>(sizeof(double)) * m * m);
    if (!in) {
      throw std::invalid_argument("load_dictionary: truncated payload in " +
                                  path);
    }
    blocks.emplace_back(block);
  }
  return BlockDictionary(std::move(blocks));
}

}  // namespace saa::harness
