#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "siadmm/bounds.hpp"
#include "siadmm/run_record.hpp"

namespace siadmm {

inline constexpr std::string_view kConfigSchema = "siadmm.experiment/v1";

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k = {"lasso-compare", "distreg-compare",  "sa-rate",
                                             "contraction-test", "bounds", "complexity-sweep"};
  return k;
}

struct InstanceSpec {
  std::string problem = "lasso";  // lasso | distreg
  long n = 10;
  double sigma_l2 = 5.0;
  double sigma_s2 = 5.0;
  double gamma_bar = 0.1;
  double bernoulli_p = 0.5;
  double offdiag_var = 0.01;
};

struct ExperimentConfig {
  std::string kind;
  std::uint64_t seed = 1;
  int replications = 10;
  std::string out_dir;  // empty: nothing is written
  InstanceSpec instance;
  std::vector<std::string> algorithms;

  // SI-ADMM
  double rho = 20.0;
  double gamma = 1.0;
  double T = 1000.0;
  std::optional<double> eta;
  bool eta_boundary = false;  // eta = 1/(1+delta)
  double R = 1.0;
  long max_outer = 100;
  std::optional<std::uint64_t> budget;
  std::optional<double> q;  // Q = q I; distreg default q = rho
  double x0_scale = 0.0;    // u0 = (x0_scale x* + x0_offset, x0_scale y* + x0_offset, 0)
  double x0_offset = 0.0;

  // SADM0
  std::string sadm0_penalty = "sqrt";  // sqrt: scale sqrt(k); linear: scale k
  std::optional<double> sadm0_scale;   // default 1000 (sqrt) or mu_f (linear)

  // DSA
  std::vector<double> dsa_gammas = {50.0, 5000.0, 500000.0};
  bool dsa_unprojected = true;

  // outputs
  long record_points = 2000;
  bool write_trajectories = true;
  bool wall_clock_columns = false;

  // sa-rate
  long sa_replications = 10000;
  long sa_dim = 5;
  double sa_c = 1.0;
  double sa_L = 2.0;
  double sa_noise_sd = 1.0;
  double sa_noisy_gamma0 = 1.5;  // 1/c or 2/c hit a_i = 0 when L = c
  long sa_max_k = 10000;

  // contraction-test
  long contraction_iters = 50;
  long contraction_max_dim = 20;

  // complexity-sweep
  std::vector<double> eps = {1e-1, 1e-2, 1e-3, 1e-4};
  std::optional<double> L_ratio;

  // bounds
  long bound_outer = 100;
  double bound_eps = 1e-3;

  static ExperimentConfig defaults(const std::string& kind);
  // Keys absent from `j` keep the defaults of j["kind"] (or `kind` when given).
  static ExperimentConfig from_json(const nlohmann::json& j, const std::string& kind = "");
  nlohmann::json to_json() const;
  std::uint64_t hash() const;
  void validate() const;
};

ExperimentConfig load_config(const std::string& path, const std::string& kind = "");

enum class ErrorField { x, y, xy, G };

struct ErrorCurve {
  std::string abscissa = "samples";  // samples | outer
  std::vector<double> t;
  std::vector<double> mean;
  std::vector<double> std_error;
  std::vector<std::vector<double>> per_rep;  // per_rep[point][replication]

  std::size_t size() const { return t.size(); }
};

double row_error(const RunRow& row, ErrorField field);

// Error against cumulative samples; records must share abscissae. Decimated to at
// most max_points by uniform stride with both endpoints kept.
ErrorCurve align_by_samples(const std::vector<RunRecord>& records, ErrorField field,
                            std::size_t max_points = 2000);
ErrorCurve align_by_outer(const std::vector<RunRecord>& records, ErrorField field);

void write_run_csv(std::ostream& os, const RunRecord& rec, bool wall_clock);
void write_curve_csv(std::ostream& os, const ErrorCurve& curve);

struct AlgorithmRuns {
  std::string name;
  ErrorField field = ErrorField::x;
  std::vector<RunRecord> runs;
  ErrorCurve curve;
};

struct ExperimentResult {
  nlohmann::json summary;
  bool passed = true;
  std::vector<AlgorithmRuns> algorithms;
  std::vector<BoundPoint> bound;  // SI-ADMM bound curve when computed
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Seeds shared by all algorithms of one replication.
std::uint64_t sample_seed(const ExperimentConfig& cfg, int rep, std::string_view block);
std::uint64_t instance_seed(const ExperimentConfig& cfg, int index = 0);

// Least-squares slope of y on x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);
double median(std::vector<double> v);

}  // namespace siadmm
