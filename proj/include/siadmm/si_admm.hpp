#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "siadmm/problem.hpp"
#include "siadmm/run_record.hpp"
#include "siadmm/sa.hpp"

namespace siadmm {

struct AlgorithmConfig {
  double rho = 1.0;
  double gamma = 1.0;
  Mat P;  // empty means zero
  Mat Q;  // empty means zero
  double R = 1.0;
  double T = 1000.0;
  std::optional<double> eta;  // default (1 + delta/2)/(1 + delta)
  long max_outer = 100;
  std::optional<std::uint64_t> sample_budget;
  std::optional<double> gamma_x;  // default 1/c_x
  std::optional<double> gamma_y;  // default 1/c_y
  std::optional<double> delta;    // overrides the constructive contraction gap

  AugmentedLagrangianParams al_params(const StochasticProblem& prob) const;
};

struct SubproblemConstants {
  double c = 0.0;
  double L = 0.0;
  double gamma = 0.0;
  SARateConstants rate;

  double M() const { return rate.M; }
  long K() const { return rate.K; }
};

struct DerivedConstants {
  SubproblemConstants x;
  std::optional<SubproblemConstants> y;  // absent for the exact-prox variant
  double delta = 0.0;
  double eta = 0.0;
  std::vector<std::string> warnings;
};

DerivedConstants derive_constants(const StochasticProblem& prob, const AlgorithmConfig& cfg);

// Largest schedule value accepted; beyond it doubles no longer count samples exactly.
inline constexpr double kScheduleCap = 9007199254740992.0;  // 2^53

long sample_schedule(long K, double T, double eta, long k);

// Closed-form bound on sum_k 1/T_k for a geometric schedule: sum_k eta^k / T = 1/(T(1-eta)).
double schedule_inverse_sum_bound(double T, double eta);

struct SampleStreams {
  Stream x;
  Stream y;
};

// Reusable per-run state: factorised affine parts of the inner gradients.
class SiAdmmStepper {
 public:
  SiAdmmStepper(const StochasticProblem& prob, const AlgorithmConfig& cfg,
                const DerivedConstants& consts);

  Iterate step(const Iterate& u_k, long T_y, long T_x, SampleStreams& streams) const;
  Iterate step_exact_y(const Iterate& u_k, long T_x, SampleStreams& streams) const;

 private:
  struct Affine {
    Mat H;
    Vec diag;
    bool diagonal = false;
  };
  Vec x_update(const Iterate& u_k, const Vec& y_next, long T_x, Stream& stream) const;
  static Affine make_affine(Mat H);

  const StochasticProblem& prob_;
  AugmentedLagrangianParams params_;
  double gamma_;
  double gamma_x_;
  double gamma_y_;
  Affine hx_;
  Affine hy_;
};

Iterate si_admm_step(const StochasticProblem& prob, const AlgorithmConfig& cfg,
                     const DerivedConstants& consts, const Iterate& u_k, long T_y, long T_x,
                     SampleStreams& streams);
Iterate si_admm_step_exact_y(const StochasticProblem& prob, const AlgorithmConfig& cfg,
                             const DerivedConstants& consts, const Iterate& u_k, long T_x,
                             SampleStreams& streams);

struct SolveOptions {
  std::string algorithm = "si-admm";
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  bool store_iterates = true;
  bool record_wall_time = true;
  // Checked after each recorded outer iteration; true ends the run.
  std::function<bool(const RunRow&)> stop_when;
};

RunRecord solve(const StochasticProblem& prob, const AlgorithmConfig& cfg, const Iterate& u0,
                SampleStreams& streams, const SolveOptions& opts = {});

}  // namespace siadmm
