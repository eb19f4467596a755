#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cstrain/dense_matrix.hpp"
#include "cstrain/l1_solver.hpp"
#include "cstrain/pipeline.hpp"
#include "cstrain/rand_models.hpp"

namespace cstrain {

struct ExperimentDims {
    std::size_t m = 0, n = 0, p = 0, q = 0, s = 0, t = 0, t_bar = 0, u = 0;
};

struct CheckFlags {
    bool verify_rip = false;
    std::uint64_t rip_budget = 200000;
    bool verify_uniqueness = false;
    // constants for the assumption inequalities
    double c1 = 1.0;
    double c2 = 1.0;
    double c_srank = 1.0;
    double epsilon = 0.62;
};

struct ExperimentConfig {
    ExperimentDims dims;
    ModelSpec model;
    std::size_t trials = 1;
    std::uint64_t master_seed = 0;
    std::vector<std::size_t> u_candidates;  // empty: use {dims.u}
    CheckFlags checks;
    bool record_timings = true;
    std::string output_dir = ".";
    SolverOptions solver;
};

/// Throws InvalidSpec on inconsistent dimensions or model parameters.
void validate(const ExperimentConfig& cfg);

/// Parses the documented JSON config schema. "dims" may be replaced by
/// "suggest": {p, t, c_n, c2, beta_m, m (optional override)}.
ExperimentConfig load_config(const std::string& path);

struct TrialRecord {
    std::size_t trial_index = 0;
    std::uint64_t seed = 0;
    bool factorization_matched = false;
    std::optional<double> rip_epsilon;
    bool pipeline_exact = false;
    bool direct_l1_exact = false;
    std::size_t supp_true = 0, supp_pipeline = 0, supp_direct = 0;
    double t_train_s = 0.0, t_recover_s = 0.0;
    std::optional<std::size_t> u_used;
    bool uniqueness_dims_ok = true;       // m >= 2 s t
    std::optional<bool> uniqueness_verified;  // brute-force result when attempted
    std::string error;                    // nonempty on a failed trial
};

/// One seeded end-to-end run: generate A, X, Z, z from per-trial derived
/// streams, form B = AXZ and b = AXz, run train_and_recover plus the direct
/// basis-pursuit baseline, and fill the record. Generation or solver errors
/// become a failed-trial record, never an exception.
TrialRecord run_trial(const ExperimentConfig& cfg, std::size_t trial_index);

struct ExperimentSummary {
    std::size_t trials = 0;
    double factorization_rate = 0.0;
    double pipeline_rate = 0.0;
    double direct_l1_rate = 0.0;
    std::optional<double> mean_rip_epsilon;
    std::size_t rip_trials = 0;
    double mean_t_train_s = 0.0;
    double mean_t_recover_s = 0.0;
    std::size_t failed_trials = 0;
    std::vector<TrialRecord> records;
};

/// Fixed CSV column order: trial_index, seed, factorization_matched,
/// rip_epsilon, pipeline_exact, direct_l1_exact, supp_true, supp_pipeline,
/// supp_direct, t_train_s, t_recover_s.
std::string trials_csv(const ExperimentConfig& cfg,
                       const std::vector<TrialRecord>& records);

/// Runs all trials on a worker pool (workers = 0: CSTRAIN_THREADS or
/// hardware concurrency) and writes <output_dir>/trials.csv plus
/// <output_dir>/summary.json. Output is independent of the worker count.
ExperimentSummary run_experiment(const ExperimentConfig& cfg,
                                 std::size_t workers = 0);

struct AssumptionCheck {
    std::string name;
    std::string status;  // "pass" | "fail" | "assumed"
    std::string detail;
};

/// Numeric evaluation of the training assumptions: the size
/// inequalities and stable-rank bound, uniqueness of u-sparse solutions by
/// brute force when 2u <= 14 fits the budget ("assumed" otherwise), and the
/// rank-p condition on X.
std::vector<AssumptionCheck> check_assumptions(const ExperimentConfig& cfg,
                                               const DenseMatrix& a,
                                               const DenseMatrix& x);

}  // namespace cstrain
