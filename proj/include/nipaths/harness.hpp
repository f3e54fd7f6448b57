#pragma once

// Convergence experiments for the limit theorems, and the density figure
// recipes. Every report is a pure function of its configuration.

#include <string>
#include <utility>
#include <vector>

#include "nipaths/kernel_limit.hpp"

namespace nipaths {

struct ConvergenceReport {
    std::string experiment;
    std::string parameter;       // name of the swept parameter
    std::vector<double> values;  // swept parameter values
    std::vector<double> errors;  // sup error over the query window
    std::vector<double> ratios;  // errors[i+1] / errors[i]
    bool pass = false;
    std::string rule;
    std::vector<std::pair<std::string, double>> extras;
};

// Strict decrease; values below `floor` count as converged and compare equal.
bool strictly_decreasing(const std::vector<double>& errors, double floor = 1e-13);

struct Thm3Config {
    int k = 2;
    double xi = 0.5;
    double alpha = 2.0 / 3.0;
    double beta = 2.0 / 3.0;
    int s_max = 4;
    int x_radius = -1;  // -1 means 2k
    std::vector<int> n_list{10, 20, 40};
    double ratio_bound = 0.5;  // last/first; <= 0 disables
    int threads = 1;
};

// gamma_j = (xi/(1-xi))^{1/k} beta alpha_j
double thm3_gamma_scale(int k, double xi, double beta);
long thm3_offset(int k, double xi, int n);  // k * round(xi N)

ConvergenceReport thm3_convergence(const Thm3Config& cfg);

struct Prop1Config {
    int k = 2;
    double gamma_bulk = 0.5;
    std::vector<double> gamma_prefix{0.3, 0.5, 0.2};
    int s_max = 2;
    int x_radius = 2;
    std::vector<int> s_list{8, 16, 32, 64};
    double ratio_lo = 0.0;  // per-doubling ratio window; hi <= 0 disables
    double ratio_hi = 0.0;
    int threads = 1;
};

ConvergenceReport prop1_convergence(const Prop1Config& cfg);

struct Prop2Config {
    std::vector<double> gamma{0.4, 0.4, 0.4, 0.4};
    int s_max = 3;
    long x_lo = -1;
    long x_hi = 4;
    std::vector<int> k_list{5, 10, 20, 40};
    int threads = 1;
};

// Also records the largest equal-time 2x2 determinant of the limit kernel
// ("rank_one_det") and the largest single walker law mismatch.
ConvergenceReport prop2_convergence(const Prop2Config& cfg);

struct Prop3Config {
    double gamma = 0.5;
    double sigma = 0.25;
    std::vector<double> etas{-0.5, -0.25, 0.0, 0.25, 0.5};
    std::vector<int> k_list{8, 16, 32};
    int threads = 1;
};

ConvergenceReport prop3_convergence(const Prop3Config& cfg);

struct VarianceConfig {
    int k = 2;
    std::vector<double> gamma{0.4, 0.4, 0.4};
    std::vector<int> s_list{1, 2, 3};
    std::vector<long> l_list{10, 20, 30, 40, 50};
    long center = 0;  // interval [center, center + 2L]
    double increment_limit = 0.05;
    int threads = 1;
};

struct VarianceRow {
    int s = 0;
    long half_width = 0;
    double variance = 0.0;
};

struct VarianceReport {
    std::vector<VarianceRow> rows;
    std::vector<VarianceRow> sine_rows;  // s = 0 marks the control
    bool saturated = false;              // bounds and late increments hold
    bool sine_grows = false;             // control follows the log law within 25%
    bool pass = false;
    std::vector<std::string> notes;
};

VarianceReport variance_saturation(const VarianceConfig& cfg);

struct DensityFigureConfig {
    int k = 2;
    double alpha = 2.0 / 3.0;
    double beta = 2.0 / 3.0;
    int n = 50;
    std::vector<int> s_list{1, 3, 5, 7};
    int threads = 1;
};

struct DensityRow {
    int s = 0;
    int block = 0;  // xi = block / N
    int x = 0;      // 0 <= x < k
    long axis = 0;  // block * k + x
    double xi = 0.0;
    double gamma = 0.0;
    double density = 0.0;
};

struct PeriodicityVerdict {
    int s = 0;
    int detected_period = 0;
    double score = 0.0;                // lag correlation at the detected period
    double amplitude_variation = 0.0;  // relative spread of per-block amplitudes
    bool pass = false;
};

struct DensityFigure {
    std::vector<DensityRow> rows;
    std::vector<int> skipped_blocks;  // gamma >= 1 there
    std::vector<PeriodicityVerdict> verdicts;
    bool pass = false;
};

DensityFigure density_figure(const DensityFigureConfig& cfg);

// Smallest lag in [2, max_period] at which the lag correlation of the
// series has a local maximum of at least 0.5 and within 80% of the best
// lag; 0 when none qualifies.
PeriodicityVerdict detect_period(const std::vector<double>& series, int block_len, int max_period = 10);

}  // namespace nipaths
