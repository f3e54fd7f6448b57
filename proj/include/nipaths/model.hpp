#pragma once

// Finite-N model of nonintersecting geometric walks.
//
// Lines are shifted to s = 0..2N. Step l (1..2N) moves from line l-1 to
// line l: for l <= N a walker jumps up by m with weight alpha_l^m, for
// l > N it jumps down by m with weight beta_{2N-l+1}^m. All indices in the
// public API are 1-based where they name a walker or a step, matching the
// usual notation, and 0-based for storage vectors.

#include <optional>
#include <vector>

namespace nipaths {

struct ModelParams {
    int n = 0;
    std::vector<int> k;
    std::vector<int> l;
    std::vector<double> alpha;
    std::vector<double> beta;
};

struct GridPoint {
    int s = 0;
    long x = 0;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
    friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

class ValidatedModel {
public:
    const ModelParams& params() const { return p_; }
    int n() const { return p_.n; }
    int lines() const { return 2 * p_.n; }
    double alpha(int j) const { return p_.alpha[static_cast<size_t>(j - 1)]; }
    double beta(int j) const { return p_.beta[static_cast<size_t>(j - 1)]; }
    int k(int j) const { return p_.k[static_cast<size_t>(j - 1)]; }
    int l(int j) const { return p_.l[static_cast<size_t>(j - 1)]; }

    bool distinct_beta() const { return distinct_beta_; }
    bool equal_beta() const { return equal_beta_; }
    // Spacing k when k_j = k(j-1) for all j.
    std::optional<int> equal_spacing() const { return spacing_; }

    // Rate attached to step l: alpha_l for l <= N, beta_{2N-l+1} otherwise.
    double step_rate(int step) const;
    bool step_is_up(int step) const { return step <= p_.n; }

    // Alphas of steps s_lo+1..min(s_hi,N) and betas of steps max(s_lo,N)+1..s_hi.
    std::vector<double> up_rates(int s_lo, int s_hi) const;
    std::vector<double> down_rates(int s_lo, int s_hi) const;

private:
    friend ValidatedModel validate(const ModelParams&);
    explicit ValidatedModel(ModelParams p);

    ModelParams p_;
    bool distinct_beta_ = false;
    bool equal_beta_ = false;
    std::optional<int> spacing_;
};

// Throws Error with the violated invariant on failure.
ValidatedModel validate(const ModelParams& params);

// Weight of one walker moving from x1 on line step-1 to x2 on line step.
double transition_weight(const ValidatedModel& m, int step, long x1, long x2);

struct PathConfig {
    // heights[j][s] for walker j = 0..N-1 and line s = 0..2N.
    std::vector<std::vector<long>> heights;

    std::vector<long> column(int s) const;
    friend bool operator==(const PathConfig&, const PathConfig&) = default;
};

// Checks boundary columns, strict ordering, monotonicity and interlacing of
// consecutive columns (the nonintersection condition for jumps). Throws
// InvalidConfig.
void validate_config(const ValidatedModel& m, const PathConfig& c);
bool is_valid_config(const ValidatedModel& m, const PathConfig& c);

// Product of single-walker transition weights, accumulated in log space.
double path_weight(const ValidatedModel& m, const PathConfig& c);

// Product over steps of det[T_step(x_i, y_j)] with the boundary columns
// matched against k and l. Zero for configurations whose paths would cross.
double path_weight_lgv(const ValidatedModel& m, const PathConfig& c);

}  // namespace nipaths
