#pragma once

// Finite-N correlation kernel K(s1,x1;s2,x2) in shifted coordinates, with
// several independent evaluation routes used to cross-check each other.

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "nipaths/model.hpp"
#include "nipaths/series.hpp"

namespace nipaths {

enum class FiniteRoute {
    Auto,
    General,          // biorthogonal formula; simplified form for s <= N
    GeneralFull,      // biorthogonal formula with both sides series-evaluated, any s
    EqualDistinct,    // equal spacing, simple-pole residues
    EqualQuadrature,  // equal spacing, double integral with a circle quadrature inside
    EqualConfluent,   // equal spacing, all beta equal, exact Taylor expansion in high precision
    EynardMehta,      // Gramm matrix inverted numerically
};

const char* route_name(FiniteRoute r);
FiniteRoute route_from_name(const std::string& name);

struct KernelValue {
    double value = 0.0;
    double err_estimate = 0.0;
    FiniteRoute route = FiniteRoute::Auto;
};

class FiniteKernel {
public:
    FiniteKernel(const ValidatedModel& model, FiniteRoute route = FiniteRoute::Auto, double tol = 1e-12);
    ~FiniteKernel();
    FiniteKernel(FiniteKernel&&) noexcept;

    KernelValue evaluate(GridPoint p1, GridPoint p2) const;
    double operator()(GridPoint p1, GridPoint p2) const { return evaluate(p1, p2).value; }

    FiniteRoute route() const { return route_; }
    const ValidatedModel& model() const { return model_; }

    struct Impl;

private:
    ValidatedModel model_;
    FiniteRoute route_;
    std::unique_ptr<Impl> impl_;
};

// Route picked by Auto for this model.
FiniteRoute default_route(const ValidatedModel& model);

// -1_{s1>s2} times the coefficient of z^{x1-x2} in prod_{steps s2+1..s1} F.
double indicator_term(const ValidatedModel& model, GridPoint p1, GridPoint p2);

double kernel_general(const ValidatedModel& model, GridPoint p1, GridPoint p2);
double kernel_equal_spacing(const ValidatedModel& model, GridPoint p1, GridPoint p2);
double em_reference(const ValidatedModel& model, GridPoint p1, GridPoint p2);

struct EMDecomposition {
    Eigen::MatrixXd gramm;
    Eigen::MatrixXd gramm_tilde;
    Eigen::VectorXd gramm_tilde_closed_form;  // diagonal predicted by the residue computation
    double gramm_condition = 0.0;
};

// Requires pairwise distinct beta for the biorthogonalized part.
EMDecomposition em_decomposition(const ValidatedModel& model);

// Exact confluent evaluation (all beta equal, k_j = k(j-1)) of the non-indicator
// part, computed in 100-digit arithmetic. Exposed for the harness.
struct ConfluentValue {
    double value = 0.0;
    double err_estimate = 0.0;
};
class ConfluentKernel {
public:
    explicit ConfluentKernel(const ValidatedModel& model);
    ~ConfluentKernel();
    ConfluentValue rank_part(GridPoint p1, GridPoint p2) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace nipaths
