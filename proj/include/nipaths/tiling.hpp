#pragma once

// Lozenge tilings of the staircase domain and their bijection with path
// configurations whose endpoints are packed (l_j = j - 1).
//
// Geometry. Vertical lines sit at i = -N..N and rows at integer heights r,
// each row covering [r - 1/2, r + 1/2]. Strip c = 0..2N-1 lies between lines
// c - N and c - N + 1; its unit squares are cut by the down-right diagonal
// into a lower-left triangle L(c, r) and an upper-right triangle U(c, r).
//   a: L(c, r) + U(c, r)          (square)
//   b: U(c, r) + L(c, r + 1)      (vertical and diagonal edges)
//   c: U(c, r) + L(c + 1, r)      (horizontal and diagonal edges)
// The left boundary has notches L(0, k_j). Each lozenge contains exactly one
// U triangle, so the tiling is a map (c, r) -> type. Only rows 0..height are
// stored; above that the left half continues with a and the right half with b.
//
// Stored coordinates: a and b use (left line of the strip, row); c uses the
// line it straddles and its row.

#include <string>
#include <vector>

#include "nipaths/model.hpp"

namespace nipaths {

enum class LozengeType { A, B, C };

struct Lozenge {
    LozengeType type = LozengeType::A;
    int i = 0;
    long j = 0;

    friend bool operator==(const Lozenge&, const Lozenge&) = default;
};

char lozenge_letter(LozengeType t);

struct Tiling {
    int n = 0;
    std::vector<int> k;
    long height = 0;  // top stored row
    std::vector<Lozenge> lozenges;  // sorted by strip, then row

    friend bool operator==(const Tiling&, const Tiling&) = default;
};

// Throws EndpointsNotPacked unless the last column is 0..N-1, and
// InvalidConfig for configurations violating nonintersection.
Tiling paths_to_tiling(const PathConfig& config);
// Same with an explicit clip height (must be at least the default).
Tiling paths_to_tiling(const PathConfig& config, long height);

// Throws InconsistentTiling when the lozenges do not come from a path
// configuration.
PathConfig tiling_to_paths(const Tiling& t);

// True when every stored triangle is covered exactly once and the notches
// are left empty.
bool covers_domain(const Tiling& t);

// Staircase configuration: flat left half, maximal drops on the right.
PathConfig staircase_config(const std::vector<int>& k);

struct TilingWeightSpec {
    std::vector<double> alpha;
    std::vector<double> beta;

    static TilingWeightSpec from_q(int n, double q);  // alpha_i = beta_i = q^{1/2 + N - i}
};

// Product over c lozenges of the column factor raised to the row.
double tiling_log_weight(const Tiling& t, const TilingWeightSpec& spec);
double tiling_weight(const Tiling& t, const TilingWeightSpec& spec);

struct RenderOptions {
    bool overlay_paths = false;
    double unit = 20.0;  // pixels per lattice edge
};

std::string render_svg(const Tiling& t, const RenderOptions& opt = {});
std::string render_ascii(const Tiling& t);

}  // namespace nipaths
