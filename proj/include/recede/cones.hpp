#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "recede/models.hpp"

namespace recede {

enum class ConeKind { zero, whole, polyhedral, ray_union, sampled };

// Homogeneous by construction: only direction constraints are stored, so the
// represented set is closed under positive scaling.
struct ConeRep {
  ConeKind kind = ConeKind::zero;
  int dim = 0;
  Eigen::MatrixXd A;                   // polyhedral {u : Au <= 0}; rows unit length
  std::vector<ConeRep> pieces;         // ray_union
  std::vector<Eigen::VectorXd> dirs;   // sampled (unit vectors)
  double resolution = 0.02;            // sampled: angular acceptance
};

ConeRep make_zero_cone(int dim);
ConeRep make_whole_cone(int dim);
// Rows are normalized; a cone that only contains 0 collapses to kind=zero,
// an empty row set to kind=whole.
ConeRep make_polyhedral_cone(const Eigen::MatrixXd& a_rows, int dim);
ConeRep make_ray_union(std::vector<ConeRep> pieces);
ConeRep make_sampled_cone(std::vector<Eigen::VectorXd> dirs, double resolution);

// Exact recession cone for the structured set kinds. Throws EmptySet.
ConeRep asymptotic_cone(const SetModel& x_set);

bool cone_contains(const ConeRep& c, const Eigen::VectorXd& u, double tol = 1e-9);

// k unit directions in the cone, deterministic in (seed, k). Sphere proposals
// pushed into the cone by cyclic halfspace corrections, rejected if they
// collapse toward the apex.
std::vector<Eigen::VectorXd> sample_cone_unit(const ConeRep& c, int k, std::uint64_t seed);

// Some u != 0 with a_eq u = 0 and a_in u <= 0, or nullopt. Decided exactly by
// 2n LPs with the normalization u_i = +/-1.
std::optional<Eigen::VectorXd> cone_has_nonzero(const Eigen::MatrixXd& a_eq,
                                                const Eigen::MatrixXd& a_in);

// Euclidean projection onto {v : Av <= 0} by active-set enumeration (exact at
// desk scale; m <= 16).
Eigen::VectorXd project_onto_halfspace_cone(const Eigen::MatrixXd& a_rows, const Eigen::VectorXd& u);

// Euclidean projection onto cone{columns of g} (nonnegative combinations) by
// support enumeration; used for distances to finitely generated cones.
Eigen::VectorXd project_onto_generated_cone(const Eigen::MatrixXd& g, const Eigen::VectorXd& u);

// Definition-based estimate: directions along which feasible points of norm
// >= reach_lo exist (found by ray marching from the anchor). Test oracle and
// fallback for membership-only sets.
ConeRep probe_cone(const std::function<bool(const Eigen::VectorXd&)>& member_pred,
                   const Eigen::VectorXd& anchor, int count, std::uint64_t seed,
                   double reach_lo = 1e3, double reach_hi = 1e4, double resolution = 0.02);

const char* cone_kind_name(ConeKind k);

}  // namespace recede
