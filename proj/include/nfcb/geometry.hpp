// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#ifndef NFCB_GEOMETRY_HPP
#define NFCB_GEOMETRY_HPP

#include "nfcb/types.hpp"

namespace nfcb {

// Element positions in meters, one row per element, centered on the origin.
// ULA: total x 2, elements on the y-axis at y_n = (n - (N+1)/2) d.
// UPA: total x 3 on the xy-plane, row-major over the (m, n) grid.
Eigen::MatrixXd element_coordinates(const ArrayConfig& cfg);

// Euclidean distance from element `index` (row-major) to the UE at
// (r cos(theta), r sin(theta)) for ULA or
// (r sin(theta)cos(phi), r sin(theta)sin(phi), r cos(theta)) for UPA.
double exact_distance(const ArrayConfig& cfg, long index, const PhysicalPosition& ue);

// Second-order expansion of exact_distance:
// ULA: r - sin(theta) y + cos^2(theta) y^2 / (2r)
// UPA: five-term expansion including the cross term -sin^2(theta)cos(phi)sin(phi) x y / r.
double fresnel_distance(const ArrayConfig& cfg, long index, const PhysicalPosition& ue);

// Unit-norm focusing vector with element phases -k (r_n - r) under the chosen
// distance model (Exact or Fresnel).
BeamVector beam_focusing(const ArrayConfig& cfg, const PhysicalPosition& ue, PhaseModel model);

// Plane-wave steering vector, first element real positive:
// ULA: exp(j k (n-1) d sin(theta)); UPA: Kronecker product of the per-axis vectors.
BeamVector far_field_steering(const ArrayConfig& cfg, double theta_rad, double phi_rad = 0.0);

// Physical <-> transform coordinates. from_transform throws std::domain_error
// on |beta| > 1 or psi^2 + varphi^2 > 1; alpha = 0 / rho = 0 map to r = +inf.
TransformPoint to_transform(const ArrayConfig& cfg, const PhysicalPosition& ue);
PhysicalPosition from_transform(const ArrayConfig& cfg, const TransformPoint& tp);

RegionBounds region_bounds(const ArrayConfig& cfg);

// Near-field LoS channel h = sqrt(total) * g * b, g = sqrt(eta) exp(-jkr)/r.
ChannelVector channel(const ArrayConfig& cfg, const PhysicalPosition& ue, double eta,
                      PhaseModel model);

// Fresnel-phase beam vector synthesized directly from transform coordinates.
// Defined for any (psi, varphi, rho) box point, including grid points outside
// the physical disc psi^2 + varphi^2 <= 1; coincides with
// beam_focusing(from_transform(tp), Fresnel) on the physical domain.
BeamVector beam_from_transform(const ArrayConfig& cfg, const TransformPoint& tp);

// Writes the transform-synthesized beam into a preallocated column (real/float
// paths share one phase rule). Used by the blocked codeword pipelines.
template <typename Scalar>
void synth_beam_column(const ArrayConfig& cfg, const TransformPoint& tp,
                       Eigen::Ref<CVec<Scalar>> out);

extern template void synth_beam_column<double>(const ArrayConfig&, const TransformPoint&,
                                               Eigen::Ref<CVec<double>>);
extern template void synth_beam_column<float>(const ArrayConfig&, const TransformPoint&,
                                              Eigen::Ref<CVec<float>>);

}  // namespace nfcb

#endif  // NFCB_GEOMETRY_HPP
