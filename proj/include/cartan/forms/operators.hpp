#pragma once

#include "cartan/forms/form_field.hpp"

namespace cartan::forms {

/// How frame indices of two operands combine under the wedge product.
enum class FramePairing {
    None,            ///< at least one operand is scalar; the other's value type is kept
    ContractVector,  ///< Σ_a a^a ∧ b^a
    MatrixVector,    ///< (A ∧ v)^a = Σ_b A^a_b ∧ v^b
    Commutator,      ///< [A, B]^a_b = Σ_c A^a_c ∧ B^c_b − (−1)^{pq} B^a_c ∧ A^c_b
    AntisymOuter,    ///< X^{ab} = u^a ∧ v^b − u^b ∧ v^a
    Trace,           ///< Σ_{a,b} A^a_b ∧ B^b_a
};

FormField wedge(const FormField& a, const FormField& b, FramePairing pairing = FramePairing::None);

/// Centred differences in the interior, second-order one-sided on the first and
/// last sample of each axis. Throws DegreeError for top-degree input.
FormField exteriorDerivative(const FormField& a);

/// Euclidean Hodge dual for the orientation dx^1∧…∧dx^n.
FormField hodgeStar(const FormField& a);

FormField interiorProduct(const VectorField& v, const FormField& a);

/// D a = d a + ω∧a for frame vectors, d a + [ω, a] for so(n)-valued forms.
FormField covariantDerivative(const FormField& a, const ConnectionField& omega);

/// Derivative of a sampled function along one axis, same stencils as exteriorDerivative.
std::vector<double> partialDerivative(const GridSpec& grid, std::span<const double> f, int axis);

}  // namespace cartan::forms
