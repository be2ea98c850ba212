#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cartan/forms/grid.hpp"

namespace cartan::forms {

enum class ValueKind : std::uint8_t { Scalar = 0, FrameVector = 1, FrameMatrixAntisym = 2 };

/// What a form takes values in: plain reals, frame vectors v^a, or so(n) matrices A^a_b.
struct ValueType {
    ValueKind kind = ValueKind::Scalar;
    int frameDim = 0;

    static ValueType scalar() { return {}; }
    static ValueType vector(int n) { return {ValueKind::FrameVector, n}; }
    static ValueType antisym(int n) { return {ValueKind::FrameMatrixAntisym, n}; }

    /// Number of independent frame slots: 1, n, or n(n-1)/2.
    int slots() const;
    bool operator==(const ValueType&) const = default;
};

std::string toString(ValueType vt);

/// Slot of the strictly lower entry (a, b), a > b, of an antisymmetric matrix.
inline int antisymSlot(int a, int b) { return a * (a - 1) / 2 + b; }

/// Pointwise evaluation of a form: fills out[slot * C(dim,k) + component].
using PointEvaluator = std::function<void(const Point&, std::span<double>)>;

/// A k-form field sampled at the cells of a regular grid.
///
/// Storage is one contiguous array ordered (frame slot, basis component, grid
/// point), each grid block in C order. Antisymmetric matrices store only the
/// strictly lower triangle; entry(a, b) reflects with a sign for a < b and is
/// zero on the diagonal.
class FormField {
public:
    FormField(GridSpec grid, int degree, ValueType valueType);

    /// Sample an analytic form at every grid point.
    static FormField sample(GridSpec grid, int degree, ValueType valueType, const PointEvaluator& eval);
    /// Scalar 0-form from a function of position.
    static FormField scalarFunction(GridSpec grid, const std::function<double(const Point&)>& f);
    /// Frame-vector field assembled from scalar fields of equal degree, one per frame index.
    static FormField fromVectorComponents(const std::vector<FormField>& parts);

    const GridSpec& grid() const { return grid_; }
    int dim() const { return grid_.dim(); }
    int degree() const { return degree_; }
    ValueType valueType() const { return valueType_; }
    int componentCount() const { return components_; }
    int slotCount() const { return valueType_.slots(); }
    std::size_t pointCount() const { return grid_.pointCount(); }
    const std::vector<MultiIndex>& basis() const { return basisOf(dim(), degree_); }

    std::span<const double> component(int slot, int comp) const;
    std::span<double> component(int slot, int comp);
    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    /// Scalar form holding frame index a of a vector-valued field.
    FormField vectorComponent(int a) const;
    /// Scalar form holding A^a_b of a matrix-valued field (signed reflection for a < b).
    FormField matrixEntry(int a, int b) const;
    /// A^a_b coefficient of basis component comp at one grid point.
    double matrixValue(int a, int b, int comp, std::size_t point) const;

    double maxAbs() const;
    bool allFinite() const;
    bool sameShape(const FormField& other) const;

    FormField& operator+=(const FormField& other);
    FormField& operator-=(const FormField& other);
    FormField& operator*=(double s);

private:
    void requireSameShape(const FormField& other, const char* op) const;

    GridSpec grid_;
    int degree_;
    ValueType valueType_;
    int components_;
    std::vector<double> data_;
};

FormField operator+(FormField a, const FormField& b);
FormField operator-(FormField a, const FormField& b);
FormField operator*(double s, FormField a);

/// Degree-1 frame-vector field e^a = e^a_μ dx^μ.
class Coframe {
public:
    explicit Coframe(FormField e);
    /// e^a = dx^a on the given grid.
    static Coframe identity(const GridSpec& grid);
    const FormField& form() const { return e_; }
    const GridSpec& grid() const { return e_.grid(); }

private:
    FormField e_;
};

/// Degree-1 so(n)-valued field ω^a_b.
class ConnectionField {
public:
    explicit ConnectionField(FormField omega);
    static ConnectionField zero(const GridSpec& grid);
    const FormField& form() const { return omega_; }
    const GridSpec& grid() const { return omega_.grid(); }

private:
    FormField omega_;
};

/// Vector field v = v^μ ∂_μ sampled on a grid.
class VectorField {
public:
    VectorField(GridSpec grid, std::vector<std::vector<double>> components);
    static VectorField constant(const GridSpec& grid, const std::vector<double>& v);
    static VectorField sample(const GridSpec& grid, const std::function<Point(const Point&)>& f);

    const GridSpec& grid() const { return grid_; }
    std::span<const double> component(int axis) const { return components_[axis]; }

private:
    GridSpec grid_;
    std::vector<std::vector<double>> components_;
};

}  // namespace cartan::forms
