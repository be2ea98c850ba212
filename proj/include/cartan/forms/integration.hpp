#pragma once

#include <optional>
#include <vector>

#include "cartan/forms/form_field.hpp"

namespace cartan::forms {

/// A form that can be evaluated at arbitrary points: an analytic closure or an
/// interpolated grid field. The optional domain bounds where evaluation is valid.
struct FormEvaluator {
    int dim = 3;
    int degree = 0;
    ValueType valueType;
    PointEvaluator eval;
    std::optional<GridSpec> domain;

    int componentCount() const { return binomial(dim, degree); }
    int slotCount() const { return valueType.slots(); }
};

/// Multilinear interpolation between cell centres; constant extrapolation in
/// the half cell next to each boundary face.
FormEvaluator interpolate(const FormField& field);

/// Parametrised 2-surface x(u, v) over [u0,u1]×[v0,v1]; orientation ∂u∧∂v.
struct Surface {
    int dim = 3;
    double u0 = 0, u1 = 1, v0 = 0, v1 = 1;
    std::function<Point(double, double)> map;
    std::function<std::pair<Point, Point>(double, double)> tangents;

    /// Disk in the (axisU, axisV) coordinate plane through center, oriented dx^U∧dx^V.
    static Surface disk(int dim, const Point& center, double radius, int axisU = 0, int axisV = 1);
    /// Axis-aligned rectangle [lo,hi] in the (axisU, axisV) plane through base.
    static Surface rectangle(int dim, const Point& base, int axisU, std::pair<double, double> u, int axisV,
                             std::pair<double, double> v);
};

/// Closed curve x(t), t in [0,1), traversed once.
struct Loop {
    int dim = 3;
    std::function<Point(double)> map;
    std::function<Point(double)> tangent;

    /// Counter-clockwise circle in the (axisU, axisV) plane.
    static Loop circle(int dim, const Point& center, double radius, int axisU = 0, int axisV = 1);
    /// Counter-clockwise axis-aligned rectangle with corners lo, hi in the (axisU, axisV) plane.
    static Loop rectangle(int dim, const Point& base, int axisU, std::pair<double, double> u, int axisV,
                          std::pair<double, double> v);
};

inline constexpr int kDefaultSurfaceSamples = 256;
inline constexpr int kDefaultLoopSamples = 512;

/// Midpoint rule on the parameter rectangle of the pulled-back 2-form. One
/// value per frame slot.
std::vector<double> integrateOverSurface(const FormEvaluator& form, const Surface& surface,
                                         int samplesU = kDefaultSurfaceSamples,
                                         int samplesV = kDefaultSurfaceSamples);
std::vector<double> integrateOverSurface(const FormField& form, const Surface& surface,
                                         int samplesU = kDefaultSurfaceSamples,
                                         int samplesV = kDefaultSurfaceSamples);

/// Midpoint rule over one period of the pulled-back 1-form. One value per frame slot.
std::vector<double> integrateOverLoop(const FormEvaluator& form, const Loop& loop,
                                      int samples = kDefaultLoopSamples);
std::vector<double> integrateOverLoop(const FormField& form, const Loop& loop, int samples = kDefaultLoopSamples);

/// Region of the (x, y, z) subspace for 3-form integrals; further axes are
/// fixed at their middle sample.
struct Volume {
    enum class Shape { Box, Tube };
    Shape shape = Shape::Box;
    std::array<std::pair<double, double>, 3> box{};  ///< Box: per-axis range
    std::array<double, 2> axis{};                     ///< Tube: centre in the xy-plane
    double radius = 0;                                ///< Tube
    std::pair<double, double> zRange{};               ///< Tube

    static Volume makeBox(std::pair<double, double> x, std::pair<double, double> y, std::pair<double, double> z);
    static Volume cube(const Point& center, double side);
    static Volume tube(std::array<double, 2> axis, double radius, std::pair<double, double> z);
    std::string describe() const;
};

/// Integral of the dx∧dy∧dz component over the region, one value per frame
/// slot. Cells are weighted by their overlap with the region: exact per-axis
/// fractions for boxes, 8×8 sub-sampling of the cross-section for tubes.
std::vector<double> integrateOverVolume(const FormField& form, const Volume& volume);

/// Integral of a top-degree form over the whole grid.
std::vector<double> integrateTopForm(const FormField& form);

}  // namespace cartan::forms
