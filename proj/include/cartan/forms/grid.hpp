#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cartan {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GridMismatchError : public Error {
public:
    using Error::Error;
};

class DegreeError : public Error {
public:
    using Error::Error;
};

class PairingError : public Error {
public:
    using Error::Error;
};

/// A point, surface or volume left the sampled domain.
class DomainError : public Error {
public:
    using Error::Error;
};

class ValueError : public Error {
public:
    using Error::Error;
};

}  // namespace cartan

namespace cartan::forms {

inline constexpr int kMaxDim = 4;

/// Coordinates of a point; entries past the grid dimension are ignored.
using Point = std::array<double, kMaxDim>;
using GridIndex = std::array<int, kMaxDim>;

/// Regular Cartesian grid with cell-centred samples.
///
/// Axis 0 is the slowest-varying index of the flat (C-order) layout. Sample i
/// along axis a sits at lower(a) + (i + 1/2) * spacing(a).
class GridSpec {
public:
    GridSpec(int dim, std::vector<std::pair<double, double>> extents, std::vector<int> resolution);

    int dim() const { return dim_; }
    double lower(int axis) const { return extents_[axis].first; }
    double upper(int axis) const { return extents_[axis].second; }
    double length(int axis) const { return upper(axis) - lower(axis); }
    double spacing(int axis) const { return spacing_[axis]; }
    int resolution(int axis) const { return resolution_[axis]; }
    const std::vector<std::pair<double, double>>& extents() const { return extents_; }
    const std::vector<int>& resolutions() const { return resolution_; }

    std::size_t pointCount() const { return pointCount_; }
    std::size_t stride(int axis) const { return stride_[axis]; }
    double cellVolume() const;

    double coordinate(int axis, int index) const {
        return lower(axis) + (static_cast<double>(index) + 0.5) * spacing(axis);
    }
    GridIndex unflatten(std::size_t flat) const;
    std::size_t flatten(const GridIndex& idx) const;
    Point point(std::size_t flat) const;

    /// True when the point lies in the closed box spanned by the extents.
    bool contains(const Point& p, double slack = 0.0) const;

    /// Copy with the resolution of the listed axes multiplied by factor.
    GridSpec refined(int factor, const std::vector<int>& axes) const;
    /// Copy with every axis resolution multiplied by factor.
    GridSpec refined(int factor) const;

    bool operator==(const GridSpec& other) const;
    bool operator!=(const GridSpec& other) const { return !(*this == other); }

private:
    int dim_;
    std::vector<std::pair<double, double>> extents_;
    std::vector<int> resolution_;
    std::vector<double> spacing_;
    std::vector<std::size_t> stride_;
    std::size_t pointCount_ = 0;
};

/// Increasing list of coordinate axes labelling one basis k-form dx^{i1}∧…∧dx^{ik}.
using MultiIndex = std::vector<int>;

int binomial(int n, int k);

/// Basis multi-indices of degree k in dimension n, lexicographic order.
const std::vector<MultiIndex>& basisOf(int dim, int degree);

/// Position of a multi-index in basisOf(dim, idx.size()); -1 when absent.
int basisIndex(int dim, const MultiIndex& idx);

/// Sign of the permutation sorting the concatenation (a, b); 0 if they overlap.
int concatenationSign(const MultiIndex& a, const MultiIndex& b);

std::string basisLabel(const MultiIndex& idx);

}  // namespace cartan::forms
