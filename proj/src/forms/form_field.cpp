#include "cartan/forms/form_field.hpp"

#include <algorithm>
#include <cmath>

namespace cartan::forms {

int ValueType::slots() const {
    switch (kind) {
        case ValueKind::Scalar: return 1;
        case ValueKind::FrameVector: return frameDim;
        case ValueKind::FrameMatrixAntisym: return frameDim * (frameDim - 1) / 2;
    }
    return 1;
}

std::string toString(ValueType vt) {
    switch (vt.kind) {
        case ValueKind::Scalar: return "scalar";
        case ValueKind::FrameVector: return "vector(" + std::to_string(vt.frameDim) + ")";
        case ValueKind::FrameMatrixAntisym: return "antisym(" + std::to_string(vt.frameDim) + ")";
    }
    return "?";
}

FormField::FormField(GridSpec grid, int degree, ValueType valueType)
    : grid_(std::move(grid)), degree_(degree), valueType_(valueType) {
    if (degree_ < 0 || degree_ > grid_.dim()) {
        throw DegreeError("form degree " + std::to_string(degree_) + " out of range for dimension " +
                          std::to_string(grid_.dim()));
    }
    if (valueType_.kind != ValueKind::Scalar && valueType_.frameDim < 2) {
        throw ValueError("frame-valued forms need at least two frame indices");
    }
    if (valueType_.kind == ValueKind::Scalar) valueType_.frameDim = 0;
    components_ = binomial(grid_.dim(), degree_);
    data_.assign(static_cast<std::size_t>(valueType_.slots()) * components_ * grid_.pointCount(), 0.0);
}

FormField FormField::sample(GridSpec grid, int degree, ValueType valueType, const PointEvaluator& eval) {
    FormField f(std::move(grid), degree, valueType);
    const std::size_t n = f.pointCount();
    const int blocks = f.slotCount() * f.componentCount();
    std::vector<double> buf(blocks);
    for (std::size_t p = 0; p < n; ++p) {
        std::fill(buf.begin(), buf.end(), 0.0);
        eval(f.grid_.point(p), buf);
        for (int b = 0; b < blocks; ++b) f.data_[static_cast<std::size_t>(b) * n + p] = buf[b];
    }
    if (!f.allFinite()) throw ValueError("sampled form has non-finite coefficients");
    return f;
}

FormField FormField::scalarFunction(GridSpec grid, const std::function<double(const Point&)>& fn) {
    return sample(std::move(grid), 0, ValueType::scalar(),
                  [&](const Point& p, std::span<double> out) { out[0] = fn(p); });
}

FormField FormField::fromVectorComponents(const std::vector<FormField>& parts) {
    if (parts.size() < 2) throw ValueError("a frame vector needs at least two components");
    for (const auto& part : parts) {
        if (part.valueType_.kind != ValueKind::Scalar) throw PairingError("vector components must be scalar forms");
        if (part.grid_ != parts[0].grid_) throw GridMismatchError("vector components live on different grids");
        if (part.degree_ != parts[0].degree_) throw DegreeError("vector components have different degrees");
    }
    FormField out(parts[0].grid_, parts[0].degree_, ValueType::vector(static_cast<int>(parts.size())));
    const std::size_t block = static_cast<std::size_t>(out.components_) * out.pointCount();
    for (std::size_t a = 0; a < parts.size(); ++a) {
        std::copy(parts[a].data_.begin(), parts[a].data_.end(), out.data_.begin() + a * block);
    }
    return out;
}

std::span<const double> FormField::component(int slot, int comp) const {
    const std::size_t n = pointCount();
    return {data_.data() + (static_cast<std::size_t>(slot) * components_ + comp) * n, n};
}

std::span<double> FormField::component(int slot, int comp) {
    const std::size_t n = pointCount();
    return {data_.data() + (static_cast<std::size_t>(slot) * components_ + comp) * n, n};
}

FormField FormField::vectorComponent(int a) const {
    if (valueType_.kind != ValueKind::FrameVector) throw PairingError("vectorComponent needs a frame-vector form");
    if (a < 0 || a >= valueType_.frameDim) throw ValueError("frame index out of range");
    FormField out(grid_, degree_, ValueType::scalar());
    for (int c = 0; c < components_; ++c) {
        auto src = component(a, c);
        std::copy(src.begin(), src.end(), out.component(0, c).begin());
    }
    return out;
}

FormField FormField::matrixEntry(int a, int b) const {
    if (valueType_.kind != ValueKind::FrameMatrixAntisym) throw PairingError("matrixEntry needs a matrix-valued form");
    const int n = valueType_.frameDim;
    if (a < 0 || b < 0 || a >= n || b >= n) throw ValueError("frame index out of range");
    FormField out(grid_, degree_, ValueType::scalar());
    if (a == b) return out;
    const int slot = a > b ? antisymSlot(a, b) : antisymSlot(b, a);
    const double sign = a > b ? 1.0 : -1.0;
    for (int c = 0; c < components_; ++c) {
        auto src = component(slot, c);
        auto dst = out.component(0, c);
        for (std::size_t p = 0; p < src.size(); ++p) dst[p] = sign * src[p];
    }
    return out;
}

double FormField::matrixValue(int a, int b, int comp, std::size_t point) const {
    if (a == b) return 0.0;
    if (a > b) return component(antisymSlot(a, b), comp)[point];
    return -component(antisymSlot(b, a), comp)[point];
}

double FormField::maxAbs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool FormField::allFinite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

bool FormField::sameShape(const FormField& other) const {
    return grid_ == other.grid_ && degree_ == other.degree_ && valueType_ == other.valueType_;
}

void FormField::requireSameShape(const FormField& other, const char* op) const {
    if (grid_ != other.grid_) throw GridMismatchError(std::string(op) + ": grid mismatch");
    if (degree_ != other.degree_ || valueType_ != other.valueType_) {
        throw DegreeError(std::string(op) + ": operands differ in degree or value type");
    }
}

FormField& FormField::operator+=(const FormField& other) {
    requireSameShape(other, "add");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

FormField& FormField::operator-=(const FormField& other) {
    requireSameShape(other, "subtract");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

FormField& FormField::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

FormField operator+(FormField a, const FormField& b) { return a += b; }
FormField operator-(FormField a, const FormField& b) { return a -= b; }
FormField operator*(double s, FormField a) { return a *= s; }

Coframe::Coframe(FormField e) : e_(std::move(e)) {
    if (e_.degree() != 1 || e_.valueType().kind != ValueKind::FrameVector) {
        throw ValueError("a coframe is a frame-vector valued 1-form");
    }
}

Coframe Coframe::identity(const GridSpec& grid) {
    FormField e(grid, 1, ValueType::vector(grid.dim()));
    for (int a = 0; a < grid.dim(); ++a) {
        auto c = e.component(a, a);
        std::fill(c.begin(), c.end(), 1.0);
    }
    return Coframe(std::move(e));
}

ConnectionField::ConnectionField(FormField omega) : omega_(std::move(omega)) {
    if (omega_.degree() != 1 || omega_.valueType().kind != ValueKind::FrameMatrixAntisym) {
        throw ValueError("a connection is an antisymmetric-matrix valued 1-form");
    }
}

ConnectionField ConnectionField::zero(const GridSpec& grid) {
    return ConnectionField(FormField(grid, 1, ValueType::antisym(grid.dim())));
}

VectorField::VectorField(GridSpec grid, std::vector<std::vector<double>> components)
    : grid_(std::move(grid)), components_(std::move(components)) {
    if (static_cast<int>(components_.size()) != grid_.dim()) {
        throw ValueError("vector field needs one component array per axis");
    }
    for (const auto& c : components_) {
        if (c.size() != grid_.pointCount()) throw ValueError("vector field component has wrong size");
    }
}

VectorField VectorField::constant(const GridSpec& grid, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != grid.dim()) throw ValueError("constant vector has wrong dimension");
    std::vector<std::vector<double>> comps(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) comps[a].assign(grid.pointCount(), v[a]);
    return VectorField(grid, std::move(comps));
}

VectorField VectorField::sample(const GridSpec& grid, const std::function<Point(const Point&)>& f) {
    std::vector<std::vector<double>> comps(grid.dim(), std::vector<double>(grid.pointCount()));
    for (std::size_t p = 0; p < grid.pointCount(); ++p) {
        const Point v = f(grid.point(p));
        for (int a = 0; a < grid.dim(); ++a) comps[a][p] = v[a];
    }
    return VectorField(grid, std::move(comps));
}

}  // namespace cartan::forms
