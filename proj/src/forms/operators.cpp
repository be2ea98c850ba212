#include "cartan/forms/operators.hpp"

#include <algorithm>
#include <array>
#include <tuple>

namespace cartan::forms {

namespace {

struct FrameTerm {
    int result;
    int left;
    int right;
    double weight;
};

struct BasisTerm {
    int left;
    int right;
    int result;
    double sign;
    // order-independent key of the operand pair; sums into one result
    // component run in key order so wedge(a,b) and wedge(b,a) round identically
    std::array<int, 4> key;
};

// Signed slot of A^a_b in lower-triangle storage.
std::pair<int, double> matrixSlot(int a, int b) {
    return a > b ? std::pair{antisymSlot(a, b), 1.0} : std::pair{antisymSlot(b, a), -1.0};
}

void requireFrames(const FormField& a, ValueKind ka, const FormField& b, ValueKind kb, const char* what) {
    if (a.valueType().kind != ka || b.valueType().kind != kb) {
        throw PairingError(std::string("incompatible frame pairing for ") + what + ": " +
                           toString(a.valueType()) + " with " + toString(b.valueType()));
    }
    if (a.valueType().frameDim != b.valueType().frameDim) {
        throw PairingError(std::string(what) + ": frame dimensions differ");
    }
}

std::vector<FrameTerm> frameTerms(const FormField& a, const FormField& b, FramePairing pairing, ValueType& out) {
    std::vector<FrameTerm> terms;
    const int n = std::max(a.valueType().frameDim, b.valueType().frameDim);
    switch (pairing) {
        case FramePairing::None: {
            const bool sa = a.valueType().kind == ValueKind::Scalar;
            const bool sb = b.valueType().kind == ValueKind::Scalar;
            if (!sa && !sb) {
                throw PairingError("incompatible frame pairing: both operands are frame-valued; choose a pairing");
            }
            out = sa ? b.valueType() : a.valueType();
            for (int s = 0; s < out.slots(); ++s) terms.push_back({s, sa ? 0 : s, sb ? 0 : s, 1.0});
            break;
        }
        case FramePairing::ContractVector:
            requireFrames(a, ValueKind::FrameVector, b, ValueKind::FrameVector, "contract-vector");
            out = ValueType::scalar();
            for (int i = 0; i < n; ++i) terms.push_back({0, i, i, 1.0});
            break;
        case FramePairing::MatrixVector:
            requireFrames(a, ValueKind::FrameMatrixAntisym, b, ValueKind::FrameVector, "matrix-vector");
            out = ValueType::vector(n);
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) {
                    if (r == c) continue;
                    const auto [slot, sign] = matrixSlot(r, c);
                    terms.push_back({r, slot, c, sign});
                }
            }
            break;
        case FramePairing::Commutator:
            // [A,B]_rs = Σ_c A_rc∧B_cs − A_cs∧B_rc, the graded sign absorbed by
            // reordering the second product to put A first.
            requireFrames(a, ValueKind::FrameMatrixAntisym, b, ValueKind::FrameMatrixAntisym, "commutator");
            out = ValueType::antisym(n);
            for (int r = 0; r < n; ++r) {
                for (int s = 0; s < r; ++s) {
                    const int res = antisymSlot(r, s);
                    for (int c = 0; c < n; ++c) {
                        if (c != r && c != s) {
                            const auto [arc, sarc] = matrixSlot(r, c);
                            const auto [bcs, sbcs] = matrixSlot(c, s);
                            terms.push_back({res, arc, bcs, sarc * sbcs});
                            const auto [acs, sacs] = matrixSlot(c, s);
                            const auto [brc, sbrc] = matrixSlot(r, c);
                            terms.push_back({res, acs, brc, -sacs * sbrc});
                        }
                    }
                }
            }
            break;
        case FramePairing::AntisymOuter:
            requireFrames(a, ValueKind::FrameVector, b, ValueKind::FrameVector, "antisymmetric outer product");
            out = ValueType::antisym(n);
            for (int r = 0; r < n; ++r) {
                for (int s = 0; s < r; ++s) {
                    terms.push_back({antisymSlot(r, s), r, s, 1.0});
                    terms.push_back({antisymSlot(r, s), s, r, -1.0});
                }
            }
            break;
        case FramePairing::Trace:
            // A_rs B_sr over r != s: each lower slot appears twice with sign -1.
            requireFrames(a, ValueKind::FrameMatrixAntisym, b, ValueKind::FrameMatrixAntisym, "trace");
            out = ValueType::scalar();
            for (int s = 0; s < a.slotCount(); ++s) terms.push_back({0, s, s, -2.0});
            break;
    }
    return terms;
}

std::vector<BasisTerm> basisTerms(int dim, int p, int q) {
    std::vector<BasisTerm> terms;
    const auto& bp = basisOf(dim, p);
    const auto& bq = basisOf(dim, q);
    for (int i = 0; i < static_cast<int>(bp.size()); ++i) {
        for (int j = 0; j < static_cast<int>(bq.size()); ++j) {
            const int sign = concatenationSign(bp[i], bq[j]);
            if (sign == 0) continue;
            MultiIndex k = bp[i];
            k.insert(k.end(), bq[j].begin(), bq[j].end());
            std::sort(k.begin(), k.end());
            std::array<int, 2> ki{p, i}, kj{q, j};
            if (kj < ki) std::swap(ki, kj);
            terms.push_back({i, j, basisIndex(dim, k), static_cast<double>(sign), {ki[0], ki[1], kj[0], kj[1]}});
        }
    }
    std::sort(terms.begin(), terms.end(), [](const BasisTerm& x, const BasisTerm& y) {
        return std::tie(x.result, x.key) < std::tie(y.result, y.key);
    });
    return terms;
}

}  // namespace

FormField wedge(const FormField& a, const FormField& b, FramePairing pairing) {
    if (a.grid() != b.grid()) throw GridMismatchError("wedge: operands live on different grids");
    const int degree = a.degree() + b.degree();
    if (degree > a.dim()) {
        throw DegreeError("wedge: degree " + std::to_string(degree) + " exceeds dimension " +
                          std::to_string(a.dim()));
    }
    ValueType vt;
    const auto frames = frameTerms(a, b, pairing, vt);
    const auto bases = basisTerms(a.dim(), a.degree(), b.degree());
    FormField out(a.grid(), degree, vt);
    const std::size_t n = a.pointCount();
    for (const auto& ft : frames) {
        for (const auto& bt : bases) {
            const auto x = a.component(ft.left, bt.left);
            const auto y = b.component(ft.right, bt.right);
            auto z = out.component(ft.result, bt.result);
            const double w = ft.weight * bt.sign;
            for (std::size_t p = 0; p < n; ++p) z[p] += w * x[p] * y[p];
        }
    }
    return out;
}

std::vector<double> partialDerivative(const GridSpec& grid, std::span<const double> f, int axis) {
    const std::size_t stride = grid.stride(axis);
    const int len = grid.resolution(axis);
    const double inv2h = 0.5 / grid.spacing(axis);
    std::vector<double> out(f.size());
    for (std::size_t p = 0; p < f.size(); ++p) {
        const int i = static_cast<int>((p / stride) % static_cast<std::size_t>(len));
        if (i == 0) {
            out[p] = (4.0 * (f[p + stride] - f[p]) - (f[p + 2 * stride] - f[p])) * inv2h;
        } else if (i == len - 1) {
            out[p] = (4.0 * (f[p] - f[p - stride]) - (f[p] - f[p - 2 * stride])) * inv2h;
        } else {
            out[p] = (f[p + stride] - f[p - stride]) * inv2h;
        }
    }
    return out;
}

FormField exteriorDerivative(const FormField& a) {
    if (a.degree() >= a.dim()) {
        throw DegreeError("exterior derivative of a top-degree form (degree " + std::to_string(a.degree()) +
                          " in dimension " + std::to_string(a.dim()) + ")");
    }
    FormField out(a.grid(), a.degree() + 1, a.valueType());
    const auto& basis = a.basis();
    for (int c = 0; c < a.componentCount(); ++c) {
        const MultiIndex& idx = basis[c];
        for (int mu = 0; mu < a.dim(); ++mu) {
            if (std::find(idx.begin(), idx.end(), mu) != idx.end()) continue;
            const double sign = concatenationSign({mu}, idx);
            MultiIndex k = idx;
            k.push_back(mu);
            std::sort(k.begin(), k.end());
            const int target = basisIndex(a.dim(), k);
            for (int s = 0; s < a.slotCount(); ++s) {
                const auto deriv = partialDerivative(a.grid(), a.component(s, c), mu);
                auto z = out.component(s, target);
                for (std::size_t p = 0; p < deriv.size(); ++p) z[p] += sign * deriv[p];
            }
        }
    }
    return out;
}

FormField hodgeStar(const FormField& a) {
    const int n = a.dim();
    FormField out(a.grid(), n - a.degree(), a.valueType());
    const auto& basis = a.basis();
    for (int c = 0; c < a.componentCount(); ++c) {
        MultiIndex comp;
        for (int mu = 0; mu < n; ++mu) {
            if (std::find(basis[c].begin(), basis[c].end(), mu) == basis[c].end()) comp.push_back(mu);
        }
        const double sign = concatenationSign(basis[c], comp);
        const int target = basisIndex(n, comp);
        for (int s = 0; s < a.slotCount(); ++s) {
            const auto x = a.component(s, c);
            auto z = out.component(s, target);
            for (std::size_t p = 0; p < x.size(); ++p) z[p] = sign * x[p];
        }
    }
    return out;
}

FormField interiorProduct(const VectorField& v, const FormField& a) {
    if (a.degree() == 0) throw DegreeError("interior product of a 0-form");
    if (v.grid() != a.grid()) throw GridMismatchError("interior product: vector field on a different grid");
    FormField out(a.grid(), a.degree() - 1, a.valueType());
    const auto& basis = a.basis();
    for (int c = 0; c < a.componentCount(); ++c) {
        for (std::size_t j = 0; j < basis[c].size(); ++j) {
            const int mu = basis[c][j];
            MultiIndex k = basis[c];
            k.erase(k.begin() + static_cast<std::ptrdiff_t>(j));
            const int target = basisIndex(a.dim(), k);
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            const auto vmu = v.component(mu);
            for (int s = 0; s < a.slotCount(); ++s) {
                const auto x = a.component(s, c);
                auto z = out.component(s, target);
                for (std::size_t p = 0; p < x.size(); ++p) z[p] += sign * vmu[p] * x[p];
            }
        }
    }
    return out;
}

FormField covariantDerivative(const FormField& a, const ConnectionField& omega) {
    if (a.grid() != omega.grid()) throw GridMismatchError("covariant derivative: connection on a different grid");
    switch (a.valueType().kind) {
        case ValueKind::Scalar:
            throw PairingError("covariant derivative of a scalar form: no frame index for the connection to act on");
        case ValueKind::FrameVector:
            return exteriorDerivative(a) + wedge(omega.form(), a, FramePairing::MatrixVector);
        case ValueKind::FrameMatrixAntisym:
            return exteriorDerivative(a) + wedge(omega.form(), a, FramePairing::Commutator);
    }
    throw PairingError("unknown value type");
}

}  // namespace cartan::forms
