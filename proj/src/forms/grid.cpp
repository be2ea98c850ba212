#include "cartan/forms/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace cartan::forms {

GridSpec::GridSpec(int dim, std::vector<std::pair<double, double>> extents, std::vector<int> resolution)
    : dim_(dim), extents_(std::move(extents)), resolution_(std::move(resolution)) {
    if (dim_ < 2 || dim_ > kMaxDim) {
        throw ValueError("grid dimension must be 2, 3 or 4, got " + std::to_string(dim_));
    }
    if (static_cast<int>(extents_.size()) != dim_ || static_cast<int>(resolution_.size()) != dim_) {
        throw ValueError("grid extents and resolution must list one entry per axis");
    }
    spacing_.resize(dim_);
    stride_.resize(dim_);
    for (int a = 0; a < dim_; ++a) {
        const auto [lo, hi] = extents_[a];
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
            throw ValueError("axis " + std::to_string(a) + " extent must have positive finite length");
        }
        if (resolution_[a] < 4) {
            throw ValueError("axis " + std::to_string(a) + " resolution must be at least 4");
        }
        spacing_[a] = (hi - lo) / resolution_[a];
        if (!std::isfinite(spacing_[a]) || !(spacing_[a] > 0.0)) {
            throw ValueError("axis " + std::to_string(a) + " spacing is not finite and positive");
        }
    }
    std::size_t s = 1;
    for (int a = dim_ - 1; a >= 0; --a) {
        stride_[a] = s;
        s *= static_cast<std::size_t>(resolution_[a]);
    }
    pointCount_ = s;
}

double GridSpec::cellVolume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= spacing_[a];
    return v;
}

GridIndex GridSpec::unflatten(std::size_t flat) const {
    GridIndex idx{};
    for (int a = 0; a < dim_; ++a) {
        idx[a] = static_cast<int>(flat / stride_[a]);
        flat %= stride_[a];
    }
    return idx;
}

std::size_t GridSpec::flatten(const GridIndex& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a) flat += static_cast<std::size_t>(idx[a]) * stride_[a];
    return flat;
}

Point GridSpec::point(std::size_t flat) const {
    const GridIndex idx = unflatten(flat);
    Point p{};
    for (int a = 0; a < dim_; ++a) p[a] = coordinate(a, idx[a]);
    return p;
}

bool GridSpec::contains(const Point& p, double slack) const {
    for (int a = 0; a < dim_; ++a) {
        if (p[a] < lower(a) - slack || p[a] > upper(a) + slack) return false;
    }
    return true;
}

GridSpec GridSpec::refined(int factor, const std::vector<int>& axes) const {
    if (factor < 1) throw ValueError("refinement factor must be positive");
    auto res = resolution_;
    for (int a : axes) {
        if (a < 0 || a >= dim_) throw ValueError("refinement axis out of range");
        res[a] *= factor;
    }
    return GridSpec(dim_, extents_, std::move(res));
}

GridSpec GridSpec::refined(int factor) const {
    std::vector<int> axes(dim_);
    for (int a = 0; a < dim_; ++a) axes[a] = a;
    return refined(factor, axes);
}

bool GridSpec::operator==(const GridSpec& other) const {
    return dim_ == other.dim_ && extents_ == other.extents_ && resolution_ == other.resolution_;
}

int binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

namespace {

void enumerate(int dim, int degree, int start, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (static_cast<int>(cur.size()) == degree) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < dim; ++i) {
        cur.push_back(i);
        enumerate(dim, degree, i + 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

const std::vector<MultiIndex>& basisOf(int dim, int degree) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::vector<MultiIndex>> cache;
    if (dim < 1 || dim > kMaxDim || degree < 0 || degree > dim) {
        throw DegreeError("no basis of degree " + std::to_string(degree) + " in dimension " +
                          std::to_string(dim));
    }
    std::lock_guard lock(mutex);
    auto [it, inserted] = cache.try_emplace({dim, degree});
    if (inserted) {
        MultiIndex cur;
        enumerate(dim, degree, 0, cur, it->second);
    }
    return it->second;
}

int basisIndex(int dim, const MultiIndex& idx) {
    const auto& basis = basisOf(dim, static_cast<int>(idx.size()));
    const auto it = std::find(basis.begin(), basis.end(), idx);
    return it == basis.end() ? -1 : static_cast<int>(it - basis.begin());
}

int concatenationSign(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex all = a;
    all.insert(all.end(), b.begin(), b.end());
    int sign = 1;
    // bubble sort counting transpositions; lengths are at most 4
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = 0; j + 1 < all.size() - i; ++j) {
            if (all[j] == all[j + 1]) return 0;
            if (all[j] > all[j + 1]) {
                std::swap(all[j], all[j + 1]);
                sign = -sign;
            }
        }
    }
    for (std::size_t i = 0; i + 1 < all.size(); ++i) {
        if (all[i] == all[i + 1]) return 0;
    }
    return sign;
}

std::string basisLabel(const MultiIndex& idx) {
    static constexpr const char* names[] = {"dx", "dy", "dz", "dw"};
    if (idx.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (i) s += "^";
        s += names[idx[i]];
    }
    return s;
}

}  // namespace cartan::forms
