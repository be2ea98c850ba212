#include "cartan/forms/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace cartan::forms {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'R', 'T', 'F', 'L', 'D', '1'};

void putU32(std::ostream& os, std::uint32_t v) {
    std::array<char, 4> b;
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(b.data(), 4);
}

void putF64(std::ostream& os, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    std::array<char, 8> b;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
    os.write(b.data(), 8);
}

std::uint32_t getU32(std::istream& is) {
    std::array<unsigned char, 4> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), 4)) throw ValueError("field file truncated");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

double getF64(std::istream& is) {
    std::array<unsigned char, 8> b{};
    if (!is.read(reinterpret_cast<char*>(b.data()), 8)) throw ValueError("field file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(v);
}

}  // namespace

void writeField(std::ostream& os, const FormField& field) {
    const GridSpec& g = field.grid();
    os.write(kMagic, sizeof kMagic);
    putU32(os, static_cast<std::uint32_t>(g.dim()));
    putU32(os, static_cast<std::uint32_t>(field.degree()));
    putU32(os, static_cast<std::uint32_t>(field.valueType().kind));
    putU32(os, static_cast<std::uint32_t>(field.valueType().frameDim));
    for (int a = 0; a < g.dim(); ++a) {
        putF64(os, g.lower(a));
        putF64(os, g.upper(a));
    }
    for (int a = 0; a < g.dim(); ++a) putU32(os, static_cast<std::uint32_t>(g.resolution(a)));
    putU32(os, static_cast<std::uint32_t>(field.slotCount() * field.componentCount()));
    for (double v : field.data()) putF64(os, v);
}

void writeField(const std::filesystem::path& path, const FormField& field) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    writeField(os, field);
}

FormField readField(std::istream& is) {
    char magic[8];
    if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw ValueError("not a field file");
    const int dim = static_cast<int>(getU32(is));
    const int degree = static_cast<int>(getU32(is));
    const auto kind = getU32(is);
    const int frameDim = static_cast<int>(getU32(is));
    if (dim < 2 || dim > kMaxDim || kind > 2) throw ValueError("corrupt field header");
    std::vector<std::pair<double, double>> extents(dim);
    for (auto& e : extents) {
        e.first = getF64(is);
        e.second = getF64(is);
    }
    std::vector<int> res(dim);
    for (int& r : res) r = static_cast<int>(getU32(is));
    FormField f(GridSpec(dim, extents, res), degree, ValueType{static_cast<ValueKind>(kind), frameDim});
    const auto blocks = getU32(is);
    if (static_cast<int>(blocks) != f.slotCount() * f.componentCount()) throw ValueError("corrupt field header");
    for (double& v : f.data()) v = getF64(is);
    return f;
}

FormField readField(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    return readField(is);
}

void writeFieldCsv(std::ostream& os, const FormField& field) {
    static constexpr const char* axes[] = {"x", "y", "z", "w"};
    const GridSpec& g = field.grid();
    const auto& basis = field.basis();
    for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << axes[a];
    for (int s = 0; s < field.slotCount(); ++s) {
        for (int c = 0; c < field.componentCount(); ++c) {
            os << ',';
            if (field.valueType().kind != ValueKind::Scalar) os << 's' << s << '_';
            os << basisLabel(basis[c]);
        }
    }
    os << '\n';
    os << std::setprecision(17);
    const std::size_t n = field.pointCount();
    const auto data = field.data();
    const int blocks = field.slotCount() * field.componentCount();
    for (std::size_t p = 0; p < n; ++p) {
        const Point x = g.point(p);
        for (int a = 0; a < g.dim(); ++a) os << (a ? "," : "") << x[a];
        for (int b = 0; b < blocks; ++b) os << ',' << data[static_cast<std::size_t>(b) * n + p];
        os << '\n';
    }
}

void writeFieldCsv(const std::filesystem::path& path, const FormField& field) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    writeFieldCsv(os, field);
}

}  // namespace cartan::forms
