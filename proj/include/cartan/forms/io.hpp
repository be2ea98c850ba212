#pragma once

#include <filesystem>
#include <iosfwd>

#include "cartan/forms/form_field.hpp"

namespace cartan::forms {

/// Structured-grid field file, all integers and floats little-endian:
///
///   char[8]   magic "CARTFLD1"
///   u32       dim, degree, value kind (0 scalar, 1 vector, 2 antisym), frame dim
///   f64[2*dim] extents as (min, max) per axis
///   u32[dim]  resolution per axis
///   u32       block count = slots * C(dim, degree)
///   f64[...]  coefficient blocks, frame slot outermost, basis components in
///             lexicographic multi-index order, each block in C order over the grid
void writeField(std::ostream& os, const FormField& field);
void writeField(const std::filesystem::path& path, const FormField& field);
FormField readField(std::istream& is);
FormField readField(const std::filesystem::path& path);

/// One row per grid point: coordinates, then every (slot, component) coefficient.
void writeFieldCsv(std::ostream& os, const FormField& field);
void writeFieldCsv(const std::filesystem::path& path, const FormField& field);

}  // namespace cartan::forms
