#pragma once

#include "sipl/grid.hpp"

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace sipl {

static_assert(std::endian::native == std::endian::little, "array container assumes a little-endian host");

class FormatError : public Error {
public:
    using Error::Error;
};

/// Element type codes stored in the array header.
enum class DType : std::uint8_t { F64 = 0, F32 = 1, I32 = 2, U8 = 3 };

std::string_view dtype_name(DType d);
std::size_t dtype_size(DType d);

template <typename T> constexpr DType dtype_of();
template <> constexpr DType dtype_of<double>() { return DType::F64; }
template <> constexpr DType dtype_of<float>() { return DType::F32; }
template <> constexpr DType dtype_of<std::int32_t>() { return DType::I32; }
template <> constexpr DType dtype_of<std::uint8_t>() { return DType::U8; }

/// Dense array with shape metadata. On disk: "SIPL", u16 version, u8 dtype,
/// u8 rank, rank x u32 dims, then raw little-endian elements.
struct NdArray {
    DType dtype = DType::F64;
    std::vector<std::uint32_t> shape;
    std::vector<std::byte> data;

    std::size_t size() const;

    template <typename T>
    static NdArray from(std::vector<std::uint32_t> shape, std::span<const T> values) {
        NdArray a{dtype_of<T>(), std::move(shape), {}};
        if (a.size() != values.size()) throw FormatError("array shape does not match value count");
        a.data.resize(values.size_bytes());
        std::memcpy(a.data.data(), values.data(), values.size_bytes());
        return a;
    }

    template <typename T>
    std::vector<T> values() const {
        if (dtype_of<T>() != dtype) throw FormatError("array dtype mismatch");
        std::vector<T> out(size());
        std::memcpy(out.data(), data.data(), data.size());
        return out;
    }

    bool operator==(const NdArray&) const = default;
};

inline constexpr std::uint16_t kArrayFormatVersion = 1;

void write_array(std::ostream& out, const NdArray& array);
NdArray read_array(std::istream& in);

void save_array(const std::filesystem::path& path, const NdArray& array);
NdArray load_array(const std::filesystem::path& path);

}  // namespace sipl
