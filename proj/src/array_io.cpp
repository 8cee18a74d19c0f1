#include "sipl/array_io.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <ostream>

namespace sipl {

std::string_view dtype_name(DType d) {
    switch (d) {
    case DType::F64: return "f64";
    case DType::F32: return "f32";
    case DType::I32: return "i32";
    case DType::U8: return "u8";
    }
    return "unknown";
}

std::size_t dtype_size(DType d) {
    switch (d) {
    case DType::F64: return 8;
    case DType::F32: return 4;
    case DType::I32: return 4;
    case DType::U8: return 1;
    }
    throw FormatError("unknown dtype");
}

std::size_t NdArray::size() const {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

namespace {

constexpr std::array<char, 4> kMagic{'S', 'I', 'P', 'L'};

template <typename T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("truncated array header");
    return v;
}

}  // namespace

void write_array(std::ostream& out, const NdArray& array) {
    if (array.shape.size() > 255) throw FormatError("array rank exceeds 255");
    if (array.data.size() != array.size() * dtype_size(array.dtype)) throw FormatError("array payload size mismatch");
    out.write(kMagic.data(), kMagic.size());
    put<std::uint16_t>(out, kArrayFormatVersion);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(array.dtype));
    put<std::uint8_t>(out, static_cast<std::uint8_t>(array.shape.size()));
    for (auto d : array.shape) put<std::uint32_t>(out, d);
    out.write(reinterpret_cast<const char*>(array.data.data()), static_cast<std::streamsize>(array.data.size()));
    if (!out) throw FormatError("failed writing array");
}

NdArray read_array(std::istream& in) {
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw FormatError("bad array magic");
    if (get<std::uint16_t>(in) != kArrayFormatVersion) throw FormatError("unsupported array format version");
    const auto code = get<std::uint8_t>(in);
    if (code > static_cast<std::uint8_t>(DType::U8)) throw FormatError("unknown dtype code");
    NdArray a;
    a.dtype = static_cast<DType>(code);
    const auto rank = get<std::uint8_t>(in);
    for (int k = 0; k < rank; ++k) a.shape.push_back(get<std::uint32_t>(in));
    a.data.resize(a.size() * dtype_size(a.dtype));
    if (!in.read(reinterpret_cast<char*>(a.data.data()), static_cast<std::streamsize>(a.data.size())))
        throw FormatError("truncated array payload");
    return a;
}

void save_array(const std::filesystem::path& path, const NdArray& array) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    write_array(out, array);
}

NdArray load_array(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    return read_array(in);
}

}  // namespace sipl
