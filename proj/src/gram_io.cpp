#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "expbasis/error.hpp"
#include "expbasis/gram.hpp"

namespace expbasis {

namespace {

template <class T>
void put_le(std::ostream& out, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
        throw Error(ErrorCode::io, "truncated Gram file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

void write_gram_binary(std::ostream& out, const Matrix& m, bool double_precision) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::invalid_argument, "Gram matrix is not square");
    out.write("GRAM", 4);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(m.rows()));
    put_le<std::uint32_t>(out, double_precision ? 1u : 0u);
    put_le<std::uint32_t>(out, 0u);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (double_precision) {
                put_le<double>(out, m(i, j).real());
                put_le<double>(out, m(i, j).imag());
            } else {
                put_le<float>(out, static_cast<float>(m(i, j).real()));
                put_le<float>(out, static_cast<float>(m(i, j).imag()));
            }
        }
    }
    if (!out) throw Error(ErrorCode::io, "failed to write Gram matrix");
}

Matrix read_gram_binary(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "GRAM", 4) != 0)
        throw Error(ErrorCode::io, "not a GRAM file");
    const auto dim = get_le<std::uint32_t>(in);
    const auto flags = get_le<std::uint32_t>(in);
    get_le<std::uint32_t>(in);
    if (flags & ~1u) throw Error(ErrorCode::io, "unknown GRAM flags");
    Matrix m(dim, dim);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (flags & 1u) {
                const double re = get_le<double>(in);
                m(i, j) = {re, get_le<double>(in)};
            } else {
                const float re = get_le<float>(in);
                m(i, j) = {re, get_le<float>(in)};
            }
        }
    }
    return m;
}

void write_gram_csv(std::ostream& out, const Matrix& m) {
    char buf[64];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", j ? "," : "", m(i, j).real(),
                          m(i, j).imag());
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::io, "failed to write Gram CSV");
}

}  // namespace expbasis
