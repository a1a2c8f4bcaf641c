#ifndef TSL0_IO_HPP
#define TSL0_IO_HPP

// Plain-text serialization of tensors and matrices:
//   line 1: D
//   line 2: the D extents, space separated
//   then one scalar per line in storage order (last index fastest),
// written with 17 significant digits so doubles round-trip exactly.
// A matrix is the same format with D = 2.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tsl0/errors.hpp"
#include "tsl0/tensor.hpp"

namespace tsl0 {

namespace detail {

inline std::string format_scalar(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] inline void parse_fail(const std::string& name, std::size_t line,
                                    const std::string& msg) {
    throw io_error(name + ":" + std::to_string(line) + ": " + msg);
}

inline bool next_line(std::istream& in, std::string& line, std::size_t& lineno) {
    if (!std::getline(in, line)) return false;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

inline double parse_scalar(const std::string& token, const std::string& name, std::size_t line) {
    const char* begin = token.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0'))
        parse_fail(name, line, "expected a number, got '" + token + "'");
    return v;
}

}  // namespace detail

inline void write_tensor(std::ostream& out, const DenseTensor& x) {
    out << x.order() << '\n';
    for (std::size_t d = 0; d < x.order(); ++d) {
        if (d > 0) out << ' ';
        out << x.shape[d];
    }
    out << '\n';
    for (double v : x.data) out << detail::format_scalar(v) << '\n';
}

inline void write_tensor_file(const std::string& path, const DenseTensor& x) {
    std::ofstream out(path);
    if (!out) throw io_error(path + ": cannot open for writing");
    write_tensor(out, x);
    if (!out) throw io_error(path + ": write failed");
}

inline DenseTensor read_tensor(std::istream& in, const std::string& name = "<stream>") {
    std::string line;
    std::size_t lineno = 0;

    if (!detail::next_line(in, line, lineno)) detail::parse_fail(name, 1, "missing order line");
    char* end = nullptr;
    const long order = std::strtol(line.c_str(), &end, 10);
    if (end == line.c_str() || order < 1)
        detail::parse_fail(name, lineno, "expected a positive tensor order, got '" + line + "'");

    if (!detail::next_line(in, line, lineno)) detail::parse_fail(name, 2, "missing extents line");
    Shape shape;
    {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) {
            char* e = nullptr;
            const long v = std::strtol(tok.c_str(), &e, 10);
            if (e == tok.c_str() || *e != '\0' || v < 1)
                detail::parse_fail(name, lineno, "expected a positive extent, got '" + tok + "'");
            shape.push_back(static_cast<std::size_t>(v));
        }
    }
    if (shape.size() != static_cast<std::size_t>(order))
        detail::parse_fail(name, lineno,
                           "expected " + std::to_string(order) + " extents, got " +
                               std::to_string(shape.size()));

    const std::size_t count = detail::checked_element_count(shape, "read_tensor");
    std::vector<double> data;
    data.reserve(count);
    while (data.size() < count) {
        if (!detail::next_line(in, line, lineno))
            detail::parse_fail(name, lineno + 1,
                               "unexpected end of file: expected " + std::to_string(count) +
                                   " values, got " + std::to_string(data.size()));
        if (line.empty()) continue;
        data.push_back(detail::parse_scalar(line, name, lineno));
    }
    return DenseTensor(std::move(shape), std::move(data));
}

inline DenseTensor read_tensor_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error(path + ": cannot open for reading");
    return read_tensor(in, path);
}

inline void write_matrix_file(const std::string& path, const DenseMatrix& m) {
    write_tensor_file(path, DenseTensor({m.rows, m.cols}, m.data));
}

inline DenseMatrix read_matrix_file(const std::string& path) {
    DenseTensor t = read_tensor_file(path);
    if (t.order() != 2)
        throw io_error(path + ": expected a matrix (order 2), got order " +
                       std::to_string(t.order()));
    return DenseMatrix(t.shape[0], t.shape[1], std::move(t.data));
}

}  // namespace tsl0

#endif  // TSL0_IO_HPP
