#include "wristview/io/ply.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "wristview/errors.hpp"

namespace wristview::io {

namespace {

enum class ScalarType { f32, f64, u8 };

std::size_t scalar_size(ScalarType t) {
    switch (t) {
        case ScalarType::f32: return 4;
        case ScalarType::u8: return 1;
        default: return 8;
    }
}

struct VertexProperty {
    std::string name;
    ScalarType type = ScalarType::f64;
};

struct PlyHeader {
    bool binary = false;
    std::size_t vertex_count = 0;
    std::vector<VertexProperty> properties;
    std::size_t header_lines = 0;
};

ScalarType parse_type(const std::string& t, const std::string& where) {
    if (t == "float" || t == "float32") return ScalarType::f32;
    if (t == "double" || t == "float64") return ScalarType::f64;
    if (t == "uchar" || t == "uint8") return ScalarType::u8;
    throw UnsupportedProperty(where + ": unsupported property type '" + t + "'");
}

PlyHeader read_header(std::istream& in, const std::string& path) {
    PlyHeader h;
    std::string line;
    std::size_t lineno = 0;
    const auto where = [&] { return path + ":" + std::to_string(lineno); };

    auto next_line = [&]() -> bool {
        if (!std::getline(in, line)) return false;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++lineno;
        return true;
    };

    if (!next_line() || line != "ply") {
        throw ParseError(path + ":1", "not a PLY file (missing 'ply' magic)");
    }
    bool have_format = false;
    bool in_vertex_element = false;
    bool ended = false;
    while (next_line()) {
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word.empty() || word == "comment" || word == "obj_info") continue;
        if (word == "format") {
            std::string fmt, version;
            ls >> fmt >> version;
            if (fmt == "ascii") {
                h.binary = false;
            } else if (fmt == "binary_little_endian") {
                h.binary = true;
            } else {
                throw UnsupportedProperty(where() + ": unsupported format '" + fmt + "'");
            }
            if (version != "1.0") {
                throw ParseError(where(), "unsupported PLY version '" + version + "'");
            }
            have_format = true;
        } else if (word == "element") {
            std::string name;
            std::size_t count = 0;
            ls >> name >> count;
            if (name == "vertex") {
                h.vertex_count = count;
                in_vertex_element = true;
            } else {
                if (count != 0) {
                    throw UnsupportedProperty(where() + ": unsupported element '" + name + "'");
                }
                in_vertex_element = false;
            }
        } else if (word == "property") {
            if (!in_vertex_element) {
                throw UnsupportedProperty(where() + ": property outside vertex element");
            }
            std::string type, name;
            ls >> type;
            if (type == "list") {
                throw UnsupportedProperty(where() + ": list properties are not supported");
            }
            ls >> name;
            if (name != "x" && name != "y" && name != "z" && name != "red" &&
                name != "green" && name != "blue") {
                throw UnsupportedProperty(where() + ": unexpected vertex property '" + name + "'");
            }
            h.properties.push_back({name, parse_type(type, where())});
        } else if (word == "end_header") {
            ended = true;
            break;
        } else {
            throw ParseError(where(), "unrecognized header keyword '" + word + "'");
        }
    }
    if (!ended) throw ParseError(path, "unterminated PLY header");
    if (!have_format) throw ParseError(path, "PLY header missing format line");

    bool has_x = false, has_y = false, has_z = false;
    int colors = 0;
    for (const auto& p : h.properties) {
        if (p.name == "x") has_x = true;
        if (p.name == "y") has_y = true;
        if (p.name == "z") has_z = true;
        if (p.name == "red" || p.name == "green" || p.name == "blue") ++colors;
    }
    if (!has_x || !has_y || !has_z) {
        throw ParseError(path, "vertex element must declare x, y, z");
    }
    if (colors != 0 && colors != 3) {
        throw ParseError(path, "vertex colors must declare red, green and blue together");
    }
    h.header_lines = lineno;
    return h;
}

} // namespace

PlyLoadResult load_point_cloud(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const std::string pathstr = path.string();
    const PlyHeader header = read_header(in, pathstr);

    PlyLoadResult out;
    out.points.reserve(header.vertex_count);
    bool has_color = false;
    for (const auto& p : header.properties) {
        if (p.name == "red") has_color = true;
    }

    if (header.binary) {
        std::size_t record = 0;
        for (const auto& p : header.properties) record += scalar_size(p.type);
        std::vector<char> buf(record);
        for (std::size_t i = 0; i < header.vertex_count; ++i) {
            in.read(buf.data(), static_cast<std::streamsize>(record));
            if (in.gcount() != static_cast<std::streamsize>(record)) {
                throw ParseError(pathstr + "@vertex " + std::to_string(i),
                                 "truncated binary payload");
            }
            double coords[3] = {0, 0, 0};
            double color[3] = {0, 0, 0};
            std::size_t offset = 0;
            for (const auto& p : header.properties) {
                double v = 0.0;
                if (p.type == ScalarType::f32) {
                    float f;
                    std::memcpy(&f, buf.data() + offset, 4);
                    v = f;
                } else if (p.type == ScalarType::f64) {
                    std::memcpy(&v, buf.data() + offset, 8);
                } else {
                    unsigned char c;
                    std::memcpy(&c, buf.data() + offset, 1);
                    v = c;
                }
                offset += scalar_size(p.type);
                if (p.name == "x") coords[0] = v;
                else if (p.name == "y") coords[1] = v;
                else if (p.name == "z") coords[2] = v;
                else if (p.name == "red") color[0] = v / 255.0;
                else if (p.name == "green") color[1] = v / 255.0;
                else color[2] = v / 255.0;
            }
            if (!std::isfinite(coords[0]) || !std::isfinite(coords[1]) ||
                !std::isfinite(coords[2])) {
                ++out.rejected_nonfinite;
                continue;
            }
            Point3 pt(coords[0], coords[1], coords[2]);
            if (has_color) pt.rgb = Eigen::Vector3d(color[0], color[1], color[2]);
            out.points.push_back(pt);
        }
    } else {
        std::string line;
        std::size_t lineno = header.header_lines;
        for (std::size_t i = 0; i < header.vertex_count; ++i) {
            if (!std::getline(in, line)) {
                throw ParseError(pathstr + ":" + std::to_string(lineno + 1),
                                 "expected " + std::to_string(header.vertex_count) +
                                     " vertices, file ended after " + std::to_string(i));
            }
            ++lineno;
            std::istringstream ls(line);
            double coords[3] = {0, 0, 0};
            double color[3] = {0, 0, 0};
            for (const auto& p : header.properties) {
                std::string tok;
                double v = 0.0;
                // token + from_chars instead of stream extraction so that
                // nan/inf spellings parse and get counted as rejects
                if (!(ls >> tok)) {
                    throw ParseError(pathstr + ":" + std::to_string(lineno),
                                     "malformed vertex line");
                }
                const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
                if (ec != std::errc() || ptr != tok.data() + tok.size()) {
                    throw ParseError(pathstr + ":" + std::to_string(lineno),
                                     "malformed vertex line");
                }
                if (p.name == "x") coords[0] = v;
                else if (p.name == "y") coords[1] = v;
                else if (p.name == "z") coords[2] = v;
                else if (p.name == "red") color[0] = v / 255.0;
                else if (p.name == "green") color[1] = v / 255.0;
                else color[2] = v / 255.0;
            }
            if (!std::isfinite(coords[0]) || !std::isfinite(coords[1]) ||
                !std::isfinite(coords[2])) {
                ++out.rejected_nonfinite;
                continue;
            }
            Point3 pt(coords[0], coords[1], coords[2]);
            if (has_color) pt.rgb = Eigen::Vector3d(color[0], color[1], color[2]);
            out.points.push_back(pt);
        }
    }
    return out;
}

void save_point_cloud(const std::filesystem::path& path, const std::vector<Point3>& cloud,
                      PlyFormat format) {
    bool with_color = !cloud.empty();
    for (const Point3& p : cloud) {
        if (!p.rgb) {
            with_color = false;
            break;
        }
    }

    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw IoError("cannot write '" + path.string() + "'");
    outf << "ply\n";
    outf << (format == PlyFormat::ascii ? "format ascii 1.0\n"
                                        : "format binary_little_endian 1.0\n");
    outf << "element vertex " << cloud.size() << "\n";
    outf << "property double x\nproperty double y\nproperty double z\n";
    if (with_color) {
        outf << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    }
    outf << "end_header\n";

    const auto to_byte = [](double c) {
        const double v = std::floor(c * 255.0 + 0.5);
        return static_cast<unsigned char>(v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v));
    };

    if (format == PlyFormat::ascii) {
        char buf[96];
        for (const Point3& p : cloud) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g", p.pos.x(), p.pos.y(), p.pos.z());
            outf << buf;
            if (with_color) {
                outf << ' ' << static_cast<int>(to_byte(p.rgb->x())) << ' '
                     << static_cast<int>(to_byte(p.rgb->y())) << ' '
                     << static_cast<int>(to_byte(p.rgb->z()));
            }
            outf << '\n';
        }
    } else {
        for (const Point3& p : cloud) {
            double coords[3] = {p.pos.x(), p.pos.y(), p.pos.z()};
            outf.write(reinterpret_cast<const char*>(coords), 24);
            if (with_color) {
                unsigned char rgb[3] = {to_byte(p.rgb->x()), to_byte(p.rgb->y()),
                                        to_byte(p.rgb->z())};
                outf.write(reinterpret_cast<const char*>(rgb), 3);
            }
        }
    }
    if (!outf) throw IoError("write failed for '" + path.string() + "'");
}

} // namespace wristview::io
