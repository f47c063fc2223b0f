#include "wristview/io/formats.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wristview/errors.hpp"

namespace wristview::io {

namespace {

std::string strip_comment(const std::string& line) {
    const std::size_t hash = line.find('#');
    std::string s = hash == std::string::npos ? line : line.substr(0, hash);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    return s.substr(b);
}

double parse_double(const std::string& tok, const std::string& where) {
    double v = 0.0;
    const char* begin = tok.data();
    const char* end = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(where, "expected a number, got '" + tok + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (std::string& t : out) {
        std::size_t b = 0, e = t.size();
        while (b < e && (t[b] == ' ' || t[b] == '\t')) ++b;
        while (e > b && (t[e - 1] == ' ' || t[e - 1] == '\t')) --e;
        t = t.substr(b, e - b);
    }
    return out;
}

void check_known_keys(const nlohmann::json& obj, std::initializer_list<const char*> known,
                      const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* k : known) {
            if (key == k) {
                ok = true;
                break;
            }
        }
        if (!ok) throw ParseError(where, "unknown field '" + key + "'");
    }
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

std::vector<Correspondence2D2D> load_correspondences(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const std::string pathstr = path.string();

    std::vector<Correspondence2D2D> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = strip_comment(line);
        if (body.empty()) continue;
        const std::string where = pathstr + ":" + std::to_string(lineno);
        const std::vector<std::string> tokens = split(body, ',');
        if (tokens.size() != 5) {
            throw ParseError(where, "expected 5 comma-separated fields, got " +
                                        std::to_string(tokens.size()));
        }
        long idx = 0;
        {
            const auto [ptr, ec] =
                std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), idx);
            if (ec != std::errc() || ptr != tokens[0].data() + tokens[0].size()) {
                throw ParseError(where, "expected an integer view index, got '" + tokens[0] + "'");
            }
        }
        if (idx < 0) throw NegativeIndex(where + ": negative anchor view index");
        Correspondence2D2D c;
        c.anchor_view_index = static_cast<int>(idx);
        c.anchor_pixel.u = parse_double(tokens[1], where);
        c.anchor_pixel.v = parse_double(tokens[2], where);
        c.wrist_pixel.u = parse_double(tokens[3], where);
        c.wrist_pixel.v = parse_double(tokens[4], where);
        out.push_back(c);
    }
    return out;
}

void save_correspondences(const std::filesystem::path& path,
                          const std::vector<Correspondence2D2D>& corrs) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "# anchor_view_index, anchor_u, anchor_v, wrist_u, wrist_v\n";
    for (const Correspondence2D2D& c : corrs) {
        out << c.anchor_view_index << ", " << format_double(c.anchor_pixel.u) << ", "
            << format_double(c.anchor_pixel.v) << ", " << format_double(c.wrist_pixel.u) << ", "
            << format_double(c.wrist_pixel.v) << "\n";
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<PoseSE3> load_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const std::string pathstr = path.string();

    std::vector<PoseSE3> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = strip_comment(line);
        if (body.empty()) continue;
        const std::string where = pathstr + ":" + std::to_string(lineno);
        std::istringstream ls(body);
        double v[12];
        for (int i = 0; i < 12; ++i) {
            std::string tok;
            if (!(ls >> tok)) {
                throw ParseError(where, "expected 12 numbers (rotation row-major, translation)");
            }
            v[i] = parse_double(tok, where);
        }
        std::string extra;
        if (ls >> extra) throw ParseError(where, "trailing content '" + extra + "'");
        PoseSE3 pose;
        pose.rotation << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
        pose.translation << v[9], v[10], v[11];
        if (!pose.valid(1e-6)) {
            throw ParseError(where, "rotation block is not orthonormal");
        }
        out.push_back(pose);
    }
    return out;
}

void save_trajectory(const std::filesystem::path& path, const std::vector<PoseSE3>& poses) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "# r00 r01 r02 r10 r11 r12 r20 r21 r22 tx ty tz\n";
    for (const PoseSE3& p : poses) {
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                out << format_double(p.rotation(r, c)) << ' ';
            }
        }
        out << format_double(p.translation.x()) << ' ' << format_double(p.translation.y()) << ' '
            << format_double(p.translation.z()) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

const CameraEntry& CameraConfig::wrist() const {
    for (const CameraEntry& c : cameras) {
        if (c.role == CameraRole::wrist) return c;
    }
    throw InputError("camera config has no wrist camera");
}

std::vector<const CameraEntry*> CameraConfig::anchors() const {
    std::vector<const CameraEntry*> out;
    for (const CameraEntry& c : cameras) {
        if (c.role == CameraRole::anchor) out.push_back(&c);
    }
    return out;
}

CameraConfig load_cameras(const std::filesystem::path& path, double scale) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const std::string pathstr = path.string();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(pathstr + "@" + std::to_string(e.byte), e.what());
    }
    if (!doc.is_object()) throw ParseError(pathstr, "top level must be an object");
    check_known_keys(doc, {"cameras"}, pathstr);
    if (!doc.contains("cameras") || !doc["cameras"].is_array()) {
        throw ParseError(pathstr, "missing 'cameras' array");
    }

    CameraConfig cfg;
    std::size_t index = 0;
    for (const auto& item : doc["cameras"]) {
        const std::string where = pathstr + " camera[" + std::to_string(index++) + "]";
        if (!item.is_object()) throw ParseError(where, "must be an object");
        check_known_keys(item,
                         {"role", "fx", "fy", "cx", "cy", "width", "height", "rotation",
                          "translation"},
                         where);
        CameraEntry entry;
        const std::string role = item.value("role", std::string());
        if (role == "anchor") entry.role = CameraRole::anchor;
        else if (role == "wrist") entry.role = CameraRole::wrist;
        else throw ParseError(where, "role must be 'anchor' or 'wrist'");

        for (const char* k : {"fx", "fy", "cx", "cy", "width", "height"}) {
            if (!item.contains(k) || !item[k].is_number()) {
                throw ParseError(where, std::string("missing numeric field '") + k + "'");
            }
        }
        entry.intrinsics.fx = item["fx"].get<double>() * scale;
        entry.intrinsics.fy = item["fy"].get<double>() * scale;
        entry.intrinsics.cx = item["cx"].get<double>() * scale;
        entry.intrinsics.cy = item["cy"].get<double>() * scale;
        entry.intrinsics.width =
            static_cast<int>(std::lround(item["width"].get<double>() * scale));
        entry.intrinsics.height =
            static_cast<int>(std::lround(item["height"].get<double>() * scale));
        if (!entry.intrinsics.valid()) {
            throw ParseError(where, "intrinsics violate fx,fy > 0 and 0 <= c < size");
        }

        const bool has_r = item.contains("rotation"), has_t = item.contains("translation");
        if (has_r != has_t) {
            throw ParseError(where, "rotation and translation must be given together");
        }
        if (has_r) {
            const auto& rj = item["rotation"];
            const auto& tj = item["translation"];
            if (!rj.is_array() || rj.size() != 9 || !tj.is_array() || tj.size() != 3) {
                throw ParseError(where, "rotation needs 9 values, translation 3");
            }
            for (int i = 0; i < 9; ++i) {
                entry.extrinsics.rotation(i / 3, i % 3) = rj[i].get<double>();
            }
            for (int i = 0; i < 3; ++i) entry.extrinsics.translation(i) = tj[i].get<double>();
            if (!entry.extrinsics.valid(1e-6)) {
                throw ParseError(where, "rotation block is not orthonormal");
            }
            entry.has_extrinsics = true;
        }
        cfg.cameras.push_back(entry);
    }
    return cfg;
}

void save_cameras(const std::filesystem::path& path, const CameraConfig& config) {
    nlohmann::json cams = nlohmann::json::array();
    for (const CameraEntry& c : config.cameras) {
        nlohmann::json j;
        j["role"] = c.role == CameraRole::wrist ? "wrist" : "anchor";
        j["fx"] = c.intrinsics.fx;
        j["fy"] = c.intrinsics.fy;
        j["cx"] = c.intrinsics.cx;
        j["cy"] = c.intrinsics.cy;
        j["width"] = c.intrinsics.width;
        j["height"] = c.intrinsics.height;
        if (c.has_extrinsics) {
            nlohmann::json r = nlohmann::json::array();
            for (int i = 0; i < 9; ++i) r.push_back(c.extrinsics.rotation(i / 3, i % 3));
            j["rotation"] = r;
            j["translation"] = {c.extrinsics.translation.x(), c.extrinsics.translation.y(),
                                c.extrinsics.translation.z()};
        }
        cams.push_back(j);
    }
    nlohmann::json doc;
    doc["cameras"] = cams;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << doc.dump(2) << "\n";
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

namespace {

constexpr char kTensorMagic[8] = {'B', 'T', 'N', 'S', 'R', '0', '0', '1'};

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

} // namespace

void save_tensor(const std::filesystem::path& path, const Tensor& tensor, TensorDType dtype) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(kTensorMagic, 8);
    write_raw(out, static_cast<std::uint8_t>(dtype));
    write_raw(out, static_cast<std::uint8_t>(tensor.rank()));
    write_raw(out, static_cast<std::uint16_t>(0));
    for (std::size_t d : tensor.dims) {
        write_raw(out, static_cast<std::uint64_t>(d));
    }
    switch (dtype) {
        case TensorDType::f64:
            out.write(reinterpret_cast<const char*>(tensor.data.data()),
                      static_cast<std::streamsize>(tensor.size() * 8));
            break;
        case TensorDType::f32:
            for (double v : tensor.data) {
                const float f = static_cast<float>(v);
                write_raw(out, f);
            }
            break;
        case TensorDType::u8:
            for (double v : tensor.data) {
                write_raw(out, static_cast<std::uint8_t>(v));
            }
            break;
        case TensorDType::i64:
            for (double v : tensor.data) {
                write_raw(out, static_cast<std::int64_t>(v));
            }
            break;
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Tensor load_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const std::string pathstr = path.string();
    char magic[8];
    in.read(magic, 8);
    if (in.gcount() != 8 || std::memcmp(magic, kTensorMagic, 8) != 0) {
        throw ParseError(pathstr + "@0", "bad tensor container magic");
    }
    std::uint8_t dtype = 0, rank = 0;
    std::uint16_t reserved = 0;
    in.read(reinterpret_cast<char*>(&dtype), 1);
    in.read(reinterpret_cast<char*>(&rank), 1);
    in.read(reinterpret_cast<char*>(&reserved), 2);
    if (!in || dtype > 3) throw ParseError(pathstr + "@8", "bad dtype byte");
    std::vector<std::size_t> dims(rank);
    for (std::uint8_t i = 0; i < rank; ++i) {
        std::uint64_t d = 0;
        in.read(reinterpret_cast<char*>(&d), 8);
        if (!in) throw ParseError(pathstr, "truncated dims");
        dims[i] = static_cast<std::size_t>(d);
    }
    Tensor t(dims);
    const std::size_t n = t.size();
    switch (static_cast<TensorDType>(dtype)) {
        case TensorDType::f64:
            in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(n * 8));
            break;
        case TensorDType::f32:
            for (std::size_t i = 0; i < n; ++i) {
                float f;
                in.read(reinterpret_cast<char*>(&f), 4);
                t.data[i] = f;
            }
            break;
        case TensorDType::u8:
            for (std::size_t i = 0; i < n; ++i) {
                std::uint8_t b;
                in.read(reinterpret_cast<char*>(&b), 1);
                t.data[i] = b;
            }
            break;
        case TensorDType::i64:
            for (std::size_t i = 0; i < n; ++i) {
                std::int64_t b;
                in.read(reinterpret_cast<char*>(&b), 8);
                t.data[i] = static_cast<double>(b);
            }
            break;
    }
    if (!in) throw ParseError(pathstr, "truncated tensor payload");
    return t;
}

void save_point_map(const std::filesystem::path& path, const AnchorPointMap& map) {
    Tensor t({static_cast<std::size_t>(map.height), static_cast<std::size_t>(map.width), 4});
    for (std::size_t i = 0; i < map.points.size(); ++i) {
        t.data[i * 4 + 0] = map.points[i].x();
        t.data[i * 4 + 1] = map.points[i].y();
        t.data[i * 4 + 2] = map.points[i].z();
        t.data[i * 4 + 3] = map.valid[i] ? 1.0 : 0.0;
    }
    save_tensor(path, t, TensorDType::f64);
}

AnchorPointMap load_point_map(const std::filesystem::path& path) {
    const Tensor t = load_tensor(path);
    if (t.rank() != 3 || t.dims[2] != 4) {
        throw ShapeMismatch("point map '" + path.string() + "' must be H x W x 4");
    }
    AnchorPointMap map;
    map.resize(static_cast<int>(t.dims[1]), static_cast<int>(t.dims[0]));
    for (std::size_t i = 0; i < map.points.size(); ++i) {
        map.points[i] =
            Eigen::Vector3d(t.data[i * 4 + 0], t.data[i * 4 + 1], t.data[i * 4 + 2]);
        map.valid[i] = t.data[i * 4 + 3] != 0.0 ? 1 : 0;
    }
    return map;
}

void write_metric_report(const std::filesystem::path& txt_path, const MetricReport& report) {
    std::ofstream out(txt_path);
    if (!out) throw IoError("cannot write '" + txt_path.string() + "'");
    for (const auto& [name, value] : report) {
        out << name << "=" << value << "\n";
    }
    if (!out) throw IoError("write failed for '" + txt_path.string() + "'");

    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [name, value] : report) {
        // numbers stay numbers in the JSON twin
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec == std::errc() && ptr == value.data() + value.size()) {
            doc[name] = v;
        } else {
            doc[name] = value;
        }
    }
    std::filesystem::path json_path = txt_path;
    json_path.replace_extension(".json");
    std::ofstream jout(json_path);
    if (!jout) throw IoError("cannot write '" + json_path.string() + "'");
    jout << doc.dump(2) << "\n";
    if (!jout) throw IoError("write failed for '" + json_path.string() + "'");
}

} // namespace wristview::io
