#include "wristview/io/image_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include <zlib.h>

#include "wristview/errors.hpp"

namespace wristview::io {

namespace {

std::uint32_t crc32_table_entry(std::uint32_t n) {
    for (int k = 0; k < 8; ++k) n = (n & 1) ? 0xEDB88320u ^ (n >> 1) : n >> 1;
    return n;
}

const std::array<std::uint32_t, 256>& crc_table() {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t n = 0; n < 256; ++n) t[n] = crc32_table_entry(n);
        return t;
    }();
    return table;
}

std::uint32_t crc32_of(const unsigned char* data, std::size_t len, std::uint32_t crc = 0) {
    crc ^= 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) {
        crc = crc_table()[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    }
    return crc ^ 0xFFFFFFFFu;
}

std::uint32_t adler32_of(const unsigned char* data, std::size_t len) {
    std::uint32_t a = 1, b = 0;
    for (std::size_t i = 0; i < len; ++i) {
        a = (a + data[i]) % 65521u;
        b = (b + a) % 65521u;
    }
    return (b << 16) | a;
}

void put_be32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>(v & 0xFF));
}

void append_chunk(std::string& out, const char type[4], const std::string& payload) {
    put_be32(out, static_cast<std::uint32_t>(payload.size()));
    std::string body(type, 4);
    body += payload;
    out += body;
    put_be32(out, crc32_of(reinterpret_cast<const unsigned char*>(body.data()), body.size()));
}

unsigned char quantize(double x) {
    const double v = std::floor(x * 255.0 + 0.5);
    return static_cast<unsigned char>(v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

} // namespace

void write_png(const std::filesystem::path& path, const Image& image) {
    if (image.channels != 1 && image.channels != 3) {
        throw InputError("write_png: only 1- or 3-channel images, got " +
                         std::to_string(image.channels));
    }
    if (image.width <= 0 || image.height <= 0) {
        throw InputError("write_png: empty image");
    }

    // raw scanline stream: filter byte 0 + samples per row
    std::string raw;
    raw.reserve(static_cast<std::size_t>(image.height) *
                (static_cast<std::size_t>(image.width) * image.channels + 1));
    for (int v = 0; v < image.height; ++v) {
        raw.push_back('\0');
        for (int u = 0; u < image.width; ++u) {
            for (int c = 0; c < image.channels; ++c) {
                raw.push_back(static_cast<char>(quantize(image.at(u, v, c))));
            }
        }
    }

    // zlib stream with stored deflate blocks: byte-for-byte reproducible
    std::string z;
    z.push_back('\x78');
    z.push_back('\x01');
    std::size_t pos = 0;
    while (pos < raw.size() || raw.empty()) {
        const std::size_t n = std::min<std::size_t>(65535, raw.size() - pos);
        const bool final = pos + n == raw.size();
        z.push_back(final ? '\x01' : '\x00');
        z.push_back(static_cast<char>(n & 0xFF));
        z.push_back(static_cast<char>((n >> 8) & 0xFF));
        z.push_back(static_cast<char>(~n & 0xFF));
        z.push_back(static_cast<char>((~n >> 8) & 0xFF));
        z.append(raw, pos, n);
        pos += n;
        if (final) break;
    }
    put_be32(z, adler32_of(reinterpret_cast<const unsigned char*>(raw.data()), raw.size()));

    std::string png("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(image.width));
    put_be32(ihdr, static_cast<std::uint32_t>(image.height));
    ihdr.push_back(8); // bit depth
    ihdr.push_back(image.channels == 1 ? 0 : 2);
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    append_chunk(png, "IHDR", ihdr);
    append_chunk(png, "IDAT", z);
    append_chunk(png, "IEND", "");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(png.data(), static_cast<std::streamsize>(png.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Image read_png(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string pathstr = path.string();
    const auto fail = [&](std::size_t offset, const std::string& msg) -> ParseError {
        return ParseError(pathstr + "@" + std::to_string(offset), msg);
    };

    if (bytes.size() < 8 || bytes.compare(0, 8, "\x89PNG\r\n\x1a\n", 8) != 0) {
        throw fail(0, "not a PNG file");
    }
    const auto be32 = [&](std::size_t p) -> std::uint32_t {
        return (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[p])) << 24) |
               (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[p + 1])) << 16) |
               (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[p + 2])) << 8) |
               static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[p + 3]));
    };

    int width = 0, height = 0, channels = 0;
    std::string idat;
    std::size_t p = 8;
    bool saw_ihdr = false;
    while (p + 8 <= bytes.size()) {
        const std::uint32_t len = be32(p);
        const std::string type = bytes.substr(p + 4, 4);
        if (p + 12 + len > bytes.size()) throw fail(p, "truncated chunk '" + type + "'");
        const std::size_t data = p + 8;
        if (type == "IHDR") {
            if (len != 13) throw fail(p, "bad IHDR length");
            width = static_cast<int>(be32(data));
            height = static_cast<int>(be32(data + 4));
            const int depth = static_cast<unsigned char>(bytes[data + 8]);
            const int color = static_cast<unsigned char>(bytes[data + 9]);
            const int interlace = static_cast<unsigned char>(bytes[data + 12]);
            if (depth != 8) throw fail(p, "only 8-bit PNGs are supported");
            if (interlace != 0) throw fail(p, "interlaced PNGs are not supported");
            if (color == 0) channels = 1;
            else if (color == 2) channels = 3;
            else if (color == 6) channels = 4;
            else throw fail(p, "unsupported color type " + std::to_string(color));
            saw_ihdr = true;
        } else if (type == "IDAT") {
            idat.append(bytes, data, len);
        } else if (type == "IEND") {
            break;
        }
        p += 12 + len;
    }
    if (!saw_ihdr || width <= 0 || height <= 0) throw fail(0, "missing or invalid IHDR");

    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    std::vector<unsigned char> raw(static_cast<std::size_t>(height) * (stride + 1));
    uLongf raw_len = static_cast<uLongf>(raw.size());
    const int zrc = uncompress(raw.data(), &raw_len,
                               reinterpret_cast<const Bytef*>(idat.data()),
                               static_cast<uLong>(idat.size()));
    if (zrc != Z_OK || raw_len != raw.size()) {
        throw fail(0, "zlib inflate failed (code " + std::to_string(zrc) + ")");
    }

    Image img(width, height, channels);
    std::vector<unsigned char> prev(stride, 0);
    std::vector<unsigned char> cur(stride, 0);
    const int bpp = channels;
    for (int v = 0; v < height; ++v) {
        const unsigned char* row = raw.data() + static_cast<std::size_t>(v) * (stride + 1);
        const unsigned char filter = row[0];
        const unsigned char* src = row + 1;
        for (std::size_t i = 0; i < stride; ++i) {
            const int a = i >= static_cast<std::size_t>(bpp) ? cur[i - bpp] : 0;
            const int b = prev[i];
            const int c = i >= static_cast<std::size_t>(bpp) ? prev[i - bpp] : 0;
            int x = src[i];
            switch (filter) {
                case 0: break;
                case 1: x += a; break;
                case 2: x += b; break;
                case 3: x += (a + b) / 2; break;
                case 4: x += paeth(a, b, c); break;
                default: throw fail(0, "bad filter byte " + std::to_string(filter));
            }
            cur[i] = static_cast<unsigned char>(x & 0xFF);
        }
        for (std::size_t i = 0; i < stride; ++i) {
            img.data[static_cast<std::size_t>(v) * stride + i] = cur[i] / 255.0;
        }
        std::swap(prev, cur);
    }
    return img;
}

void write_pfm(const std::filesystem::path& path, int width, int height,
               const std::vector<float>& data) {
    if (data.size() != static_cast<std::size_t>(width) * height) {
        throw InputError("write_pfm: data size does not match dimensions");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "Pf\n" << width << " " << height << "\n-1.0\n";
    // PFM stores rows bottom-up
    for (int v = height - 1; v >= 0; --v) {
        out.write(reinterpret_cast<const char*>(data.data() + static_cast<std::size_t>(v) * width),
                  static_cast<std::streamsize>(sizeof(float) * width));
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

PfmImage read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    const std::string pathstr = path.string();
    std::string magic;
    in >> magic;
    if (magic != "Pf") {
        throw ParseError(pathstr + ":1", "expected grayscale PFM magic 'Pf', got '" + magic + "'");
    }
    PfmImage img;
    double scale = 0.0;
    if (!(in >> img.width >> img.height >> scale)) {
        throw ParseError(pathstr, "malformed PFM header");
    }
    if (img.width <= 0 || img.height <= 0) throw ParseError(pathstr, "bad PFM dimensions");
    if (scale >= 0.0) {
        throw UnsupportedProperty(pathstr + ": big-endian PFM is not supported");
    }
    in.get(); // single whitespace after the scale line
    img.data.assign(static_cast<std::size_t>(img.width) * img.height, 0.0f);
    for (int v = img.height - 1; v >= 0; --v) {
        in.read(reinterpret_cast<char*>(img.data.data() + static_cast<std::size_t>(v) * img.width),
                static_cast<std::streamsize>(sizeof(float) * img.width));
        if (in.gcount() != static_cast<std::streamsize>(sizeof(float) * img.width)) {
            throw ParseError(pathstr, "truncated PFM payload");
        }
    }
    const double s = -scale;
    if (s != 1.0) {
        for (float& f : img.data) f = static_cast<float>(f * s);
    }
    return img;
}

Image condition_map_rgb(const ConditionMap& map) {
    Image img(map.width, map.height, 3);
    for (std::size_t i = 0; i < map.rgb.size(); ++i) img.data[i] = map.rgb[i];
    return img;
}

void write_condition_outputs(const ConditionMap& map, const std::filesystem::path& stem) {
    write_png(std::filesystem::path(stem.string() + ".png"), condition_map_rgb(map));
    write_pfm(std::filesystem::path(stem.string() + ".depth.pfm"), map.width, map.height,
              map.depth);
    Image mask(map.width, map.height, 1);
    for (std::size_t i = 0; i < map.mask.size(); ++i) {
        mask.data[i] = map.mask[i] ? 1.0 : 0.0;
    }
    write_png(std::filesystem::path(stem.string() + ".mask.png"), mask);
}

} // namespace wristview::io
