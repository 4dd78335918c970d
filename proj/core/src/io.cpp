#include "cvxseg/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cvxseg/errors.hpp"

namespace cvxseg {

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string token;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) {
            token.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c)) token.push_back(static_cast<char>(in.get()));
            return token;
        }
    }
    return token;
}

int parse_positive_int(const std::string& token, const std::string& path, const char* what) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(token, &used);
        if (used != token.size() || v <= 0) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw ParseError(path + ": bad " + what + " in netpbm header");
    }
}

struct PnmPayload {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> bytes;
};

PnmPayload read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    const std::string magic = next_token(in);
    PnmPayload payload;
    if (magic == "P5")
        payload.channels = 1;
    else if (magic == "P6")
        payload.channels = 3;
    else
        throw ParseError(path + ": expected P5 or P6 netpbm file");
    payload.width = parse_positive_int(next_token(in), path, "width");
    payload.height = parse_positive_int(next_token(in), path, "height");
    const int maxval = parse_positive_int(next_token(in), path, "maxval");
    if (maxval != 255) throw ParseError(path + ": only maxval 255 is supported");
    in.get();  // single whitespace after maxval
    const std::size_t count =
        static_cast<std::size_t>(payload.width) * payload.height * payload.channels;
    payload.bytes.resize(count);
    in.read(reinterpret_cast<char*>(payload.bytes.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count)
        throw ParseError(path + ": truncated pixel payload");
    return payload;
}

void write_pnm(const std::string& path, int width, int height, int channels,
               const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out << (channels == 1 ? "P5" : "P6") << "\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ParseError(path + ": write failed");
}

std::uint8_t quantize(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

void append_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

std::uint32_t read_u32_le(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

Image read_image(const std::string& path) {
    const PnmPayload payload = read_pnm(path);
    Image img(payload.width, payload.height, payload.channels);
    auto& values = img.values();
    for (std::size_t i = 0; i < payload.bytes.size(); ++i)
        values[i] = payload.bytes[i] / 255.0;
    return img;
}

void write_image(const std::string& path, const Image& img) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(img.values().size());
    for (double v : img.values()) bytes.push_back(quantize(v));
    write_pnm(path, img.width(), img.height(), img.channels(), bytes);
}

BinaryMask read_mask(const std::string& path) {
    const PnmPayload payload = read_pnm(path);
    if (payload.channels != 1) throw ParseError(path + ": mask must be a P5 gray file");
    BinaryMask mask(payload.width, payload.height);
    for (std::size_t i = 0; i < payload.bytes.size(); ++i)
        mask.values[i] = payload.bytes[i] < 128 ? 0 : 1;
    return mask;
}

void write_mask(const std::string& path, const BinaryMask& mask) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(mask.values.size());
    for (std::uint8_t v : mask.values) bytes.push_back(v == 0 ? 0 : 255);
    write_pnm(path, mask.width, mask.height, 1, bytes);
}

void read_scribbles(const std::string& path, LabelSet& labels) {
    const PnmPayload payload = read_pnm(path);
    if (payload.channels != 1) throw ParseError(path + ": scribbles must be a P5 gray file");
    for (int n = 0; n < payload.height; ++n)
        for (int m = 0; m < payload.width; ++m) {
            const std::uint8_t v = payload.bytes[static_cast<std::size_t>(n) * payload.width + m];
            if (v == 255)
                labels.object.push_back({m, n});
            else if (v == 128)
                labels.background.push_back({m, n});
            else if (v != 0)
                throw ParseError(path + ": scribble values must be 0, 128 or 255");
        }
}

void read_landmarks(const std::string& path, LabelSet& labels) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::istringstream row(line);
        long m = 0, n = 0;
        std::string extra;
        if (!(row >> m >> n) || (row >> extra))
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": expected one \"m n\" pair");
        if (m < 1 || n < 1)
            throw ParseError(path + ":" + std::to_string(line_no) +
                             ": landmark coordinates are 1-based");
        labels.landmarks.push_back({static_cast<int>(m - 1), static_cast<int>(n - 1)});
    }
}

ScalarField read_phi(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::uint8_t header[16];
    in.read(reinterpret_cast<char*>(header), 16);
    if (in.gcount() != 16 || std::memcmp(header, "PHI0", 4) != 0)
        throw ParseError(path + ": missing PHI0 header");
    const std::uint32_t width = read_u32_le(header + 4);
    const std::uint32_t height = read_u32_le(header + 8);
    if (width == 0 || height == 0 || width > (1u << 20) || height > (1u << 20))
        throw ParseError(path + ": implausible dimensions in header");
    ScalarField phi(static_cast<int>(width), static_cast<int>(height));
    const std::size_t count = static_cast<std::size_t>(width) * height;
    std::vector<std::uint8_t> raw(count * 8);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw ParseError(path + ": truncated sample payload");
    auto values = phi.values();
    for (std::size_t i = 0; i < count; ++i) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) bits = (bits << 8) | raw[i * 8 + b];
        double v;
        std::memcpy(&v, &bits, 8);
        values[i] = v;
    }
    return phi;
}

void write_phi(const std::string& path, const ScalarField& phi) {
    std::vector<std::uint8_t> out;
    out.reserve(16 + phi.values().size() * 8);
    out.insert(out.end(), {'P', 'H', 'I', '0'});
    append_u32_le(out, static_cast<std::uint32_t>(phi.width()));
    append_u32_le(out, static_cast<std::uint32_t>(phi.height()));
    append_u32_le(out, 0);
    for (double v : phi.values()) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>((bits >> (8 * b)) & 0xff));
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ParseError(path + ": cannot open file for writing");
    file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!file) throw ParseError(path + ": write failed");
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<IterationStats>& history) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open file for writing");
    out << "iter,energy,res_zeta,res_xi,convexity_violation,dice\n";
    out.precision(12);
    for (const IterationStats& s : history) {
        out << s.iter << ',' << s.energy << ',' << s.res_zeta << ',' << s.res_xi << ','
            << s.convexity_violation << ',';
        if (s.dice) out << *s.dice;
        out << '\n';
    }
    if (!out) throw ParseError(path + ": write failed");
}

std::string format_report(const ConvexityReport& report) {
    std::ostringstream out;
    out.precision(6);
    out << "max_violation: " << report.max_violation << "\n";
    out << "worst_pixel: " << report.worst_pixel.m + 1 << " " << report.worst_pixel.n + 1 << "\n";
    out << "mask_convex: " << (report.mask_convex ? "yes" : "no") << "\n";
    for (const SublevelResult& s : report.sublevels) {
        out << "sublevel " << s.level << ": "
            << (s.empty ? "empty" : (s.convex ? "convex" : "nonconvex")) << "\n";
    }
    out << "verdict: " << (report.all_convex() ? "convex" : "nonconvex") << "\n";
    return out.str();
}

Image render_overlay(const Image& img, const BinaryMask& mask) {
    if (img.width() != mask.width || img.height() != mask.height)
        throw std::invalid_argument("render_overlay: shape mismatch");
    const int M = img.width(), N = img.height();
    Image rgb(M, N, 3);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m)
            for (int c = 0; c < 3; ++c)
                rgb(m, n, c) = img(m, n, img.channels() == 3 ? c : 0);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m) {
            if (!mask.is_object(m, n)) continue;
            const bool boundary = (m > 0 && !mask.is_object(m - 1, n)) ||
                                  (m + 1 < M && !mask.is_object(m + 1, n)) ||
                                  (n > 0 && !mask.is_object(m, n - 1)) ||
                                  (n + 1 < N && !mask.is_object(m, n + 1)) ||
                                  m == 0 || n == 0 || m == M - 1 || n == N - 1;
            if (boundary) {
                rgb(m, n, 0) = 1.0;
                rgb(m, n, 1) = 0.0;
                rgb(m, n, 2) = 0.0;
            }
        }
    return rgb;
}

}  // namespace cvxseg
