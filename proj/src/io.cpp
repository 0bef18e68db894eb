#include "spherelab/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spherelab/operators.hpp"

namespace spherelab {
namespace io {

std::string shortest(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_set(const CompactSet& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_set: cannot open " + path);
    out << "# dim=" << s.dim << " resolution=" << shortest(s.resolution)
        << " label=" << s.label << "\n";
    for (std::size_t i = 0; i < s.count(); ++i) {
        const auto p = s.point(i);
        for (int ax = 0; ax < s.dim; ++ax)
            out << (ax ? " " : "") << shortest(p[ax]);
        out << "\n";
    }
}

CompactSet read_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_set: cannot open " + path);
    std::string header;
    std::getline(in, header);
    CompactSet s;
    if (std::sscanf(header.c_str(), "# dim=%d resolution=%lf", &s.dim,
                    &s.resolution) != 2)
        throw std::runtime_error("read_set: malformed header in " + path);
    const auto lab = header.find("label=");
    if (lab != std::string::npos) s.label = header.substr(lab + 6);
    double v;
    while (in >> v) s.points.push_back(v);
    if (s.points.size() % s.dim != 0)
        throw std::runtime_error("read_set: truncated point data in " + path);
    return s;
}

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)(v >> (8 * i));
    out.write(reinterpret_cast<char*>(b), 8);
}

std::uint64_t get_u64(std::ifstream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= (std::uint64_t)b[i] << (8 * i);
    return v;
}

std::uint64_t dbl_bits(double d) {
    std::uint64_t u;
    std::memcpy(&u, &d, 8);
    return u;
}

double bits_dbl(std::uint64_t u) {
    double d;
    std::memcpy(&d, &u, 8);
    return d;
}

} // namespace

void write_grid(const GridFunction& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_grid: cannot open " + path);
    out.write("SLGF", 4);
    put_u64(out, (std::uint64_t)g.dim);
    put_u64(out, (std::uint64_t)g.n);
    put_u64(out, dbl_bits(g.lo));
    put_u64(out, dbl_bits(g.hi));
    for (double v : g.values) put_u64(out, dbl_bits(v));
}

GridFunction read_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_grid: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (std::memcmp(magic, "SLGF", 4) != 0)
        throw std::runtime_error("read_grid: bad magic in " + path);
    GridFunction g;
    g.dim = (int)get_u64(in);
    g.n = (int)get_u64(in);
    g.lo = bits_dbl(get_u64(in));
    g.hi = bits_dbl(get_u64(in));
    std::size_t total = 1;
    for (int i = 0; i < g.dim; ++i) total *= (std::size_t)g.n;
    g.values.resize(total);
    for (auto& v : g.values) v = bits_dbl(get_u64(in));
    if (!in) throw std::runtime_error("read_grid: truncated payload in " + path);
    return g;
}

void write_grid_csv(const GridFunction& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_grid_csv: cannot open " + path);
    for (int ax = 0; ax < g.dim; ++ax) out << "x" << ax << ",";
    out << "value\n";
    std::vector<double> x(g.dim);
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
        g.cell_center(c, x);
        for (int ax = 0; ax < g.dim; ++ax) out << shortest(x[ax]) << ",";
        out << shortest(g.values[c]) << "\n";
    }
}

void write_witnesses(const OperatorOutput& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_witnesses: cannot open " + path);
    out << "cell,u0,u1,u2,v0,v1,v2,k,value\n";
    for (std::size_t c = 0; c < op.witnesses.size(); ++c) {
        const Witness& w = op.witnesses[c];
        out << c;
        for (double u : w.u) out << "," << shortest(u);
        if (w.has_v)
            for (double v : w.v) out << "," << shortest(v);
        else
            out << ",,,";
        out << "," << (w.has_k ? std::to_string(w.k) : std::string());
        out << "," << shortest(w.value) << "\n";
    }
}

std::map<std::string, std::string> read_kv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_kv: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) continue;
        if (kv.count(key)) throw std::runtime_error("read_kv: duplicate key " + key);
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

namespace {

// Compact SHA-256 (FIPS 180-4), enough for manifest content hashes.
struct Sha256 {
    std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                          0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    unsigned char block[64];
    std::size_t fill = 0;
    std::uint64_t total = 0;

    static std::uint32_t rotr(std::uint32_t x, int n) {
        return (x >> n) | (x << (32 - n));
    }

    void compress(const unsigned char* p) {
        static const std::uint32_t K[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
            0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
            0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
            0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
            0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
            0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
            0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
            0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t)p[4 * i] << 24 | (std::uint32_t)p[4 * i + 1] << 16 |
                   (std::uint32_t)p[4 * i + 2] << 8 | p[4 * i + 3];
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 =
                rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 =
                rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5],
                      g = h[6], hh = h[7];
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + S1 + ch + K[i] + w[i];
            const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = S0 + maj;
            hh = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        h[0] += a; h[1] += b; h[2] += c; h[3] += d;
        h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
    }

    void update(const unsigned char* p, std::size_t n) {
        total += n;
        while (n > 0) {
            const std::size_t take = std::min(n, sizeof(block) - fill);
            std::memcpy(block + fill, p, take);
            fill += take;
            p += take;
            n -= take;
            if (fill == 64) {
                compress(block);
                fill = 0;
            }
        }
    }

    std::string hex() {
        const std::uint64_t bits = total * 8;
        unsigned char pad = 0x80;
        update(&pad, 1);
        unsigned char zero = 0;
        while (fill != 56) update(&zero, 1);
        unsigned char len[8];
        for (int i = 0; i < 8; ++i) len[i] = (unsigned char)(bits >> (56 - 8 * i));
        update(len, 8);
        char out[65];
        for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
        return std::string(out, 64);
    }
};

} // namespace

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("sha256_file: cannot open " + path);
    Sha256 s;
    std::array<char, 65536> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        s.update(reinterpret_cast<unsigned char*>(buf.data()), (std::size_t)in.gcount());
    }
    return s.hex();
}

void write_loglog_svg(const std::vector<std::pair<double, double>>& pts, double slope,
                      double intercept, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_loglog_svg: cannot open " + path);
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (auto [x, y] : pts) {
        const double lx = std::log(x), ly = std::log(y);
        xmin = std::min(xmin, lx); xmax = std::max(xmax, lx);
        ymin = std::min(ymin, ly); ymax = std::max(ymax, ly);
    }
    if (xmax <= xmin) { xmax = xmin + 1; }
    if (ymax <= ymin) { ymax = ymin + 1; }
    const double W = 480, H = 360, M = 40;
    auto px = [&](double lx) { return M + (lx - xmin) / (xmax - xmin) * (W - 2 * M); };
    auto py = [&](double ly) { return H - M - (ly - ymin) / (ymax - ymin) * (H - 2 * M); };
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    out << "<line x1='" << px(xmin) << "' y1='" << py(slope * xmin + intercept)
        << "' x2='" << px(xmax) << "' y2='" << py(slope * xmax + intercept)
        << "' stroke='steelblue'/>\n";
    for (auto [x, y] : pts)
        out << "<circle cx='" << px(std::log(x)) << "' cy='" << py(std::log(y))
            << "' r='3' fill='crimson'/>\n";
    out << "<text x='" << M << "' y='" << M / 2 << "'>slope " << shortest(slope)
        << "</text>\n</svg>\n";
}

} // namespace io
} // namespace spherelab
