#include "tnle/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tnle/error.hpp"

namespace tnle {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- PNM -------------------------------------------------------------

// Next whitespace-separated header token, skipping '#' comments.
std::string pnm_token(const std::string& bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
            ++pos;
        } else if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))
           && bytes[pos] != '#')
        ++pos;
    if (start == pos) throw IoError("corrupt image: truncated header");
    return bytes.substr(start, pos - start);
}

std::size_t pnm_uint(const std::string& bytes, std::size_t& pos) {
    const std::string tok = pnm_token(bytes, pos);
    std::size_t val = 0, used = 0;
    try {
        val = std::stoul(tok, &used);
    } catch (const std::exception&) {
        throw IoError("corrupt image: bad header number '" + tok + "'");
    }
    if (used != tok.size()) throw IoError("corrupt image: bad header number '" + tok + "'");
    return val;
}

Tensor3 decode_pnm(const std::string& bytes, const std::string& path) {
    std::size_t pos = 2; // past magic
    const char kind = bytes[1];
    const std::size_t width = pnm_uint(bytes, pos);
    const std::size_t height = pnm_uint(bytes, pos);
    const std::size_t maxval = pnm_uint(bytes, pos);
    if (maxval != 255) throw IoError(path + ": unsupported depth (maxval must be 255)");
    if (width == 0 || height == 0) throw IoError(path + ": corrupt image: zero dimension");

    const bool color = kind == '6' || kind == '3';
    const std::size_t channels = color ? 3 : 1;
    const std::size_t count = width * height * channels;
    std::vector<double> raw(count);

    if (kind == '6' || kind == '5') {
        ++pos; // exactly one whitespace byte after maxval
        if (pos + count > bytes.size()) throw IoError(path + ": corrupt image: truncated pixel data");
        for (std::size_t i = 0; i < count; ++i)
            raw[i] = static_cast<double>(static_cast<unsigned char>(bytes[pos + i]));
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t v;
            try {
                v = pnm_uint(bytes, pos);
            } catch (const IoError&) {
                throw IoError(path + ": corrupt image: truncated pixel data");
            }
            if (v > maxval) throw IoError(path + ": corrupt image: sample exceeds maxval");
            raw[i] = static_cast<double>(v);
        }
    }

    Tensor3 t(height, width, 3);
    if (color) {
        for (std::size_t r = 0; r < height; ++r)
            for (std::size_t c = 0; c < width; ++c)
                for (std::size_t ch = 0; ch < 3; ++ch)
                    t(r, c, ch) = raw[(r * width + c) * 3 + ch];
    } else {
        std::cerr << "warning: " << path << ": grayscale input replicated to 3 channels\n";
        for (std::size_t r = 0; r < height; ++r)
            for (std::size_t c = 0; c < width; ++c)
                for (std::size_t ch = 0; ch < 3; ++ch) t(r, c, ch) = raw[r * width + c];
    }
    return t;
}

// --- BMP (uncompressed 24-bit) ----------------------------------------

std::uint32_t le32(const std::string& b, std::size_t off) {
    return static_cast<std::uint32_t>(static_cast<unsigned char>(b[off]))
           | static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 1])) << 8
           | static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 2])) << 16
           | static_cast<std::uint32_t>(static_cast<unsigned char>(b[off + 3])) << 24;
}

std::uint16_t le16(const std::string& b, std::size_t off) {
    return static_cast<std::uint16_t>(static_cast<unsigned char>(b[off])
                                      | static_cast<unsigned char>(b[off + 1]) << 8);
}

Tensor3 decode_bmp(const std::string& bytes, const std::string& path) {
    if (bytes.size() < 54) throw IoError(path + ": corrupt image: truncated BMP header");
    const std::uint32_t pixel_offset = le32(bytes, 10);
    const std::uint32_t header_size = le32(bytes, 14);
    if (header_size < 40) throw IoError(path + ": unsupported format (BMP header)");
    const std::int32_t width = static_cast<std::int32_t>(le32(bytes, 18));
    const std::int32_t height_raw = static_cast<std::int32_t>(le32(bytes, 22));
    const std::uint16_t bitcount = le16(bytes, 28);
    const std::uint32_t compression = le32(bytes, 30);
    if (bitcount != 24) throw IoError(path + ": unsupported depth (BMP must be 24-bit)");
    if (compression != 0) throw IoError(path + ": unsupported format (compressed BMP)");
    if (width <= 0 || height_raw == 0) throw IoError(path + ": corrupt image: bad BMP dimensions");

    const bool bottom_up = height_raw > 0;
    const std::size_t w = static_cast<std::size_t>(width);
    const std::size_t h = static_cast<std::size_t>(bottom_up ? height_raw : -height_raw);
    const std::size_t stride = (w * 3 + 3) & ~std::size_t{3};
    if (pixel_offset + stride * h > bytes.size())
        throw IoError(path + ": corrupt image: truncated BMP pixel data");

    Tensor3 t(h, w, 3);
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t src_row = bottom_up ? h - 1 - r : r;
        const std::size_t base = pixel_offset + src_row * stride;
        for (std::size_t c = 0; c < w; ++c) {
            // BMP stores BGR
            t(r, c, 0) = static_cast<unsigned char>(bytes[base + 3 * c + 2]);
            t(r, c, 1) = static_cast<unsigned char>(bytes[base + 3 * c + 1]);
            t(r, c, 2) = static_cast<unsigned char>(bytes[base + 3 * c + 0]);
        }
    }
    return t;
}

} // namespace

Tensor3 decode_image(const std::string& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() < 2) throw IoError(path + ": corrupt image: too short");
    if (bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '3' || bytes[1] == '5' || bytes[1] == '2'))
        return decode_pnm(bytes, path);
    if (bytes[0] == 'B' && bytes[1] == 'M') return decode_bmp(bytes, path);
    throw IoError(path + ": unsupported format");
}

void encode_image(const Tensor3& t, const std::string& path) {
    if (t.n3() != 3) throw std::invalid_argument("encode_image needs a 3-channel tensor");
    for (double v : t.data())
        if (!std::isfinite(v)) throw std::invalid_argument("encode_image: non-finite value");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open file for writing");
    out << "P6\n" << t.n2() << " " << t.n1() << "\n255\n";
    std::vector<unsigned char> row(t.n2() * 3);
    for (std::size_t r = 0; r < t.n1(); ++r) {
        for (std::size_t c = 0; c < t.n2(); ++c) {
            for (std::size_t ch = 0; ch < 3; ++ch) {
                const long v = std::lround(t(r, c, ch));
                row[c * 3 + ch] = static_cast<unsigned char>(std::clamp(v, 0L, 255L));
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError(path + ": write failure");
}

Manifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open file");
    Manifest mf;
    mf.base_dir = std::filesystem::path(path).parent_path().string();

    std::string line;
    while (std::getline(in, line)) {
        const std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        const std::size_t end = line.find_last_not_of(" \t\r");
        std::string entry = line.substr(start, end - start + 1);
        if (entry.empty() || entry[0] == '#') continue;
        std::filesystem::path p(entry);
        if (p.is_relative() && !mf.base_dir.empty())
            p = std::filesystem::path(mf.base_dir) / p;
        mf.entries.push_back(p.string());
    }
    return mf;
}

void write_bank(const CoefficientBank& bank, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open file for writing");
    out << "tnle-bank v1 M1=" << bank.window << " n=" << bank.n_eigs << "\n";
    for (const auto& e : bank.entries) {
        out << format_double(e.sigma_ref);
        for (double th : e.theta) out << " " << format_double(th);
        out << "\n";
    }
    if (bank.pooled) {
        out << "pooled";
        for (double th : bank.pooled->theta) out << " " << format_double(th);
        out << "\n";
    }
    if (!out) throw IoError(path + ": write failure");
}

namespace {

double parse_double(const std::string& tok, const std::string& path, std::size_t lineno) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(lineno) + ": non-numeric value '" + tok + "'");
    }
    if (used != tok.size())
        throw IoError(path + ":" + std::to_string(lineno) + ": non-numeric value '" + tok + "'");
    return v;
}

} // namespace

CoefficientBank read_bank(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open file");

    CoefficientBank bank;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ss(line);
        std::vector<std::string> tok;
        for (std::string t; ss >> t;) tok.push_back(t);
        if (tok.empty() || tok[0][0] == '#') continue;

        if (!header_seen) {
            if (tok.size() != 4 || tok[0] != "tnle-bank")
                throw IoError(path + ":" + std::to_string(lineno) + ": malformed bank header");
            if (tok[1] != "v1")
                throw IoError(path + ":" + std::to_string(lineno) + ": unsupported version '"
                              + tok[1] + "'");
            if (tok[2].rfind("M1=", 0) != 0 || tok[3].rfind("n=", 0) != 0)
                throw IoError(path + ":" + std::to_string(lineno) + ": malformed bank header");
            bank.window = static_cast<std::size_t>(
                parse_double(tok[2].substr(3), path, lineno));
            bank.n_eigs = static_cast<std::size_t>(
                parse_double(tok[3].substr(2), path, lineno));
            header_seen = true;
            continue;
        }

        if (tok[0] == "pooled") {
            if (tok.size() != bank.n_eigs + 2)
                throw IoError(path + ":" + std::to_string(lineno) + ": wrong field count");
            CoefficientSet set;
            for (std::size_t i = 1; i < tok.size(); ++i)
                set.theta.push_back(parse_double(tok[i], path, lineno));
            bank.pooled = std::move(set);
            continue;
        }

        if (tok.size() != bank.n_eigs + 2)
            throw IoError(path + ":" + std::to_string(lineno) + ": wrong field count");
        CoefficientSet set;
        set.sigma_ref = parse_double(tok[0], path, lineno);
        for (std::size_t i = 1; i < tok.size(); ++i)
            set.theta.push_back(parse_double(tok[i], path, lineno));
        if (!bank.entries.empty() && set.sigma_ref <= bank.entries.back().sigma_ref)
            throw IoError(path + ":" + std::to_string(lineno)
                          + ": sigma_ref not strictly increasing");
        bank.entries.push_back(std::move(set));
    }
    if (!header_seen) throw IoError(path + ": missing bank header");
    return bank;
}

namespace {

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

} // namespace

void write_results(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open file for writing");
    out << "image_id,sigma_true,method,sigma_hat,abs_error,s_used,n,M1,seed\n";
    for (const auto& r : rows) {
        out << csv_quote(r.image_id) << "," << format_double(r.sigma_true) << ","
            << csv_quote(r.method) << "," << format_double(r.sigma_hat) << ","
            << format_double(r.abs_error) << "," << r.s_used << "," << r.n_eigs << ","
            << r.window << "," << r.seed << "\n";
    }
    if (!out) throw IoError(path + ": write failure");
}

void write_metrics(const std::vector<MetricRow>& metrics, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open file for writing");
    out << "sigma_true,method,rmse_spread,rmse_truth,mae,n_samples\n";
    for (const auto& m : metrics) {
        out << format_double(m.sigma_true) << "," << csv_quote(m.method) << ","
            << format_double(m.report.rmse_spread) << "," << format_double(m.report.rmse_truth)
            << "," << format_double(m.report.mae) << "," << m.report.n_samples << "\n";
    }
    if (!out) throw IoError(path + ": write failure");
}

void write_spectrum_csv(const Spectrum& sp, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open file for writing");
    for (double v : sp.values) out << format_double(v) << "\n";
    if (!out) throw IoError(path + ": write failure");
}

} // namespace tnle
