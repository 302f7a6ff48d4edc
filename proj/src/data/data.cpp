// SPDX-License-Identifier: Apache-2.0
#include "qrn/data/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "qrn/core/error.hpp"
#include "qrn/core/rng.hpp"

namespace qrn::data {

namespace {

struct Glyph {
    std::vector<std::pair<int, int>> pixels;  // (row, col)
    int h = 0, w = 0;

    void finish() {
        for (auto [r, c] : pixels) {
            h = std::max(h, r + 1);
            w = std::max(w, c + 1);
        }
    }
};

/// Canonical horizontal glyph for a class, major dimension L.
Glyph make_glyph(int cls, int L) {
    Glyph g;
    auto px = [&](int r, int c) { g.pixels.emplace_back(r, c); };
    switch (cls) {
        case 0:  // long thin bar + stock block
            for (int c = 0; c < L; ++c) px(0, c);
            for (int r = 1; r <= 2; ++r)
                for (int c = 0; c < 2; ++c) px(r, c);
            break;
        case 1:  // thick bar + muzzle block
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < L; ++c) px(r, c);
            for (int r = 1; r <= 2; ++r)
                for (int c = L; c < L + 3; ++c) px(r, c);
            break;
        case 2: {  // L-shape
            const int barw = std::max(4, (2 * L) / 3);
            const int barh = std::max(4, L / 2);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < barw; ++c) px(r, c);
            for (int r = 0; r < barh; ++r)
                for (int c = 0; c < 2; ++c) px(r, c);
            break;
        }
        default: {  // thin tapering triangle
            const auto ceil_div = [](int a, int b) { return (a + b - 1) / b; };
            for (int c = 0; c < L; ++c) px(0, c);
            for (int c = 0; c < ceil_div(2 * L, 3); ++c) px(1, c);
            for (int c = 0; c < ceil_div(L, 3); ++c) px(2, c);
            break;
        }
    }
    g.finish();
    return g;
}

Glyph rotate_quarter(const Glyph& g, int quarters) {
    Glyph out;
    for (auto [r, c] : g.pixels) {
        switch (quarters & 3) {
            case 0: out.pixels.emplace_back(r, c); break;
            case 1: out.pixels.emplace_back(c, g.h - 1 - r); break;
            case 2: out.pixels.emplace_back(g.h - 1 - r, g.w - 1 - c); break;
            default: out.pixels.emplace_back(g.w - 1 - c, r); break;
        }
    }
    out.finish();
    return out;
}

bool boxes_disjoint(const detector::Box& a, const detector::Box& b) {
    return a.x1 <= b.x0 || b.x1 <= a.x0 || a.y1 <= b.y0 || b.y1 <= a.y0;
}

/// Draws one glyph into the image; returns its tight box.
detector::GroundTruth place_glyph(FeatureTensor& image, int cls, int S, Rng& rng,
                                  const detector::Box* avoid) {
    const double scale = rng.uniform(0.3, 0.7);
    const int L = std::clamp(static_cast<int>(std::lround(scale * S)), 4, S - 4);
    const int quarters = static_cast<int>(rng.uniform_int(0, 3));
    const double intensity = rng.uniform(0.6, 1.0);
    const Glyph glyph = rotate_quarter(make_glyph(cls, L), quarters);

    int y0 = 0, x0 = 0;
    detector::Box box;
    for (int attempt = 0; attempt < 20; ++attempt) {
        y0 = static_cast<int>(rng.uniform_int(0, S - glyph.h));
        x0 = static_cast<int>(rng.uniform_int(0, S - glyph.w));
        box = {static_cast<double>(x0), static_cast<double>(y0),
               static_cast<double>(x0 + glyph.w), static_cast<double>(y0 + glyph.h)};
        if (!avoid || boxes_disjoint(box, *avoid)) break;
        if (attempt == 19) return {{0, 0, 0, 0}, cls};  // caller drops it
    }
    for (auto [r, c] : glyph.pixels) image.at(0, y0 + r, x0 + c) = intensity;
    return {box, cls};
}

}  // namespace

std::vector<Sample> generate(const DatasetConfig& config) {
    const int S = config.image_size;
    if (S < 8 || S % 4 != 0)
        throw ArgumentError("generate: image_size must be >= 8 and divisible by 4");
    if (config.samples_per_class < 1)
        throw ArgumentError("generate: samples_per_class must be >= 1");
    if (config.noise_level < 0.0 || config.noise_level > 0.2)
        throw ArgumentError("generate: noise_level must lie in [0, 0.2]");

    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(config.samples_per_class) * 4);
    for (int i = 0; i < config.samples_per_class; ++i) {
        for (int cls = 0; cls < 4; ++cls) {
            const std::uint64_t index = static_cast<std::uint64_t>(i) * 4 + cls;
            Rng rng(mix_seed(config.seed, index));
            Sample s;
            s.image = FeatureTensor(1, S, S);
            s.truths.push_back(place_glyph(s.image, cls, S, rng, nullptr));
            if (config.multi_object) {
                const int cls2 = static_cast<int>(rng.uniform_int(0, 3));
                const auto second = place_glyph(s.image, cls2, S, rng, &s.truths[0].box);
                if (second.box.area() > 0) s.truths.push_back(second);
            }
            if (config.noise_level > 0.0) {
                for (double& v : s.image.values)
                    v = std::min(1.0, v + rng.uniform01() * config.noise_level);
            }
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

FeatureTensor normalize(const Raster& raster) {
    if (raster.width < 1 || raster.height < 1 ||
        raster.pixels.size() != static_cast<std::size_t>(raster.width) * raster.height)
        throw ArgumentError("normalize: malformed raster");
    FeatureTensor img(1, raster.height, raster.width);
    for (std::size_t i = 0; i < raster.pixels.size(); ++i)
        img.values[i] = raster.pixels[i] / 255.0;
    return img;
}

Raster to_raster(const FeatureTensor& image) {
    if (image.channels != 1) throw ArgumentError("to_raster: image must be single channel");
    Raster r;
    r.width = image.width;
    r.height = image.height;
    r.pixels.resize(image.values.size());
    for (std::size_t i = 0; i < image.values.size(); ++i)
        r.pixels[i] =
            static_cast<std::uint8_t>(std::lround(std::clamp(image.values[i], 0.0, 1.0) * 255.0));
    return r;
}

Sample flip_horizontal(const Sample& sample) {
    Sample out = sample;
    const int W = sample.image.width;
    for (int y = 0; y < sample.image.height; ++y)
        for (int x = 0; x < W; ++x) out.image.at(0, y, x) = sample.image.at(0, y, W - 1 - x);
    for (std::size_t t = 0; t < sample.truths.size(); ++t) {
        out.truths[t].box.x0 = W - sample.truths[t].box.x1;
        out.truths[t].box.x1 = W - sample.truths[t].box.x0;
    }
    return out;
}

Sample translate(const Sample& sample, int dx, int dy) {
    Sample out = sample;
    const int H = sample.image.height, W = sample.image.width;
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const int sy = y - dy, sx = x - dx;
            out.image.at(0, y, x) = (sy >= 0 && sy < H && sx >= 0 && sx < W)
                                        ? sample.image.at(0, sy, sx)
                                        : 0.0;
        }
    }
    for (auto& t : out.truths) {
        t.box.x0 += dx;
        t.box.x1 += dx;
        t.box.y0 += dy;
        t.box.y1 += dy;
    }
    return out;
}

Sample augment(const Sample& sample, std::uint64_t rng_seed) {
    Rng rng(rng_seed);
    Sample out = rng.bernoulli(0.5) ? flip_horizontal(sample) : sample;
    int dx = static_cast<int>(rng.uniform_int(-2, 2));
    int dy = static_cast<int>(rng.uniform_int(-2, 2));
    const int H = out.image.height, W = out.image.width;
    for (const auto& t : out.truths) {
        dx = std::clamp(dx, -static_cast<int>(std::floor(t.box.x0)),
                        W - static_cast<int>(std::ceil(t.box.x1)));
        dy = std::clamp(dy, -static_cast<int>(std::floor(t.box.y0)),
                        H - static_cast<int>(std::ceil(t.box.y1)));
    }
    return translate(out, dx, dy);
}

namespace {

/// Integer field parser for the PGM header; supports '#' comments.
int parse_pnm_int(const std::vector<std::uint8_t>& bytes, std::size_t& pos,
                  const char* field) {
    while (pos < bytes.size()) {
        if (std::isspace(bytes[pos])) {
            ++pos;
        } else if (bytes[pos] == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    if (pos >= bytes.size())
        throw FormatError(std::string("unexpected end of header reading ") + field, pos);
    if (!std::isdigit(bytes[pos]))
        throw FormatError(std::string("expected integer for ") + field, pos);
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
        v = v * 10 + (bytes[pos] - '0');
        if (v > 1 << 30) throw FormatError(std::string(field) + " out of range", pos);
        ++pos;
    }
    return static_cast<int>(v);
}

}  // namespace

Raster load_pgm(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path.string() + "'", 0);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                    std::istreambuf_iterator<char>());
    if (bytes.size() < 2 || bytes[0] != 'P')
        throw FormatError("not a PNM file", 0);
    if (bytes[1] != '5') {
        if (bytes[1] == '2') throw FormatError("unsupported PNM variant P2 (ASCII PGM)", 1);
        throw FormatError("unsupported PNM variant", 1);
    }
    std::size_t pos = 2;
    const int w = parse_pnm_int(bytes, pos, "width");
    const int h = parse_pnm_int(bytes, pos, "height");
    const std::size_t maxval_pos = pos;
    const int maxval = parse_pnm_int(bytes, pos, "maxval");
    if (maxval != 255)
        throw FormatError("unsupported depth: maxval " + std::to_string(maxval) +
                              " (only 255 supported)",
                          maxval_pos);
    if (pos >= bytes.size() || !std::isspace(bytes[pos]))
        throw FormatError("expected single whitespace after maxval", pos);
    ++pos;
    if (w < 1 || h < 1) throw FormatError("invalid dimensions", 2);
    const std::size_t need = static_cast<std::size_t>(w) * h;
    if (bytes.size() - pos < need)
        throw FormatError("truncated pixel data: expected " + std::to_string(need) +
                              " bytes, found " + std::to_string(bytes.size() - pos),
                          bytes.size());
    Raster r;
    r.width = w;
    r.height = h;
    r.pixels.assign(bytes.begin() + pos, bytes.begin() + pos + need);
    return r;
}

void save_pgm(const Raster& raster, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot write '" + path.string() + "'", 0);
    f << "P5\n" << raster.width << " " << raster.height << "\n255\n";
    f.write(reinterpret_cast<const char*>(raster.pixels.data()),
            static_cast<std::streamsize>(raster.pixels.size()));
    if (!f) throw FormatError("short write to '" + path.string() + "'", 0);
}

}  // namespace qrn::data
