#include "charanim/image.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>

namespace charanim {

namespace {

struct FileCloser {
    void operator()(FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw std::runtime_error("cannot open file: " + path);
    return f;
}

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriter() { png_destroy_write_struct(&png, &info); }
};

void begin_read(PngReader& r, FILE* f, const std::string& path) {
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    r.info = png_create_info_struct(r.png);
    if (!r.png || !r.info) throw std::runtime_error("libpng init failed");
    if (setjmp(png_jmpbuf(r.png))) throw std::runtime_error("png read error: " + path);
    png_init_io(r.png, f);
    png_read_info(r.png, r.info);
}

}  // namespace

Raster read_png(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    PngReader r;
    begin_read(r, f.get(), path);

    png_set_expand(r.png);
    png_set_strip_16(r.png);
    png_set_gray_to_rgb(r.png);
    png_set_add_alpha(r.png, 0xFF, PNG_FILLER_AFTER);
    png_read_update_info(r.png, r.info);

    const int w = static_cast<int>(png_get_image_width(r.png, r.info));
    const int h = static_cast<int>(png_get_image_height(r.png, r.info));
    if (png_get_rowbytes(r.png, r.info) != static_cast<size_t>(w) * 4)
        throw std::runtime_error("unexpected png row size: " + path);

    Raster img(w, h);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y)
        rows[y] = reinterpret_cast<png_bytep>(&img.pixels[static_cast<size_t>(y) * w]);
    png_read_image(r.png, rows.data());
    return img;
}

void write_png(const std::string& path, const Raster& img) {
    FilePtr f = open_file(path, "wb");
    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    w.info = png_create_info_struct(w.png);
    if (!w.png || !w.info) throw std::runtime_error("libpng init failed");
    if (setjmp(png_jmpbuf(w.png))) throw std::runtime_error("png write error: " + path);

    png_init_io(w.png, f.get());
    png_set_IHDR(w.png, w.info, img.width, img.height, 8, PNG_COLOR_TYPE_RGBA,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(w.png, reinterpret_cast<png_const_bytep>(
                                 &img.pixels[static_cast<size_t>(y) * img.width]));
    png_write_end(w.png, w.info);
}

IndexedImage read_indexed_png(const std::string& path) {
    FilePtr f = open_file(path, "rb");
    PngReader r;
    begin_read(r, f.get(), path);

    const int color_type = png_get_color_type(r.png, r.info);
    if (color_type != PNG_COLOR_TYPE_PALETTE)
        throw std::runtime_error("not a palette-indexed png: " + path);
    if (png_get_bit_depth(r.png, r.info) < 8) png_set_packing(r.png);
    png_read_update_info(r.png, r.info);

    IndexedImage img;
    img.width = static_cast<int>(png_get_image_width(r.png, r.info));
    img.height = static_cast<int>(png_get_image_height(r.png, r.info));
    img.indices.resize(static_cast<size_t>(img.width) * img.height);

    png_colorp palette = nullptr;
    int n_palette = 0;
    png_get_PLTE(r.png, r.info, &palette, &n_palette);
    img.palette.resize(n_palette);
    for (int i = 0; i < n_palette; ++i)
        img.palette[i] = Rgba{palette[i].red, palette[i].green, palette[i].blue, 255};

    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = &img.indices[static_cast<size_t>(y) * img.width];
    png_read_image(r.png, rows.data());
    return img;
}

void write_indexed_png(const std::string& path, const IndexedImage& img) {
    if (img.palette.empty() || img.palette.size() > 256)
        throw std::runtime_error("palette size must be 1..256");
    FilePtr f = open_file(path, "wb");
    PngWriter w;
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    w.info = png_create_info_struct(w.png);
    if (!w.png || !w.info) throw std::runtime_error("libpng init failed");
    if (setjmp(png_jmpbuf(w.png))) throw std::runtime_error("png write error: " + path);

    png_init_io(w.png, f.get());
    png_set_IHDR(w.png, w.info, img.width, img.height, 8, PNG_COLOR_TYPE_PALETTE,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    std::vector<png_color> palette(img.palette.size());
    for (size_t i = 0; i < img.palette.size(); ++i)
        palette[i] = png_color{img.palette[i].r, img.palette[i].g, img.palette[i].b};
    png_set_PLTE(w.png, w.info, palette.data(), static_cast<int>(palette.size()));
    png_write_info(w.png, w.info);
    for (int y = 0; y < img.height; ++y)
        png_write_row(w.png, &img.indices[static_cast<size_t>(y) * img.width]);
    png_write_end(w.png, w.info);
}

void composite_over(Raster& dst, const Raster& src) {
    if (dst.width != src.width || dst.height != src.height)
        throw std::runtime_error("composite_over: dimension mismatch");
    for (size_t i = 0; i < dst.pixels.size(); ++i) {
        const Rgba& s = src.pixels[i];
        if (s.a == 0) continue;
        Rgba& d = dst.pixels[i];
        const int sa = s.a;
        const int da = d.a * (255 - sa) / 255;
        const int oa = sa + da;
        if (oa == 0) continue;
        d.r = static_cast<uint8_t>((s.r * sa + d.r * da) / oa);
        d.g = static_cast<uint8_t>((s.g * sa + d.g * da) / oa);
        d.b = static_cast<uint8_t>((s.b * sa + d.b * da) / oa);
        d.a = static_cast<uint8_t>(oa);
    }
}

}  // namespace charanim
