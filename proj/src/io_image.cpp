#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "evrec/io.hpp"

namespace evrec::io {

namespace {

int next_pnm_token(std::istream& in) {
  // skips whitespace and '#' comments, returns a non-negative integer
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF) throw IoError("truncated pgm header");
  int value = 0;
  bool any = false;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    any = true;
    c = in.get();
  }
  if (!any) throw IoError("malformed pgm header");
  return value;
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5') throw IoError("not a binary pgm: " + path.string());
  const int w = next_pnm_token(in);
  const int h = next_pnm_token(in);
  const int maxval = next_pnm_token(in);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
    throw IoError("bad pgm header: " + path.string());
  }
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> buf(static_cast<size_t>(w) * h * bytes);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) throw IoError("truncated pgm data: " + path.string());

  Image img(w, h);
  for (size_t i = 0; i < static_cast<size_t>(w) * h; ++i) {
    unsigned value = bytes == 2 ? (static_cast<unsigned>(buf[2 * i]) << 8) | buf[2 * i + 1]
                                : buf[i];
    img.data()[i] = static_cast<double>(value) / maxval;
  }
  return img;
}

void write_pgm(const Image& image, const std::filesystem::path& path, int bits) {
  if (bits != 8 && bits != 16) throw InvalidParameter("pgm depth must be 8 or 16");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const int maxval = bits == 16 ? 65535 : 255;
  out << "P5\n" << image.width() << " " << image.height() << "\n" << maxval << "\n";
  for (size_t i = 0; i < image.size(); ++i) {
    double v = image.data()[i];
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    const unsigned q = static_cast<unsigned>(std::lround(v * maxval));
    if (bits == 16) {
      out.put(static_cast<char>((q >> 8) & 0xff));
      out.put(static_cast<char>(q & 0xff));
    } else {
      out.put(static_cast<char>(q & 0xff));
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Image read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string());

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed decoding " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_set_expand_gray_1_2_4_to_8(png);
  png_set_palette_to_rgb(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  if ((png_get_color_type(png, info) & PNG_COLOR_MASK_COLOR) != 0) {
    png_set_rgb_to_gray(png, 1, -1.0, -1.0);
  }
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  std::vector<unsigned char> row(png_get_rowbytes(png, info));
  Image img(w, h);
  for (int y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (int x = 0; x < w; ++x) img(x, y) = row[x] / 255.0;
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const Image& image, const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw IoError("cannot write " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed encoding " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, image.width(), image.height(), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<unsigned char> row(image.width());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      double v = image(x, y);
      if (v < 0.0) v = 0.0;
      if (v > 1.0) v = 1.0;
      row[x] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

namespace {

bool has_extension(const std::filesystem::path& path, const char* ext) {
  std::string e = path.extension().string();
  for (char& ch : e) ch = static_cast<char>(std::tolower(ch));
  return e == ext;
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  if (has_extension(path, ".pgm")) return read_pgm(path);
  if (has_extension(path, ".png")) return read_png(path);
  throw IoError("unsupported image format: " + path.string());
}

void write_image(const Image& image, const std::filesystem::path& path) {
  if (has_extension(path, ".pgm")) {
    write_pgm(image, path);
  } else if (has_extension(path, ".png")) {
    write_png(image, path);
  } else {
    throw IoError("unsupported image format: " + path.string());
  }
}

void write_kernel_txt(const deblur::BlurKernel& k, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << k.size() << "\n";
  for (int y = 0; y < k.size(); ++y) {
    for (int x = 0; x < k.size(); ++x) {
      out << k(x, y) << (x + 1 == k.size() ? "\n" : " ");
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

deblur::BlurKernel read_kernel_txt(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  int size = 0;
  in >> size;
  if (!in || size < 1) throw IoError("bad kernel file: " + path.string());
  deblur::BlurKernel k(size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      if (!(in >> k(x, y))) throw IoError("truncated kernel file: " + path.string());
    }
  }
  return k;
}

void write_kernel_pgm(const deblur::BlurKernel& k, const std::filesystem::path& path) {
  double peak = 0.0;
  for (double v : k.weights()) peak = std::max(peak, v);
  Image viz(k.size(), k.size(), 0.0);
  if (peak > 0.0) {
    for (int y = 0; y < k.size(); ++y) {
      for (int x = 0; x < k.size(); ++x) viz(x, y) = k(x, y) / peak;
    }
  }
  write_pgm(viz, path, 8);
}

}  // namespace evrec::io
