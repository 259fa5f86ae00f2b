#include "mixkit/png_io.hpp"

#include <png.h>
#include <unistd.h>

#include <atomic>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <string>
#include <system_error>

#include "mixkit/error.hpp"

namespace mixkit {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct ReadState {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  char message[256] = {};
};

void on_png_error(png_structp png, png_const_charp msg) {
  auto* state = static_cast<ReadState*>(png_get_error_ptr(png));
  if (state) std::snprintf(state->message, sizeof state->message, "%s", msg);
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// No C++ objects with destructors may live in these frames: libpng reports
// errors by longjmp back to the setjmp below.
bool read_header(png_structp png, png_infop info, std::FILE* fp, ReadState& st) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  png_read_info(png, info);
  st.width = png_get_image_width(png, info);
  st.height = png_get_image_height(png, info);
  st.bit_depth = png_get_bit_depth(png, info);
  st.color_type = png_get_color_type(png, info);
  return true;
}

bool read_rows(png_structp png, png_infop info, png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_interlace_handling(png);
  png_read_update_info(png, info);
  png_read_image(png, rows);
  png_read_end(png, nullptr);
  return true;
}

bool write_png(png_structp png, png_infop info, std::FILE* fp, const Image& img,
               png_bytepp rows) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_init_io(png, fp);
  const int color = img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
               static_cast<png_uint_32>(img.height()), 8, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  return true;
}

struct ReadHandle {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ReadHandle() = default;
  ReadHandle(const ReadHandle&) = delete;
  ReadHandle& operator=(const ReadHandle&) = delete;
  ~ReadHandle() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

class PngReader {
 public:
  explicit PngReader(const std::filesystem::path& path) : path_(path) {
    fp_.reset(std::fopen(path.c_str(), "rb"));
    if (!fp_) throw IoError("cannot open " + path.string());
    png_byte sig[8];
    if (std::fread(sig, 1, 8, fp_.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
      throw DecodeError(path.string() + ": not a PNG file");
    }
    h_.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &state_, on_png_error, on_png_warning);
    if (!h_.png) throw DecodeError(path.string() + ": libpng initialisation failed");
    h_.info = png_create_info_struct(h_.png);
    if (!h_.info) throw DecodeError(path.string() + ": libpng initialisation failed");
    png_set_sig_bytes(h_.png, 8);
    if (!read_header(h_.png, h_.info, fp_.get(), state_)) fail();

    if (state_.bit_depth != 8) {
      throw DecodeError(path.string() + ": unsupported bit depth " +
                        std::to_string(state_.bit_depth) + " (only 8-bit is supported)");
    }
    if (state_.color_type == PNG_COLOR_TYPE_GRAY) {
      channels_ = 1;
    } else if (state_.color_type == PNG_COLOR_TYPE_RGB) {
      channels_ = 3;
    } else {
      throw DecodeError(path.string() + ": unsupported color type " +
                        std::to_string(state_.color_type) + " (only gray and RGB)");
    }
  }

  PngInfo info() const {
    return {static_cast<int>(state_.width), static_cast<int>(state_.height), channels_};
  }

  Image decode() {
    const PngInfo i = info();
    Image img(i.width, i.height, i.channels);
    auto bytes = img.data();
    const std::size_t stride = static_cast<std::size_t>(i.width) * i.channels;
    std::vector<png_bytep> rows(i.height);
    for (int y = 0; y < i.height; ++y) rows[y] = bytes.data() + y * stride;
    if (!read_rows(h_.png, h_.info, rows.data())) fail();
    return img;
  }

 private:
  [[noreturn]] void fail() const {
    throw DecodeError(path_.string() + ": " +
                      (state_.message[0] ? state_.message : "corrupt PNG data"));
  }

  std::filesystem::path path_;
  FilePtr fp_;
  ReadState state_;
  ReadHandle h_;
  int channels_ = 0;
};

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  static std::atomic<std::uint64_t> counter{0};
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  return tmp;
}

void commit(const std::filesystem::path& tmp, const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot write " + path.string());
  }
}

}  // namespace

PngInfo read_png_info(const std::filesystem::path& path) { return PngReader(path).info(); }

Image load_image(const std::filesystem::path& path) { return PngReader(path).decode(); }

Heatmap load_heatmap(const std::filesystem::path& path) {
  const Image img = load_image(path);
  if (img.channels() != 1) {
    throw DecodeError(path.string() + ": heatmap must be a grayscale PNG");
  }
  std::vector<float> values;
  values.reserve(img.data().size());
  for (std::uint8_t v : img.data()) values.push_back(static_cast<float>(v) / 255.0f);
  return Heatmap(img.width(), img.height(), std::move(values));
}

void save_image(const Image& img, const std::filesystem::path& path) {
  if (img.empty()) throw InvalidArgument("cannot save an empty image to " + path.string());
  const auto tmp = temp_sibling(path);
  bool ok = false;
  {
    FilePtr fp(std::fopen(tmp.c_str(), "wb"));
    if (!fp) throw IoError("cannot write " + path.string());
    ReadState state;
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, on_png_error, on_png_warning);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (png && info) {
      const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
      std::vector<png_bytep> rows(img.height());
      // libpng takes non-const row pointers but does not write through them.
      auto* base = const_cast<std::uint8_t*>(img.data().data());
      for (int y = 0; y < img.height(); ++y) rows[y] = base + y * stride;
      ok = write_png(png, info, fp.get(), img, rows.data());
    }
    png_destroy_write_struct(&png, info ? &info : nullptr);
    if (std::fflush(fp.get()) != 0) ok = false;
  }
  if (!ok) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot encode " + path.string());
  }
  commit(tmp, path);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  const auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.flush()) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("cannot write " + path.string());
    }
  }
  commit(tmp, path);
}

}  // namespace mixkit
