//------------------------------------------------------------------------------
//
//   Copyright 2026 The regunc Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "regunc/image_io.hpp"

#include "regunc/error.hpp"

#include <png.h>

#include <nlohmann/json.hpp>

#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

namespace regunc {
namespace {

namespace fs = std::filesystem;

std::vector<std::uint8_t> ReadAll(fs::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    Fail(ErrorKind::kIo, "cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class PgmHeaderReader
{
public:
  explicit PgmHeaderReader(std::span<std::uint8_t const> bytes)
    : bytes_(bytes)
  {}

  int ReadInt()
  {
    SkipSpaceAndComments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
    {
      Fail(ErrorKind::kIo, "malformed image: bad PGM header");
    }
    long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_]))
    {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000)
      {
        Fail(ErrorKind::kIo, "malformed image: header value out of range");
      }
    }
    return static_cast<int>(v);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t RasterStart()
  {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
    {
      Fail(ErrorKind::kIo, "malformed image: bad PGM header");
    }
    return pos_ + 1;
  }

private:
  void SkipSpaceAndComments()
  {
    while (pos_ < bytes_.size())
    {
      if (std::isspace(bytes_[pos_]))
      {
        ++pos_;
      }
      else if (bytes_[pos_] == '#')
      {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
        {
          ++pos_;
        }
      }
      else
      {
        break;
      }
    }
  }

  std::span<std::uint8_t const> bytes_;
  std::size_t                   pos_ = 2;
};

bool IsPng(std::span<std::uint8_t const> bytes)
{
  return bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0;
}

// libpng reports errors through longjmp; keep every C++ object with a
// destructor outside the setjmp scope.
struct PngReadState
{
  std::span<std::uint8_t const> bytes;
  std::size_t                   pos = 0;
};

void PngReadCallback(png_structp png, png_bytep out, png_size_t n)
{
  auto *state = static_cast<PngReadState *>(png_get_io_ptr(png));
  if (state->pos + n > state->bytes.size())
  {
    png_error(png, "truncated");
  }
  std::copy_n(state->bytes.data() + state->pos, n, out);
  state->pos += n;
}

struct PngInfo
{
  png_uint_32 width      = 0;
  png_uint_32 height     = 0;
  int         bit_depth  = 0;
  int         color_type = 0;
};

// Returns false on a libpng error. On success `pixels` holds height rows of
// rowbytes each.
bool ReadPngRaw(PngReadState *state, PngInfo *info, std::vector<std::uint8_t> *pixels,
                std::vector<png_bytep> *rows, std::size_t *rowbytes)
{
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr)
  {
    return false;
  }
  png_infop pinfo = png_create_info_struct(png);
  if (pinfo == nullptr)
  {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png)))
  {
    png_destroy_read_struct(&png, &pinfo, nullptr);
    return false;
  }
  png_set_read_fn(png, state, PngReadCallback);
  png_read_info(png, pinfo);
  png_get_IHDR(png, pinfo, &info->width, &info->height, &info->bit_depth, &info->color_type,
               nullptr, nullptr, nullptr);
  if (info->color_type != PNG_COLOR_TYPE_GRAY || info->width == 0 || info->height == 0 ||
      info->width > 1'000'000 || info->height > 1'000'000)
  {
    png_destroy_read_struct(&png, &pinfo, nullptr);
    return true;  // caller inspects color_type
  }
  if (info->bit_depth < 8)
  {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  png_read_update_info(png, pinfo);
  *rowbytes = png_get_rowbytes(png, pinfo);
  pixels->resize(*rowbytes * info->height);
  rows->resize(info->height);
  for (png_uint_32 r = 0; r < info->height; ++r)
  {
    (*rows)[r] = pixels->data() + r * *rowbytes;
  }
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &pinfo, nullptr);
  return true;
}

Image DecodePng(std::span<std::uint8_t const> bytes)
{
  PngReadState              state{bytes, 0};
  PngInfo                   info;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep>    rows;
  std::size_t               rowbytes = 0;
  if (!ReadPngRaw(&state, &info, &pixels, &rows, &rowbytes))
  {
    Fail(ErrorKind::kIo, "malformed image: PNG decode failed");
  }
  if (info.color_type != PNG_COLOR_TYPE_GRAY)
  {
    Fail(ErrorKind::kIo, "color image supplied; only grayscale is supported");
  }
  if (pixels.empty())
  {
    Fail(ErrorKind::kIo, "malformed image: empty PNG");
  }
  int const           w = static_cast<int>(info.width);
  int const           h = static_cast<int>(info.height);
  bool const          wide = info.bit_depth == 16;
  std::vector<double> data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y)
  {
    std::uint8_t const *row = rows[static_cast<std::size_t>(y)];
    for (int x = 0; x < w; ++x)
    {
      double v = wide ? static_cast<double>((row[2 * x] << 8) | row[2 * x + 1])
                      : static_cast<double>(row[x]);
      data[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
           static_cast<std::size_t>(x)] = v;
    }
  }
  return Image(w, h, std::move(data));
}

bool IsIntegerIn(double v, double hi)
{
  return v >= 0.0 && v <= hi && std::floor(v) == v;
}

}  // namespace

Image DecodePgm(std::span<std::uint8_t const> bytes)
{
  if (bytes.size() < 2 || bytes[0] != 'P')
  {
    Fail(ErrorKind::kIo, "malformed image: not a PGM file");
  }
  if (bytes[1] == '6' || bytes[1] == '3')
  {
    Fail(ErrorKind::kIo, "color image supplied; only grayscale is supported");
  }
  if (bytes[1] != '5')
  {
    Fail(ErrorKind::kIo, "malformed image: only binary P5 PGM is supported");
  }
  PgmHeaderReader reader(bytes);
  int const       w      = reader.ReadInt();
  int const       h      = reader.ReadInt();
  int const       maxval = reader.ReadInt();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
  {
    Fail(ErrorKind::kIo, "malformed image: bad PGM dimensions or maxval");
  }
  std::size_t const start  = reader.RasterStart();
  std::size_t const n      = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  std::size_t const stride = maxval > 255 ? 2 : 1;
  if (bytes.size() < start + n * stride)
  {
    Fail(ErrorKind::kIo, "malformed image: truncated payload");
  }
  std::vector<double> data(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    std::uint8_t const *p = bytes.data() + start + i * stride;
    data[i] = stride == 2 ? static_cast<double>((p[0] << 8) | p[1]) : static_cast<double>(p[0]);
  }
  return Image(w, h, std::move(data));
}

Image LoadImage(fs::path const &path, ImageFormat format)
{
  auto const bytes = ReadAll(path);
  if (format == ImageFormat::kAuto)
  {
    format = IsPng(bytes) ? ImageFormat::kPng : ImageFormat::kPgm;
  }
  return format == ImageFormat::kPng ? DecodePng(bytes) : DecodePgm(bytes);
}

void SavePgm(Image const &image, fs::path const &path)
{
  bool fits8 = true;
  for (double v : image.data())
  {
    if (!IsIntegerIn(v, 65535.0))
    {
      Fail(ErrorKind::kIo, "cannot store non-integer or out-of-range intensity in PGM");
    }
    fits8 = fits8 && v <= 255.0;
  }
  std::string const header = "P5\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n" + (fits8 ? "255" : "65535") +
                             "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (double v : image.data())
  {
    auto const u = static_cast<unsigned>(v);
    if (!fits8)
    {
      out.push_back(static_cast<std::uint8_t>(u >> 8));
    }
    out.push_back(static_cast<std::uint8_t>(u & 0xFF));
  }
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<char const *>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f)
  {
    Fail(ErrorKind::kIo, "cannot write " + path.string());
  }
}

fs::path NamesSidecarPath(fs::path const &label_path)
{
  fs::path p = label_path;
  p.replace_extension(".json");
  return p;
}

LabelMap LoadLabelMap(fs::path const &path)
{
  Image const          img = LoadImage(path);
  std::vector<LabelId> labels;
  labels.reserve(img.size());
  for (double v : img.data())
  {
    labels.push_back(static_cast<LabelId>(v));
  }
  std::map<LabelId, std::string> names;
  auto const                     sidecar = NamesSidecarPath(path);
  if (fs::exists(sidecar))
  {
    std::ifstream in(sidecar);
    try
    {
      auto const doc = nlohmann::json::parse(in);
      for (auto const &[key, value] : doc.items())
      {
        std::size_t used = 0;
        LabelId     id   = std::stoll(key, &used);
        if (used != key.size())
        {
          Fail(ErrorKind::kIo, "label names: key '" + key + "' is not an integer");
        }
        names[id] = value.get<std::string>();
      }
    }
    catch (nlohmann::json::exception const &e)
    {
      Fail(ErrorKind::kIo, "label names " + sidecar.string() + ": " + e.what());
    }
    catch (std::invalid_argument const &)
    {
      Fail(ErrorKind::kIo, "label names " + sidecar.string() + ": non-integer key");
    }
  }
  return LabelMap(img.width(), img.height(), std::move(labels), std::move(names));
}

void SaveLabelMap(LabelMap const &labels, fs::path const &path)
{
  std::vector<double> data(labels.labels().begin(), labels.labels().end());
  SavePgm(Image(labels.width(), labels.height(), std::move(data)), path);
  if (!labels.names().empty())
  {
    nlohmann::json doc = nlohmann::json::object();
    for (auto const &[id, name] : labels.names())
    {
      doc[std::to_string(id)] = name;
    }
    std::ofstream out(NamesSidecarPath(path));
    out << doc.dump(2) << "\n";
  }
}

namespace {

bool WritePngRaw(std::FILE *file, int width, int height, png_bytep *rows, png_text *text,
                 int n_text)
{
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr)
  {
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr)
  {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png)))
  {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, file);
  png_set_compression_level(png, 9);
  png_set_compression_strategy(png, 0);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  if (n_text > 0)
  {
    png_set_text(png, info, text, n_text);
  }
  png_write_info(png, info);
  png_write_image(png, rows);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

void SavePngRgb(fs::path const &path, int width, int height, std::span<std::uint8_t const> rgb,
                std::span<std::pair<std::string, std::string> const> text)
{
  if (width <= 0 || height <= 0 ||
      rgb.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3)
  {
    Fail(ErrorKind::kInvalid, "RGB buffer does not match image dimensions");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  std::vector<std::uint8_t> copy(rgb.begin(), rgb.end());
  for (int r = 0; r < height; ++r)
  {
    rows[static_cast<std::size_t>(r)] = copy.data() + static_cast<std::size_t>(r) * width * 3;
  }
  std::vector<std::string> keys, values;
  for (auto const &[k, v] : text)
  {
    keys.push_back(k);
    values.push_back(v);
  }
  std::vector<png_text> chunks(text.size());
  for (std::size_t i = 0; i < chunks.size(); ++i)
  {
    chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
    chunks[i].key         = keys[i].data();
    chunks[i].text        = values[i].data();
  }
  std::unique_ptr<std::FILE, int (*)(std::FILE *)> file(std::fopen(path.c_str(), "wb"),
                                                         &std::fclose);
  if (!file)
  {
    Fail(ErrorKind::kIo, "cannot write " + path.string());
  }
  if (!WritePngRaw(file.get(), width, height, rows.data(), chunks.data(),
                   static_cast<int>(chunks.size())))
  {
    Fail(ErrorKind::kIo, "PNG encode failed for " + path.string());
  }
}

}  // namespace regunc
