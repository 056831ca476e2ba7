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

#include "regunc/field_io.hpp"

#include "regunc/error.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace regunc::io {
namespace {

namespace fs = std::filesystem;

class ByteWriter
{
public:
  void Magic(char const (&m)[5])
  {
    bytes_.insert(bytes_.end(), m, m + 4);
  }
  void U32(std::uint32_t v)
  {
    for (int i = 0; i < 4; ++i)
    {
      bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void I32(std::int32_t v)
  {
    U32(static_cast<std::uint32_t>(v));
  }
  void F64(double v)
  {
    auto const u = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i)
    {
      bytes_.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
    }
  }
  void Byte(std::uint8_t b)
  {
    bytes_.push_back(b);
  }
  std::vector<std::uint8_t> Take()
  {
    return std::move(bytes_);
  }

private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader
{
public:
  ByteReader(std::span<std::uint8_t const> bytes, char const *what)
    : bytes_(bytes)
    , what_(what)
  {}

  void ExpectMagic(char const (&m)[5])
  {
    Need(4);
    if (std::memcmp(bytes_.data(), m, 4) != 0)
    {
      Fail(ErrorKind::kIo, std::string("not a ") + what_ + " file (bad magic)");
    }
    pos_ = 4;
  }
  std::uint32_t U32()
  {
    Need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
    {
      v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::int32_t I32()
  {
    return static_cast<std::int32_t>(U32());
  }
  double F64()
  {
    Need(8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i)
    {
      u |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += 8;
    return std::bit_cast<double>(u);
  }
  std::uint8_t Byte()
  {
    Need(1);
    return bytes_[pos_++];
  }
  void ExpectEnd() const
  {
    if (pos_ != bytes_.size())
    {
      Fail(ErrorKind::kIo, std::string(what_) + " file has trailing bytes");
    }
  }

private:
  void Need(std::size_t n) const
  {
    if (bytes_.size() - pos_ < n)
    {
      Fail(ErrorKind::kIo, std::string(what_) + " file is truncated");
    }
  }

  std::span<std::uint8_t const> bytes_;
  char const                   *what_;
  std::size_t                   pos_ = 0;
};

void CheckDims(std::uint32_t w, std::uint32_t h, char const *what)
{
  if (w == 0 || h == 0 || w > 65536 || h > 65536)
  {
    Fail(ErrorKind::kIo, std::string(what) + " file has invalid dimensions");
  }
}

}  // namespace

std::vector<std::uint8_t> ReadFile(fs::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    Fail(ErrorKind::kIo, "cannot open " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFile(fs::path const &path, std::span<std::uint8_t const> bytes)
{
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<char const *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out)
  {
    Fail(ErrorKind::kIo, "cannot write " + path.string());
  }
}

void WriteText(fs::path const &path, std::string const &text)
{
  WriteFile(path, std::span(reinterpret_cast<std::uint8_t const *>(text.data()), text.size()));
}

std::vector<std::uint8_t> EncodeTdf(TransformDistField const &field)
{
  ByteWriter out;
  out.Magic("TDF1");
  out.U32(static_cast<std::uint32_t>(field.width()));
  out.U32(static_cast<std::uint32_t>(field.height()));
  out.U32(static_cast<std::uint32_t>(field.k()));
  for (auto const &o : field.space().offsets())
  {
    out.I32(o.dx);
    out.I32(o.dy);
  }
  for (double p : field.raw_probs())
  {
    out.F64(p);
  }
  auto const mask = field.raw_mask();
  for (std::size_t i = 0; i < mask.size(); i += 8)
  {
    std::uint8_t b = 0;
    for (std::size_t j = 0; j < 8 && i + j < mask.size(); ++j)
    {
      b |= static_cast<std::uint8_t>((mask[i + j] ? 1u : 0u) << j);
    }
    out.Byte(b);
  }
  return out.Take();
}

TransformDistField DecodeTdf(std::span<std::uint8_t const> bytes)
{
  ByteReader in(bytes, "TDF1");
  in.ExpectMagic("TDF1");
  std::uint32_t const w = in.U32();
  std::uint32_t const h = in.U32();
  std::uint32_t const k = in.U32();
  CheckDims(w, h, "TDF1");
  if (k == 0 || k > 1'000'000)
  {
    Fail(ErrorKind::kIo, "TDF1 file has invalid K");
  }
  std::vector<Offset> offsets(k);
  for (auto &o : offsets)
  {
    o.dx = in.I32();
    o.dy = in.I32();
  }
  TransformDistField field(static_cast<int>(w), static_cast<int>(h),
                           DisplacementSpace(std::move(offsets)));
  for (int y = 0; y < field.height(); ++y)
  {
    for (int x = 0; x < field.width(); ++x)
    {
      for (double &p : field.MutableProbs(x, y))
      {
        p = in.F64();
      }
    }
  }
  std::size_t const n = static_cast<std::size_t>(w) * h;
  std::uint8_t      b = 0;
  for (std::size_t i = 0; i < n; ++i)
  {
    if (i % 8 == 0)
    {
      b = in.Byte();
    }
    bool const in_mask = (b >> (i % 8)) & 1u;
    int const  x       = static_cast<int>(i % w);
    int const  y       = static_cast<int>(i / w);
    if (in_mask)
    {
      auto const p   = field.probs(x, y);
      double     sum = 0.0;
      for (double v : p)
      {
        if (!(v >= 0.0 && v <= 1.0))
        {
          Fail(ErrorKind::kIo, "TDF1 voxel (" + std::to_string(x) + ", " + std::to_string(y) +
                                   ") has a probability outside [0, 1]");
        }
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9)
      {
        Fail(ErrorKind::kIo, "TDF1 voxel (" + std::to_string(x) + ", " + std::to_string(y) +
                                 ") does not sum to 1");
      }
    }
    field.SetMask(x, y, in_mask);
  }
  in.ExpectEnd();
  return field;
}

void SaveTdf(TransformDistField const &field, fs::path const &path)
{
  WriteFile(path, EncodeTdf(field));
}

TransformDistField LoadTdf(fs::path const &path)
{
  return DecodeTdf(ReadFile(path));
}

std::string TdfHeaderJson(TransformDistField const &field)
{
  nlohmann::ordered_json doc;
  doc["format"]       = "TDF1";
  doc["width"]        = field.width();
  doc["height"]       = field.height();
  doc["K"]            = field.k();
  doc["masked_count"] = field.MaskedCount();
  auto offsets        = nlohmann::json::array();
  for (auto const &o : field.space().offsets())
  {
    offsets.push_back({o.dx, o.dy});
  }
  doc["offsets"] = offsets;
  return doc.dump(2) + "\n";
}

std::vector<std::uint8_t> EncodeGdf(cpr::GaussianDisplacementField const &field)
{
  ByteWriter out;
  out.Magic("GDF1");
  out.U32(static_cast<std::uint32_t>(field.width()));
  out.U32(static_cast<std::uint32_t>(field.height()));
  for (auto const &m : field.means())
  {
    out.F64(m.x);
    out.F64(m.y);
  }
  for (auto const &c : field.covs())
  {
    out.F64(c.xx);
    out.F64(c.xy);
    out.F64(c.yy);
  }
  return out.Take();
}

cpr::GaussianDisplacementField DecodeGdf(std::span<std::uint8_t const> bytes)
{
  ByteReader in(bytes, "GDF1");
  in.ExpectMagic("GDF1");
  std::uint32_t const w = in.U32();
  std::uint32_t const h = in.U32();
  CheckDims(w, h, "GDF1");
  cpr::GaussianDisplacementField field(static_cast<int>(w), static_cast<int>(h));
  std::vector<cpr::Point>        means(static_cast<std::size_t>(w) * h);
  for (auto &m : means)
  {
    m.x = in.F64();
    m.y = in.F64();
  }
  for (std::size_t i = 0; i < means.size(); ++i)
  {
    cpr::Cov2 c;
    c.xx = in.F64();
    c.xy = in.F64();
    c.yy = in.F64();
    field.Set(static_cast<int>(i % w), static_cast<int>(i / w), means[i], c);
  }
  in.ExpectEnd();
  return field;
}

void SaveGdf(cpr::GaussianDisplacementField const &field, fs::path const &path)
{
  WriteFile(path, EncodeGdf(field));
}

cpr::GaussianDisplacementField LoadGdf(fs::path const &path)
{
  return DecodeGdf(ReadFile(path));
}

fs::path SaveMap(uncertainty::UncertaintyMap const &map, fs::path const &stem,
                 std::string const &quantity)
{
  fs::path raw    = stem;
  fs::path header = stem;
  raw += ".raw";
  header += ".json";
  ByteWriter out;
  for (double v : map.values)
  {
    out.F64(v);
  }
  WriteFile(raw, out.Take());
  nlohmann::ordered_json doc;
  doc["format"]   = "raw-float64-le";
  doc["width"]    = map.width;
  doc["height"]   = map.height;
  doc["quantity"] = quantity;
  doc["nodata"]   = "NaN";
  doc["data"]     = raw.filename().string();
  WriteText(header, doc.dump(2) + "\n");
  return header;
}

uncertainty::UncertaintyMap LoadMap(fs::path const &header)
{
  nlohmann::json doc;
  try
  {
    std::ifstream in(header);
    if (!in)
    {
      Fail(ErrorKind::kIo, "cannot open " + header.string());
    }
    doc = nlohmann::json::parse(in);
    if (doc.at("format").get<std::string>() != "raw-float64-le")
    {
      Fail(ErrorKind::kIo, "unsupported map format in " + header.string());
    }
  }
  catch (nlohmann::json::exception const &e)
  {
    Fail(ErrorKind::kIo, "map header " + header.string() + ": " + e.what());
  }
  int const w = doc.at("width").get<int>();
  int const h = doc.at("height").get<int>();
  if (w <= 0 || h <= 0)
  {
    Fail(ErrorKind::kIo, "map header has invalid dimensions");
  }
  auto const bytes = ReadFile(header.parent_path() / doc.at("data").get<std::string>());
  if (bytes.size() != static_cast<std::size_t>(w) * h * 8)
  {
    Fail(ErrorKind::kIo, "map data size does not match its header");
  }
  ByteReader                  in(bytes, "map");
  uncertainty::UncertaintyMap map{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};
  for (double &v : map.values)
  {
    v = in.F64();
  }
  return map;
}

}  // namespace regunc::io
