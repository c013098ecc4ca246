#include "t2vt/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

namespace t2vt {

namespace {

constexpr std::size_t magic_len = sizeof(archive_magic) - 1;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v)
{
  for (int b = 0; b < 4; ++b)
    out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

void put_f64(std::vector<unsigned char>& out, double v)
{
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b)
    out.push_back(static_cast<unsigned char>(bits >> (8 * b)));
}

class Reader
{
public:
  explicit Reader(const std::vector<unsigned char>& bytes)
    : bytes_(bytes)
  {
  }

  std::uint32_t u32()
  {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b)
      v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * b);
    return v;
  }

  double f64()
  {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b)
      v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * b);
    return std::bit_cast<double>(v);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

private:
  void need(std::size_t n) const
  {
    if (remaining() < n)
      throw ArchiveError(ArchiveError::Kind::Truncated, "weight archive truncated");
  }

  const std::vector<unsigned char>& bytes_;
  std::size_t pos_ = magic_len;
};

} // namespace

std::vector<unsigned char> encode_weights(const SourceSolutions& sources)
{
  const auto dim = sources.dim();
  for (const auto& e : sources.entries)
    if (e.theta.size() != dim)
      throw ArchiveError(ArchiveError::Kind::DimensionMismatch, "weight archive: entries differ in dimension");
  std::vector<unsigned char> out(archive_magic, archive_magic + magic_len);
  put_u32(out, static_cast<std::uint32_t>(sources.size()));
  put_u32(out, static_cast<std::uint32_t>(dim));
  put_u32(out, static_cast<std::uint32_t>(sources.num_instants()));
  for (const auto& e : sources.entries) {
    put_u32(out, e.instant);
    put_f64(out, e.time);
    for (Eigen::Index d = 0; d < dim; ++d)
      put_f64(out, e.theta(d));
  }
  return out;
}

SourceSolutions decode_weights(const std::vector<unsigned char>& bytes, std::optional<Eigen::Index> expected_dim)
{
  if (bytes.size() < magic_len || std::memcmp(bytes.data(), archive_magic, magic_len) != 0)
    throw ArchiveError(ArchiveError::Kind::Version, "weight archive: unrecognized header (expected T2VT1)");
  Reader in(bytes);
  const auto count = in.u32();
  const auto dim = in.u32();
  const auto instants = in.u32();
  if (expected_dim && static_cast<Eigen::Index>(dim) != *expected_dim)
    throw ArchiveError(ArchiveError::Kind::DimensionMismatch,
                       "weight archive: dimension " + std::to_string(dim) + ", expected " +
                         std::to_string(*expected_dim));
  const std::size_t entry_bytes = 4 + 8 + 8 * static_cast<std::size_t>(dim);
  if (in.remaining() < entry_bytes * count)
    throw ArchiveError(ArchiveError::Kind::Truncated, "weight archive truncated");
  if (in.remaining() > entry_bytes * count)
    throw ArchiveError(ArchiveError::Kind::Corrupt, "weight archive: trailing bytes");

  SourceSolutions out;
  out.entries.reserve(count);
  for (std::uint32_t e = 0; e < count; ++e) {
    SourceSolutions::Entry entry;
    entry.instant = in.u32();
    entry.time = in.f64();
    entry.theta.resize(dim);
    for (std::uint32_t d = 0; d < dim; ++d)
      entry.theta(d) = in.f64();
    out.entries.push_back(std::move(entry));
  }
  if (out.num_instants() != instants)
    throw ArchiveError(ArchiveError::Kind::Corrupt, "weight archive: instant count does not match entries");
  return out;
}

void archive_weights(const std::string& path, const SourceSolutions& sources)
{
  const auto bytes = encode_weights(sources);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw ArchiveError(ArchiveError::Kind::Io, "cannot write weight archive '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw ArchiveError(ArchiveError::Kind::Io, "failed writing weight archive '" + path + "'");
}

SourceSolutions load_weights(const std::string& path, std::optional<Eigen::Index> expected_dim)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ArchiveError(ArchiveError::Kind::Io, "cannot read weight archive '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_weights(bytes, expected_dim);
}

} // namespace t2vt
