#pragma once

#include "t2vt/prior.hpp"

#include <optional>
#include <string>
#include <vector>

namespace t2vt {

/// Binary weight archive, little-endian:
///   "T2VT1", u32 count, u32 dim, u32 instants,
///   then per entry: u32 instant, f64 time, dim x f64 weights.
class ArchiveError : public std::runtime_error
{
public:
  enum class Kind { Io, Version, Truncated, DimensionMismatch, Corrupt };

  ArchiveError(Kind kind, const std::string& what)
    : std::runtime_error(what)
    , kind_(kind)
  {
  }

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

inline constexpr char archive_magic[] = "T2VT1";

std::vector<unsigned char> encode_weights(const SourceSolutions& sources);
SourceSolutions decode_weights(const std::vector<unsigned char>& bytes,
                               std::optional<Eigen::Index> expected_dim = std::nullopt);

void archive_weights(const std::string& path, const SourceSolutions& sources);
SourceSolutions load_weights(const std::string& path, std::optional<Eigen::Index> expected_dim = std::nullopt);

} // namespace t2vt
