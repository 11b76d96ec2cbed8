#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqg/field.hpp"

namespace sqg {

inline constexpr char checkpoint_magic[4] = {'S', 'Q', 'G', 'F'};
inline constexpr std::uint32_t checkpoint_version = 1;

struct Checkpoint {
  SpectralField theta;
  double gamma = 0.0;
  double time = 0.0;
};

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <class T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_raw(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

}  // namespace detail

inline void write_checkpoint(const std::filesystem::path& path, const SpectralField& theta,
                             double gamma, double time) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("checkpoint: cannot open " + path.string());
  os.write(checkpoint_magic, 4);
  detail::write_raw(os, checkpoint_version);
  detail::write_raw(os, static_cast<std::uint32_t>(theta.grid().n()));
  detail::write_raw(os, gamma);
  detail::write_raw(os, time);
  const auto c = theta.coeffs();
  os.write(reinterpret_cast<const char*>(c.data()),
           static_cast<std::streamsize>(c.size() * sizeof(Complex)));
  if (!os) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

inline Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, checkpoint_magic, 4) != 0) {
    throw std::runtime_error("checkpoint: bad magic in " + path.string());
  }
  const auto version = detail::read_raw<std::uint32_t>(is);
  if (version != checkpoint_version) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  const TorusGrid grid(static_cast<int>(detail::read_raw<std::uint32_t>(is)));
  const auto gamma = detail::read_raw<double>(is);
  const auto time = detail::read_raw<double>(is);
  std::vector<Complex> c(grid.spectral_size());
  is.read(reinterpret_cast<char*>(c.data()), static_cast<std::streamsize>(c.size() * sizeof(Complex)));
  if (!is) throw std::runtime_error("checkpoint: truncated coefficient block");
  return Checkpoint{SpectralField(grid, std::move(c)), gamma, time};
}

}  // namespace sqg
