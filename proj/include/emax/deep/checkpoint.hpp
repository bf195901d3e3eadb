#pragma once

#include "emax/tensor.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace emax::deep {

/// Flat, versioned text container. Tensors are written as hexfloats so a
/// reload is bit-exact.
struct Checkpoint {
  static constexpr int kVersion = 1;

  std::map<std::string, Tensor> tensors;
  std::map<std::string, std::vector<std::int64_t>> integers;
  std::map<std::string, std::string> strings;

  void write(std::ostream& os) const;
  static Checkpoint read(std::istream& is);
  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

  const Tensor& tensor(const std::string& name) const;
  const std::vector<std::int64_t>& ints(const std::string& name) const;
  std::int64_t scalar_int(const std::string& name) const;
  double scalar(const std::string& name) const;
  const std::string& text(const std::string& name) const;
  void set_scalar(const std::string& name, double v) { tensors[name] = Tensor::Constant(1, 1, v); }
};

std::string rng_state(const Rng& rng);
void set_rng_state(Rng& rng, const std::string& state);

}  // namespace emax::deep
