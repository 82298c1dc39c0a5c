#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "subseas/dataset.hpp"
#include "subseas/frame.hpp"
#include "subseas/synthetic.hpp"

namespace fixtures {

using subseas::Date;

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::vector<Date> days_between(Date first, Date last);

subseas::Frame make_frame(const std::string& variable, const subseas::GridSpec& grid, const std::vector<Date>& dates,
                          const std::function<double(Date, std::size_t)>& value);

std::vector<double> normal_vector(std::mt19937_64& rng, std::size_t n);
/// Uniform on the probability simplex; sums to one within 1e-12.
std::vector<double> simplex_weights(std::mt19937_64& rng, std::size_t m);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace fixtures
