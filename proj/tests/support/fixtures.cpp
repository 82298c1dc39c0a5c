#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace fixtures {

namespace fs = std::filesystem;

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("subseas-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<Date> days_between(Date first, Date last) {
  std::vector<Date> out;
  for (Date d = first; d <= last; d += subseas::Days{1}) out.push_back(d);
  return out;
}

subseas::Frame make_frame(const std::string& variable, const subseas::GridSpec& grid, const std::vector<Date>& dates,
                          const std::function<double(Date, std::size_t)>& value) {
  std::vector<double> values;
  values.reserve(dates.size() * grid.size());
  for (Date d : dates) {
    for (std::size_t g = 0; g < grid.size(); ++g) values.push_back(value(d, g));
  }
  return subseas::Frame(variable, grid, dates, std::move(values));
}

std::vector<double> normal_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

std::vector<double> simplex_weights(std::mt19937_64& rng, std::size_t m) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(m);
  double sum = 0.0;
  for (auto& x : w) sum += (x = expo(rng));
  for (auto& x : w) x /= sum;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) total += w[i];
  w[m - 1] = std::max(0.0, 1.0 - total);
  return w;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

}  // namespace fixtures
