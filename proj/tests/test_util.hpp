#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "edmeta/sampler.hpp"

namespace testing {

// Short chains for tests that only need a few thousand draws.
inline edmeta::McmcConfig quick_config(std::uint64_t seed = 11, std::size_t kept = 2000) {
  edmeta::McmcConfig c;
  c.chains = 4;
  c.burn_in = 5000;
  c.thin = 5;
  c.iterations = c.burn_in + kept * c.thin;
  c.seed = seed;
  return c;
}

inline std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() /
             ("edmeta-" + tag + "-" + std::to_string(std::random_device{}()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace testing
