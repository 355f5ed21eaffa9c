// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

namespace copyaug::testing {

/// Scratch directory removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string &tag = "t")
      : path_(std::filesystem::temp_directory_path() /
              ("copyaug_" + tag + "_" + std::to_string(::getpid()) + "_" +
               std::to_string(counter().fetch_add(1)))) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

private:
  static std::atomic<int> &counter() {
    static std::atomic<int> c{0};
    return c;
  }
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Relative path -> file contents for every regular file under `root`.
inline std::map<std::string, std::string> tree(const std::filesystem::path &root) {
  std::map<std::string, std::string> out;
  for (const auto &e : std::filesystem::recursive_directory_iterator(root))
    if (e.is_regular_file())
      out[std::filesystem::relative(e.path(), root).generic_string()] = slurp(e.path());
  return out;
}

} // namespace copyaug::testing
