#pragma once

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "arise/error.hpp"
#include "arise/util/text.hpp"

namespace testing_support {

inline std::string data_path(const std::string& rel) { return std::string(ARISE_DATA_DIR) + "/" + rel; }
inline std::string test_data(const std::string& rel) { return std::string(ARISE_TEST_DATA_DIR) + "/" + rel; }

inline std::vector<std::string> files_in(const std::string& dir, const std::string& ext) {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.path().extension() == ext) out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::string> seed_paths() { return files_in(data_path("seeds"), ".sdsl"); }

inline std::string read(const std::string& path) { return arise::util::read_file(path); }

/// Error code thrown by `f`, or an empty string if it returns normally.
inline std::string error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const arise::Error& e) {
    return e.code();
  }
  return {};
}

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("arise-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string str(const std::string& rel = "") const { return rel.empty() ? path.string() : (path / rel).string(); }
};

}  // namespace testing_support
