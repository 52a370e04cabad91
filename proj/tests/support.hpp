#pragma once

#include <filesystem>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "loadscope/errors.hpp"

namespace test_support {

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("loadscope_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

template <typename F>
loadscope::Errc error_code_of(F&& f) {
  try {
    f();
  } catch (const loadscope::Error& e) {
    return e.code();
  }
  FAIL("expected a loadscope::Error");
  return loadscope::Errc::Internal;
}

}  // namespace test_support

#define CHECK_ERRC(expr, code) CHECK(test_support::error_code_of([&] { (void)(expr); }) == (code))
