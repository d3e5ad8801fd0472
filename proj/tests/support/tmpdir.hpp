#pragma once

#include <filesystem>
#include <random>
#include <string>

namespace testsupport {

/// Unique scratch directory, removed on destruction.
class TmpDir {
 public:
  TmpDir() {
    auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    path_ = (base / ("ruleweave_test_" + std::to_string(rd()) + "_" + std::to_string(rd()))).string();
    std::filesystem::create_directories(path_);
  }
  ~TmpDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::string& path() const { return path_; }
  std::string sub(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

}  // namespace testsupport
