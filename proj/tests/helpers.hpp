#pragma once

#include <fstream>
#include <sstream>
#include <string>

inline std::string fixture_path(const std::string& name) {
  return std::string(QNC_FIXTURE_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string load_fixture(const std::string& name) { return slurp(fixture_path(name)); }
