#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline std::string corpus_path(const std::string& name) {
  return std::string(CORPUS_DIR) + "/" + name;
}

inline std::string corpus_file(const std::string& name) {
  return read_file(corpus_path(name));
}
