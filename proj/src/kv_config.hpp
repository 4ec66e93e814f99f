#pragma once

#include <cctype>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "bdp/errors.hpp"

namespace bdp::kv {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

inline std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    Line line{number, {}};
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

inline double parse_number(const std::string& tok, int line) {
  size_t pos = 0;
  double v;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw config_error("expected a number, got '" + tok + "'", line);
  }
  if (pos != tok.size())
    throw config_error("trailing characters in number '" + tok + "'", line);
  return v;
}

inline long parse_long(const std::string& tok, int line) {
  size_t pos = 0;
  long v;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    throw config_error("expected an integer, got '" + tok + "'", line);
  }
  if (pos != tok.size())
    throw config_error("trailing characters in integer '" + tok + "'", line);
  return v;
}

inline int parse_int(const std::string& tok, int line) {
  return static_cast<int>(parse_long(tok, line));
}

inline bool looks_like_int(const std::string& tok) {
  size_t i = (tok[0] == '-' || tok[0] == '+') ? 1 : 0;
  if (i == tok.size()) return false;
  for (; i < tok.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
  return true;
}

}  // namespace bdp::kv
