#include "relproj/token.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "relproj/errors.hpp"

namespace relproj {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Strips one trailing "_TAG" where TAG is a nonempty all-uppercase
// alphabetic suffix, then lower-cases the part.
std::string normalize_part(std::string part) {
  auto us = part.rfind('_');
  if (us != std::string::npos && us > 0 && us + 1 < part.size()) {
    bool all_upper = true;
    for (std::size_t i = us + 1; i < part.size(); ++i) {
      unsigned char c = static_cast<unsigned char>(part[i]);
      if (!std::isalpha(c) || !std::isupper(c)) {
        all_upper = false;
        break;
      }
    }
    if (all_upper) part.erase(us);
  }
  std::transform(part.begin(), part.end(), part.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return part;
}

// Splits on whitespace runs and on the "::" joiner, dropping empty pieces.
std::vector<std::string> split_parts(const std::string& raw) {
  std::vector<std::string> parts;
  std::string cur;
  for (std::size_t i = 0; i < raw.size();) {
    if (is_space(raw[i])) {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
      ++i;
    } else if (raw.compare(i, 2, "::") == 0) {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
      i += 2;
    } else {
      cur.push_back(raw[i]);
      ++i;
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

}  // namespace

Token normalize_token(const std::string& raw) {
  if (raw.empty()) throw Error("normalize_token: empty input");
  auto parts = split_parts(raw);
  if (parts.empty()) throw Error("normalize_token: input is all whitespace: '" + raw + "'");
  std::string out;
  for (auto& p : parts) {
    if (!out.empty()) out += "::";
    out += normalize_part(std::move(p));
  }
  if (out.empty()) throw Error("normalize_token: '" + raw + "' normalizes to nothing");
  return out;
}

bool is_normalized_token(const std::string& t) {
  if (t.empty()) return false;
  for (char c : t)
    if (is_space(c)) return false;
  // A trailing _TAG anywhere in a part would have been stripped.
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i] == '_' && std::isupper(static_cast<unsigned char>(t[i + 1]))) return false;
  }
  return t == normalize_token(t);
}

}  // namespace relproj
