#include "txforest/path.hpp"

namespace txf {

std::optional<Path> Path::parse(const std::string& text) {
  std::vector<std::string> cs;
  size_t i = 0;
  if (!text.empty() && text[0] == '/') i = 1;
  std::string cur;
  for (; i < text.size(); ++i) {
    if (text[i] == '/') {
      if (cur.empty()) return std::nullopt;
      cs.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(text[i]);
    }
  }
  if (!cur.empty()) cs.push_back(cur);
  else if (!text.empty() && text != "/" && text.back() == '/')
    return std::nullopt;  // trailing slash on a non-root path
  return Path(std::move(cs));
}

std::string Path::to_string() const {
  if (components_.empty()) return "/";
  std::string out;
  for (const auto& c : components_) {
    out += '/';
    out += c;
  }
  return out;
}

}  // namespace txf
