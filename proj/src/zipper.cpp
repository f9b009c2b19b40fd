#include "txforest/zipper.hpp"

namespace txf {

std::pair<Path, Zipper> goto_root(const Path& p, const Zipper& z) {
  Path path = p;
  Zipper cur = z;
  while (cur.has_parent()) {
    Zipper up = cur.parent();
    if (up.current().spec->kind == Spec::Kind::Path && !path.is_root())
      path = *path.parent();
    cur = up;
  }
  return {path, cur};
}

}  // namespace txf
