#include <cstdio>
#include <fstream>

#include "cil/error.hpp"
#include "cil/reduce.hpp"

namespace cil::reduce {

std::string embedding_csv(const Embedding& e) {
  std::string out = "index";
  for (std::size_t k = 0; k < e.cols(); ++k) out += ",dim" + std::to_string(k);
  out += '\n';
  char buf[32];
  for (std::size_t i = 0; i < e.rows(); ++i) {
    out += std::to_string(e.source_indices.at(i));
    for (double v : e.points.row(i)) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_embedding_csv(const std::filesystem::path& path, const Embedding& e) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << embedding_csv(e);
}

}  // namespace cil::reduce
