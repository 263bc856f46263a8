#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "cil/error.hpp"
#include "cil/trainer.hpp"

namespace cil::learner {

namespace {

constexpr char kMagic[8] = {'C', 'I', 'L', 'M', 'L', 'P', '0', '1'};

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t u64() {
    if (pos_ + 8 > bytes_.size()) throw DataError("checkpoint is truncated");
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= std::uint64_t{bytes_[pos_ + k]} << (8 * k);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw DataError("checkpoint is truncated");
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> checkpoint_bytes(const MlpModel& model) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  const auto sizes = model.layer_sizes();
  put_u64(out, sizes.size());
  for (auto s : sizes) put_u64(out, s);
  put_u64(out, model.output_width());
  for (double v : model.parameters()) put_f64(out, v);
  return out;
}

MlpModel parse_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(sizeof kMagic);
  if (std::memcmp(magic.data(), kMagic, sizeof kMagic) != 0) {
    throw DataError("not a model checkpoint");
  }
  const auto count = r.u64();
  if (count < 2 || count > 1024) throw DataError("implausible layer count in checkpoint");
  std::vector<std::size_t> sizes(count);
  for (auto& s : sizes) s = r.u64();
  const auto classes = r.u64();
  if (classes != sizes.back()) throw DataError("checkpoint class count mismatch");

  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    DenseLayer l;
    l.in = sizes[k];
    l.out = sizes[k + 1];
    l.weights.resize(l.in * l.out);
    l.bias.resize(l.out);
    for (auto& w : l.weights) w = r.f64();
    for (auto& b : l.bias) b = r.f64();
    layers.push_back(std::move(l));
  }
  if (!r.done()) throw DataError("trailing bytes after checkpoint parameters");
  return MlpModel(std::move(layers));
}

void save_checkpoint(const std::filesystem::path& path, const MlpModel& model,
                     const std::string& sidecar_json) {
  const auto bytes = checkpoint_bytes(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  auto sidecar = path;
  sidecar.replace_extension(".json");
  std::ofstream side(sidecar, std::ios::trunc);
  if (!side) throw IoError("cannot write " + sidecar.string());
  side << sidecar_json << '\n';
}

MlpModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

}  // namespace cil::learner
