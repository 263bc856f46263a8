#include "cil/cifar.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "cil/error.hpp"

namespace cil::cifar {

Record parse_record(std::span<const std::uint8_t, kRecordBytes> bytes) {
  Record r;
  r.coarse = bytes[0];
  r.fine = bytes[1];
  if (r.fine >= kNumClasses) {
    throw DataError("corrupt record: fine label " + std::to_string(r.fine) +
                    " >= " + std::to_string(kNumClasses));
  }
  std::copy(bytes.begin() + 2, bytes.end(), r.pixels.begin());
  return r;
}

std::array<std::uint8_t, kRecordBytes> encode_record(const Record& record) {
  std::array<std::uint8_t, kRecordBytes> out{};
  out[0] = record.coarse;
  out[1] = record.fine;
  std::copy(record.pixels.begin(), record.pixels.end(), out.begin() + 2);
  return out;
}

LabeledExample to_example(const Record& record) {
  LabeledExample ex;
  ex.label = record.fine;
  ex.features.resize(kPixelBytes);
  for (std::size_t i = 0; i < kPixelBytes; ++i) {
    ex.features[i] = record.pixels[i] / 255.0;
  }
  return ex;
}

Record from_example(const LabeledExample& example, std::uint8_t coarse) {
  if (example.features.size() != kPixelBytes) {
    throw DataError("example width " + std::to_string(example.features.size()) +
                    " is not a CIFAR image");
  }
  if (example.label < 0 || example.label >= kNumClasses) {
    throw DataError("label " + std::to_string(example.label) +
                    " is not a CIFAR-100 fine label");
  }
  Record r;
  r.coarse = coarse;
  r.fine = static_cast<std::uint8_t>(example.label);
  for (std::size_t i = 0; i < kPixelBytes; ++i) {
    const double scaled = example.features[i] * 255.0;
    const double level = std::round(scaled);
    if (!(level >= 0.0 && level <= 255.0) || std::abs(scaled - level) > 1e-6) {
      throw DataError("feature " + std::to_string(i) +
                      " is not a pixel intensity / 255");
    }
    r.pixels[i] = static_cast<std::uint8_t>(level);
  }
  return r;
}

std::vector<Record> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  if (size % kRecordBytes != 0) {
    throw DataError("malformed file " + path.string() + ": size " +
                    std::to_string(size) + " is not a multiple of " +
                    std::to_string(kRecordBytes));
  }

  std::vector<Record> records;
  records.reserve(size / kRecordBytes);
  std::array<std::uint8_t, kRecordBytes> buffer{};
  for (std::size_t k = 0; k < size / kRecordBytes; ++k) {
    in.read(reinterpret_cast<char*>(buffer.data()), kRecordBytes);
    if (!in) throw IoError("short read in " + path.string());
    try {
      records.push_back(parse_record(buffer));
    } catch (const DataError& e) {
      throw DataError(std::string(e.what()) + " (record " + std::to_string(k) +
                      " of " + path.string() + ")");
    }
  }
  return records;
}

void write_records(const std::filesystem::path& path,
                   std::span<const Record> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& r : records) {
    const auto bytes = encode_record(r);
    out.write(reinterpret_cast<const char*>(bytes.data()), kRecordBytes);
  }
  if (!out) throw IoError("write failed for " + path.string());
}

Dataset load_cifar100(const std::filesystem::path& path, Split split) {
  Dataset ds;
  ds.num_classes = kNumClasses;
  ds.dim = kPixelBytes;
  auto& dst = split == Split::train ? ds.train : ds.test;
  for (const auto& r : read_records(path)) dst.push_back(to_example(r));
  return ds;
}

Dataset load_cifar100(const std::filesystem::path& train_path,
                      const std::filesystem::path& test_path) {
  Dataset ds = load_cifar100(train_path, Split::train);
  ds.test = std::move(load_cifar100(test_path, Split::test).test);
  return ds;
}

}  // namespace cil::cifar
