#include "rawkit/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "rawkit/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "tensor I/O assumes a little-endian host");

namespace rawkit {

namespace {
constexpr char kMagic[8] = {'R', 'A', 'W', 'T', 'N', 'S', 'R', '\0'};
}

void write_tensor(const LinearImage& img, const std::string& path) {
  img.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  out.write(kMagic, sizeof(kMagic));
  std::uint32_t dims[3] = {3, static_cast<std::uint32_t>(img.height),
                           static_cast<std::uint32_t>(img.width)};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size() * sizeof(float)));
  if (!out) throw IoError("failed writing '" + path + "'");
}

LinearImage read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ParseError("'" + path + "' is not a tensor file (bad magic)");

  std::uint32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in) throw ParseError("'" + path + "' truncated in header");
  if (dims[0] != 3)
    throw ParseError("'" + path + "' has " + std::to_string(dims[0]) +
                     " channels, expected 3");

  LinearImage img;
  img.height = static_cast<int>(dims[1]);
  img.width = static_cast<int>(dims[2]);
  if (img.width <= 0 || img.height <= 0)
    throw ParseError("'" + path + "' has non-positive dimensions");
  img.data.resize(3 * img.plane_size());
  in.read(reinterpret_cast<char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size() * sizeof(float)));
  if (!in) throw ParseError("'" + path + "' truncated in payload");
  return img;
}

}  // namespace rawkit
