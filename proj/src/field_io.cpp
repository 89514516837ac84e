#include "fermigns/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "fermigns/error.hpp"

namespace fermigns {

static_assert(std::endian::native == std::endian::little, "field files assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'F', 'G', 'N', 'S', 'F', 'L', 'D', '1'};
constexpr std::uint32_t kVersion = 1;

struct Header {
  char magic[8];
  std::uint32_t version;
  std::uint32_t tag;
  std::uint64_t n;
  double box_length;
  double center[3];
  std::uint64_t reserved;
};
static_assert(sizeof(Header) == 64);

}  // namespace

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << value;
  return os.str();
}

std::string content_hash(const Field& f) {
  const auto* p = reinterpret_cast<const unsigned char*>(f.values().data());
  return hex64(fnv1a({p, f.size() * sizeof(cplx)}));
}

void write_field(const std::filesystem::path& path, const Field& f, const std::string& provenance,
                 const std::string& units) {
  Header h{};
  std::memcpy(h.magic, kMagic, 8);
  h.version = kVersion;
  h.tag = static_cast<std::uint32_t>(f.tag());
  h.n = static_cast<std::uint64_t>(f.grid().points());
  h.box_length = f.grid().box_length();
  for (int a = 0; a < 3; ++a) h.center[a] = f.grid().center()[a];
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(&h), sizeof h);
  out.write(reinterpret_cast<const char*>(f.values().data()),
            static_cast<std::streamsize>(f.size() * sizeof(cplx)));
  if (!out) throw InputError("failed writing " + path.string());

  nlohmann::json meta;
  meta["grid"] = {{"box_length", h.box_length},
                  {"points", h.n},
                  {"spacing", f.grid().spacing()},
                  {"center", {h.center[0], h.center[1], h.center[2]}}};
  meta["tag"] = to_string(f.tag());
  meta["units"] = units;
  meta["provenance"] = provenance;
  meta["content_hash"] = content_hash(f);
  std::ofstream side(path.string() + ".json");
  side << meta.dump(2) << '\n';
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  Header h{};
  in.read(reinterpret_cast<char*>(&h), sizeof h);
  if (!in || std::memcmp(h.magic, kMagic, 8) != 0) {
    throw InputError(path.string() + " is not a field file");
  }
  if (h.version != kVersion) throw InputError(path.string() + ": unsupported field version");
  if (h.tag > 3) throw InputError(path.string() + ": unknown field tag");
  const Grid grid = make_grid(h.box_length, static_cast<int>(h.n), {h.center[0], h.center[1], h.center[2]});
  std::vector<cplx> values(grid.size());
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(cplx)));
  if (!in) throw InputError(path.string() + ": truncated field data");
  return Field(grid, std::move(values), static_cast<FieldTag>(h.tag));
}

}  // namespace fermigns
