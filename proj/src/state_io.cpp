#include "fermigns/state_io.hpp"

#include <cstdio>
#include <fstream>

#include "fermigns/error.hpp"
#include "fermigns/field_io.hpp"

namespace fermigns {

namespace {

std::string orbital_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "orbital_%03zu.fld", i);
  return buf;
}

}  // namespace

void write_density_operator(const std::filesystem::path& dir, const DensityOperator& gamma,
                            const nlohmann::json& extra) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest = extra.is_object() ? extra : nlohmann::json::object();
  std::uint64_t h = 14695981039346656037ULL;
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t i = 0; i < gamma.frame.rank(); ++i) {
    const Field& u = gamma.frame[i];
    write_field(dir / orbital_name(i), u, "density operator orbital " + std::to_string(i));
    const auto* p = reinterpret_cast<const unsigned char*>(u.values().data());
    h = fnv1a({p, u.size() * sizeof(cplx)}, h);
    files.push_back(orbital_name(i));
  }
  const Grid& g = gamma.grid();
  manifest["orbitals"] = files;
  manifest["weights"] = gamma.weights;
  manifest["grid"] = {{"box_length", g.box_length()},
                      {"points", g.points()},
                      {"center", {g.center()[0], g.center()[1], g.center()[2]}}};
  manifest["content_hash"] = hex64(h);
  std::ofstream out(dir / "manifest.json");
  if (!out) throw InputError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

StoredOperator read_density_operator(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw InputError("no manifest.json in " + dir.string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
  if (!manifest.contains("orbitals") || !manifest.contains("weights")) {
    throw InputError("manifest lacks orbitals or weights");
  }
  Block orbitals;
  for (const auto& name : manifest["orbitals"]) orbitals.push_back(read_field(dir / name.get<std::string>()));
  auto weights = manifest["weights"].get<std::vector<double>>();
  return {DensityOperator(OrthoFrame::adopt(std::move(orbitals)), std::move(weights)), manifest};
}

}  // namespace fermigns
