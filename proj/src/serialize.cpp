#include "fracpoh/serialize.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "solution files are little-endian");

namespace fracpoh {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'F', 'R', 'P', 'H'};

std::string fnv1a_hex(const char* data, size_t len) {
  unsigned long long h = 1469598103934665603ull;
  for (size_t i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", h);
  return buf;
}

json domain_block(const ExperimentConfig& c) {
  json d;
  switch (c.shape) {
    case Domain::Shape::interval:
      d = {{"shape", "interval"},
           {"params", {{"a", c.shape_params[0]}, {"b", c.shape_params[1]}}}};
      break;
    case Domain::Shape::ball:
      d = {{"shape", "ball"},
           {"params",
            {{"center", {c.shape_params[0], c.shape_params[1]}},
             {"radius", c.shape_params[2]}}}};
      break;
    case Domain::Shape::ellipse:
      d = {{"shape", "ellipse"},
           {"params",
            {{"center", {c.shape_params[0], c.shape_params[1]}},
             {"semi_axes", {c.shape_params[2], c.shape_params[3]}}}}};
      break;
    case Domain::Shape::annulus:
      d = {{"shape", "annulus"},
           {"params", {{"r_in", c.shape_params[0]}, {"r_out", c.shape_params[1]}}}};
      break;
  }
  d["distance_cap"] = c.distance_cap;
  d["grid"] = {{"N", c.grid_n}, {"grading", c.effective_grading()}};
  return d;
}

}  // namespace

void save_solution(const GridFunction& u, const ExperimentConfig& spec,
                   const std::string& path, const json& meta) {
  json header;
  header["version"] = 1;
  header["count"] = u.values.size();
  json angular;
  if (spec.density_is_default) {
    angular = {{"type", "constant"}, {"value", nullptr}};
  } else if (spec.density.type == AngularDensity::Type::constant) {
    angular = {{"type", "constant"}, {"value", spec.density.value}};
  } else {
    angular = {{"type", "sampled"}, {"values", spec.density.samples}};
  }
  header["kernel"] = {{"s", spec.order}, {"n", spec.dim}, {"angular", angular}};
  header["domain"] = domain_block(spec);
  header["meta"] = meta;

  const char* payload = reinterpret_cast<const char*>(u.values.data());
  const size_t payload_len = sizeof(double) * u.values.size();
  header["checksum"] = fnv1a_hex(payload, payload_len);

  const std::string head = header.dump();
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write " + tmp);
    out.write(kMagic, 4);
    std::uint32_t len = static_cast<std::uint32_t>(head.size());
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    out.write(payload, static_cast<std::streamsize>(payload_len));
    if (!out) throw io_error("short write on " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

LoadedSolution load_solution(const std::string& path, int expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open solution file " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw io_error("corrupted solution file (bad magic): " + path);
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), 4);
  if (!in || len == 0 || len > (1u << 26))
    throw io_error("corrupted solution file (bad header length): " + path);
  std::string head(len, '\0');
  in.read(head.data(), len);
  if (!in) throw io_error("corrupted solution file (truncated header): " + path);

  json header;
  try {
    header = json::parse(head);
  } catch (const json::exception&) {
    throw io_error("corrupted solution file (header is not JSON): " + path);
  }

  // Rebuild the experiment spec from the header blocks.
  json doc;
  doc["kernel"] = header["kernel"];
  doc["domain"] = header["domain"];
  ExperimentConfig spec = ExperimentConfig::parse(doc);
  if (expected_dim != 0 && spec.dim != expected_dim)
    throw io_error("solution file is " + std::to_string(spec.dim) +
                   "-D but the context expects " + std::to_string(expected_dim) +
                   "-D (incompatible grids)");

  const size_t count = header["count"].get<size_t>();
  Vector values(count);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(sizeof(double) * count));
  if (!in || static_cast<size_t>(in.gcount()) != sizeof(double) * count)
    throw io_error("corrupted solution file (truncated payload): " + path);

  std::string checksum =
      fnv1a_hex(reinterpret_cast<const char*>(values.data()), sizeof(double) * count);
  if (checksum != header["checksum"].get<std::string>())
    throw io_error("corrupted solution file (checksum mismatch): " + path);

  Grid grid = build_grid(spec.make_domain(), spec.grid_n, spec.effective_grading());
  if (grid.size() != count)
    throw io_error("solution file node count does not match its grid spec");
  LoadedSolution out{GridFunction(std::make_shared<Grid>(std::move(grid)), std::move(values)),
                     std::move(spec), header.value("meta", json::object())};
  return out;
}

}  // namespace fracpoh
