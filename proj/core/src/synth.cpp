#include "penet/synth.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace penet {

std::vector<std::string> synth_class_names() { return {"sphere", "cube", "cylinder", "disc"}; }

std::vector<std::vector<int>> synth_category_parts() { return {{0, 1}, {2, 3, 4}, {5, 6}, {7, 8}}; }

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec3 vec(double x, double y, double z) {
  return {static_cast<float>(x), static_cast<float>(y), static_cast<float>(z)};
}

void add(PointCloud& c, Vec3 p, Vec3 n, int part) {
  c.points.push_back(p);
  c.normals.push_back(n);
  c.part_labels.push_back(part);
}

void sample_sphere(PointCloud& c, Rng& rng) {
  double x, y, z, r;
  do {
    x = rng.normal();
    y = rng.normal();
    z = rng.normal();
    r = std::sqrt(x * x + y * y + z * z);
  } while (r < 1e-12);
  const Vec3 p = vec(x / r, y / r, z / r);
  add(c, p, p, z >= 0 ? 0 : 1);
}

void sample_cube(PointCloud& c, Rng& rng) {
  const std::size_t face = rng.below(6);
  const std::size_t axis = face / 2;
  const double sign = face % 2 ? -1.0 : 1.0;
  double p[3] = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  double n[3] = {0, 0, 0};
  p[axis] = sign;
  n[axis] = sign;
  add(c, vec(p[0], p[1], p[2]), vec(n[0], n[1], n[2]), 2 + static_cast<int>(axis));
}

void sample_cylinder(PointCloud& c, Rng& rng) {
  // Side area 4π vs. caps 2π.
  const double theta = rng.uniform(0, kTwoPi);
  if (rng.uniform() < 2.0 / 3.0) {
    const double x = std::cos(theta), y = std::sin(theta);
    add(c, vec(x, y, rng.uniform(-1, 1)), vec(x, y, 0), 5);
  } else {
    const double r = std::sqrt(rng.uniform());
    const double z = rng.uniform() < 0.5 ? 1.0 : -1.0;
    add(c, vec(r * std::cos(theta), r * std::sin(theta), z), vec(0, 0, z), 6);
  }
}

void sample_disc(PointCloud& c, Rng& rng) {
  const double r = std::sqrt(rng.uniform());
  const double theta = rng.uniform(0, kTwoPi);
  add(c, vec(r * std::cos(theta), r * std::sin(theta), 0), vec(0, 0, 1), r < 0.5 ? 7 : 8);
}

std::uint64_t split_tag(const std::string& split) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : split) h = (h ^ ch) * 1099511628211ULL;
  return h;
}

std::string cloud_stem(const std::string& split, std::size_t cls, std::size_t i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04zu", synth_class_names()[cls].c_str(), i);
  return split + "/" + buf;
}

}  // namespace

PointCloud synth_cloud(SynthShape shape, std::size_t n_points, Rng& rng) {
  PointCloud c;
  c.class_label = static_cast<int>(shape);
  c.points.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    switch (shape) {
      case SynthShape::kSphere: sample_sphere(c, rng); break;
      case SynthShape::kCube: sample_cube(c, rng); break;
      case SynthShape::kCylinder: sample_cylinder(c, rng); break;
      case SynthShape::kDisc: sample_disc(c, rng); break;
    }
  }
  return c;
}

Dataset synth_dataset(const std::string& split, std::size_t per_class, std::size_t n_points, std::uint64_t seed) {
  Dataset ds;
  ds.class_names = synth_class_names();
  ds.category_parts = synth_category_parts();
  const std::uint64_t tag = split_tag(split);
  for (std::size_t cls = 0; cls < kSynthClasses; ++cls) {
    for (std::size_t i = 0; i < per_class; ++i) {
      Rng rng(hash_seed({seed, tag, cls, i}));
      PointCloud c = synth_cloud(static_cast<SynthShape>(cls), n_points, rng);
      c.name = cloud_stem(split, cls, i) + ".txt";
      ds.clouds.push_back(std::move(c));
    }
  }
  return ds;
}

DatasetManifest synth_shapes(const std::filesystem::path& root, const std::string& split, std::size_t per_class,
                             std::size_t n_points, std::uint64_t seed) {
  const Dataset ds = synth_dataset(split, per_class, n_points, seed);
  std::error_code ec;
  std::filesystem::create_directories(root / split, ec);
  if (ec) throw IoError("cannot create '" + (root / split).string() + "': " + ec.message());

  DatasetManifest m;
  m.root = root;
  m.split = split;
  m.class_names = ds.class_names;
  m.category_parts = ds.category_parts;
  for (const PointCloud& c : ds.clouds) {
    std::filesystem::path cloud_rel = c.name;
    std::filesystem::path seg_rel = std::filesystem::path(c.name).replace_extension(".seg");
    write_text_file(root / cloud_rel, format_cloud_text(c));
    write_text_file(root / seg_rel, format_seg_text(c.part_labels));
    m.entries.push_back({cloud_rel, *c.class_label, seg_rel});
  }
  m.save();
  return m;
}

}  // namespace penet
