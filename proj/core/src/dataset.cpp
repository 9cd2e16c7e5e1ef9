#include "penet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace penet {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = s.find(sep, pos);
    out.push_back(s.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return out;
}

int parse_int(std::string_view tok, const std::string& where) {
  tok = trim(tok);
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw ParseError(where + ": invalid integer '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

std::filesystem::path DatasetManifest::manifest_path(const std::filesystem::path& root, std::string_view split) {
  return root / (std::string(split) + ".txt");
}

bool DatasetManifest::exists(const std::filesystem::path& root, std::string_view split) {
  return std::filesystem::exists(manifest_path(root, split));
}

DatasetManifest DatasetManifest::parse(std::string_view text, const std::filesystem::path& root,
                                       std::string_view split_name) {
  DatasetManifest m;
  m.root = root;
  m.split = std::string(split_name);
  const std::string source = manifest_path(root, split_name).string();
  std::size_t line_no = 0;
  for (std::string_view raw : split_on(text, '\n')) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.starts_with("#classes:")) {
      for (auto name : split_on(line.substr(9), ',')) {
        name = trim(name);
        if (name.empty()) throw ParseError(where + ": empty class name");
        m.class_names.emplace_back(name);
      }
      continue;
    }
    if (line.starts_with("#parts:")) {
      for (auto group : split_on(line.substr(7), ';')) {
        std::vector<int> ids;
        for (auto tok : split_on(group, ',')) {
          if (!trim(tok).empty()) ids.push_back(parse_int(tok, where));
        }
        m.category_parts.push_back(std::move(ids));
      }
      continue;
    }
    if (line.front() == '#') continue;
    const auto fields = split_on(line, '\t');
    if (fields.size() != 2 && fields.size() != 3) {
      throw ParseError(where + ": expected '<cloud>\\t<class id>[\\t<seg>]'");
    }
    ManifestEntry e;
    e.cloud = std::string(trim(fields[0]));
    e.class_id = parse_int(fields[1], where);
    if (fields.size() == 3) e.seg = std::string(trim(fields[2]));
    m.entries.push_back(std::move(e));
  }
  if (m.class_names.empty()) throw ParseError(source + ": missing '#classes:' header");
  if (!m.category_parts.empty() && m.category_parts.size() != m.class_names.size()) {
    throw ParseError(source + ": #parts lists " + std::to_string(m.category_parts.size()) + " groups for " +
                     std::to_string(m.class_names.size()) + " classes");
  }
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    const int c = m.entries[i].class_id;
    if (c < 0 || static_cast<std::size_t>(c) >= m.class_names.size()) {
      throw ConfigError(source + ": entry " + std::to_string(i) + " has class id " + std::to_string(c) + " but only " +
                        std::to_string(m.class_names.size()) + " classes are declared");
    }
  }
  return m;
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& root, std::string_view split_name) {
  DatasetManifest m = parse(read_text_file(manifest_path(root, split_name)), root, split_name);
  for (const auto& e : m.entries) {
    if (!std::filesystem::exists(root / e.cloud)) throw IoError("manifest references missing file " + (root / e.cloud).string());
    if (e.seg && !std::filesystem::exists(root / *e.seg)) {
      throw IoError("manifest references missing file " + (root / *e.seg).string());
    }
  }
  return m;
}

std::string DatasetManifest::format() const {
  std::string out = "#classes: ";
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    if (i) out += ',';
    out += class_names[i];
  }
  out += '\n';
  if (!category_parts.empty()) {
    out += "#parts: ";
    for (std::size_t c = 0; c < category_parts.size(); ++c) {
      if (c) out += ';';
      for (std::size_t j = 0; j < category_parts[c].size(); ++j) {
        if (j) out += ',';
        out += std::to_string(category_parts[c][j]);
      }
    }
    out += '\n';
  }
  for (const auto& e : entries) {
    out += e.cloud.generic_string();
    out += '\t';
    out += std::to_string(e.class_id);
    if (e.seg) {
      out += '\t';
      out += e.seg->generic_string();
    }
    out += '\n';
  }
  return out;
}

void DatasetManifest::save() const {
  std::filesystem::create_directories(root);
  write_text_file(manifest_path(root, split), format());
}

std::size_t Dataset::num_parts() const {
  int top = -1;
  for (const auto& parts : category_parts) {
    for (int p : parts) top = std::max(top, p);
  }
  for (const auto& c : clouds) {
    for (int p : c.part_labels) top = std::max(top, p);
  }
  return static_cast<std::size_t>(top + 1);
}

bool Dataset::has_part_labels() const {
  return !clouds.empty() &&
         std::all_of(clouds.begin(), clouds.end(), [](const PointCloud& c) { return c.has_part_labels(); });
}

std::vector<int> Dataset::parts_of(int category) const {
  if (!category_parts.empty()) return category_parts.at(static_cast<std::size_t>(category));
  std::set<int> seen;
  for (const auto& c : clouds) {
    if (c.class_label == category) seen.insert(c.part_labels.begin(), c.part_labels.end());
  }
  return {seen.begin(), seen.end()};
}

Dataset load_dataset(const DatasetManifest& manifest) {
  Dataset ds;
  ds.class_names = manifest.class_names;
  ds.category_parts = manifest.category_parts;
  ds.clouds.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) {
    std::optional<std::filesystem::path> seg;
    if (e.seg) seg = manifest.root / *e.seg;
    PointCloud c = load_cloud_text(manifest.root / e.cloud, seg);
    c.class_label = e.class_id;
    c.name = e.cloud.generic_string();
    ds.clouds.push_back(std::move(c));
  }
  return ds;
}

}  // namespace penet
