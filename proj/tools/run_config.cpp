#include "run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <functional>
#include <map>

#include "penet/point_cloud.hpp"

namespace penet::cli {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("invalid value '" + std::string(v) + "' for key '" + std::string(key) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean '" + std::string(v) + "' for key '" + std::string(key) + "'");
}

using Setter = std::function<void(TrainConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"task", [](TrainConfig& c, auto, auto v) { c.task = parse_task(v); }},
      {"epochs", [](TrainConfig& c, auto k, auto v) { c.epochs = parse_number<std::size_t>(k, v); }},
      {"batch_size", [](TrainConfig& c, auto k, auto v) { c.batch_size = parse_number<std::size_t>(k, v); }},
      {"points", [](TrainConfig& c, auto k, auto v) { c.points = parse_number<std::size_t>(k, v); }},
      {"k", [](TrainConfig& c, auto k, auto v) { c.k = parse_number<std::size_t>(k, v); }},
      {"encoder_depth", [](TrainConfig& c, auto k, auto v) { c.encoder_depth = parse_number<int>(k, v); }},
      {"optimizer",
       [](TrainConfig& c, auto k, auto v) {
         if (v == "adam") c.optimizer = OptimizerKind::kAdam;
         else if (v == "sgd") c.optimizer = OptimizerKind::kSgd;
         else throw ConfigError("invalid value '" + std::string(v) + "' for key '" + std::string(k) + "' (adam|sgd)");
       }},
      {"lr", [](TrainConfig& c, auto k, auto v) { c.learning_rate = parse_number<double>(k, v); }},
      {"lr_schedule",
       [](TrainConfig& c, auto k, auto v) {
         if (v == "constant") c.lr_schedule = LrSchedule::kConstant;
         else if (v == "step") c.lr_schedule = LrSchedule::kStep;
         else throw ConfigError("invalid value '" + std::string(v) + "' for key '" + std::string(k) + "' (constant|step)");
       }},
      {"lr_step", [](TrainConfig& c, auto k, auto v) { c.lr_step = parse_number<std::size_t>(k, v); }},
      {"lr_gamma", [](TrainConfig& c, auto k, auto v) { c.lr_gamma = parse_number<double>(k, v); }},
      {"seed", [](TrainConfig& c, auto k, auto v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"threads", [](TrainConfig& c, auto k, auto v) { c.threads = parse_number<std::size_t>(k, v); }},
      {"augment", [](TrainConfig& c, auto k, auto v) { c.augment = parse_bool(k, v); }},
      {"augment.jitter_sigma",
       [](TrainConfig& c, auto k, auto v) { c.augmentation.jitter_sigma = parse_number<double>(k, v); }},
      {"augment.jitter_clip",
       [](TrainConfig& c, auto k, auto v) { c.augmentation.jitter_clip = parse_number<double>(k, v); }},
      {"augment.shift_range",
       [](TrainConfig& c, auto k, auto v) { c.augmentation.shift_range = parse_number<double>(k, v); }},
      {"augment.scale_low",
       [](TrainConfig& c, auto k, auto v) { c.augmentation.scale_low = parse_number<double>(k, v); }},
      {"augment.scale_high",
       [](TrainConfig& c, auto k, auto v) { c.augmentation.scale_high = parse_number<double>(k, v); }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
  }();
  return names;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  auto it = setters().find(trim(key));
  if (it == setters().end()) throw ConfigError("unknown config key '" + std::string(trim(key)) + "'");
  it->second(train, trim(key), trim(value));
}

void RunConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void RunConfig::apply_text(std::string_view text, const std::string& source) {
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key=value");
    }
    try {
      set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

RunConfig RunConfig::build(const std::optional<std::filesystem::path>& file, std::span<const std::string> overrides) {
  RunConfig rc;
  if (file) rc.apply_text(read_text_file(*file), file->string());
  for (const auto& o : overrides) rc.apply_override(o);
  rc.train.validate();
  return rc;
}

std::size_t resolve_threads(std::optional<std::size_t> flag) {
  if (flag) return std::max<std::size_t>(*flag, 1);
  if (const char* env = std::getenv("PENET_THREADS")) {
    std::string_view v(env);
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec == std::errc() && ptr == v.data() + v.size() && n > 0) return n;
    throw ConfigError("PENET_THREADS must be a positive integer, got '" + std::string(v) + "'");
  }
  return 1;
}

}  // namespace penet::cli
