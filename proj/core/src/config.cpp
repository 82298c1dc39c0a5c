#include "subseas/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "subseas/error.hpp"
#include "subseas/skill.hpp"

namespace subseas {

namespace fs = std::filesystem;
using boost::property_tree::ptree;

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  while (!text.empty()) {
    const auto sep = text.find(',');
    std::string item = trim(text.substr(0, sep));
    if (!item.empty()) out.push_back(std::move(item));
    if (sep == std::string_view::npos) break;
    text.remove_prefix(sep + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::string_view key) {
  const std::string s = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::Config, std::string(key) + ": expected a number, got '" + s + "'");
  }
  return value;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

// Wraps a section so that unknown keys are reported.
class Section {
 public:
  Section(std::string name, const ptree& tree) : name_(std::move(name)), tree_(tree) {}

  std::optional<std::string> get(const std::string& key) {
    used_.insert(key);
    if (auto v = tree_.get_optional<std::string>(ptree::path_type(key, '\0'))) return trim(*v);
    return std::nullopt;
  }
  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v || v->empty()) throw Error(ErrorCode::Config, "[" + name_ + "] missing key '" + key + "'");
    return *v;
  }
  std::string qualified(const std::string& key) const { return "[" + name_ + "] " + key; }
  void check_unused() const {
    for (const auto& [key, child] : tree_) {
      if (!used_.contains(key)) throw Error(ErrorCode::Config, "[" + name_ + "] unknown key '" + key + "'");
    }
  }

 private:
  std::string name_;
  const ptree& tree_;
  std::set<std::string> used_;
};

Date config_date(Section& s, const std::string& key) {
  const std::string text = s.require(key);
  try {
    return parse_date(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, s.qualified(key) + ": " + e.what());
  }
}

ModelSpec parse_model(const std::string& name, Section& s, const std::string& base_dir) {
  ModelSpec m;
  m.name = name;
  const std::string kind = s.require("kind");
  if (kind == "multillr") {
    m.kind = ModelKind::Multillr;
    m.catalog = s.get("catalog").value_or("");
    if (m.catalog == "default") m.catalog.clear();
    if (auto v = s.get("tol")) m.multillr.tol = parse_number<double>(*v, s.qualified("tol"));
    if (auto v = s.get("span")) m.multillr.span = parse_number<int>(*v, s.qualified("span"));
  } else if (kind == "autoknn") {
    m.kind = ModelKind::Autoknn;
    if (auto v = s.get("variable")) {
      try {
        m.autoknn = AutoknnConfig::for_variable(*v);
      } catch (const Error& e) {
        throw Error(ErrorCode::Config, s.qualified("variable") + ": " + e.what());
      }
    }
    if (auto v = s.get("k")) m.autoknn.k = parse_number<std::size_t>(*v, s.qualified("k"));
    if (auto v = s.get("neighbors_used")) {
      m.autoknn.neighbors_used = parse_number<std::size_t>(*v, s.qualified("neighbors_used"));
    }
    if (auto v = s.get("history")) m.autoknn.history = parse_number<int>(*v, s.qualified("history"));
    if (auto v = s.get("year_lag")) m.autoknn.year_lag = parse_number<int>(*v, s.qualified("year_lag"));
    if (auto v = s.get("span")) m.autoknn.span = parse_number<int>(*v, s.qualified("span"));
  } else if (kind == "ensemble") {
    m.kind = ModelKind::Ensemble;
    m.members = split_list(s.require("members"));
    if (auto v = s.get("weights")) {
      for (const auto& w : split_list(*v)) m.weights.push_back(parse_number<double>(w, s.qualified("weights")));
    }
  } else if (kind == "echo") {
    m.kind = ModelKind::Echo;
  } else if (kind == "file") {
    m.kind = ModelKind::File;
    m.path = resolve(base_dir, s.require("path"));
    const std::string values = s.get("values").value_or("absolute");
    if (values != "absolute" && values != "anomaly") {
      throw Error(ErrorCode::Config, s.qualified("values") + ": expected absolute or anomaly");
    }
    m.file_holds_anomalies = values == "anomaly";
  } else {
    throw Error(ErrorCode::Config, s.qualified("kind") + ": unknown model kind '" + kind + "'");
  }
  s.check_unused();
  return m;
}

SyntheticSource parse_synthetic(Section& s, const std::string& base_dir) {
  SyntheticSource src;
  src.years = parse_year_range(s.require("years"));
  src.grid = parse_grid(s.get("grid").value_or("box:40,42,250,253"), base_dir);
  SyntheticSpec& spec = src.spec;
  if (auto v = s.get("variable")) spec.target_variable = *v;
  if (auto v = s.get("n_features")) spec.n_features = parse_number<int>(*v, s.qualified("n_features"));
  if (auto v = s.get("n_active")) spec.n_active = parse_number<int>(*v, s.qualified("n_active"));
  if (auto v = s.get("feature_lag")) spec.feature_lag = parse_number<int>(*v, s.qualified("feature_lag"));
  if (auto v = s.get("target_skill")) spec.target_skill = parse_number<double>(*v, s.qualified("target_skill"));
  if (auto v = s.get("noise_sd")) spec.noise_sd = parse_number<double>(*v, s.qualified("noise_sd"));
  if (auto v = s.get("seasonal_amplitude")) {
    spec.seasonal_amplitude = parse_number<double>(*v, s.qualified("seasonal_amplitude"));
  }
  if (auto v = s.get("model_members")) spec.model_members = parse_number<int>(*v, s.qualified("model_members"));
  s.check_unused();
  return src;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Multillr: return "multillr";
    case ModelKind::Autoknn: return "autoknn";
    case ModelKind::Ensemble: return "ensemble";
    case ModelKind::Echo: return "echo";
    case ModelKind::File: return "file";
  }
  return "unknown";
}

YearRange parse_year_range(std::string_view text) {
  const std::string s = trim(text);
  const auto dash = s.find('-');
  try {
    if (dash == std::string::npos) {
      const int y = parse_number<int>(s, "year range");
      return {y, y};
    }
    YearRange r{parse_number<int>(s.substr(0, dash), "year range"), parse_number<int>(s.substr(dash + 1), "year range")};
    if (r.first > r.last) throw Error(ErrorCode::Config, "year range '" + s + "' is reversed");
    return r;
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, "bad year range '" + s + "': " + e.what());
  }
}

GridSpec parse_grid(std::string_view text, const std::string& base_dir) {
  const std::string s = trim(text);
  if (s == "contest") return GridSpec::contest();
  if (s.starts_with("box:")) {
    const auto parts = split_list(std::string_view(s).substr(4));
    if (parts.size() != 4) throw Error(ErrorCode::Config, "grid box needs lat_min,lat_max,lon_min,lon_max");
    return GridSpec::box(parse_number<int>(parts[0], "grid"), parse_number<int>(parts[1], "grid"),
                         parse_number<int>(parts[2], "grid"), parse_number<int>(parts[3], "grid"));
  }
  return GridSpec::read(resolve(base_dir, s));
}

RunConfig RunConfig::parse(const std::string& text, const std::string& base_dir) {
  ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw Error(ErrorCode::Config, "line " + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig cfg;
  cfg.source_text = text;
  const auto run_tree = tree.get_child_optional(ptree::path_type("run", '\0'));
  if (!run_tree) throw Error(ErrorCode::Config, "missing [run] section");
  Section run("run", *run_tree);

  if (auto v = run.get("dataset")) cfg.dataset_dir = resolve(base_dir, *v);
  cfg.horizon = [&] {
    try {
      return Horizon::parse(run.get("horizon").value_or("weeks34"));
    } catch (const Error& e) {
      throw Error(ErrorCode::Config, run.qualified("horizon") + ": " + e.what());
    }
  }();
  cfg.first_issue = config_date(run, "first_issue");
  cfg.last_issue = config_date(run, "last_issue");
  cfg.base_years = parse_year_range(run.require("base_years"));
  cfg.variable = run.get("variable").value_or("");
  if (auto v = run.get("output")) cfg.output_dir = resolve(base_dir, *v);
  if (auto v = run.get("seed")) cfg.seed = parse_number<std::uint64_t>(*v, run.qualified("seed"));
  if (auto v = run.get("threads")) cfg.threads = parse_number<int>(*v, run.qualified("threads"));
  const auto model_names = split_list(run.require("models"));
  run.check_unused();

  std::set<std::string> sections{"run"};
  if (auto synth = tree.get_child_optional(ptree::path_type("synthetic", '\0'))) {
    Section s("synthetic", *synth);
    cfg.synthetic = parse_synthetic(s, base_dir);
    sections.insert("synthetic");
  }
  for (const auto& name : model_names) {
    const std::string section = "model:" + name;
    const auto child = tree.get_child_optional(ptree::path_type(section, '\0'));
    if (!child) throw Error(ErrorCode::Config, "model '" + name + "' has no [" + section + "] section");
    if (!sections.insert(section).second) throw Error(ErrorCode::Config, "model '" + name + "' listed twice");
    Section s(section, *child);
    cfg.models.push_back(parse_model(name, s, base_dir));
  }
  for (const auto& [name, child] : tree) {
    if (!sections.contains(name)) throw Error(ErrorCode::Config, "unused section [" + name + "]");
  }
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

void RunConfig::validate() const {
  if (dataset_dir.empty() == !synthetic.has_value()) {
    throw Error(ErrorCode::Config, "exactly one of [run] dataset and a [synthetic] section is required");
  }
  if (!dataset_dir.empty() && !fs::is_directory(dataset_dir)) {
    throw Error(ErrorCode::Config, "dataset directory '" + dataset_dir + "' does not exist");
  }
  if (threads < 1) throw Error(ErrorCode::Config, "[run] threads must be at least 1");
  if (first_issue > last_issue) throw Error(ErrorCode::Config, "[run] first_issue is after last_issue");
  // The last base-period aggregate must be fully observed before the first issue.
  if (!(make_date(base_years.last, 12, 31) + Days{13} < first_issue)) {
    throw Error(ErrorCode::Config, "[run] base_years must end before the first issue date");
  }
  if (models.empty()) throw Error(ErrorCode::Config, "[run] models is empty");
  for (std::size_t i = 0; i < models.size(); ++i) {
    const ModelSpec& m = models[i];
    const std::string where = "[model:" + m.name + "] ";
    switch (m.kind) {
      case ModelKind::Multillr:
        if (m.multillr.span < 0 || m.multillr.span > 182) throw Error(ErrorCode::Config, where + "span must lie in 0..182");
        if (!m.catalog.empty()) {
          try {
            (void)FeatureCatalog::parse(m.catalog);
          } catch (const Error& e) {
            throw Error(ErrorCode::Config, where + "catalog: " + e.what());
          }
        }
        break;
      case ModelKind::Autoknn:
        try {
          m.autoknn.validate();
        } catch (const Error& e) {
          throw Error(ErrorCode::Config, where + e.what());
        }
        break;
      case ModelKind::Ensemble: {
        if (m.members.size() < 2) throw Error(ErrorCode::Config, where + "needs at least two members");
        for (const auto& member : m.members) {
          bool earlier = false;
          for (std::size_t j = 0; j < i; ++j) earlier = earlier || models[j].name == member;
          if (!earlier) throw Error(ErrorCode::Config, where + "member '" + member + "' must be listed before it");
        }
        if (!m.weights.empty()) {
          if (m.weights.size() != m.members.size()) {
            throw Error(ErrorCode::Config, where + "weights and members differ in length");
          }
          try {
            (void)EnsembleWeights(m.weights);
          } catch (const Error& e) {
            throw Error(ErrorCode::Config, where + "weights: " + e.what());
          }
        }
        break;
      }
      case ModelKind::File:
        if (!fs::is_regular_file(m.path)) throw Error(ErrorCode::Config, where + "file '" + m.path + "' does not exist");
        break;
      case ModelKind::Echo:
        break;
    }
  }
}

const ModelSpec* RunConfig::find_model(std::string_view name) const {
  for (const auto& m : models) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

}  // namespace subseas
