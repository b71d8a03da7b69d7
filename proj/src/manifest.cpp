#include "sitr/data/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "sitr/errors.hpp"

namespace sitr::data {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

int DatasetManifest::sensor_index(const std::string& sensor_id) const {
  for (std::size_t i = 0; i < sensors.size(); ++i)
    if (sensors[i].sensor_id == sensor_id) return static_cast<int>(i);
  return -1;
}

int DatasetManifest::contact_index(const std::string& contact_id) const {
  for (std::size_t i = 0; i < contacts.size(); ++i)
    if (contacts[i].contact_id == contact_id) return static_cast<int>(i);
  return -1;
}

const ManifestSample* DatasetManifest::find_sample(
    const std::string& sensor_id, const std::string& contact_id) const {
  for (const auto& s : samples)
    if (s.sensor_id == sensor_id && s.contact_id == contact_id) return &s;
  return nullptr;
}

int DatasetManifest::num_classes() const {
  int n = 0;
  for (const auto& c : contacts) n = std::max(n, c.class_label + 1);
  return n;
}

void DatasetManifest::validate(bool check_paths) const {
  std::set<std::string> sensor_ids, contact_ids;
  for (const auto& s : sensors)
    if (!sensor_ids.insert(s.sensor_id).second)
      throw contract_error("duplicate sensor id " + s.sensor_id);
  for (const auto& c : contacts) {
    if (!contact_ids.insert(c.contact_id).second)
      throw contract_error("duplicate contact id " + c.contact_id);
    if (c.class_label < 0)
      throw contract_error("negative class label for " + c.contact_id);
  }
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& s : samples) {
    if (!sensor_ids.count(s.sensor_id))
      throw contract_error("sample references unknown sensor " + s.sensor_id);
    if (!contact_ids.count(s.contact_id))
      throw contract_error("sample references unknown contact " +
                           s.contact_id);
    if (!pairs.insert({s.sensor_id, s.contact_id}).second)
      throw contract_error("duplicate sample for (" + s.sensor_id + ", " +
                           s.contact_id + ")");
  }
  if (sensor_aligned &&
      pairs.size() != sensors.size() * contacts.size())
    throw contract_error(
        "manifest claims sensor alignment but not every contact appears "
        "under every sensor");
  if (!samples.empty())
    for (double s : stddev)
      if (!(s > 0.0))
        throw contract_error("channel stddev must be positive");
  if (check_paths) {
    auto require = [&](const std::string& rel) {
      if (!fs::exists(fs::path(root_dir) / rel))
        throw io_error("manifest references missing file " + rel);
    };
    for (const auto& s : sensors) {
      require(s.background_path);
      for (const auto& p : s.calibration_paths) require(p);
    }
    for (const auto& s : samples) {
      require(s.image_path);
      require(s.normal_path);
    }
  }
}

DatasetManifest DatasetManifest::restrict_to_sensors(
    const std::vector<std::string>& sensor_ids) const {
  std::set<std::string> keep(sensor_ids.begin(), sensor_ids.end());
  for (const auto& id : keep)
    if (sensor_index(id) < 0)
      throw config_error("unknown sensor id " + id);
  DatasetManifest out = *this;
  out.sensors.clear();
  out.samples.clear();
  for (const auto& s : sensors)
    if (keep.count(s.sensor_id)) out.sensors.push_back(s);
  for (const auto& s : samples)
    if (keep.count(s.sensor_id)) out.samples.push_back(s);
  return out;
}

namespace {

ordered_json sensor_to_json(const ManifestSensor& s) {
  ordered_json j;
  j["sensor_id"] = s.sensor_id;
  j["config"] = ordered_json::parse(s.config.to_json());
  j["calibration_paths"] = s.calibration_paths;
  j["background_path"] = s.background_path;
  return j;
}

ManifestSensor sensor_from_json(const ordered_json& j) {
  ManifestSensor s;
  s.sensor_id = j.at("sensor_id").get<std::string>();
  s.config = sim::SensorConfig::from_json(j.at("config").dump());
  s.calibration_paths =
      j.at("calibration_paths").get<std::vector<std::string>>();
  s.background_path = j.at("background_path").get<std::string>();
  return s;
}

}  // namespace

std::string DatasetManifest::to_json() const {
  ordered_json j;
  j["version"] = version;
  j["global_seed"] = global_seed;
  j["sensor_aligned"] = sensor_aligned;
  j["sensors"] = ordered_json::array();
  for (const auto& s : sensors) j["sensors"].push_back(sensor_to_json(s));
  j["contacts"] = ordered_json::array();
  for (const auto& c : contacts) {
    ordered_json jc;
    jc["contact_id"] = c.contact_id;
    jc["primitive"] = c.primitive;
    jc["params"] = c.params;
    jc["class_label"] = c.class_label;
    jc["pose_mm"] = c.pose_mm;
    j["contacts"].push_back(jc);
  }
  j["samples"] = ordered_json::array();
  for (const auto& s : samples) {
    ordered_json js;
    js["sensor_id"] = s.sensor_id;
    js["contact_id"] = s.contact_id;
    js["image_path"] = s.image_path;
    js["normal_path"] = s.normal_path;
    j["samples"].push_back(js);
  }
  j["stats"]["mean"] = mean;
  j["stats"]["std"] = stddev;
  return j.dump(2);
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw io_error(std::string("bad manifest json: ") + e.what());
  }
  DatasetManifest m;
  try {
    m.version = j.at("version").get<int>();
    m.global_seed = j.at("global_seed").get<std::uint64_t>();
    m.sensor_aligned = j.at("sensor_aligned").get<bool>();
    for (const auto& js : j.at("sensors")) m.sensors.push_back(sensor_from_json(js));
    for (const auto& jc : j.at("contacts")) {
      ManifestContact c;
      c.contact_id = jc.at("contact_id").get<std::string>();
      c.primitive = jc.at("primitive").get<std::string>();
      c.params = jc.at("params").get<std::vector<double>>();
      c.class_label = jc.at("class_label").get<int>();
      c.pose_mm = jc.at("pose_mm").get<std::array<double, 3>>();
      m.contacts.push_back(c);
    }
    for (const auto& js : j.at("samples")) {
      ManifestSample s;
      s.sensor_id = js.at("sensor_id").get<std::string>();
      s.contact_id = js.at("contact_id").get<std::string>();
      s.image_path = js.at("image_path").get<std::string>();
      s.normal_path = js.at("normal_path").get<std::string>();
      m.samples.push_back(s);
    }
    m.mean = j.at("stats").at("mean").get<std::array<double, 3>>();
    m.stddev = j.at("stats").at("std").get<std::array<double, 3>>();
  } catch (const ordered_json::exception& e) {
    throw io_error(std::string("manifest missing field: ") + e.what());
  }
  return m;
}

void DatasetManifest::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write manifest to " + path);
  out << to_json() << '\n';
  if (!out) throw io_error("failed writing manifest to " + path);
}

DatasetManifest DatasetManifest::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  DatasetManifest m = from_json(ss.str());
  m.root_dir = fs::path(path).parent_path().string();
  return m;
}

}  // namespace sitr::data
