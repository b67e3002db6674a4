#include "clqr/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>

#include "clqr/errors.hpp"

namespace clqr {

RobotModel::RobotModel(std::vector<Link> links, std::vector<Endeffector> endeffectors,
                       std::vector<Foot> feet, double gravity,
                       std::vector<std::string> unactuated_joints)
    : links_(std::move(links)),
      endeffectors_(std::move(endeffectors)),
      feet_(std::move(feet)),
      unactuated_(std::move(unactuated_joints)),
      gravity_(gravity) {
  if (links_.empty()) throw std::invalid_argument("model has no links");
  if (links_[0].parent != -1) throw std::invalid_argument("link 0 must be the root (parent -1)");

  total_mass_ = 0.0;
  coord_start_.resize(links_.size());
  for (size_t i = 0; i < links_.size(); ++i) {
    const Link& l = links_[i];
    if (i > 0 && (l.parent < 0 || l.parent >= static_cast<int>(i)))
      throw std::invalid_argument("link '" + l.name + "': parent index must be smaller than its own");
    if (i > 0 && l.joint == JointType::FloatingBase)
      throw std::invalid_argument("link '" + l.name + "': floating base only allowed at the root");
    if (!(l.mass > 0.0)) throw std::invalid_argument("link '" + l.name + "': mass must be > 0");
    if (l.inertia < 0.0) throw std::invalid_argument("link '" + l.name + "': inertia must be >= 0");
    coord_start_[i] = n_;
    n_ += (l.joint == JointType::FloatingBase) ? 3 : 1;
    total_mass_ += l.mass;
  }
  n_base_ = (links_[0].joint == JointType::FloatingBase) ? 3 : 0;

  for (const Endeffector& ee : endeffectors_) {
    if (ee.link < 0 || ee.link >= static_cast<int>(links_.size()))
      throw std::invalid_argument("endeffector '" + ee.name + "': bad link index");
    if (ee.directions.empty())
      throw std::invalid_argument("endeffector '" + ee.name + "': needs at least one direction");
  }

  // Actuated coordinates: every joint coordinate not listed as unactuated.
  for (size_t i = (n_base_ > 0 ? 1 : 0); i < links_.size(); ++i) {
    bool passive = std::find(unactuated_.begin(), unactuated_.end(), links_[i].name) != unactuated_.end();
    if (!passive) actuated_coords_.push_back(coord_start_[i]);
  }
  selector_ = MatrixXd::Zero(static_cast<int>(actuated_coords_.size()), n_);
  for (size_t r = 0; r < actuated_coords_.size(); ++r) selector_(static_cast<int>(r), actuated_coords_[r]) = 1.0;
}

int RobotModel::endeffector_id(const std::string& ee_name) const {
  for (size_t i = 0; i < endeffectors_.size(); ++i)
    if (endeffectors_[i].name == ee_name) return static_cast<int>(i);
  throw std::invalid_argument("unknown endeffector '" + ee_name + "'");
}

int RobotModel::foot_id(const std::string& foot_name) const {
  for (size_t i = 0; i < feet_.size(); ++i)
    if (feet_[i].name == foot_name) return static_cast<int>(i);
  throw std::invalid_argument("unknown foot '" + foot_name + "'");
}

int RobotModel::link_id(const std::string& link_name) const {
  for (size_t i = 0; i < links_.size(); ++i)
    if (links_[i].name == link_name) return static_cast<int>(i);
  throw std::invalid_argument("unknown link '" + link_name + "'");
}

VectorXd state_deviation(const RobotModel& model, const FullState& x, const FullState& x0) {
  const int n = model.n();
  VectorXd dx(2 * n);
  dx.head(n) = x.q - x0.q;
  dx.tail(n) = x.v - x0.v;
  if (model.has_floating_base())
    dx[model.pitch_coord()] = std::remainder(dx[model.pitch_coord()], 2.0 * M_PI);
  return dx;
}

namespace {

using nlohmann::json;

Vector2d parse_vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError(where + ": expected an array of two numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

Direction parse_direction(const std::string& s, const std::string& where) {
  if (s == "x") return Direction::X;
  if (s == "z") return Direction::Z;
  if (s == "pitch") return Direction::Pitch;
  throw ConfigError(where + ": unknown direction '" + s + "' (expected x, z or pitch)");
}

}  // namespace

RobotModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("model file '" + path + "': " + e.what());
  }

  const std::string where = "model file '" + path + "'";
  if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != 1)
    throw ConfigError(where + ": missing or unsupported schema_version (expected 1)");
  if (!doc.contains("links")) throw ConfigError(where + ": missing 'links'");

  std::vector<Link> links;
  std::vector<std::string> link_names;
  for (const json& jl : doc["links"]) {
    Link l;
    l.name = jl.at("name").get<std::string>();
    const std::string lw = where + ", link '" + l.name + "'";
    l.parent = jl.at("parent").get<int>();
    const std::string jt = jl.at("joint").get<std::string>();
    if (jt == "floating")
      l.joint = JointType::FloatingBase;
    else if (jt == "revolute")
      l.joint = JointType::Revolute;
    else if (jt == "prismatic")
      l.joint = JointType::Prismatic;
    else
      throw ConfigError(lw + ": unknown joint type '" + jt + "'");
    if (jl.contains("anchor")) l.anchor = parse_vec2(jl["anchor"], lw + ".anchor");
    if (jl.contains("axis")) l.axis = parse_vec2(jl["axis"], lw + ".axis");
    l.mass = jl.at("mass").get<double>();
    if (jl.contains("com")) l.com = parse_vec2(jl["com"], lw + ".com");
    l.inertia = jl.value("inertia", 0.0);
    link_names.push_back(l.name);
    links.push_back(l);
  }

  auto link_index = [&](const json& j, const std::string& w) -> int {
    if (j.is_number_integer()) return j.get<int>();
    const std::string s = j.get<std::string>();
    auto it = std::find(link_names.begin(), link_names.end(), s);
    if (it == link_names.end()) throw ConfigError(w + ": unknown link '" + s + "'");
    return static_cast<int>(it - link_names.begin());
  };

  std::vector<Endeffector> ees;
  std::vector<std::string> ee_names;
  for (const json& je : doc.value("endeffectors", json::array())) {
    Endeffector ee;
    ee.name = je.at("name").get<std::string>();
    const std::string ew = where + ", endeffector '" + ee.name + "'";
    ee.link = link_index(je.at("link"), ew);
    if (je.contains("offset")) ee.offset = parse_vec2(je["offset"], ew + ".offset");
    for (const json& jd : je.at("directions"))
      ee.directions.push_back(parse_direction(jd.get<std::string>(), ew));
    ee_names.push_back(ee.name);
    ees.push_back(ee);
  }

  auto ee_index = [&](const std::string& s, const std::string& w) -> int {
    auto it = std::find(ee_names.begin(), ee_names.end(), s);
    if (it == ee_names.end()) throw ConfigError(w + ": unknown endeffector '" + s + "'");
    return static_cast<int>(it - ee_names.begin());
  };

  std::vector<Foot> feet;
  for (const json& jf : doc.value("feet", json::array())) {
    Foot f;
    f.name = jf.at("name").get<std::string>();
    const std::string fw = where + ", foot '" + f.name + "'";
    for (const json& jc : jf.at("contact_ees")) f.contact_ees.push_back(ee_index(jc.get<std::string>(), fw));
    f.frame_ee = ee_index(jf.at("frame_ee").get<std::string>(), fw);
    feet.push_back(f);
  }

  std::vector<std::string> unactuated;
  for (const json& ju : doc.value("unactuated", json::array())) unactuated.push_back(ju.get<std::string>());

  RobotModel model(std::move(links), std::move(ees), std::move(feet), doc.value("gravity", 9.81),
                   std::move(unactuated));
  model.name = doc.value("name", std::string{});

  if (doc.contains("nominal")) {
    const json& jn = doc["nominal"];
    if (jn.contains("left_foot")) model.nominal.left_foot = parse_vec2(jn["left_foot"], where + ".nominal.left_foot");
    if (jn.contains("right_foot"))
      model.nominal.right_foot = parse_vec2(jn["right_foot"], where + ".nominal.right_foot");
    model.nominal.base_height = jn.value("base_height", 0.0);
    if (jn.contains("q")) {
      const json& jq = jn["q"];
      if (static_cast<int>(jq.size()) != model.n())
        throw ConfigError(where + ".nominal.q: expected " + std::to_string(model.n()) + " entries");
      model.nominal.q = VectorXd(model.n());
      for (int i = 0; i < model.n(); ++i) model.nominal.q[i] = jq[i].get<double>();
    }
  }
  if (model.nominal.q.size() == 0) model.nominal.q = VectorXd::Zero(model.n());
  return model;
}

}  // namespace clqr
