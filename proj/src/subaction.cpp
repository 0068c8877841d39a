#include "actlab/subaction.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "actlab/errors.hpp"

namespace actlab {

namespace {

using nlohmann::ordered_json;

void reject_unknown_keys(const ordered_json& obj,
                         std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw InvariantViolationError(where + ": unknown field '" + it.key() +
                                    "'");
    }
  }
}

const ordered_json& require_field(const ordered_json& obj, const char* key,
                                  const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw InvariantViolationError(where + ": missing field '" + key + "'");
  }
  return *it;
}

std::string lowercase(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return s;
}

SubActionPhase parse_phase(const ordered_json& node, const std::string& where) {
  if (!node.is_object()) {
    throw InvariantViolationError(where + ": phase must be an object");
  }
  reject_unknown_keys(node, {"id", "order", "descriptions", "threshold"},
                      where);
  SubActionPhase phase;
  const auto& id = require_field(node, "id", where);
  if (!id.is_string() || id.get<std::string>().empty()) {
    throw InvariantViolationError(where + ": 'id' must be a non-empty string");
  }
  phase.id = id.get<std::string>();

  const auto& order = require_field(node, "order", where);
  if (!order.is_number_integer() || order.get<long long>() < 0) {
    throw InvariantViolationError(where +
                                  ": 'order' must be a non-negative integer");
  }
  phase.order = order.get<int>();

  const auto& descs = require_field(node, "descriptions", where);
  if (!descs.is_array() || descs.empty()) {
    throw InvariantViolationError(where +
                                  ": 'descriptions' must be a non-empty list");
  }
  for (const auto& d : descs) {
    if (!d.is_string() || d.get<std::string>().empty()) {
      throw InvariantViolationError(where +
                                    ": descriptions must be non-empty strings");
    }
    phase.descriptions.push_back(lowercase(d.get<std::string>()));
  }

  if (auto it = node.find("threshold"); it != node.end()) {
    if (!it->is_number()) {
      throw InvariantViolationError(where + ": 'threshold' must be a number");
    }
    phase.threshold = it->get<double>();
  }
  if (!(phase.threshold > 0.0 && phase.threshold <= 1.0)) {
    throw InvariantViolationError(where + ": threshold must lie in (0, 1]");
  }
  return phase;
}

}  // namespace

SubActionLibrary SubActionLibrary::parse(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedFileError(std::string("library: ") + e.what());
  }
  if (!doc.is_object()) {
    throw InvariantViolationError("library: top level must be an object");
  }
  reject_unknown_keys(doc, {"version", "actions"}, "library");

  SubActionLibrary lib;
  const auto& version = require_field(doc, "version", "library");
  if (!version.is_number_integer()) {
    throw InvariantViolationError("library: 'version' must be an integer");
  }
  lib.version_ = version.get<int>();

  const auto& actions = require_field(doc, "actions", "library");
  if (!actions.is_array()) {
    throw InvariantViolationError("library: 'actions' must be a list");
  }
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& node = actions[i];
    const std::string where = "actions[" + std::to_string(i) + "]";
    if (!node.is_object()) {
      throw InvariantViolationError(where + ": action must be an object");
    }
    reject_unknown_keys(node, {"name", "phases"}, where);
    ActionDecomposition action;
    const auto& name = require_field(node, "name", where);
    if (!name.is_string() || name.get<std::string>().empty()) {
      throw InvariantViolationError(where +
                                    ": 'name' must be a non-empty string");
    }
    action.name = name.get<std::string>();
    const auto& phases = require_field(node, "phases", where);
    if (!phases.is_array()) {
      throw InvariantViolationError(where + ": 'phases' must be a list");
    }
    for (std::size_t j = 0; j < phases.size(); ++j) {
      action.phases.push_back(parse_phase(
          phases[j], "action '" + action.name + "' phases[" +
                         std::to_string(j) + "]"));
    }
    lib.actions_.push_back(std::move(action));
  }

  lib.validate();
  lib.rebuild_index();
  return lib;
}

SubActionLibrary SubActionLibrary::load(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("library: read failure");
  return parse(buf.str());
}

SubActionLibrary SubActionLibrary::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open library file: " + path);
  return load(in);
}

SubActionLibrary SubActionLibrary::from_actions(
    int version, std::vector<ActionDecomposition> actions) {
  SubActionLibrary lib;
  lib.version_ = version;
  lib.actions_ = std::move(actions);
  lib.validate();
  lib.rebuild_index();
  return lib;
}

void SubActionLibrary::validate() const {
  if (actions_.empty()) {
    throw InvariantViolationError("library: must contain at least one action");
  }
  std::set<std::string> names;
  for (const auto& action : actions_) {
    if (!names.insert(action.name).second) {
      throw InvariantViolationError("library: duplicate action name '" +
                                    action.name + "'");
    }
    std::set<std::string> ids;
    int last_order = -1;
    for (const auto& phase : action.phases) {
      const std::string where =
          "action '" + action.name + "' phase '" + phase.id + "'";
      if (!ids.insert(phase.id).second) {
        throw InvariantViolationError("action '" + action.name +
                                      "': duplicate phase id '" + phase.id +
                                      "'");
      }
      if (phase.order <= last_order) {
        throw InvariantViolationError(
            where + ": order " + std::to_string(phase.order) +
            " does not strictly increase (previous " +
            std::to_string(last_order) + ")");
      }
      last_order = phase.order;
      if (phase.descriptions.empty()) {
        throw InvariantViolationError(where + ": no descriptions");
      }
      for (const auto& d : phase.descriptions) {
        if (d.empty()) {
          throw InvariantViolationError(where + ": empty description");
        }
      }
      if (!(phase.threshold > 0.0 && phase.threshold <= 1.0)) {
        throw InvariantViolationError(where + ": threshold out of (0, 1]");
      }
    }
  }
}

void SubActionLibrary::rebuild_index() {
  index_.clear();
  for (std::size_t i = 0; i < actions_.size(); ++i) {
    index_.emplace(actions_[i].name, i);
  }
}

const ActionDecomposition* SubActionLibrary::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &actions_[it->second];
}

const std::vector<SubActionPhase>& SubActionLibrary::phases_of(
    std::string_view action) const {
  const ActionDecomposition* found = find(action);
  if (!found) {
    throw UnknownActionError("unknown action '" + std::string(action) + "'");
  }
  return found->phases;  // file order is ascending by `order`
}

LibraryStats SubActionLibrary::stats() const {
  LibraryStats s;
  s.n_actions = static_cast<int>(actions_.size());
  for (const auto& action : actions_) {
    s.n_phases += static_cast<int>(action.phases.size());
    for (const auto& phase : action.phases) {
      s.n_descriptions += static_cast<int>(phase.descriptions.size());
    }
  }
  return s;
}

std::string SubActionLibrary::serialize() const {
  ordered_json doc;
  doc["version"] = version_;
  doc["actions"] = ordered_json::array();
  for (const auto& action : actions_) {
    ordered_json a;
    a["name"] = action.name;
    a["phases"] = ordered_json::array();
    for (const auto& phase : action.phases) {
      ordered_json p;
      p["id"] = phase.id;
      p["order"] = phase.order;
      p["descriptions"] = phase.descriptions;
      p["threshold"] = phase.threshold;
      a["phases"].push_back(std::move(p));
    }
    doc["actions"].push_back(std::move(a));
  }
  return doc.dump(2) + "\n";
}

}  // namespace actlab
