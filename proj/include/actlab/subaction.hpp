#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace actlab {

// One movement phase of an action: an id, its position in the canonical
// phase sequence, the set of textual variants a reasoning trace may use for
// it, and the detection threshold for this phase.
struct SubActionPhase {
  std::string id;
  int order = 0;
  std::vector<std::string> descriptions;  // lowercased at load time
  double threshold = 0.75;
};

struct ActionDecomposition {
  std::string name;
  std::vector<SubActionPhase> phases;  // file order == ascending `order`
};

struct LibraryStats {
  int n_actions = 0;
  int n_phases = 0;
  int n_descriptions = 0;
  bool operator==(const LibraryStats&) const = default;
};

// Immutable after load; safe to share across threads.
//
// File schema (strict, unknown keys rejected):
//   {"version":1,"actions":[{"name":...,"phases":[
//       {"id":...,"order":...,"descriptions":[...],"threshold":...}]}]}
// `threshold` is optional and defaults to 0.75.
class SubActionLibrary {
 public:
  // Throws MalformedFileError on syntax errors and InvariantViolationError
  // (message naming the offending location) on schema/invariant failures.
  static SubActionLibrary load(std::istream& in);
  static SubActionLibrary load_file(const std::string& path);
  static SubActionLibrary parse(std::string_view text);

  // Canonical serialization: fixed key order, two-space indent, trailing
  // newline. serialize(parse(serialize(x))) == serialize(x) byte for byte.
  std::string serialize() const;

  int version() const { return version_; }
  const std::vector<ActionDecomposition>& actions() const { return actions_; }
  const ActionDecomposition* find(std::string_view name) const;

  // Throws UnknownActionError.
  const std::vector<SubActionPhase>& phases_of(std::string_view action) const;

  LibraryStats stats() const;

  // Used by tests and generators that assemble libraries in memory; runs
  // the same invariant checks as load.
  static SubActionLibrary from_actions(int version,
                                       std::vector<ActionDecomposition> actions);

 private:
  SubActionLibrary() = default;
  void validate() const;
  void rebuild_index();

  int version_ = 1;
  std::vector<ActionDecomposition> actions_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

inline LibraryStats library_stats(const SubActionLibrary& lib) {
  return lib.stats();
}

}  // namespace actlab
