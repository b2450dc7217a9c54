#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kg {

using EntityId = std::int32_t;
using RelationId = std::int32_t;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& detail, const std::string& source = {})
      : std::runtime_error((source.empty() ? "" : source + ": ") + "line " + std::to_string(line) + ": " +
                           detail),
        line_(line),
        detail_(detail) {}
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input line layout. `labeled` requires a fourth "1"/"-1" column; `auto`
/// accepts either three or four columns per line.
enum class TripleFormat { plain, labeled, automatic };

std::optional<TripleFormat> parse_format_name(const std::string& name);

struct RawTriple {
  std::string head;
  std::string relation;
  std::string tail;
  std::optional<int> label;

  bool operator==(const RawTriple&) const = default;
};

std::vector<RawTriple> parse_triples(std::istream& in, TripleFormat format);
std::vector<RawTriple> load_triples(const std::string& path, TripleFormat format);

class Vocabulary {
 public:
  /// Ids follow first appearance (head, relation, tail per line, splits in order).
  static Vocabulary build(std::span<const std::vector<RawTriple>> splits);

  EntityId add_entity(const std::string& name);
  RelationId add_relation(const std::string& name);

  std::optional<EntityId> entity_id(const std::string& name) const;
  std::optional<RelationId> relation_id(const std::string& name) const;
  const std::string& entity_name(EntityId id) const { return entity_names_.at(id); }
  const std::string& relation_name(RelationId id) const { return relation_names_.at(id); }

  std::int64_t num_entities() const { return static_cast<std::int64_t>(entity_names_.size()); }
  std::int64_t num_relations() const { return static_cast<std::int64_t>(relation_names_.size()); }

 private:
  std::unordered_map<std::string, EntityId> entity_ids_;
  std::unordered_map<std::string, RelationId> relation_ids_;
  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
};

Vocabulary build_vocabulary(std::span<const std::vector<RawTriple>> splits);

struct Triple {
  EntityId h = 0;
  RelationId r = 0;
  EntityId t = 0;

  bool operator==(const Triple&) const = default;
  auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& x) const noexcept {
    std::uint64_t k = static_cast<std::uint32_t>(x.h);
    k = k * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(x.r);
    k = k * 0x9E3779B97F4A7C15ULL ^ static_cast<std::uint32_t>(x.t);
    k ^= k >> 29;
    return static_cast<std::size_t>(k * 0xBF58476D1CE4E5B9ULL);
  }
};

using TripleSet = std::unordered_set<Triple, TripleHash>;

/// Membership over every known-true triple plus the (h,r)->tails and
/// (r,t)->heads indexes used by filtered ranking.
class KnownIndex {
 public:
  void add(std::span<const Triple> triples);

  bool contains(const Triple& x) const { return set_.contains(x); }
  std::size_t size() const { return set_.size(); }

  /// Entities e with (h, r, e) known; empty span when none.
  std::span<const EntityId> tails_of(EntityId h, RelationId r) const;
  /// Entities e with (e, r, t) known.
  std::span<const EntityId> heads_of(RelationId r, EntityId t) const;

 private:
  static std::uint64_t key(std::int32_t a, std::int32_t b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
           static_cast<std::uint32_t>(b);
  }

  TripleSet set_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> tails_;
  std::unordered_map<std::uint64_t, std::vector<EntityId>> heads_;
};

struct TripleStore {
  std::vector<Triple> train;
  std::vector<Triple> valid;
  std::vector<Triple> test;
  /// relation -> (h, t) pairs over train, one entry per train triple
  std::vector<std::vector<std::pair<EntityId, EntityId>>> by_relation;
  KnownIndex known;
  std::int64_t num_entities = 0;
  std::int64_t num_relations = 0;
};

struct RawSplits {
  std::vector<RawTriple> train;
  std::vector<RawTriple> valid;
  std::vector<RawTriple> test;
};

TripleStore encode_dataset(const RawSplits& raw, const Vocabulary& vocab, bool drop_negatives);

struct RelationStat {
  double tph = 1.0;
  double hpt = 1.0;
  double p_corrupt_head = 0.5;
};

/// Bernoulli corruption statistics; relations without train triples have no entry.
struct RelationStats {
  std::vector<std::optional<RelationStat>> per_relation;

  double p_corrupt_head(RelationId r) const {
    if (r < 0 || static_cast<std::size_t>(r) >= per_relation.size() || !per_relation[r]) return 0.5;
    return per_relation[r]->p_corrupt_head;
  }
};

RelationStats compute_relation_stats(const TripleStore& store);

/// A dataset loaded from three files with its vocabulary.
struct Dataset {
  Vocabulary vocab;
  TripleStore store;
};

/// An empty valid path yields an empty validation split.
Dataset load_dataset(const std::string& train_path, const std::string& valid_path,
                     const std::string& test_path, TripleFormat format, bool drop_negatives = true);

}  // namespace kg
