#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spkit/dgraph.hpp"
#include "spkit/membership.hpp"
#include "spkit/poset.hpp"

namespace spkit {

// Colors are plain indices 0..colors-1.
using Color = int;

struct IncompatibleColoring : Error {
  Mask first, second;
  IncompatibleColoring(Mask a, Mask b, const std::string& why)
      : Error("incompatible coloring: " + why), first(a), second(b) {}
};

// Three element sets per color: w (whole), s (sequential side), p (parallel side).
struct MsEncoding {
  int colors = 0;
  std::vector<Mask> w, s, p;

  MsEncoding() = default;
  explicit MsEncoding(int k) : colors(k), w(k, 0), s(k, 0), p(k, 0) {}
  bool operator==(const MsEncoding& o) const = default;
};

// A triple is kept with x < x2; the two parallel elements are unordered.
struct Triple {
  int y = 0, x = 0, x2 = 0;
  auto operator<=>(const Triple&) const = default;
};

// Triples directly bound by c for f.
std::vector<Triple> directly_bound(const Poset& p, Mask f, const MsEncoding& enc, Color c);
// Bound for f: directly bound for f or for a strictly smaller ms-factor of f.
bool s_bound(const Poset& p, Mask f, const MsEncoding& enc, Color c, int y);
bool p_bound(const Poset& p, Mask f, const MsEncoding& enc, Color c, int x);
bool s_free(const Poset& p, Mask f, const MsEncoding& enc, Color c, int y);
bool p_free(const Poset& p, Mask f, const MsEncoding& enc, Color c, int x);

// The colour f is ms-coloured in, or nothing. Throws NotMsFactor.
std::optional<Color> ms_color_of(const Poset& p, Mask f, const MsEncoding& enc);
bool completely_ms_colored(const Poset& p, const MsEncoding& enc);
// `coloring` must be total on the ms-factors of p.
MsEncoding encode_ms(const Poset& p, const std::map<Mask, Color>& coloring, int colors);

struct SColoring {
  int colors = 0;
  std::map<Mask, Color> color;
  std::vector<std::string> names;  // optional, one per color
};

// x in v[c]; ms is over the subsets of the colors, a subset being its bit mask.
struct SEncoding {
  int colors = 0;
  std::vector<Mask> v;
  MsEncoding ms;
};

constexpr int kMaxColors = 6;

// Every colour the encoding s-colours f in. Throws NotSequentialFactor.
std::vector<Color> s_colors_of(const Poset& p, Mask f, const SEncoding& enc);
// The unique such colour, or nothing.
std::optional<Color> s_color_of(const Poset& p, Mask f, const SEncoding& enc);
// The ms part colours every ms-factor, and the components of every parallel
// factor share their ms colour.
bool s_coloring_well_formed(const Poset& p, const SEncoding& enc);

// Why two distinct coloured sequential factors break compatibility, if they do.
std::optional<std::string> pair_conflict(const Poset& p, Mask f, Color cf, Mask g, Color cg);
// A pair of coloured factors breaking compatibility, with the reason.
std::optional<std::pair<std::pair<Mask, Mask>, std::string>> incompatible_pair(const Poset& p,
                                                                              const SColoring& c);
inline bool is_compatible(const Poset& p, const SColoring& c) { return !incompatible_pair(p, c); }
// Throws IncompatibleColoring, or Error when there are more than kMaxColors colours.
SEncoding encode_s(const Poset& p, const SColoring& c);

struct SpecialEdge {
  int from = 0, to = 0;
  auto operator<=>(const SpecialEdge&) const = default;
};
std::vector<SpecialEdge> special_edges(const DGraph& d);
std::string edge_text(const SpecialEdge& e);

// Colours are (b, edge) pairs, indexed 2 * edge + b. Throws InvalidPath.
SColoring coloring_from_path(const SPTerm& t, const PathTree& path, const DGraph& d);

nlohmann::json to_json(const MsEncoding& enc, const std::vector<std::string>& names = {});
nlohmann::json to_json(const SEncoding& enc, const std::vector<std::string>& names = {});
nlohmann::json to_json(const SColoring& c, const Poset& p);

}  // namespace spkit
