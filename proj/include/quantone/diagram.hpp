#pragma once

#include <complex>
#include <string>
#include <vector>

#include "quantone/grammar.hpp"
#include "quantone/model.hpp"
#include "quantone/pregroup.hpp"

namespace quantone {

/// A word of the diagram. A rotated box has been transposed by the
/// rewrite: it consumes its wires as an effect instead of preparing them.
struct WordBox {
  Token token;
  PregroupType type;
  bool rotated = false;

  friend bool operator==(const WordBox&, const WordBox&) = default;
};

/// Pair of wire occurrences (left < right). Occurrences are numbered left to
/// right over the concatenated word types.
struct WirePair {
  int left = 0;
  int right = 0;

  friend bool operator==(const WirePair&, const WirePair&) = default;
};

/// Word row plus wiring. `cups` are pregroup reductions still to be
/// contracted; `links` are cups straightened by the rewrite, each joining a
/// state's wire directly to a rotated box's input.
struct PregroupDiagram {
  std::vector<WordBox> words;
  std::vector<WirePair> cups;
  std::vector<WirePair> links;
  std::vector<int> open;

  int wire_count() const;
  std::vector<BasicType> wires() const;
  std::vector<BasicType> open_wires() const;
  /// First occurrence index of each word.
  std::vector<int> offsets() const;
  /// Index of the word owning an occurrence.
  int word_of(int occurrence) const;

  friend bool operator==(const PregroupDiagram&, const PregroupDiagram&) = default;
};

/// Words in yield order with their functor types; one cup per reduction
/// demanded by the production rules.
PregroupDiagram cfg_to_pregroup(const DerivationTree& tree);

/// Reduction check over the concatenated word types.
bool reduces_to_s(const PregroupDiagram& d);

/// Pairs nest or are disjoint (drawable without crossings).
bool is_planar(const std::vector<WirePair>& pairs);

/// Structural sanity: every occurrence in exactly one cup, link or open slot.
bool is_well_wired(const PregroupDiagram& d);

/// Snake-equation rewrite. Starting from the word that owns the open
/// sentence wire (kept as a state), every cup partner of a state is
/// transposed into an effect and vice versa, so each cup straightens into
/// a link. Zero-cup diagrams are returned unchanged.
PregroupDiagram rewrite(const PregroupDiagram& d);

/// Deterministic text form for golden tests.
std::string dump(const PregroupDiagram& d);

/// Exact tensor contraction of the diagram. Unrotated words contribute
/// their prepared state C|0>; rotated words contribute the effect <0|C^T
/// computed with explicitly transposed gate matrices. Cups and links both
/// sum over equal wire indices. The result is indexed by the open wires
/// (first open wire least significant). Throws MissingParameters.
std::vector<std::complex<double>> tensor_eval(const PregroupDiagram& d, const Model& model);

/// Tensor of a single word as prepared by its ansatz block.
std::vector<std::complex<double>> word_state(const WordBox& word, const Model& model);
/// <0|C^T of the word's block, i.e. the tensor of the rotated word.
std::vector<std::complex<double>> word_effect(const WordBox& word, const Model& model);

}  // namespace quantone
