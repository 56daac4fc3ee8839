#include "cantordyn/measures.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace cantordyn {

namespace {

bool is_prefix(const Word& p, const Word& w) {
  if (p.size() > w.size()) return false;
  return std::equal(p.begin(), p.end(), w.begin());
}

// ---------------------------------------------------------------------------
// Dense exact-rational two-phase simplex with Bland's rule (deterministic,
// never cycles). Solves: find x >= 0 with A x = b, optionally maximizing c·x.

struct SimplexResult {
  bool feasible = false;
  bool unbounded = false;
  std::vector<Rational> x;       // structural solution when feasible
  Rational objective = 0;        // c·x at the returned point
  std::vector<Rational> farkas;  // row multipliers when infeasible:
                                 // y·A <= 0 componentwise, y·b = 1
};

class Simplex {
 public:
  Simplex(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs)
      : m_(rows.size()), n_(m_ ? rows[0].size() : 0), t_(std::move(rows)), b_(std::move(rhs)) {
    flip_.assign(m_, false);
    for (size_t i = 0; i < m_; ++i) {
      if (b_[i] < 0) {
        flip_[i] = true;
        b_[i] = -b_[i];
        for (Rational& v : t_[i]) v = -v;
      }
      t_[i].resize(n_ + m_, Rational(0));
      t_[i][n_ + i] = 1;
    }
    basis_.resize(m_);
    for (size_t i = 0; i < m_; ++i) basis_[i] = n_ + i;
    live_.assign(m_, true);
  }

  SimplexResult run(const std::vector<Rational>& objective) {
    SimplexResult out;
    // phase 1: minimize the sum of artificials
    std::vector<Rational> cost(n_ + m_, Rational(0));
    for (size_t j = n_; j < n_ + m_; ++j) cost[j] = 1;
    load_costs(cost);
    iterate(/*allow_artificial=*/true);
    if (zval_ > 0) {
      out.feasible = false;
      out.farkas.assign(m_, Rational(0));
      for (size_t i = 0; i < m_; ++i) {
        Rational y = zrow_[n_ + i] + 1;
        y /= zval_;
        out.farkas[i] = flip_[i] ? -y : y;
      }
      return out;
    }
    // drive artificials out of the basis; drop redundant rows
    for (size_t i = 0; i < m_; ++i) {
      if (!live_[i] || basis_[i] < n_) continue;
      size_t enter = n_;
      for (size_t j = 0; j < n_; ++j)
        if (t_[i][j] != 0) {
          enter = j;
          break;
        }
      if (enter == n_) {
        live_[i] = false;
        continue;
      }
      pivot(i, enter);
    }
    out.feasible = true;
    // phase 2
    std::vector<Rational> cost2(n_ + m_, Rational(0));
    for (size_t j = 0; j < n_ && j < objective.size(); ++j) cost2[j] = -objective[j];
    load_costs(cost2);
    if (!iterate(/*allow_artificial=*/false)) {
      out.unbounded = true;
      return out;
    }
    out.objective = -zval_;
    out.x.assign(n_, Rational(0));
    for (size_t i = 0; i < m_; ++i)
      if (live_[i] && basis_[i] < n_) out.x[basis_[i]] = b_[i];
    return out;
  }

 private:
  void load_costs(const std::vector<Rational>& cost) {
    cost_ = cost;
    zrow_.assign(n_ + m_, Rational(0));
    zval_ = 0;
    for (size_t j = 0; j < n_ + m_; ++j) {
      Rational z = 0;
      for (size_t i = 0; i < m_; ++i)
        if (live_[i] && cost_[basis_[i]] != 0) z += cost_[basis_[i]] * t_[i][j];
      zrow_[j] = z - cost_[j];
    }
    for (size_t i = 0; i < m_; ++i)
      if (live_[i] && cost_[basis_[i]] != 0) zval_ += cost_[basis_[i]] * b_[i];
  }

  // Bland's rule iteration; returns false on unbounded.
  bool iterate(bool allow_artificial) {
    const size_t cols = allow_artificial ? n_ + m_ : n_;
    for (;;) {
      size_t enter = cols;
      for (size_t j = 0; j < cols; ++j)
        if (zrow_[j] > 0) {
          enter = j;
          break;
        }
      if (enter == cols) return true;
      size_t leave = m_;
      Rational best = 0;
      for (size_t i = 0; i < m_; ++i) {
        if (!live_[i] || t_[i][enter] <= 0) continue;
        Rational ratio = b_[i] / t_[i][enter];
        if (leave == m_ || ratio < best ||
            (ratio == best && basis_[i] < basis_[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == m_) return false;
      pivot(leave, enter);
    }
  }

  void pivot(size_t r, size_t e) {
    Rational p = t_[r][e];
    for (Rational& v : t_[r]) v /= p;
    b_[r] /= p;
    for (size_t i = 0; i < m_; ++i) {
      if (i == r || !live_[i] || t_[i][e] == 0) continue;
      Rational f = t_[i][e];
      for (size_t j = 0; j < n_ + m_; ++j) t_[i][j] -= f * t_[r][j];
      b_[i] -= f * b_[r];
    }
    if (zrow_[e] != 0) {
      Rational f = zrow_[e];
      for (size_t j = 0; j < n_ + m_; ++j) zrow_[j] -= f * t_[r][j];
      zval_ -= f * b_[r];
    }
    basis_[r] = e;
  }

  size_t m_, n_;
  std::vector<std::vector<Rational>> t_;
  std::vector<Rational> b_;
  std::vector<Rational> zrow_;
  Rational zval_ = 0;
  std::vector<size_t> basis_;
  std::vector<bool> flip_;
  std::vector<bool> live_;
  std::vector<Rational> cost_;
};

// ---------------------------------------------------------------------------
// LP assembly over depth-d cells

struct CellIndex {
  std::vector<Word> cells;
  std::map<Word, size_t> index;

  explicit CellIndex(const SftSpace& space, int depth) : cells(admissible_words(space, depth)) {
    for (size_t i = 0; i < cells.size(); ++i) index[cells[i]] = i;
  }

  // indices of the depth-d cells refining [w]
  std::vector<size_t> expand(const SftSpace& space, const Word& w) const {
    std::vector<size_t> out;
    auto it = index.lower_bound(w);
    for (; it != index.end() && is_prefix(w, it->first); ++it) out.push_back(it->second);
    if (out.empty() && !is_admissible(space, w))
      throw InadmissibleWord("'" + word_to_string(space, w) + "'");
    return out;
  }
};

void add_clopen(const CellIndex& ix, const SftSpace& space, const ClopenSet& a,
                const Rational& coeff, std::vector<Rational>* row) {
  for (const Word& c : a.cylinders)
    for (size_t j : ix.expand(space, c)) (*row)[j] += coeff;
}

std::vector<Rational> build_row(const Action& action, const CellIndex& ix,
                                const LpRowId& id,
                                const Normalization& normalization) {
  const SftSpace& space = *action.space;
  std::vector<Rational> row(ix.cells.size(), Rational(0));
  if (id.is_norm) {
    for (const auto& [w, coeff] : normalization)
      for (size_t j : ix.expand(space, w)) row[j] += coeff;
    return row;
  }
  add_clopen(ix, space, row_image(action, id), Rational(1), &row);
  for (size_t j : ix.expand(space, id.cylinder)) row[j] -= 1;
  return row;
}

void check_normalization(const Action& action, int depth, const Normalization& normalization) {
  for (const auto& [w, coeff] : normalization) {
    require_admissible(*action.space, w);
    if (static_cast<int>(w.size()) > depth)
      throw DepthTooSmall("normalization word '" + word_to_string(*action.space, w) +
                          "' deeper than the LP depth");
    (void)coeff;
  }
}

struct LpSystem {
  std::vector<LpRowId> ids;  // norm row first
  std::vector<std::vector<Rational>> rows;
  std::vector<Rational> rhs;
};

void check_generator_coverage(const Action& action, int depth,
                              const std::vector<LpRowId>& inv) {
  std::vector<bool> touched(action.generators.size(), false);
  for (const LpRowId& id : inv) touched[static_cast<size_t>(id.gen)] = true;
  for (size_t i = 0; i < touched.size(); ++i)
    if (!touched[i])
      throw DepthTooSmall("generator '" + action.names[i] +
                          "' has no expressible invariance row at depth " +
                          std::to_string(depth));
}

LpSystem build_system(const Action& action, const CellIndex& ix,
                      const std::vector<LpRowId>& inv,
                      const Normalization& normalization) {
  LpSystem sys;
  sys.ids.push_back(LpRowId{true, -1, false, {}});
  sys.ids.insert(sys.ids.end(), inv.begin(), inv.end());
  for (const LpRowId& id : sys.ids) {
    sys.rows.push_back(build_row(action, ix, id, normalization));
    sys.rhs.push_back(id.is_norm ? Rational(1) : Rational(0));
  }
  return sys;
}

InvariantContent content_from(const CellIndex& ix, int depth, const std::vector<Rational>& x) {
  InvariantContent mu;
  mu.depth = depth;
  for (size_t i = 0; i < ix.cells.size(); ++i) mu.values.push_back({ix.cells[i], x[i]});
  return mu;
}

std::optional<InvariantContent> scaled_uniform_candidate(const Action& action,
                                                         const CellIndex& ix, int depth,
                                                         const std::vector<LpRowId>& inv,
                                                         const Normalization& normalization) {
  const SftSpace& space = *action.space;
  Rational total = 0;
  for (const auto& [w, coeff] : normalization)
    total += coeff * Rational(ix.expand(space, w).size());
  if (total <= 0) return std::nullopt;
  Rational c = Rational(1) / total;
  // uniform weights satisfy an invariance row iff the image and the source
  // refine into equally many depth-d cells
  for (const LpRowId& id : inv) {
    size_t img = 0;
    for (const Word& w : row_image(action, id).cylinders) img += ix.expand(space, w).size();
    if (img != ix.expand(space, id.cylinder).size()) return std::nullopt;
  }
  std::vector<Rational> x(ix.cells.size(), c);
  return content_from(ix, depth, x);
}

}  // namespace

Rational evaluate_content(const SftSpace& space, const InvariantContent& mu,
                          const ClopenSet& a) {
  require_same_space(space, a);
  Rational total = 0;
  for (const Word& c : a.cylinders) {
    if (static_cast<int>(c.size()) > mu.depth)
      throw DepthExceeded("cylinder '" + word_to_string(space, c) +
                          "' deeper than the content");
    for (const auto& [w, v] : mu.values)
      if (is_prefix(c, w)) total += v;
  }
  return total;
}

std::vector<LpRowId> invariance_rows(const Action& action, int depth) {
  const SftSpace& space = *action.space;
  std::vector<LpRowId> out;
  for (int gen = 0; gen < static_cast<int>(action.generators.size()); ++gen)
    for (bool inverse : {false, true}) {
      const PrefixExchange& g = inverse ? action.inverses[gen] : action.generators[gen];
      for (int p = 1; p <= depth; ++p)
        for (const Word& w : admissible_words(space, p)) {
          ClopenSet image = apply_cylinder(g, w);
          bool ok = true;
          for (const Word& c : image.cylinders)
            if (static_cast<int>(c.size()) > depth) ok = false;
          if (ok) out.push_back(LpRowId{false, gen, inverse, w});
        }
    }
  return out;
}

ClopenSet row_image(const Action& action, const LpRowId& row) {
  if (row.is_norm) throw ShapeMismatch("normalization row has no image");
  if (row.gen < 0 || row.gen >= static_cast<int>(action.generators.size()))
    throw UnknownGenerator("generator index " + std::to_string(row.gen));
  const PrefixExchange& g =
      row.inverse ? action.inverses[row.gen] : action.generators[row.gen];
  return apply_cylinder(g, row.cylinder);
}

LpOutcome solve_invariant_lp(const Action& action, int depth,
                             const Normalization& normalization) {
  if (depth < 1) throw DepthTooSmall("LP depth must be at least 1");
  check_normalization(action, depth, normalization);
  CellIndex ix(*action.space, depth);
  std::vector<LpRowId> inv = invariance_rows(action, depth);
  check_generator_coverage(action, depth, inv);

  LpOutcome out;
  if (auto uniform = scaled_uniform_candidate(action, ix, depth, inv, normalization)) {
    bool nonneg = true;
    for (const auto& [w, v] : uniform->values)
      if (v < 0) nonneg = false;
    if (nonneg) {
      out.feasible = true;
      out.content = *uniform;
      std::string why;
      if (!verify_content(action, out.content, normalization, &why))
        throw Error("internal: uniform candidate failed replay: " + why);
      return out;
    }
  }

  LpSystem sys = build_system(action, ix, inv, normalization);
  Simplex lp(sys.rows, sys.rhs);
  SimplexResult r = lp.run(std::vector<Rational>(ix.cells.size(), Rational(0)));
  if (r.feasible) {
    out.feasible = true;
    out.content = content_from(ix, depth, r.x);
    std::string why;
    if (!verify_content(action, out.content, normalization, &why))
      throw Error("internal: LP solution failed replay: " + why);
    return out;
  }
  out.feasible = false;
  out.certificate.depth = depth;
  out.certificate.normalization = normalization;
  for (size_t i = 0; i < sys.ids.size(); ++i)
    if (r.farkas[i] != 0) out.certificate.multipliers.push_back({sys.ids[i], r.farkas[i]});
  std::string why;
  if (!verify_infeasibility(action, out.certificate, &why))
    throw Error("internal: Farkas certificate failed replay: " + why);
  return out;
}

LpOptimum maximize_over_invariant_lp(const Action& action, int depth,
                                     const Normalization& normalization,
                                     const Normalization& objective) {
  if (depth < 1) throw DepthTooSmall("LP depth must be at least 1");
  check_normalization(action, depth, normalization);
  check_normalization(action, depth, objective);
  CellIndex ix(*action.space, depth);
  std::vector<LpRowId> inv = invariance_rows(action, depth);
  check_generator_coverage(action, depth, inv);
  LpSystem sys = build_system(action, ix, inv, normalization);
  std::vector<Rational> c(ix.cells.size(), Rational(0));
  for (const auto& [w, coeff] : objective)
    for (size_t j : ix.expand(*action.space, w)) c[j] += coeff;

  Simplex lp(sys.rows, sys.rhs);
  SimplexResult r = lp.run(c);
  LpOptimum out;
  out.feasible = r.feasible;
  if (!r.feasible) return out;
  out.unbounded = r.unbounded;
  if (r.unbounded) return out;
  out.maximum = r.objective;
  out.content = content_from(ix, depth, r.x);
  return out;
}

LpOutcome invariant_probability_measure(const Action& action, int depth) {
  return solve_invariant_lp(action, depth, {{Word{}, Rational(1)}});
}

LpOutcome invariant_content_normalized(const Action& action, const ClopenSet& o,
                                       int depth) {
  require_same_space(*action.space, o);
  Normalization norm;
  for (const Word& c : o.cylinders) norm.push_back({c, Rational(1)});
  return solve_invariant_lp(action, depth, norm);
}

bool verify_content(const Action& action, const InvariantContent& mu,
                    const Normalization& normalization, std::string* why) {
  auto fail = [why](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const SftSpace& space = *action.space;
  if (mu.depth < 1) return fail("content depth must be at least 1");
  std::vector<Word> cells = admissible_words(space, mu.depth);
  if (mu.values.size() != cells.size()) return fail("content is not one value per cell");
  std::map<Word, Rational> val;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (mu.values[i].first != cells[i]) return fail("content cells out of canonical order");
    if (mu.values[i].second < 0) return fail("negative content value");
    val[cells[i]] = mu.values[i].second;
  }
  auto measure_of = [&](const ClopenSet& a) {
    Rational t = 0;
    for (const Word& c : a.cylinders) {
      if (static_cast<int>(c.size()) > mu.depth)
        throw DepthExceeded("image not expressible at the content depth");
      for (auto it = val.lower_bound(c); it != val.end() && is_prefix(c, it->first); ++it)
        t += it->second;
    }
    return t;
  };
  for (const LpRowId& id : invariance_rows(action, mu.depth)) {
    ClopenSet src = clopen_cylinder(space, id.cylinder);
    if (measure_of(row_image(action, id)) != measure_of(src))
      return fail("invariance row fails for generator " +
                  action.names[static_cast<size_t>(id.gen)] + (id.inverse ? "'" : "") +
                  " on [" + word_to_string(space, id.cylinder) + "]");
  }
  Rational total = 0;
  for (const auto& [w, coeff] : normalization) {
    if (static_cast<int>(w.size()) > mu.depth) return fail("normalization word too deep");
    total += coeff * measure_of(clopen_cylinder(space, w));
  }
  if (total != 1) return fail("normalization does not sum to 1");
  return true;
}

bool verify_infeasibility(const Action& action, const InfeasibilityCertificate& cert,
                          std::string* why) {
  auto fail = [why](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (cert.depth < 1) return fail("certificate depth must be at least 1");
  try {
    check_normalization(action, cert.depth, cert.normalization);
  } catch (const Error& e) {
    return fail(e.what());
  }
  CellIndex ix(*action.space, cert.depth);
  std::vector<LpRowId> valid = invariance_rows(action, cert.depth);
  std::vector<Rational> combo(ix.cells.size(), Rational(0));
  Rational rhs = 0;
  for (const auto& [id, y] : cert.multipliers) {
    if (id.is_norm) {
      rhs += y;
    } else if (std::find(valid.begin(), valid.end(), id) == valid.end()) {
      return fail("certificate uses a row that is not expressible at its depth");
    }
    std::vector<Rational> row;
    try {
      row = build_row(action, ix, id, cert.normalization);
    } catch (const Error& e) {
      return fail(e.what());
    }
    for (size_t j = 0; j < combo.size(); ++j) combo[j] += y * row[j];
  }
  for (size_t j = 0; j < combo.size(); ++j)
    if (combo[j] > 0)
      return fail("combined coefficient positive on cell [" +
                  word_to_string(*action.space, ix.cells[j]) + "]");
  if (rhs != 1) return fail("combined right-hand side is not 1");
  return true;
}

int sound_refutation_depth(const Action& action, int sets_depth, int bounds_depth,
                           int word_length) {
  int base = std::max({bounds_depth, sets_depth, max_rule_length(action)});
  int defect = max_positive_defect(action);
  if (defect == 0) return base;
  return base + word_length * defect;
}

bool refutation_lp_tractable(const Action& action, int depth) {
  // cap the cell count so exact simplex stays fast
  const size_t limit = 400;
  const SftSpace& space = *action.space;
  if (depth <= 0) return true;
  std::vector<size_t> per_letter(space.letters.size(), 0);
  for (int a : space.initial_letters) per_letter[static_cast<size_t>(a)] = 1;
  size_t count = space.initial_letters.size();
  for (int p = 1; p < depth; ++p) {
    std::vector<size_t> next(space.letters.size(), 0);
    count = 0;
    for (size_t a = 0; a < per_letter.size(); ++a)
      for (int b : space.succ[a]) {
        next[static_cast<size_t>(b)] += per_letter[a];
        count += per_letter[a];
        if (count > limit) return false;
      }
    per_letter = std::move(next);
  }
  return count <= limit;
}

GatedOptimum gated_refutation_maximum(const Action& action, int sets_depth,
                                      int bounds_depth, int word_length,
                                      const Normalization& objective) {
  GatedOptimum r;
  int deep = sound_refutation_depth(action, sets_depth, bounds_depth, word_length);
  Normalization mass = {{Word{}, Rational(1)}};
  try {
    if (!refutation_lp_tractable(action, deep)) {
      int base = std::max({1, sets_depth, max_rule_length(action)});
      if (refutation_lp_tractable(action, base) &&
          !solve_invariant_lp(action, base, mass).feasible) {
        r.note = "no invariant probability content exists (infeasible at depth " +
                 std::to_string(base) + ")";
      } else {
        r.note = "sound refutation depth " + std::to_string(deep) +
                 " exceeds the LP size cap";
      }
      return r;
    }
    r.opt = maximize_over_invariant_lp(action, deep, mass, objective);
    r.attempted = true;
    r.note = "invariant LP at depth " + std::to_string(deep);
  } catch (const DepthTooSmall&) {
    r.attempted = false;
    r.note = "invariance rows unavailable at the refutation depth";
  }
  return r;
}

GatedFeasibility gated_refutation_normalized(const Action& action, const ClopenSet& o,
                                             int bounds_depth, int word_length) {
  GatedFeasibility r;
  int sets_depth = 0;
  for (const Word& w : o.cylinders)
    sets_depth = std::max<int>(sets_depth, static_cast<int>(w.size()));
  int deep = sound_refutation_depth(action, sets_depth, bounds_depth, word_length);
  try {
    if (!refutation_lp_tractable(action, deep)) {
      int base = std::max({1, sets_depth, max_rule_length(action)});
      if (refutation_lp_tractable(action, base) &&
          !invariant_content_normalized(action, o, base).feasible) {
        r.note = "no normalized invariant content exists (infeasible at depth " +
                 std::to_string(base) + ")";
      } else {
        r.note = "sound refutation depth " + std::to_string(deep) +
                 " exceeds the LP size cap";
      }
      return r;
    }
    r.out = invariant_content_normalized(action, o, deep);
    r.attempted = true;
    r.note = "invariant LP at depth " + std::to_string(deep);
  } catch (const DepthTooSmall&) {
    r.attempted = false;
    r.note = "invariance rows unavailable at the refutation depth";
  }
  return r;
}

}  // namespace cantordyn
