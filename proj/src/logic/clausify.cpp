#include <algorithm>

#include "rca/logic.hpp"

namespace rca::logic {

AtomId AtomTable::intern(const GroundAtomKey& key) {
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  auto id = static_cast<AtomId>(entries_.size());
  entries_.push_back({key, false});
  index_.emplace(key, id);
  return id;
}

std::optional<AtomId> AtomTable::find(const GroundAtomKey& key) const {
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  return std::nullopt;
}

AtomId AtomTable::fresh_auxiliary() {
  GroundAtomKey key{"$aux", {std::to_string(aux_count_++)}};
  auto id = static_cast<AtomId>(entries_.size());
  entries_.push_back({key, true});
  index_.emplace(std::move(key), id);
  return id;
}

bool normalize_clause(std::vector<Literal>& literals) {
  std::sort(literals.begin(), literals.end());
  literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
  for (std::size_t i = 1; i < literals.size(); ++i)
    if (literals[i].atom == literals[i - 1].atom) return false;
  return true;
}

namespace {

using K = Formula::Kind;
using ClauseSet = std::vector<std::vector<Literal>>;

// Negation normal form over interned literals.
struct Nnf {
  enum class Op { literal, conj, disj } op = Op::literal;
  Literal literal;
  std::vector<Nnf> parts;
};

Nnf to_nnf(const Formula& f, bool positive, AtomTable& atoms) {
  switch (f.kind()) {
    case K::truth: {
      // true = empty conjunction, false = empty disjunction
      bool value = f.truth_value() == positive;
      return Nnf{value ? Nnf::Op::conj : Nnf::Op::disj, {}, {}};
    }
    case K::atom: {
      GroundAtomKey key{f.predicate(), {}};
      for (const auto& t : f.terms()) {
        if (t.is_variable) throw UnboundVariable(t.name);
        key.args.push_back(t.name);
      }
      return Nnf{Nnf::Op::literal, Literal{atoms.intern(key), positive}, {}};
    }
    case K::negation: return to_nnf(f.children()[0], !positive, atoms);
    case K::conjunction:
    case K::disjunction: {
      bool is_and = (f.kind() == K::conjunction) == positive;
      Nnf out{is_and ? Nnf::Op::conj : Nnf::Op::disj, {}, {}};
      for (const auto& c : f.children()) {
        auto g = to_nnf(c, positive, atoms);
        if (g.op == out.op) {
          for (auto& p : g.parts) out.parts.push_back(std::move(p));
        } else {
          out.parts.push_back(std::move(g));
        }
      }
      return out;
    }
    case K::implication: {
      // a => b  ==  !a | b
      auto neg_a = Formula::negate(f.children()[0]);
      return to_nnf(Formula::disjoin({neg_a, f.children()[1]}), positive, atoms);
    }
    case K::forall:
    case K::exists: break;
  }
  throw Error("clausify expects a quantifier-free ground formula: " + f.to_string());
}

std::optional<std::vector<Literal>> as_single_clause(const Nnf& n) {
  if (n.op == Nnf::Op::literal) return std::vector<Literal>{n.literal};
  if (n.op != Nnf::Op::disj) return std::nullopt;
  std::vector<Literal> lits;
  for (const auto& p : n.parts) {
    if (p.op != Nnf::Op::literal) return std::nullopt;
    lits.push_back(p.literal);
  }
  if (lits.empty()) return std::nullopt;
  return lits;
}

ClauseSet cnf(const Nnf& n) {
  switch (n.op) {
    case Nnf::Op::literal: return {{n.literal}};
    case Nnf::Op::conj: {
      ClauseSet out;
      for (const auto& p : n.parts) {
        auto c = cnf(p);
        out.insert(out.end(), std::make_move_iterator(c.begin()), std::make_move_iterator(c.end()));
      }
      return out;
    }
    case Nnf::Op::disj: {
      ClauseSet out{{}};
      for (const auto& p : n.parts) {
        auto c = cnf(p);
        ClauseSet next;
        next.reserve(out.size() * c.size());
        for (const auto& a : out)
          for (const auto& b : c) {
            auto merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            if (normalize_clause(merged)) next.push_back(std::move(merged));
          }
        out = std::move(next);
      }
      return out;
    }
  }
  return {};
}

Nnf negated(const Nnf& n) {
  switch (n.op) {
    case Nnf::Op::literal: return Nnf{Nnf::Op::literal, Literal{n.literal.atom, !n.literal.positive}, {}};
    case Nnf::Op::conj:
    case Nnf::Op::disj: {
      Nnf out{n.op == Nnf::Op::conj ? Nnf::Op::disj : Nnf::Op::conj, {}, {}};
      for (const auto& p : n.parts) out.parts.push_back(negated(p));
      return out;
    }
  }
  return n;
}

void append_hard(const ClauseSet& clauses, std::uint32_t origin, std::vector<GroundClause>& out) {
  for (auto lits : clauses) {
    if (!normalize_clause(lits)) continue;
    out.push_back(GroundClause{std::move(lits), Weight::hard(), origin});
  }
}

}  // namespace

Clausified clausify(const GroundFormula& gf, AtomTable& atoms, std::uint32_t origin) {
  Clausified out;
  if (gf.weight.is_hard()) {
    const bool positive = gf.weight.kind() == Weight::Kind::hard;
    append_hard(cnf(to_nnf(gf.formula, positive, atoms)), origin, out.hard);
    return out;
  }

  Nnf body = to_nnf(gf.formula, true, atoms);
  if (auto lits = as_single_clause(body)) {
    std::sort(lits->begin(), lits->end());
    lits->erase(std::unique(lits->begin(), lits->end()), lits->end());
    out.soft.push_back(GroundClause{std::move(*lits), gf.weight, origin});
    return out;
  }

  // aux <=> body, reward/penalize aux
  AtomId aux = atoms.fresh_auxiliary();
  out.auxiliaries.push_back(aux);
  const Literal pos{aux, true};
  const Literal neg{aux, false};
  ClauseSet forward = cnf(body);
  for (auto& c : forward) c.push_back(neg);
  ClauseSet backward = cnf(negated(body));
  for (auto& c : backward) c.push_back(pos);
  append_hard(forward, origin, out.hard);
  append_hard(backward, origin, out.hard);
  out.soft.push_back(GroundClause{{pos}, gf.weight, origin});
  return out;
}

}  // namespace rca::logic
