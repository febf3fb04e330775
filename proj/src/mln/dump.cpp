#include <charconv>
#include <ostream>

#include "rca/mln.hpp"

namespace rca::mln {

std::string format_weight(double w) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, w);
  if (ec != std::errc()) throw Error("cannot format weight");
  return std::string(buf, end);
}

namespace {

void write_literals(std::ostream& os, const GroundClause& c) {
  os << " :";
  for (const auto& l : c.literals) os << ' ' << (l.positive ? '+' : '-') << l.atom;
  os << '\n';
}

}  // namespace

void dump_network(std::ostream& os, const GroundNetwork& network) {
  for (std::size_t i = 0; i < network.atoms.size(); ++i) os << 'A' << i << ' ' << network.atoms[i].key.to_string() << '\n';
  for (const auto& c : network.hard_clauses) {
    os << 'H';
    write_literals(os, c);
  }
  for (const auto& c : network.soft_clauses) {
    os << 'S' << format_weight(c.weight.value());
    write_literals(os, c);
  }
}

}  // namespace rca::mln
