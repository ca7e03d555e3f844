#pragma once

#include <string>
#include <vector>

#include "errors.hpp"

namespace pmc {

/// Quasi-free type (m_1, ..., m_n).
using QfType = std::vector<long>;

long type_rank(const QfType& t);

/// Characteristic function F(0..n) in closed form from a quasi-free type.
std::vector<long> type_char_function(const QfType& t);

/// Prop-7.3.1 predicate on the double curve: the special type deforms to the
/// nearby type iff ranks agree and r0 = m_2 does not drop.
bool deforms_to(const QfType& from, const QfType& to);

enum class TypeOrder { Below, Equal, Above, Incomparable };

/// Pointwise characteristic-function order at fixed generalized rank;
/// conjectural for n >= 3.
TypeOrder char_order(const QfType& a, const QfType& b);

inline bool char_order_conjectural(int n) { return n >= 3; }

struct TypePoset {
    int n = 2;
    long rank = 0;
    std::vector<QfType> nodes;                    // lexicographically sorted
    std::vector<std::pair<int, int>> edges;       // covering relations, from -> to
    int maximal = -1;                             // index of the unique maximal node
};

TypePoset type_poset(long rank, int n);

std::string type_to_string(const QfType& t);
std::string poset_to_dot(const TypePoset& p);

}  // namespace pmc
