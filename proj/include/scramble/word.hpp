#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scramble/errors.hpp"

namespace scramble {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

inline constexpr int kMaxAlphabet = 36;

inline char symbol_char(Symbol s) {
  return s < 10 ? static_cast<char>('0' + s) : static_cast<char>('a' + (s - 10));
}

inline Word parse_word(const std::string& text) {
  Word w;
  w.reserve(text.size());
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      w.push_back(static_cast<Symbol>(c - '0'));
    } else if (c >= 'a' && c <= 'z') {
      w.push_back(static_cast<Symbol>(10 + (c - 'a')));
    } else {
      fail(ErrorCode::ParseError, std::string("bad symbol character '") + c + "'");
    }
  }
  return w;
}

inline std::string format_word(const Word& w) {
  std::string s;
  s.reserve(w.size());
  for (Symbol x : w) s.push_back(symbol_char(x));
  return s;
}

inline Word repeat_word(const Word& w, std::size_t times) {
  Word out;
  out.reserve(w.size() * times);
  for (std::size_t i = 0; i < times; ++i) out.insert(out.end(), w.begin(), w.end());
  return out;
}

inline Word concat(Word a, const Word& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline void check_symbols(const Word& w, int q) {
  for (Symbol s : w) {
    if (s >= q) fail(ErrorCode::SymbolOutOfRange, "symbol " + std::to_string(int(s)) + " >= q=" + std::to_string(q));
  }
}

}  // namespace scramble
