#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "ngrem/chain.hpp"
#include "ngrem/free_energy.hpp"

namespace ngrem {

// Shortest decimal that reads back to the same double.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

using Cell = std::variant<double, std::int64_t, std::string, std::vector<int>>;

// A rectangular result, written as CSV or as a JSON array of row objects with the same keys.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void write_csv(std::ostream& out) const {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out << ',';
        std::visit(
            [&](const auto& v) {
              using V = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<V, double>) {
                out << format_real(v);
              } else if constexpr (std::is_same_v<V, std::int64_t>) {
                out << v;
              } else if constexpr (std::is_same_v<V, std::string>) {
                out << v;
              } else {
                for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
              }
            },
            row[c]);
      }
      out << '\n';
    }
  }

  nlohmann::ordered_json to_json() const {
    auto doc = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t c = 0; c < row.size(); ++c) {
        std::visit(
            [&](const auto& v) {
              using V = std::decay_t<decltype(v)>;
              if constexpr (std::is_same_v<V, double>) {
                obj[columns[c]] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(format_real(v));
              } else {
                obj[columns[c]] = v;
              }
            },
            row[c]);
      }
      doc.push_back(std::move(obj));
    }
    return doc;
  }
};

inline Table chain_table(const Chain& c) {
  Table t{{"level", "set", "beta", "hat_a", "hat_gamma"}, {}};
  for (std::size_t j = 1; j <= c.levels(); ++j) {
    const double beta = c.has_betas() ? c.betas[j - 1] : std::nan("");
    t.rows.push_back({static_cast<std::int64_t>(j), c.sets[j].indices(), beta, c.hat_a[j - 1], c.hat_gamma[j - 1]});
  }
  return t;
}

inline Table segment_table(const FreeEnergyCurve& curve) {
  Table t{{"beta_low", "beta_high", "c2", "c1", "c0"}, {}};
  for (const auto& s : curve.segments()) t.rows.push_back({s.beta_low, s.beta_high, s.c2, s.c1, s.c0});
  return t;
}

inline Table curve_samples_table(const FreeEnergyCurve& curve, const std::vector<double>& betas) {
  Table t{{"beta", "f", "segment_index", "c2", "c1", "c0"}, {}};
  for (double beta : betas) {
    const std::size_t k = curve.segment_index(beta);
    const auto& s = curve.segments()[k];
    t.rows.push_back({beta, s.value(beta), static_cast<std::int64_t>(k), s.c2, s.c1, s.c0});
  }
  return t;
}

}  // namespace ngrem
