#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "mcgeo/extended_real.hpp"
#include "mcgeo/markov.hpp"

namespace mcgeo {

// Chain document:
//   {"factors": [n1,...,nd], "pi": [... optional ...], "P": [[rows]]}
// "P" is row-major, either nested rows or one flat array of length total^2;
// "pi" has length total. Numbers are IEEE-754 doubles in decimal.
struct ChainDocument {
  StochasticMatrix matrix;
  std::optional<Distribution> pi;
};

ChainDocument load_chain(const std::string& path);

// Distribution-only document: {"factors": [...], "pi": [...]} ("P" ignored).
Distribution load_distribution(const std::string& path);

// Plain JSON array of energies over the flat-indexed base space.
Eigen::VectorXd load_energy(const std::string& path);

// Graph document: {"d": n, "edges": [[i, j], ...]} with 1-based vertices.
Matrix<bool> load_graph(const std::string& path);

nlohmann::json matrix_to_json(const StochasticMatrix& m);
nlohmann::json distribution_to_json(const Distribution& d);
nlohmann::json chain_to_json(const StochasticMatrix& m, const Distribution* pi = nullptr);

// Extended value: finite numbers serialize as numbers, +inf as "inf".
nlohmann::json extended_to_json(const Extended& v);

}  // namespace mcgeo
