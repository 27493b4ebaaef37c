#include "mcgeo/json_io.hpp"

#include <fstream>

namespace mcgeo {

namespace {

nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "io", "cannot open " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error("schema", path + ": " + e.what());
  }
  return doc;
}

ProductStateSpace read_factors(const nlohmann::json& doc, const std::string& path) {
  require(doc.contains("factors") && doc["factors"].is_array(), "schema",
          path + ": missing \"factors\" array");
  std::vector<Index> sizes;
  for (const auto& f : doc["factors"]) {
    require(f.is_number_integer() && f.get<Index>() >= 1, "schema",
            path + ": factor sizes must be positive integers");
    sizes.push_back(f.get<Index>());
  }
  return ProductStateSpace(std::move(sizes));
}

Distribution read_pi(const nlohmann::json& doc, const ProductStateSpace& space,
                     const std::string& path) {
  const auto& arr = doc["pi"];
  require(arr.is_array() && static_cast<Index>(arr.size()) == space.total(), "schema",
          path + ": \"pi\" must have length " + std::to_string(space.total()));
  Eigen::VectorXd mass(space.total());
  for (Index i = 0; i < space.total(); ++i) mass[i] = arr[static_cast<std::size_t>(i)].get<double>();
  return Distribution(space, std::move(mass));
}

}  // namespace

ChainDocument load_chain(const std::string& path) {
  const auto doc = parse_file(path);
  const auto space = read_factors(doc, path);
  const Index n = space.total();
  require(doc.contains("P"), "schema", path + ": missing \"P\"");
  const auto& rows = doc["P"];
  require(rows.is_array(), "schema", path + ": \"P\" must be an array");
  Eigen::MatrixXd m(n, n);
  if (!rows.empty() && rows[0].is_array()) {
    require(static_cast<Index>(rows.size()) == n, "schema",
            path + ": \"P\" must have " + std::to_string(n) + " rows");
    for (Index x = 0; x < n; ++x) {
      const auto& row = rows[static_cast<std::size_t>(x)];
      require(static_cast<Index>(row.size()) == n, "schema",
              path + ": row " + std::to_string(x) + " has length " +
                  std::to_string(row.size()) + ", expected " + std::to_string(n));
      for (Index y = 0; y < n; ++y) m(x, y) = row[static_cast<std::size_t>(y)].get<double>();
    }
  } else {
    require(static_cast<Index>(rows.size()) == n * n, "schema",
            path + ": flat \"P\" must have length " + std::to_string(n * n));
    for (Index x = 0; x < n; ++x)
      for (Index y = 0; y < n; ++y) m(x, y) = rows[static_cast<std::size_t>(x * n + y)].get<double>();
  }
  ChainDocument out{StochasticMatrix(space, std::move(m)), std::nullopt};
  if (doc.contains("pi") && !doc["pi"].is_null()) out.pi = read_pi(doc, space, path);
  return out;
}

Distribution load_distribution(const std::string& path) {
  const auto doc = parse_file(path);
  const auto space = read_factors(doc, path);
  require(doc.contains("pi"), "schema", path + ": missing \"pi\"");
  return read_pi(doc, space, path);
}

Eigen::VectorXd load_energy(const std::string& path) {
  const auto doc = parse_file(path);
  require(doc.is_array() && !doc.empty(), "schema", path + ": expected a JSON array of energies");
  Eigen::VectorXd h(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) h[static_cast<Index>(i)] = doc[i].get<double>();
  return h;
}

Matrix<bool> load_graph(const std::string& path) {
  const auto doc = parse_file(path);
  require(doc.contains("d") && doc["d"].is_number_integer(), "schema",
          path + ": missing vertex count \"d\"");
  const Index d = doc["d"].get<Index>();
  require(d >= 1, "schema", path + ": vertex count must be positive");
  Matrix<bool> adj = Matrix<bool>::Constant(d, d, false);
  if (doc.contains("edges")) {
    for (const auto& e : doc["edges"]) {
      require(e.is_array() && e.size() == 2, "schema", path + ": edges must be pairs");
      const Index i = e[0].get<Index>() - 1, j = e[1].get<Index>() - 1;
      require(i >= 0 && i < d && j >= 0 && j < d, "schema", path + ": edge vertex out of range");
      adj(i, j) = adj(j, i) = true;
    }
  }
  return adj;
}

nlohmann::json matrix_to_json(const StochasticMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index x = 0; x < m.size(); ++x) {
    nlohmann::json row = nlohmann::json::array();
    for (Index y = 0; y < m.size(); ++y) row.push_back(m(x, y));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json distribution_to_json(const Distribution& d) {
  nlohmann::json out = nlohmann::json::array();
  for (Index i = 0; i < d.size(); ++i) out.push_back(d(i));
  return out;
}

nlohmann::json chain_to_json(const StochasticMatrix& m, const Distribution* pi) {
  nlohmann::json doc;
  doc["factors"] = m.space().factor_sizes();
  doc["P"] = matrix_to_json(m);
  if (pi) doc["pi"] = distribution_to_json(*pi);
  return doc;
}

nlohmann::json extended_to_json(const Extended& v) {
  if (v.is_infinite()) return "inf";
  return v.as_scalar();
}

}  // namespace mcgeo
