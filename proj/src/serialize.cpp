#include "btnslab/serialize.hpp"

#include "btnslab/errors.hpp"

namespace btns {

Json to_json(const Tensor& t) {
  Json re = Json::array();
  Json im = Json::array();
  for (const cplx& x : t.data()) {
    re.push_back(x.real());
    im.push_back(x.imag());
  }
  return {{"shape", t.shape()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Tensor tensor_from_json(const Json& j) {
  try {
    const Shape shape = j.at("shape").get<Shape>();
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != shape_size(shape) || im.size() != re.size()) throw DimensionError("tensor data size mismatch");
    std::vector<cplx> data(re.size());
    for (std::size_t k = 0; k < re.size(); ++k) data[k] = {re[k], im[k]};
    return Tensor(shape, std::move(data));
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("malformed tensor: ") + e.what());
  }
}

Json to_json(const NetworkShape& s) {
  Json edges = Json::array();
  for (const auto& [u, v] : s.edges()) edges.push_back({u, v});
  return {{"kind", to_string(s.kind())}, {"vertices", s.vertex_count()}, {"edges", std::move(edges)},
          {"bonds", s.bonds()},          {"d", s.phys_dim()},           {"rows", s.rows()},
          {"cols", s.cols()}};
}

NetworkShape shape_from_json(const Json& j) {
  try {
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
    return NetworkShape(graph_kind_from_string(j.at("kind").get<std::string>()), j.at("vertices").get<std::size_t>(),
                        std::move(edges), j.at("bonds").get<std::vector<std::size_t>>(), j.at("d").get<std::size_t>(),
                        j.value("rows", std::size_t{0}), j.value("cols", std::size_t{0}));
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("malformed shape: ") + e.what());
  }
}

Json to_json(const TNSRep& rep) {
  Json maps = Json::array();
  for (const auto& m : rep.maps) maps.push_back(to_json(m));
  return {{"shape", to_json(rep.shape)}, {"maps", std::move(maps)}};
}

TNSRep tns_from_json(const Json& j) {
  TNSRep rep;
  rep.shape = shape_from_json(j.at("shape"));
  for (const auto& m : j.at("maps")) rep.maps.push_back(tensor_from_json(m));
  rep.validate();
  return rep;
}

Json to_json(const BTNSRep& rep) {
  Json maps = Json::array();
  for (const auto& m : rep.maps) maps.push_back(to_json(m));
  return {{"shape", to_json(rep.shape)}, {"a", rep.a}, {"dloc", rep.dloc}, {"maps", std::move(maps)}};
}

BTNSRep btns_from_json(const Json& j) {
  try {
    BTNSRep rep;
    rep.shape = shape_from_json(j.at("shape"));
    rep.a = j.at("a").get<int>();
    rep.dloc = j.at("dloc").get<int>();
    for (const auto& m : j.at("maps")) rep.maps.push_back(tensor_from_json(m));
    rep.validate();
    return rep;
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("malformed representation: ") + e.what());
  }
}

Json to_json(const KnownState& k) {
  Json j{{"name", k.name}, {"notes", k.notes}, {"state", to_json(k.state)}};
  j["known_bbond"] = k.known_bbond ? Json(*k.known_bbond) : Json(nullptr);
  j["known_bond"] = k.known_bond ? Json(*k.known_bond) : Json(nullptr);
  if (k.btns) j["btns"] = to_json(*k.btns);
  return j;
}

}  // namespace btns
