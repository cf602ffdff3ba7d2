#include "coopnav/message.hpp"

#include <json.hpp>

#include "coopnav/errors.hpp"

namespace coopnav {

namespace {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out.push_back(m(i, j));
    }
  }
  return out;
}

void json_to_matrix(const Json& j, Eigen::Ref<Eigen::MatrixXd> m,
                    const char* field) {
  if (!j.is_array() ||
      j.size() != static_cast<std::size_t>(m.rows() * m.cols())) {
    throw Error(std::string("payload field has wrong length: ") + field);
  }
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index jcol = 0; jcol < m.cols(); ++jcol) {
      m(i, jcol) = j[k++].get<double>();
    }
  }
}

}  // namespace

std::string to_json_string(const BeliefPayload& payload) {
  Json j;
  j["sender_id"] = payload.sender_id;
  j["timestamp"] = payload.timestamp;
  j["x_err"] = matrix_to_json(payload.x_err);
  j["P"] = matrix_to_json(payload.P);
  j["sigma_toward_sender"] = matrix_to_json(payload.sigma_toward_sender);
  Json nav;
  nav["C"] = matrix_to_json(payload.nav.C_bn);
  nav["v"] = matrix_to_json(payload.nav.v);
  nav["r"] = matrix_to_json(payload.nav.r);
  j["nav_state"] = nav;
  return j.dump();
}

BeliefPayload belief_payload_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw Error(std::string("malformed payload json: ") + e.what());
  }
  BeliefPayload p;
  try {
    p.sender_id = j.at("sender_id").get<RobotId>();
    p.timestamp = j.at("timestamp").get<double>();
    Eigen::MatrixXd x(15, 1), P(15, 15), sig(15, 15), C(3, 3), v(3, 1),
        r(3, 1);
    json_to_matrix(j.at("x_err"), x, "x_err");
    json_to_matrix(j.at("P"), P, "P");
    json_to_matrix(j.at("sigma_toward_sender"), sig, "sigma_toward_sender");
    const Json& nav = j.at("nav_state");
    json_to_matrix(nav.at("C"), C, "nav_state.C");
    json_to_matrix(nav.at("v"), v, "nav_state.v");
    json_to_matrix(nav.at("r"), r, "nav_state.r");
    p.x_err = x;
    p.P = P;
    p.sigma_toward_sender = sig;
    p.nav.C_bn = C;
    p.nav.v = v;
    p.nav.r = r;
    p.nav.t = p.timestamp;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(std::string("payload missing field: ") + e.what());
  }
  return p;
}

}  // namespace coopnav
