#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "farmledger/cid.hpp"
#include "farmledger/cli.hpp"
#include "farmledger/encoding.hpp"
#include "farmledger/farm.hpp"
#include "farmledger/peer.hpp"
#include "farmledger/pinning.hpp"
#include "farmledger/png.hpp"
#include "farmledger/report.hpp"
#include "farmledger/scenario.hpp"
#include "farmledger/simnet.hpp"

namespace py = pybind11;
using namespace farmledger;

namespace {

Bytes bytes_of(const py::bytes& b) {
  std::string_view view = b;
  return to_bytes(view);
}

py::bytes py_bytes(ByteView b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

class PySimulation {
 public:
  PySimulation(std::size_t nodes, std::uint64_t seed) {
    SimConfig config;
    config.node_count = nodes;
    config.seed = seed;
    sim_ = std::make_unique<Simulation>(config);
  }

  std::size_t size() const { return sim_->size(); }
  std::int64_t now_ms() const { return sim_->now().count(); }
  void advance_ms(std::int64_t ms) { sim_->advance(SimDuration(ms)); }
  std::string peer_id(std::size_t i) const { return sim_->node(i).id().text(); }
  bool is_server(std::size_t i) const { return sim_->node(i).role().is_server(); }
  std::size_t provider_records(std::size_t i) const { return sim_->node(i).provider_store().size(); }
  std::string add(std::size_t i, const py::bytes& data) { return sim_->node(i).add(bytes_of(data)).text(); }
  py::bytes cat(std::size_t i, const std::string& cid) { return py_bytes(sim_->node(i).cat(parse_cid(cid))); }
  void pin(std::size_t i, const std::string& cid) { sim_->node(i).pin(parse_cid(cid)); }
  void unpin(std::size_t i, const std::string& cid) { sim_->node(i).unpin(parse_cid(cid)); }
  bool has_block(std::size_t i, const std::string& cid) const { return sim_->node(i).store().has(parse_cid(cid)); }
  void set_online(std::size_t i, bool online) { sim_->set_online(sim_->node(i).id(), online); }

  std::vector<std::string> find_providers(std::size_t i, const std::string& cid) {
    std::vector<std::string> out;
    for (const auto& r : sim_->node(i).find_providers(parse_cid(cid))) out.push_back(r.provider.text());
    return out;
  }

  std::string trace_hash() const { return hex_encode(sim_->trace_hash()); }
  std::uint64_t bytes_sent() const { return sim_->total_bytes_sent(); }
  std::uint64_t bytes_received() const { return sim_->total_bytes_received(); }
  std::string bandwidth_csv() const { return farmledger::bandwidth_csv(sim_->bandwidth_report(SimTime{0}, sim_->now())); }

 private:
  std::unique_ptr<Simulation> sim_;
};

}  // namespace

PYBIND11_MODULE(_farmledger, m) {
  m.doc() = "Content-addressed farm data ledger";

  static py::exception<Error> error_type(m, "FarmledgerError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type.ptr())(py::str(std::string(e.code_name()) + ": " + e.what()));
      py::setattr(exc, "code", py::str(std::string(e.code_name())));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("cid_from_bytes", [](const py::bytes& data) { return cid_from_bytes(bytes_of(data)).text(); });
  m.def("parse_cid", [](const std::string& text) { return py_bytes(parse_cid(text).raw()); },
        "Validates a cid and returns its 34-byte multihash");
  m.def("base58_encode", [](const py::bytes& data) { return base58_encode(bytes_of(data)); });
  m.def("base58_decode", [](const std::string& text) { return py_bytes(base58_decode(text)); });
  m.def("generate_peer", [](const py::bytes& seed) {
    const auto raw = bytes_of(seed);
    if (raw.size() != IdentitySeed{}.size()) throw Error(ErrorCode::InvalidLength, "seed must be 32 bytes");
    IdentitySeed s{};
    std::copy(raw.begin(), raw.end(), s.begin());
    return generate_peer(s).text();
  });
  m.def("parse_multiaddr", [](const std::string& text) {
    const auto a = parse_multiaddr(text);
    return py::make_tuple(render_ipv4(a.ip), a.port, a.peer.text());
  });

  m.def("canonicalize_csv", [](const std::string& csv) { return py_bytes(farm::canonicalize(farm::parse_csv(csv))); });
  m.def("check_canonical", [](const py::bytes& data) { return farm::parse_canonical(bytes_of(data)).records.size(); },
        "Record count of a canonical dataset; raises NotADataset otherwise");
  m.def("visualizer_link", [](const std::string& base, const std::string& cid) {
    return farm::visualizer_link(base, parse_cid(cid));
  });
  m.def("qr_png", [](const std::string& text, int scale, int border) {
    return py_bytes(render_qr_png(qr::QrCode::encode_text(text), scale, border));
  }, py::arg("text"), py::arg("scale") = 8, py::arg("border") = 4);
  m.def("analyze", [](const py::bytes& canonical, const std::map<std::string, std::string>& params) {
    const auto ds = farm::parse_canonical(bytes_of(canonical));
    return analytics::analyze_json(ds, analytics::parse_analyze_params(params)).dump();
  }, "Chart JSON text for a canonical dataset");

  m.def("sign_jwt", &pinning::sign_jwt, py::arg("api_key"), py::arg("api_secret_hex"), py::arg("iat"));

  m.def("run_sim", [](std::size_t nodes, std::uint64_t seed, double duration_hours, std::size_t payload_bytes,
                      std::size_t retrievers) {
    SimRunResult r;
    {
      py::gil_scoped_release release;
      r = run_sim_scenario({nodes, seed, duration_hours, payload_bytes, retrievers});
    }
    return py::make_tuple(r.summary.dump(), r.bandwidth_csv);
  }, py::arg("nodes") = 20, py::arg("seed") = 42, py::arg("duration_hours") = 24.0,
     py::arg("payload_bytes") = 1 << 20, py::arg("retrievers") = 3);

  m.def("cli", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv{"farmledger"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, py::bytes(out.str()), err.str());
  }, "Runs one CLI invocation in-process; returns (exit code, stdout bytes, stderr text)");

  py::class_<PySimulation>(m, "Simulation")
      .def(py::init<std::size_t, std::uint64_t>(), py::arg("nodes"), py::arg("seed"))
      .def("__len__", &PySimulation::size)
      .def_property_readonly("now_ms", &PySimulation::now_ms)
      .def("advance_ms", &PySimulation::advance_ms)
      .def("peer_id", &PySimulation::peer_id)
      .def("is_server", &PySimulation::is_server)
      .def("provider_records", &PySimulation::provider_records)
      .def("add", &PySimulation::add)
      .def("cat", &PySimulation::cat)
      .def("pin", &PySimulation::pin)
      .def("unpin", &PySimulation::unpin)
      .def("has_block", &PySimulation::has_block)
      .def("set_online", &PySimulation::set_online)
      .def("find_providers", &PySimulation::find_providers)
      .def("trace_hash", &PySimulation::trace_hash)
      .def_property_readonly("bytes_sent", &PySimulation::bytes_sent)
      .def_property_readonly("bytes_received", &PySimulation::bytes_received)
      .def("bandwidth_csv", &PySimulation::bandwidth_csv);
}
