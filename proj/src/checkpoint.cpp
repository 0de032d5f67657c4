#include "stochpe/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "checkpoint_json.hpp"

namespace stochpe {

using nlohmann::json;

namespace detail {

json domain_to_json(const DomainSpec& d) {
    return json{{"L1", d.L1}, {"L2", d.L2}, {"h", d.h},   {"N1", d.N1},
                {"N2", d.N2}, {"M", d.M},   {"mu", d.mu}, {"nu", d.nu}};
}

DomainSpec domain_from_json(const json& j) {
    DomainSpec d;
    d.L1 = j.at("L1").get<double>();
    d.L2 = j.at("L2").get<double>();
    d.h = j.at("h").get<double>();
    d.N1 = j.at("N1").get<int>();
    d.N2 = j.at("N2").get<int>();
    d.M = j.at("M").get<int>();
    d.mu = j.at("mu").get<double>();
    d.nu = j.at("nu").get<double>();
    d.validate();
    return d;
}

json state_to_json(const SpectralState& u) {
    std::vector<double> flat;
    flat.reserve(2 * u.coeffs().size());
    for (auto c : u.coeffs()) {
        flat.push_back(c.real());
        flat.push_back(c.imag());
    }
    return json{{"format", "stochpe-checkpoint"},
                {"version", kCheckpointVersion},
                {"basis_ordering", kBasisOrderingTag},
                {"fft_normalization", "forward"},
                {"layout", "[component][m][ky+N2][kx+N1];re,im"},
                {"domain", domain_to_json(u.domain())},
                {"time", u.time},
                {"coeffs", flat}};
}

SpectralState state_from_json(const json& j) {
    if (j.value("format", "") != "stochpe-checkpoint") throw std::runtime_error("checkpoint: unknown format");
    if (j.at("version").get<int>() != kCheckpointVersion) throw std::runtime_error("checkpoint: unsupported version");
    if (j.at("basis_ordering").get<std::string>() != kBasisOrderingTag) {
        throw std::runtime_error("checkpoint: basis ordering tag mismatch");
    }
    SpectralState u(domain_from_json(j.at("domain")), j.at("time").get<double>());
    const auto& flat = j.at("coeffs");
    if (flat.size() != 2 * u.coeffs().size()) throw std::runtime_error("checkpoint: coefficient count mismatch");
    auto c = u.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = cplx(flat[2 * i].get<double>(), flat[2 * i + 1].get<double>());
    return u;
}

}  // namespace detail

std::string checkpoint_to_string(const SpectralState& u) { return detail::state_to_json(u).dump(1); }

SpectralState checkpoint_from_string(const std::string& text) {
    return detail::state_from_json(json::parse(text));
}

void save_checkpoint(const std::string& path, const SpectralState& u) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << checkpoint_to_string(u) << '\n';
}

SpectralState load_checkpoint(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return checkpoint_from_string(ss.str());
}

}  // namespace stochpe
