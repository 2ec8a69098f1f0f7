#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "gup/error.hpp"
#include "gup/features.hpp"

namespace gup {

// Learnable parameters. lambda and eta live as unconstrained logs so any
// optimizer step keeps them strictly positive.
struct ModelParams {
    double theta_lambda = std::log(0.1);
    double theta_eta = std::log(0.1);
    FeatureSpec provider;
    std::optional<LinearTransform> transform;

    double lambda() const { return std::exp(theta_lambda); }
    double eta() const { return std::exp(theta_eta); }
};

namespace detail {

// Shortest decimal that round-trips a double (17 significant digits).
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline void save_model(const ModelParams& params, const std::string& path) {
    std::ostringstream out;
    out << "GUP1\n";
    out << "theta_lambda " << detail::format_double(params.theta_lambda) << "\n";
    out << "theta_eta " << detail::format_double(params.theta_eta) << "\n";
    out << "provider " << provider_id(params.provider) << "\n";
    if (params.transform) {
        const LinearTransform& t = *params.transform;
        out << "transform " << t.in_channels << " " << t.out_channels << "\n";
        for (int i = 0; i < t.in_channels; ++i) {
            for (int j = 0; j < t.out_channels; ++j) {
                if (j) out << " ";
                out << detail::format_double(t.at(i, j));
            }
            out << "\n";
        }
    } else {
        out << "transform 0 0\n";
    }
    std::ofstream f(path, std::ios::binary);
    require(f.good(), Errc::io_failure, "cannot open '" + path + "' for writing");
    f << out.str();
    f.flush();
    require(f.good(), Errc::io_failure, "write failed for '" + path + "'");
}

inline ModelParams load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require(f.good(), Errc::io_failure, "cannot open '" + path + "'");
    std::string magic;
    f >> magic;
    require(magic == "GUP1", Errc::malformed_header, "not a GUP1 checkpoint");

    ModelParams params;
    auto expect_key = [&](const char* key) {
        std::string k;
        f >> k;
        require(f.good() && k == key, Errc::malformed_header,
                std::string("expected '") + key + "' in checkpoint");
    };
    expect_key("theta_lambda");
    f >> params.theta_lambda;
    expect_key("theta_eta");
    f >> params.theta_eta;
    require(f.good(), Errc::malformed_header, "bad scalar in checkpoint");
    require(std::isfinite(params.theta_lambda) && std::isfinite(params.theta_eta),
            Errc::non_finite, "non-finite parameter in checkpoint");

    expect_key("provider");
    std::string id;
    f >> id;
    require(f.good(), Errc::malformed_header, "missing provider id");
    params.provider = parse_provider(id);

    expect_key("transform");
    int in = -1, out = -1;
    f >> in >> out;
    require(f.good() && in >= 0 && out >= 0, Errc::malformed_header, "bad transform dims");
    if (in > 0 && out > 0) {
        LinearTransform t(in, out);
        for (double& v : t.m) {
            f >> v;
            require(f.good(), Errc::malformed_header, "truncated transform matrix");
            require(std::isfinite(v), Errc::non_finite, "non-finite transform entry");
        }
        params.transform = std::move(t);
    } else {
        require(in == 0 && out == 0, Errc::malformed_header, "bad transform dims");
    }
    return params;
}

} // namespace gup
