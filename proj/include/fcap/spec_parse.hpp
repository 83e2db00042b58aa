#pragma once

// Text grammar for norms and bodies, used by the CLI and by run manifests.
//
//   norm: euclidean
//       | ellipsoid:<a11,...>      N entries (diagonal) or N*N row-major
//       | lq:<q>[:<delta>]
//   body: wulff:<r>[@cx,cy,...]
//       | ellipsoid:<q11,...>[@center]   gauge matrix of { x.Qx <= 1 }
//       | box:<hx,hy,...>[@center]       half-widths
//       | cube:<half>[@center]

#include <sstream>
#include <string>
#include <vector>

#include "fcap/body.hpp"
#include "fcap/norm.hpp"

namespace fcap {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw Error("parse: not a number: '" + s + "'");
    }
    require(pos == s.size(), "parse: trailing characters in number: '" + s + "'");
    return v;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    for (const auto& tok : split(s, ',')) out.push_back(parse_double(tok));
    return out;
}

inline Vec parse_vec(const std::string& s, int dim) {
    const auto xs = parse_list(s);
    require(static_cast<int>(xs.size()) == dim, "parse: expected " + std::to_string(dim) +
                                                    " coordinates in '" + s + "'");
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = xs[i];
    return v;
}

inline Mat parse_sym_matrix(const std::string& s, int dim) {
    const auto xs = parse_list(s);
    Mat A = Mat::Zero(dim, dim);
    if (static_cast<int>(xs.size()) == dim) {
        for (int i = 0; i < dim; ++i) A(i, i) = xs[i];
    } else if (static_cast<int>(xs.size()) == dim * dim) {
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) A(i, j) = xs[i * dim + j];
        require((A - A.transpose()).lpNorm<Eigen::Infinity>() <= 1e-12 * A.norm(),
                "parse: matrix must be symmetric");
    } else {
        throw Error("parse: matrix needs dim or dim^2 entries, got " +
                    std::to_string(xs.size()));
    }
    return A;
}

}  // namespace detail

inline NormSpec parse_norm(const std::string& s, int dim) {
    const auto head = s.substr(0, s.find(':'));
    const auto rest = s.size() > head.size() ? s.substr(head.size() + 1) : std::string();
    if (head == "euclidean") {
        require(rest.empty(), "parse_norm: euclidean takes no parameters");
        return NormSpec::euclidean(dim);
    }
    if (head == "ellipsoid") return NormSpec::ellipsoid(detail::parse_sym_matrix(rest, dim));
    if (head == "lq") {
        const auto parts = detail::split(rest, ':');
        require(parts.size() == 1 || parts.size() == 2, "parse_norm: lq:<q>[:<delta>]");
        const double q = detail::parse_double(parts[0]);
        const double delta = parts.size() == 2 ? detail::parse_double(parts[1]) : 0.0;
        return NormSpec::lq(q, delta, dim);
    }
    throw Error("parse_norm: unknown norm '" + head + "'");
}

inline ConvexBody parse_body(const std::string& s, int dim, const NormSpec& norm) {
    const auto at = s.find('@');
    const std::string spec = s.substr(0, at);
    Vec center = Vec::Zero(dim);
    if (at != std::string::npos) center = detail::parse_vec(s.substr(at + 1), dim);

    const auto head = spec.substr(0, spec.find(':'));
    const auto rest = spec.size() > head.size() ? spec.substr(head.size() + 1) : std::string();
    if (head == "wulff")
        return ConvexBody::wulff_body(norm, detail::parse_double(rest), center);
    if (head == "ellipsoid")
        return ConvexBody::ellipsoid_body(detail::parse_sym_matrix(rest, dim), center);
    if (head == "box") return ConvexBody::box_body(detail::parse_vec(rest, dim), center);
    if (head == "cube") {
        const double half = detail::parse_double(rest);
        return ConvexBody::box_body(Vec::Constant(dim, half), center);
    }
    throw Error("parse_body: unknown body '" + head + "'");
}

inline std::string norm_label(const NormSpec& n) {
    std::ostringstream os;
    switch (n.kind) {
        case NormSpec::Kind::euclidean:
            return "euclidean";
        case NormSpec::Kind::ellipsoid: {
            os << "ellipsoid:";
            for (int i = 0; i < n.dim; ++i)
                for (int j = 0; j < n.dim; ++j)
                    os << n.A(i, j) << (i == n.dim - 1 && j == n.dim - 1 ? "" : ",");
            return os.str();
        }
        case NormSpec::Kind::lq_regularized:
            os << "lq:" << n.lq_q << ':' << n.lq_delta;
            return os.str();
    }
    return "";
}

inline std::string body_label(const ConvexBody& b) {
    std::ostringstream os;
    auto center_suffix = [&]() {
        if (b.center.lpNorm<Eigen::Infinity>() == 0.0) return;
        os << '@';
        for (int i = 0; i < b.dim; ++i) os << b.center[i] << (i + 1 < b.dim ? "," : "");
    };
    switch (b.kind) {
        case ConvexBody::Kind::wulff:
            os << "wulff:" << b.radius;
            center_suffix();
            return os.str();
        case ConvexBody::Kind::ellipsoid: {
            os << "ellipsoid:";
            for (int i = 0; i < b.dim; ++i)
                for (int j = 0; j < b.dim; ++j)
                    os << b.Q(i, j) << (i == b.dim - 1 && j == b.dim - 1 ? "" : ",");
            center_suffix();
            return os.str();
        }
        case ConvexBody::Kind::box:
            os << "box:";
            for (int i = 0; i < b.dim; ++i) os << b.half[i] << (i + 1 < b.dim ? "," : "");
            center_suffix();
            return os.str();
        case ConvexBody::Kind::support_samples:
            os << "support_samples:" << b.pts.size();
            return os.str();
    }
    return "";
}

}  // namespace fcap
