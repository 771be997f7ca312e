#include "qw1/io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qw1/errors.hpp"

namespace qw1 {

namespace {

std::vector<Site> sites_from_json(const Json& j) {
    std::vector<Site> sites;
    for (const auto& s : j) {
        Site site;
        for (const auto& c : s) site.push_back(c.get<int>());
        sites.push_back(std::move(site));
    }
    return sites;
}

Json sites_to_json(const std::vector<Site>& sites) {
    Json out = Json::array();
    for (const Site& s : sites) {
        Json row = Json::array();
        for (int c : s) row.push_back(c);
        out.push_back(std::move(row));
    }
    return out;
}

} // namespace

Json operator_to_json(const HermitianOperator& op) {
    Json j;
    j["q"] = op.region().q();
    j["sites"] = sites_to_json(op.region().sites());
    Json re = Json::array(), im = Json::array();
    const CMatrix& m = op.matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json rre = Json::array(), rim = Json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            rre.push_back(m(i, k).real());
            rim.push_back(m(i, k).imag());
        }
        re.push_back(std::move(rre));
        im.push_back(std::move(rim));
    }
    j["re"] = std::move(re);
    j["im"] = std::move(im);
    return j;
}

HermitianOperator operator_from_json(const Json& j) {
    try {
        Region region(j.at("q").get<int>(), sites_from_json(j.at("sites")));
        const Json& re = j.at("re");
        const Json& im = j.at("im");
        const long long dim = region.dim();
        if (static_cast<long long>(re.size()) != dim ||
            static_cast<long long>(im.size()) != dim) {
            throw ParseError("operator: matrix rows do not match q^|sites|");
        }
        CMatrix m(dim, dim);
        for (long long i = 0; i < dim; ++i) {
            const Json& rre = re.at(static_cast<size_t>(i));
            const Json& rim = im.at(static_cast<size_t>(i));
            if (static_cast<long long>(rre.size()) != dim ||
                static_cast<long long>(rim.size()) != dim) {
                throw ParseError("operator: matrix row length mismatch");
            }
            for (long long k = 0; k < dim; ++k) {
                m(i, k) = Complex(rre.at(static_cast<size_t>(k)).get<double>(),
                                  rim.at(static_cast<size_t>(k)).get<double>());
            }
        }
        return HermitianOperator::from_matrix(std::move(region), std::move(m));
    } catch (const Json::exception& e) {
        throw ParseError(std::string("operator json: ") + e.what());
    }
}

Json state_to_json(const DensityMatrix& rho) { return operator_to_json(rho.op()); }

DensityMatrix state_from_json(const Json& j) {
    return DensityMatrix::from(operator_from_json(j));
}

Json certificate_to_json(const TransportCertificate& cert) {
    Json j;
    j["primal"] = cert.primal;
    j["dual"] = cert.dual;
    j["gap"] = cert.gap;
    j["iterations"] = cert.iterations;
    j["converged"] = cert.converged;
    j["witness"] = operator_to_json(cert.witness);
    Json dec = Json::array();
    for (const auto& [site, op] : cert.decomposition) {
        Json entry;
        Json s = Json::array();
        for (int c : site) s.push_back(c);
        entry["site"] = std::move(s);
        entry["op"] = operator_to_json(op);
        dec.push_back(std::move(entry));
    }
    j["decomposition"] = std::move(dec);
    return j;
}

Json distribution_to_json(const ClassicalDistribution& mu) {
    Json j;
    j["q"] = mu.region.q();
    j["sites"] = sites_to_json(mu.region.sites());
    Json probs = Json::array();
    for (Eigen::Index i = 0; i < mu.probs.size(); ++i) probs.push_back(mu.probs[i]);
    j["probs"] = std::move(probs);
    return j;
}

ClassicalDistribution distribution_from_json(const Json& j) {
    try {
        Region region(j.at("q").get<int>(), sites_from_json(j.at("sites")));
        const Json& probs = j.at("probs");
        RVector p(static_cast<Eigen::Index>(probs.size()));
        for (size_t i = 0; i < probs.size(); ++i) {
            p[static_cast<Eigen::Index>(i)] = probs.at(i).get<double>();
        }
        return ClassicalDistribution::from(std::move(region), std::move(p));
    } catch (const Json::exception& e) {
        throw ParseError(std::string("distribution json: ") + e.what());
    }
}

Json process_to_json(const StationaryProcess& proc) {
    Json j;
    j["q"] = proc.q;
    if (proc.kind == StationaryProcess::Kind::iid) {
        j["kind"] = "iid";
        Json p = Json::array();
        for (Eigen::Index i = 0; i < proc.single.size(); ++i) p.push_back(proc.single[i]);
        j["p"] = std::move(p);
    } else {
        j["kind"] = "markov";
        Json pm = Json::array();
        for (Eigen::Index i = 0; i < proc.transition.rows(); ++i) {
            Json row = Json::array();
            for (Eigen::Index k = 0; k < proc.transition.cols(); ++k) {
                row.push_back(proc.transition(i, k));
            }
            pm.push_back(std::move(row));
        }
        j["P"] = std::move(pm);
        Json pi = Json::array();
        for (Eigen::Index i = 0; i < proc.initial.size(); ++i) pi.push_back(proc.initial[i]);
        j["pi"] = std::move(pi);
    }
    return j;
}

StationaryProcess process_from_json(const Json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "iid") {
            const Json& pj = j.at("p");
            RVector p(static_cast<Eigen::Index>(pj.size()));
            for (size_t i = 0; i < pj.size(); ++i) {
                p[static_cast<Eigen::Index>(i)] = pj.at(i).get<double>();
            }
            return StationaryProcess::iid(std::move(p));
        }
        if (kind == "markov") {
            const Json& pm = j.at("P");
            const auto q = static_cast<Eigen::Index>(pm.size());
            Eigen::MatrixXd P(q, q);
            for (Eigen::Index i = 0; i < q; ++i) {
                for (Eigen::Index k = 0; k < q; ++k) {
                    P(i, k) = pm.at(static_cast<size_t>(i)).at(static_cast<size_t>(k)).get<double>();
                }
            }
            const Json& pij = j.at("pi");
            RVector pi(static_cast<Eigen::Index>(pij.size()));
            for (size_t i = 0; i < pij.size(); ++i) {
                pi[static_cast<Eigen::Index>(i)] = pij.at(i).get<double>();
            }
            return StationaryProcess::markov(std::move(P), std::move(pi));
        }
        throw ParseError("process json: unknown kind '" + kind + "'");
    } catch (const Json::exception& e) {
        throw ParseError(std::string("process json: ") + e.what());
    }
}

Json interaction_to_json(const Interaction& phi) {
    Json j;
    j["d"] = phi.spatial_dim();
    j["q"] = phi.q();
    Json terms = Json::array();
    for (const InteractionTerm& t : phi.terms()) {
        Json entry;
        entry["sites"] = sites_to_json(t.support.sites());
        entry["op"] = operator_to_json(t.op);
        terms.push_back(std::move(entry));
    }
    j["terms"] = std::move(terms);
    return j;
}

Interaction interaction_from_json(const Json& j) {
    try {
        const int d = j.at("d").get<int>();
        const int q = j.at("q").get<int>();
        std::vector<InteractionTerm> terms;
        for (const Json& entry : j.at("terms")) {
            Region support(q, sites_from_json(entry.at("sites")));
            HermitianOperator op = operator_from_json(entry.at("op"));
            if (op.region() != support) {
                throw ParseError("interaction term: op sites do not match term sites");
            }
            terms.push_back({std::move(support), std::move(op)});
        }
        return Interaction(d, q, std::move(terms));
    } catch (const Json::exception& e) {
        throw ParseError(std::string("interaction json: ") + e.what());
    }
}

Json check_result_to_json(const CheckResult& r) {
    Json j;
    j["name"] = r.name;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["slack"] = r.slack;
    j["tolerance_used"] = r.tolerance_used;
    std::ostringstream digest;
    digest << std::hex << r.inputs_digest;
    j["inputs_digest"] = digest.str();
    j["pass"] = r.pass;
    if (!r.details.empty()) {
        Json d;
        for (const auto& [k, v] : r.details) d[k] = v;
        j["details"] = std::move(d);
    }
    return j;
}

Json parse_json_text(const std::string& text, const std::string& what) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError(what + ": malformed JSON");
    return j;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << text;
}

} // namespace qw1
