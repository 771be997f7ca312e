#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qw1/errors.hpp"
#include "qw1/io.hpp"
#include "qw1/verify.hpp"

namespace {

using qw1::Json;

constexpr const char* kVersion = "qw1 0.1.0";

// ── Run manifest ─────────────────────────────────────────────────────────────
// The manifest hash covers (command, input digests, config) only, so default
// outputs stay byte-identical across reruns; timestamps live in the optional
// manifest file.

struct Manifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs; // (path, digest hex)
    Json config;
    std::string start_time;
    std::vector<std::string> outputs;

    std::string hash() const {
        std::string blob = command;
        for (const auto& [path, digest] : inputs) blob += "|" + path + ":" + digest;
        blob += "|" + config.dump();
        std::ostringstream os;
        os << std::hex << std::setw(16) << std::setfill('0')
           << qw1::fnv1a(blob.data(), blob.size());
        return os.str();
    }
};

std::string now_iso8601() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qw1::ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0')
       << qw1::fnv1a(text.data(), text.size());
    return os.str();
}

Json load_input(Manifest& man, const std::string& path) {
    man.inputs.emplace_back(path, file_digest(path));
    return qw1::load_json_file(path);
}

void emit(const Manifest& man, const std::string& manifest_path, Json payload,
          const std::string& out_path, bool to_stdout) {
    payload["manifest"] = man.hash();
    const std::string text = payload.dump(2) + "\n";
    if (!out_path.empty()) qw1::write_text_file(out_path, text);
    if (to_stdout || out_path.empty()) std::cout << text;
    if (!manifest_path.empty()) {
        Json mj;
        mj["command"] = man.command;
        Json inputs = Json::array();
        for (const auto& [p, d] : man.inputs) {
            Json e;
            e["path"] = p;
            e["digest"] = d;
            inputs.push_back(std::move(e));
        }
        mj["inputs"] = std::move(inputs);
        mj["config"] = man.config;
        mj["hash"] = man.hash();
        mj["start"] = man.start_time;
        mj["end"] = now_iso8601();
        mj["version"] = kVersion;
        Json outs = Json::array();
        for (const auto& o : man.outputs) outs.push_back(o);
        if (!out_path.empty()) outs.push_back(out_path);
        mj["outputs"] = std::move(outs);
        qw1::write_text_file(manifest_path, mj.dump(2) + "\n");
    }
}

std::vector<int> parse_sizes(const std::string& text) {
    std::vector<int> out;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        for (int n = lo; n <= hi; ++n) out.push_back(n);
        return out;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

qw1::Site parse_site(const std::string& text) {
    qw1::Site site;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) site.push_back(std::stoi(tok));
    return site;
}

Json sequence_json(const std::vector<int>& sizes, const std::vector<double>& values) {
    Json j;
    Json a = Json::array(), v = Json::array();
    for (int s : sizes) a.push_back(s);
    for (double x : values) v.push_back(x);
    j["sizes"] = std::move(a);
    j["values"] = std::move(v);
    return j;
}

std::string sequence_csv(const std::vector<int>& sizes, const std::vector<double>& values) {
    std::ostringstream os;
    os << "size,value\n";
    os << std::setprecision(17);
    for (size_t i = 0; i < values.size(); ++i) os << sizes[i] << "," << values[i] << "\n";
    return os.str();
}

} // namespace

int main(int argc, char** argv) {
    if (const char* cap = std::getenv("QW1_DIM_CAP")) {
        try {
            qw1::set_dim_cap(std::stoll(cap));
        } catch (const std::exception& e) {
            std::cerr << "error: bad QW1_DIM_CAP: " << e.what() << "\n";
            return 1;
        }
    }

    CLI::App app{"Quantum W1 distance, Lipschitz constants and inequality verification "
                 "for spin systems"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string out_path, manifest_path;
    bool json_stdout = false;
    app.add_option("--out", out_path, "output file path")->capture_default_str();
    app.add_option("--manifest", manifest_path, "write a run manifest (with timestamps)");
    app.add_flag("--json", json_stdout, "print machine-readable JSON to stdout");

    double tol = 1e-5;
    int max_iter = 200000;
    app.add_option("--tol", tol, "relative duality-gap target");
    app.add_option("--max-iter", max_iter, "ADMM iteration cap");

    // w1
    auto* w1 = app.add_subcommand("w1", "W1 norm of Delta, or distance between two states");
    std::vector<std::string> w1_files;
    w1->add_option("files", w1_files, "delta.json, or rho.json sigma.json")
        ->expected(1, 2)
        ->required();

    // lipschitz
    auto* lip = app.add_subcommand("lipschitz", "site dependence and Lipschitz constant");
    std::string lip_file, lip_site;
    bool lip_all = false;
    lip->add_option("h", lip_file, "observable JSON")->required();
    lip->add_option("--site", lip_site, "single site, comma-separated coordinates");
    lip->add_flag("--all-sites", lip_all, "report every site");

    // gibbs
    auto* gibbs = app.add_subcommand("gibbs", "local Gibbs state of an interaction");
    std::string gibbs_file;
    int gibbs_box = 2;
    gibbs->add_option("interaction", gibbs_file)->required();
    gibbs->add_option("--box", gibbs_box, "box size (number of sites)");

    // pressure
    auto* pressure = app.add_subcommand("pressure", "finite-volume log-partition per site");
    std::string pressure_file, pressure_sizes = "4..12";
    bool pressure_csv = false;
    pressure->add_option("interaction", pressure_file)->required();
    pressure->add_option("--sizes", pressure_sizes, "box sizes, e.g. 4..12 or 4,6,8");
    pressure->add_flag("--csv", pressure_csv, "emit CSV table");

    // tci
    auto* tci = app.add_subcommand("tci", "high-temperature TCI constants");
    std::string tci_file, tci_grid = "50,1000000";
    double tci_r = 0.0;
    int tci_n = 0;
    tci->add_option("interaction", tci_file)->required();
    tci->add_option("--r", tci_r, "locality weight r in the interaction norm");
    tci->add_option("--N", tci_n, "neighborhood size override");
    tci->add_option("--grid", tci_grid, "t_max,steps for the envelope grid");

    // dbar
    auto* dbar = app.add_subcommand("dbar", "Ornstein dbar finite-window sequence");
    std::vector<std::string> dbar_files;
    int dbar_amax = 3;
    dbar->add_option("processes", dbar_files, "two process JSON files")
        ->expected(2)
        ->required();
    dbar->add_option("--a-max", dbar_amax, "largest window radius");

    // scaling
    auto* scaling = app.add_subcommand("scaling", "specific W1 monotone sequence");
    std::vector<std::string> scaling_files;
    std::string scaling_pa, scaling_pb;
    int scaling_amax = 2;
    bool scaling_csv = false;
    scaling->add_option("families", scaling_files, "rho-family.json sigma-family.json")
        ->expected(0, 2);
    scaling->add_option("--process-a", scaling_pa, "stationary process for rho (diagonal)");
    scaling->add_option("--process-b", scaling_pb, "stationary process for sigma (diagonal)");
    scaling->add_option("--a-max", scaling_amax, "largest window radius");
    scaling->add_flag("--csv", scaling_csv, "emit CSV table");

    // verify
    auto* verify = app.add_subcommand("verify", "run an inequality verification suite");
    std::string verify_suite = "all", verify_sizes = "2,3";
    uint64_t verify_seed = 1;
    int verify_samples = 50, verify_threads = 0;
    verify->add_option("--suite", verify_suite, "all|entropy|transport|lattice");
    verify->add_option("--seed", verify_seed, "base seed");
    verify->add_option("--samples", verify_samples, "sample count");
    verify->add_option("--sizes", verify_sizes, "instance sizes, e.g. 2,3");
    verify->add_option("--threads", verify_threads, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    Manifest man;
    man.start_time = now_iso8601();
    qw1::SolverConfig cfg;
    cfg.tol_gap = tol;
    cfg.max_iter = max_iter;

    try {
        if (w1->parsed()) {
            man.command = "w1";
            man.config = {{"tol", tol}, {"max_iter", max_iter}};
            qw1::TransportCertificate cert;
            if (w1_files.size() == 1) {
                const auto delta = qw1::operator_from_json(load_input(man, w1_files[0]));
                cert = qw1::w1_norm(delta, cfg);
            } else {
                const auto rho = qw1::state_from_json(load_input(man, w1_files[0]));
                const auto sigma = qw1::state_from_json(load_input(man, w1_files[1]));
                cert = qw1::w1_distance(rho, sigma, cfg);
            }
            emit(man, manifest_path, qw1::certificate_to_json(cert), out_path, json_stdout);
            return cert.converged ? 0 : 2;
        }

        if (lip->parsed()) {
            man.command = "lipschitz";
            man.config = {{"tol", tol}, {"site", lip_site}, {"all_sites", lip_all}};
            const auto h = qw1::operator_from_json(load_input(man, lip_file));
            Json j;
            Json per_site = Json::array();
            double lmax = 0.0;
            std::vector<qw1::Site> targets;
            if (!lip_site.empty()) {
                const qw1::Site s = parse_site(lip_site);
                if (!h.region().contains(s)) {
                    throw qw1::RegionMismatch("lipschitz: site is not in the region");
                }
                targets.push_back(s);
            } else {
                targets = h.region().sites();
            }
            for (const auto& s : targets) {
                const auto dep = qw1::partial_dependence(h, s, cfg);
                Json e;
                Json sj = Json::array();
                for (int c : s) sj.push_back(c);
                e["site"] = std::move(sj);
                e["value"] = dep.value;
                e["lower"] = dep.lower;
                per_site.push_back(std::move(e));
                lmax = std::max(lmax, dep.value);
            }
            j["per_site"] = std::move(per_site);
            j["lipschitz"] = lmax;
            emit(man, manifest_path, std::move(j), out_path, json_stdout);
            return 0;
        }

        if (gibbs->parsed()) {
            man.command = "gibbs";
            man.config = {{"box", gibbs_box}};
            const auto phi = qw1::interaction_from_json(load_input(man, gibbs_file));
            const auto box = qw1::Region::box1d(phi.q(), gibbs_box);
            const auto omega = qw1::gibbs_local(phi, box);
            Json j;
            j["state"] = qw1::state_to_json(omega);
            j["entropy"] = qw1::vn_entropy(omega);
            j["energy"] = qw1::specific_energy_pairing(omega, phi) * gibbs_box;
            emit(man, manifest_path, std::move(j), out_path, json_stdout);
            return 0;
        }

        if (pressure->parsed()) {
            man.command = "pressure";
            man.config = {{"sizes", pressure_sizes}};
            const auto phi = qw1::interaction_from_json(load_input(man, pressure_file));
            const auto sizes = parse_sizes(pressure_sizes);
            const auto values = qw1::pressure_sequence(phi, sizes);
            if (pressure_csv) {
                const std::string csv = sequence_csv(sizes, values);
                if (!out_path.empty()) {
                    qw1::write_text_file(out_path, csv);
                } else {
                    std::cout << csv;
                }
                return 0;
            }
            emit(man, manifest_path, sequence_json(sizes, values), out_path, json_stdout);
            return 0;
        }

        if (tci->parsed()) {
            man.command = "tci";
            man.config = {{"r", tci_r}, {"N", tci_n}, {"grid", tci_grid}};
            const auto phi = qw1::interaction_from_json(load_input(man, tci_file));
            const auto grid = parse_sizes(tci_grid);
            if (grid.size() != 2) throw qw1::ParseError("tci: --grid expects t_max,steps");
            const double phi_r = qw1::phi_r_norm(phi, tci_r);
            const int n_hood = tci_n > 0 ? tci_n : qw1::interaction_neighborhood(phi);
            const auto constants = qw1::tci_constants(phi_r, n_hood, phi.q(),
                                                      static_cast<double>(grid[0]), grid[1]);
            Json j;
            j["phi_r"] = phi_r;
            j["N"] = n_hood;
            j["q"] = phi.q();
            j["commuting"] = phi.commuting();
            j["M"] = constants.M;
            j["kappa"] = constants.kappa;
            j["c"] = constants.c;
            j["t_star"] = constants.t_star;
            j["valid"] = constants.valid;
            emit(man, manifest_path, std::move(j), out_path, json_stdout);
            return 0;
        }

        if (dbar->parsed()) {
            man.command = "dbar";
            man.config = {{"a_max", dbar_amax}};
            const auto pa = qw1::process_from_json(load_input(man, dbar_files[0]));
            const auto pb = qw1::process_from_json(load_input(man, dbar_files[1]));
            const auto values = qw1::dbar_sequence(pa, pb, dbar_amax);
            std::vector<int> a_list;
            for (int a = 1; a <= dbar_amax; ++a) a_list.push_back(a);
            Json j = sequence_json(a_list, values);
            j["per_site"] = true;
            emit(man, manifest_path, std::move(j), out_path, json_stdout);
            return 0;
        }

        if (scaling->parsed()) {
            man.command = "scaling";
            man.config = {{"a_max", scaling_amax}, {"tol", tol}};
            std::vector<qw1::DensityMatrix> rho_family, sigma_family;
            if (!scaling_pa.empty() || !scaling_pb.empty()) {
                if (scaling_pa.empty() || scaling_pb.empty()) {
                    throw qw1::ParseError("scaling: both --process-a and --process-b required");
                }
                const auto pa = qw1::process_from_json(load_input(man, scaling_pa));
                const auto pb = qw1::process_from_json(load_input(man, scaling_pb));
                for (int a = 1; a <= scaling_amax; ++a) {
                    rho_family.push_back(qw1::diagonal_embed(qw1::marginal(pa, a)));
                    sigma_family.push_back(qw1::diagonal_embed(qw1::marginal(pb, a)));
                }
            } else {
                if (scaling_files.size() != 2) {
                    throw qw1::ParseError("scaling: give two family files or two processes");
                }
                for (int which = 0; which < 2; ++which) {
                    const Json fam = load_input(man, scaling_files[static_cast<size_t>(which)]);
                    auto& target = which == 0 ? rho_family : sigma_family;
                    for (const Json& m : fam.at("marginals")) {
                        target.push_back(qw1::state_from_json(m));
                    }
                }
                scaling_amax = static_cast<int>(rho_family.size());
            }
            const auto values = qw1::w1_specific_sequence(rho_family, sigma_family, cfg);
            std::vector<int> a_list;
            for (int a = 1; a <= scaling_amax; ++a) a_list.push_back(a);
            if (scaling_csv) {
                const std::string csv = sequence_csv(a_list, values);
                if (!out_path.empty()) {
                    qw1::write_text_file(out_path, csv);
                } else {
                    std::cout << csv;
                }
                return 0;
            }
            Json j = sequence_json(a_list, values);
            j["monotone_lower_estimate"] = values.empty() ? 0.0 : values.back();
            j["note"] = "supremum over window sizes; consistency of the supplied marginals "
                        "is checked, translation invariance of an infinite extension is "
                        "assumed";
            emit(man, manifest_path, std::move(j), out_path, json_stdout);
            return 0;
        }

        if (verify->parsed()) {
            man.command = "verify";
            man.config = {{"suite", verify_suite},
                          {"seed", verify_seed},
                          {"samples", verify_samples},
                          {"sizes", verify_sizes},
                          {"tol", tol}};
            const auto& names = qw1::suite_names();
            if (std::find(names.begin(), names.end(), verify_suite) == names.end()) {
                std::cerr << "error: unknown suite '" << verify_suite << "'\n";
                return 1;
            }
            qw1::SuiteOptions opt;
            opt.seed = verify_seed;
            opt.samples = verify_samples;
            opt.sizes = parse_sizes(verify_sizes);
            opt.solver = cfg;
            opt.threads = verify_threads;
            const auto report = qw1::run_suite(verify_suite, opt);
            Json j;
            j["suite"] = verify_suite;
            j["seed"] = verify_seed;
            j["samples"] = verify_samples;
            j["version"] = kVersion;
            j["failures"] = report.failures;
            Json rows = Json::array();
            for (const auto& r : report.results) rows.push_back(qw1::check_result_to_json(r));
            j["checks"] = std::move(rows);
            emit(man, manifest_path, std::move(j), out_path, json_stdout);
            std::cerr << "verify: " << report.results.size() << " checks, "
                      << report.failures << " failures\n";
            return report.failures == 0 ? 0 : 2;
        }
    } catch (const qw1::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
