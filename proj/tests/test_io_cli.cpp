#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qw1/bounds.hpp"
#include "qw1/errors.hpp"
#include "qw1/io.hpp"
#include "qw1/verify.hpp"

using namespace qw1;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "qw1_cli_tests";

struct RunResult {
    int exit_code;
    std::string out, err;
};

RunResult run_cli(const std::string& args) {
    fs::create_directories(kDir);
    const fs::path out = kDir / "stdout.txt";
    const fs::path err = kDir / "stderr.txt";
    const std::string cmd = std::string(QW1_BIN) + " " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(raw);
    std::ostringstream so, se;
    so << std::ifstream(out).rdbuf();
    se << std::ifstream(err).rdbuf();
    r.out = so.str();
    r.err = se.str();
    return r;
}

std::string write_file(const std::string& name, const std::string& text) {
    fs::create_directories(kDir);
    const fs::path p = kDir / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ostringstream s;
    s << std::ifstream(path).rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("operator json round trip keeps 1e-12 relative fidelity") {
    const Region r = Region::range1d(2, 0, 1);
    const auto h = sample_operator({31, Ensemble::gue_hamiltonian, r});
    const auto j = operator_to_json(h);
    const auto text = j.dump();
    const auto back = operator_from_json(parse_json_text(text, "test"));
    CHECK(back.region() == h.region());
    CHECK((back.matrix() - h.matrix()).cwiseAbs().maxCoeff() <= 1e-12 * h.max_abs());
}

TEST_CASE("distribution, process, interaction round trips") {
    Rng rng(4);
    const Region r = Region::range1d(3, -1, 0);
    const auto mu = ClassicalDistribution::from(r, rng.dirichlet(9));
    const auto mu2 = distribution_from_json(distribution_to_json(mu));
    CHECK((mu2.probs - mu.probs).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(mu2.region == mu.region);

    Eigen::MatrixXd flip(2, 2);
    flip << 0.8, 0.2, 0.2, 0.8;
    RVector half(2);
    half << 0.5, 0.5;
    const auto proc = StationaryProcess::markov(flip, half);
    const auto proc2 = process_from_json(process_to_json(proc));
    CHECK(proc2.kind == StationaryProcess::Kind::markov);
    CHECK((proc2.transition - flip).cwiseAbs().maxCoeff() < 1e-15);

    const auto ising = Interaction::ising_1d(0.9, 0.4);
    const auto ising2 = interaction_from_json(interaction_to_json(ising));
    CHECK(ising2.terms().size() == ising.terms().size());
    CHECK(phi_r_norm(ising2, 0.7) == doctest::Approx(phi_r_norm(ising, 0.7)));

    CHECK_THROWS_AS(parse_json_text("{not json", "x"), ParseError);
    CHECK_THROWS_AS(process_from_json(parse_json_text(R"({"kind":"weird","q":2})", "x")),
                    ParseError);
}

TEST_CASE("certificate json carries the contract fields") {
    const Region r = Region::range1d(2, 0, 0);
    RVector d(2);
    d << 1, -1;
    const auto cert = w1_norm(HermitianOperator::diagonal(r, d), {});
    const auto j = certificate_to_json(cert);
    for (const char* key :
         {"primal", "dual", "gap", "iterations", "converged", "witness", "decomposition"}) {
        CHECK(j.contains(key));
    }
    CHECK(j["primal"].get<double>() == doctest::Approx(1.0));
    CHECK(j["decomposition"].size() == 1);
}

TEST_CASE("cli: w1 on the zero operator and determinism") {
    const auto zero = HermitianOperator::zero(Region::range1d(2, 0, 1));
    const auto path = write_file("zero.json", operator_to_json(zero).dump());
    const auto cert1 = (kDir / "cert1.json").string();
    const auto cert2 = (kDir / "cert2.json").string();
    const auto r1 = run_cli("w1 " + path + " --out " + cert1);
    CHECK(r1.exit_code == 0);
    const auto j = parse_json_text(slurp(cert1), "cert");
    CHECK(j["primal"].get<double>() == doctest::Approx(0.0));
    CHECK(j["converged"].get<bool>());
    CHECK(j.contains("manifest"));

    const auto r2 = run_cli("w1 " + path + " --out " + cert2);
    CHECK(r2.exit_code == 0);
    CHECK(slurp(cert1) == slurp(cert2)); // byte-identical reruns
}

TEST_CASE("cli: malformed input and bad site exit with code 1") {
    const auto bad = write_file("bad.json", "{broken");
    const auto r = run_cli("w1 " + bad);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("malformed") != std::string::npos);

    const auto id = HermitianOperator::identity(Region::range1d(2, 0, 1));
    const auto hpath = write_file("id.json", operator_to_json(id).dump());
    const auto r2 = run_cli("lipschitz " + hpath + " --site 7");
    CHECK(r2.exit_code == 1);

    const auto r3 = run_cli("lipschitz " + hpath + " --all-sites --json");
    CHECK(r3.exit_code == 0);
    const auto lj = parse_json_text(r3.out, "lip");
    CHECK(lj["lipschitz"].get<double>() <= 1e-9);
}

TEST_CASE("cli: w1 exit code 2 on non-convergence") {
    const auto delta = sample_operator({5, Ensemble::gue_hamiltonian, Region::range1d(2, 0, 1)});
    const auto traceless =
        delta - HermitianOperator::identity(delta.region()) * (delta.trace() / 4.0);
    const auto path = write_file("delta.json", operator_to_json(traceless).dump());
    const auto cert = (kDir / "hardcert.json").string();
    const auto r = run_cli("w1 " + path + " --max-iter 2 --out " + cert);
    CHECK(r.exit_code == 2);
    const auto j = parse_json_text(slurp(cert), "cert");
    CHECK_FALSE(j["converged"].get<bool>()); // certificate still written
}

TEST_CASE("cli: pressure of the free interaction is ln q") {
    const auto phi = Interaction(1, 2, {});
    const auto path = write_file("free.json", interaction_to_json(phi).dump());
    const auto r = run_cli("pressure " + path + " --sizes 2,3 --json");
    CHECK(r.exit_code == 0);
    const auto j = parse_json_text(r.out, "pressure");
    for (const auto& v : j["values"]) {
        CHECK(v.get<double>() == doctest::Approx(std::log(2.0)));
    }
}

TEST_CASE("cli: tci constants") {
    const auto phi = Interaction::ising_1d(0.002, 0.0);
    const auto path = write_file("weak.json", interaction_to_json(phi).dump());
    const auto r = run_cli("tci " + path + " --r 0 --grid 50,100000 --json");
    CHECK(r.exit_code == 0);
    const auto j = parse_json_text(r.out, "tci");
    CHECK(j["N"].get<int>() == 3);
    CHECK(j["phi_r"].get<double>() == doctest::Approx(2.0 * 0.002));
    CHECK(j["valid"].get<bool>()); // weak coupling is in the high-temperature phase
}

TEST_CASE("cli: dbar trivial sequences and w1 agreement") {
    RVector half(2);
    half << 0.5, 0.5;
    const auto iid = StationaryProcess::iid(half);
    const auto p = write_file("iid.json", process_to_json(iid).dump());
    const auto r = run_cli("dbar " + p + " " + p + " --a-max 2 --json");
    CHECK(r.exit_code == 0);
    for (const auto& v : parse_json_text(r.out, "dbar")["values"]) {
        CHECK(v.get<double>() == doctest::Approx(0.0));
    }

    RVector all0(2), all1(2);
    all0 << 1, 0;
    all1 << 0, 1;
    const auto pa = write_file("p0.json", process_to_json(StationaryProcess::iid(all0)).dump());
    const auto pb = write_file("p1.json", process_to_json(StationaryProcess::iid(all1)).dump());
    const auto r2 = run_cli("dbar " + pa + " " + pb + " --a-max 2 --json");
    for (const auto& v : parse_json_text(r2.out, "dbar")["values"]) {
        CHECK(v.get<double>() == doctest::Approx(1.0));
    }

    // diagonal two-site case: w1 of embedded marginals equals dbar * |window|
    RVector quarter(2);
    quarter << 0.25, 0.75;
    const auto pq =
        write_file("q.json", process_to_json(StationaryProcess::iid(quarter)).dump());
    const auto rd = run_cli("dbar " + p + " " + pq + " --a-max 1 --json");
    const double per_site = parse_json_text(rd.out, "dbar")["values"][0].get<double>();
    const auto mu = diagonal_embed(marginal(iid, 1));
    const auto nu = diagonal_embed(marginal(StationaryProcess::iid(quarter), 1));
    const auto mupath = write_file("mu.json", state_to_json(mu).dump());
    const auto nupath = write_file("nu.json", state_to_json(nu).dump());
    const auto rw = run_cli("w1 " + mupath + " " + nupath + " --json");
    CHECK(rw.exit_code == 0);
    const double primal = parse_json_text(rw.out, "cert")["primal"].get<double>();
    CHECK(primal == doctest::Approx(2.0 * per_site).epsilon(1e-4));
}

TEST_CASE("cli: scaling consistency failure names the pair") {
    // hand-built inconsistent family
    Json fam_rho, fam_sigma;
    Eigen::MatrixXd flip(2, 2);
    flip << 0.9, 0.1, 0.1, 0.9;
    RVector half(2);
    half << 0.5, 0.5;
    const auto proc = StationaryProcess::markov(flip, half);
    Json rho_m = Json::array(), sig_m = Json::array();
    rho_m.push_back(state_to_json(diagonal_embed(marginal(proc, 1))));
    rho_m.push_back(state_to_json(DensityMatrix::uniform(Region::box1d(2, 4))));
    sig_m.push_back(state_to_json(diagonal_embed(marginal(proc, 1))));
    sig_m.push_back(state_to_json(diagonal_embed(marginal(proc, 2))));
    fam_rho["marginals"] = rho_m;
    fam_sigma["marginals"] = sig_m;
    const auto fr = write_file("fam_rho.json", fam_rho.dump());
    const auto fsig = write_file("fam_sigma.json", fam_sigma.dump());
    const auto r = run_cli("scaling " + fr + " " + fsig);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("marginals") != std::string::npos);
    CHECK(r.err.find("2 -> 1") != std::string::npos);

    // processes route works and is monotone
    const auto pm = write_file("markov.json", process_to_json(proc).dump());
    const auto pi = write_file("iid2.json",
                               process_to_json(StationaryProcess::iid(half)).dump());
    const auto r2 = run_cli("scaling --process-a " + pm + " --process-b " + pi +
                            " --a-max 2 --json");
    CHECK(r2.exit_code == 0);
    const auto j = parse_json_text(r2.out, "scaling");
    const auto vals = j["values"];
    CHECK(vals.size() == 2);
    CHECK(vals[1].get<double>() >= vals[0].get<double>() - 2e-5);
}

TEST_CASE("cli: verify suite control") {
    const auto empty = run_cli("verify --samples 0 --json");
    CHECK(empty.exit_code == 0);
    const auto j = parse_json_text(empty.out, "verify");
    CHECK(j["failures"].get<int>() == 0);
    CHECK(j["checks"].empty());

    const auto unknown = run_cli("verify --suite nonsense");
    CHECK(unknown.exit_code == 1);

    const auto small = run_cli("verify --suite entropy --samples 2 --sizes 2 --json");
    CHECK(small.exit_code == 0);
    const auto js = parse_json_text(small.out, "verify");
    CHECK(js["failures"].get<int>() == 0);
    CHECK(js["checks"].size() > 0);
}

TEST_CASE("cli: gibbs command") {
    const auto phi = Interaction::ising_1d(0.5, 0.0);
    const auto path = write_file("ising.json", interaction_to_json(phi).dump());
    const auto r = run_cli("gibbs " + path + " --box 2 --json");
    CHECK(r.exit_code == 0);
    const auto j = parse_json_text(r.out, "gibbs");
    const auto omega = state_from_json(j["state"]);
    const double z = 2.0 * std::exp(0.5) + 2.0 * std::exp(-0.5);
    CHECK(omega.matrix()(0, 0).real() == doctest::Approx(std::exp(-0.5) / z));
}
