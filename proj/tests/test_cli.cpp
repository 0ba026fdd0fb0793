#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "glfm/cli.hpp"
#include "glfm/initial.hpp"
#include "glfm/matrix_io.hpp"
#include "glfm/refine.hpp"
#include "glfm/simbench.hpp"

using namespace glfm;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "glfm");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// Small simulated data set written in the triplet format.
class Workspace {
public:
    Workspace() : dir_(fs::temp_directory_path() / ("glfm_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(dir_);
        SimSetting s = setting_by_id(1).scaled(0.15);  // 60 x 30
        RandomStream rng(3);
        const Matrix m = generate_truth(s, rng).second;
        std::ofstream f(path("data.txt"));
        write_observed(f, generate_observation(m, s, RandomStream(4)));
    }
    ~Workspace() { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    fs::path dir_;
};

const Workspace& ws() {
    static Workspace w;
    return w;
}

}  // namespace

TEST_CASE("simulate") {
    const auto r = call({"simulate", "--setting", "1", "--scale", "0.1", "--procedures", "1,2", "--reps", "3",
                         "--seed", "7"});
    CHECK(r.code == cli::kOk);
    CHECK(lines(r.out) == 7);
    CHECK(r.out.rfind("setting,procedure,rep,seed,frob_scaled,max_norm,wall_ms,status\n", 0) == 0);
    const auto again = call({"simulate", "--setting", "1", "--scale", "0.1", "--procedures", "1,2", "--reps", "3",
                             "--seed", "7"});
    CHECK(again.out == r.out);

    const auto explicit_dims = call({"simulate", "--n", "40", "--p", "20", "--pi", "0.6", "--rank", "2",
                                     "--layout", "mixed", "--procedures", "5", "--reps", "1"});
    CHECK(explicit_dims.code == cli::kOk);
    CHECK(lines(explicit_dims.out) == 2);
}

TEST_CASE("simulate usage errors") {
    CHECK(call({"simulate", "--setting", "99"}).code == cli::kUsage);
    CHECK(call({"simulate", "--setting", "1", "--procedures", "1,9"}).code == cli::kUsage);
    CHECK(call({"simulate", "--n", "40"}).code == cli::kUsage);
    CHECK(call({"simulate", "--bogus"}).code == cli::kUsage);
    CHECK(call({}).code == cli::kUsage);
    CHECK(call({"frobnicate"}).code == cli::kUsage);
}

TEST_CASE("simulate reports partial failures") {
    const auto r = call({"simulate", "--n", "10", "--p", "6", "--pi", "0.05", "--rank", "1", "--procedures", "1,5",
                         "--reps", "1"});
    CHECK(r.code == cli::kPartial);
    CHECK(r.out.find("failed") != std::string::npos);
}

TEST_CASE("fit") {
    const auto r = call({"fit", "--data", ws().path("data.txt"), "--init", "cjmle", "--rank", "2", "--verify"});
    CHECK(r.code == cli::kOk);
    CHECK(r.err.find(" ok") != std::string::npos);
    std::istringstream in(r.out);
    const Matrix m = read_matrix_csv(in);
    CHECK(m.rows() == 60);
    CHECK(m.cols() == 30);

    const auto nbe = call({"fit", "--data", ws().path("data.txt"), "--init", "nbe", "--rank", "2", "--verify"});
    CHECK(nbe.code == cli::kOk);
    CHECK(nbe.err.find(" ok") != std::string::npos);

    CHECK(call({"fit", "--data", ws().path("missing.txt")}).code == cli::kNoInput);
    CHECK(call({"fit"}).code == cli::kUsage);
    std::ofstream(ws().path("garbage.txt")) << "3 3\ncol 0 gamma\n";
    CHECK(call({"fit", "--data", ws().path("garbage.txt")}).code == cli::kDataErr);
    CHECK(call({"fit", "--data", ws().path("data.txt"), "--rank", "40"}).code == cli::kUsage);
}

TEST_CASE("refine") {
    const std::string data = ws().path("data.txt");
    const std::string mhat = ws().path("mhat.csv");
    REQUIRE(call({"fit", "--data", data, "--init", "cjmle", "--rank", "2", "--out", mhat}).code == cli::kOk);

    const auto m1 = call({"refine", "--data", data, "--method", "1", "--mhat", mhat, "--rank", "2", "--c2", "10"});
    REQUIRE(m1.code == cli::kOk);
    std::istringstream in(m1.out);
    const Matrix refined = read_matrix_csv(in);
    RefineConfig rc;
    rc.rank = 2;
    rc.c2 = 10.0;
    const Matrix direct = refine_no_split(read_observed_file(data), read_matrix_csv_file(mhat), rc);
    CHECK((refined - direct).cwiseAbs().maxCoeff() <= 1e-12);

    const auto two = call({"refine", "--data", data, "--method", "2", "--rank", "2", "--seed", "5"});
    const auto two_prime =
        call({"refine", "--data", data, "--method", "2prime", "--tot", "1", "--rank", "2", "--seed", "5"});
    CHECK(two.code == cli::kOk);
    CHECK(two.out == two_prime.out);

    {
        std::ofstream wrong(ws().path("wrong.csv"));
        write_matrix_csv(wrong, Matrix::Zero(3, 3));
    }
    CHECK(call({"refine", "--data", data, "--method", "1", "--mhat", ws().path("wrong.csv")}).code == cli::kDataErr);
    CHECK(call({"refine", "--data", data, "--method", "3"}).code == cli::kUsage);
}

TEST_CASE("evaluate") {
    const auto r = call({"evaluate", "--data", ws().path("data.txt"), "--init", "cjmle", "--refine", "1", "--rank",
                         "2", "--seed", "3"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("\"procedure\":\"cjmle+1\"") != std::string::npos);
    CHECK(r.out.find("\"wall_ms\":0") != std::string::npos);
    CHECK(call({"evaluate", "--data", ws().path("data.txt"), "--init", "cjmle", "--rank", "2", "--seed", "3"}).out ==
          call({"evaluate", "--data", ws().path("data.txt"), "--init", "cjmle", "--rank", "2", "--seed", "3"}).out);
}

TEST_CASE("config file") {
    const std::string cfg = ws().path("run.cfg");
    std::ofstream(cfg) << "# simulation\nsetting = 1\nscale=0.2\nprocedures=5\nreps=2\nseed=4\n";
    const auto from_file = call({"simulate", "--config", cfg});
    const auto from_flags =
        call({"simulate", "--setting", "1", "--scale", "0.2", "--procedures", "5", "--reps", "2", "--seed", "4"});
    CHECK(from_file.code == cli::kOk);
    CHECK(from_file.out == from_flags.out);

    // flags win over the file
    const auto overridden = call({"simulate", "--config", cfg, "--reps", "1"});
    CHECK(lines(overridden.out) == 2);

    std::ofstream(ws().path("bad.cfg")) << "colour=blue\n";
    CHECK(call({"simulate", "--config", ws().path("bad.cfg")}).code == cli::kUsage);
    std::ofstream(ws().path("noeq.cfg")) << "setting 1\n";
    CHECK(call({"simulate", "--config", ws().path("noeq.cfg")}).code == cli::kUsage);
    CHECK(call({"simulate", "--config", ws().path("absent.cfg")}).code == cli::kNoInput);
}

TEST_CASE("reproduce") {
    const std::string summary = ws().path("summary.csv");
    const auto r = call({"reproduce", "figure1-mini", "--seed", "7", "--scale", "0.05", "--reps", "1", "--summary",
                         summary});
    // the smallest setting is 20 x 10 at this scale, where some block fits diverge
    CHECK(r.code == (r.out.find(",failed") == std::string::npos ? cli::kOk : cli::kPartial));
    CHECK(lines(r.out) == 1 + 3 * 8);
    const std::string s = slurp(summary);
    CHECK(s.rfind("setting,procedure,median_frob_scaled,median_max_norm\n", 0) == 0);
    CHECK(lines(s) == 1 + 3 * 8);
    const auto again = call({"reproduce", "figure1-mini", "--seed", "7", "--scale", "0.05", "--reps", "1",
                             "--summary", summary});
    CHECK(again.out == r.out);
    CHECK(slurp(summary) == s);

    const auto ml = call({"reproduce", "movielens-table3-row"});
    CHECK(ml.code == cli::kNoInput);
    CHECK(ml.err.find("u.data") != std::string::npos);
    CHECK(call({"reproduce", "figure9"}).code == cli::kUsage);
}

TEST_CASE("output is identical across thread counts") {
    const std::string data = ws().path("data.txt");
    const std::vector<std::vector<std::string>> commands = {
        {"simulate", "--setting", "1", "--scale", "0.1", "--procedures", "1,2,3,4,5,6,7,8", "--reps", "1"},
        {"fit", "--data", data, "--init", "nbe", "--rank", "2"},
        {"refine", "--data", data, "--method", "2prime", "--rank", "2", "--seed", "9"},
        {"evaluate", "--data", data, "--init", "nbe", "--refine", "2", "--rank", "2"},
    };
    for (const auto& cmd : commands) {
        std::vector<std::string> outputs;
        for (const char* threads : {"1", "4", "1"}) {
            auto args = cmd;
            const std::string out = ws().path(std::string("out_") + threads + ".txt");
            args.insert(args.end(), {"--threads", threads, "--out", out});
            REQUIRE(call(args).code == cli::kOk);
            outputs.push_back(slurp(out));
        }
        CHECK(!outputs[0].empty());
        CHECK(outputs[0] == outputs[1]);
        CHECK(outputs[0] == outputs[2]);
    }
}

TEST_CASE("installed tool exit codes") {
    auto status = [](const std::string& args) {
        const int raw = std::system((std::string(GLFM_TOOL_PATH) + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status("--help") == 0);
    CHECK(status("simulate --setting 99") == 64);
    CHECK(status("fit --data /nonexistent/data.txt") == 66);
}
