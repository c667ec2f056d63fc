#include <cstdlib>
#include <string>

#include <CLI11.hpp>

#include "toruslab/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectral simulation and verification toolkit for Schrodinger "
                 "observability on 2-tori"};

    std::string config_path;
    std::string out_dir = "out";
    int threads = 0;
    bool verbose = false;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (0 = TORUSLAB_THREADS or 1)");
    app.add_flag("--verbose", verbose, "print the summary to stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (threads <= 0) {
        if (const char* env = std::getenv("TORUSLAB_THREADS"))
            threads = std::atoi(env);
        if (threads <= 0) threads = 1;
    }
    return toruslab::cli::run_config_file(config_path, out_dir, threads, verbose);
}
