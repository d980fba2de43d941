#include "maskfit/errors.hpp"
#include "maskfit/synthetic.hpp"

#include <CLI11.hpp>

#include <cstdio>

using namespace maskfit;

int main(int argc, char** argv) {
    CLI::App app{"Generate the synthetic template/scan fixture set"};

    FixtureOptions opts;
    std::string out_dir = "assets";
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--grid", opts.face.grid_x, "Face grid resolution per side")
        ->check(CLI::Range(16, 512));
    app.add_option("--image-width", opts.image_width, "Scan image width");
    app.add_option("--image-height", opts.image_height, "Scan image height");

    CLI11_PARSE(app, argc, argv);
    opts.face.grid_y = opts.face.grid_x;

    try {
        write_fixture_set(out_dir, opts);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e);
    }
    std::printf("fixtures written to %s (%dx%d template grid)\n", out_dir.c_str(),
                opts.face.grid_x, opts.face.grid_y);
    return 0;
}
