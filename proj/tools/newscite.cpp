#include <CLI11.hpp>

#include "newscite/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"newscite: statement categorization and news citation discovery"};
    app.require_subcommand(1);
    // subcommands filled in below
    CLI11_PARSE(app, argc, argv);
    return 0;
}
