// kahler-lab: command-line front end (subcommands filled in as modules land).
#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Kahler curvature toolkit"};
    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);
    std::cerr << "no subcommands wired up yet\n";
    return 2;
}
