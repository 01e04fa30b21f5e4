#include "radial/backtest.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Writes a deterministic synthetic daily price series", "make_price_fixture"};
    std::string out_path;
    std::string start = "1989-01";
    std::size_t months = 420;
    std::uint64_t seed = 20211031;
    app.add_option("--out", out_path, "Output CSV")->required();
    app.add_option("--start", start, "First month YYYY-MM");
    app.add_option("--months", months, "Number of calendar months")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Seed");
    CLI11_PARSE(app, argc, argv);

    try {
        const radial::PriceSeries series =
            radial::synthetic_price_series(radial::YearMonth::parse(start), months, seed);
        std::ofstream file(out_path, std::ios::binary);
        if (!file) {
            std::cerr << "error: cannot open " << out_path << '\n';
            return 1;
        }
        radial::write_price_csv(file, series);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
