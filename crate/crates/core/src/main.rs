fn main() {
    std::process::exit(heatlaw::cli::main());
}
