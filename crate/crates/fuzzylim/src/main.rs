fn main() {
    std::process::exit(fuzzylim::cli::run());
}
