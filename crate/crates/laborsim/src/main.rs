fn main() {
    std::process::exit(laborsim::cli::run());
}
