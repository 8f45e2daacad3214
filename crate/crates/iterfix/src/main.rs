fn main() {
    std::process::exit(iterfix::cli::run());
}
