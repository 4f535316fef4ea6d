fn main() {
    std::process::exit(fsort::cli::run());
}
