fn main() {
    std::process::exit(semgus::cli::run());
}
