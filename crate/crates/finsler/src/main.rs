fn main() {
    std::process::exit(finsler::cli::run());
}
